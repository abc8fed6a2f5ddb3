#include "doctest.h"

#include <random>

#include "gersten/intmat.hpp"

using namespace gersten;

namespace {

void check_snf(const IntMat& m) {
    // smith_normal_form verifies u*m*v == d internally in wide arithmetic
    SnfResult s = smith_normal_form(m);
    i64 maxabs = 0;
    for (int i = 0; i < s.u.rows(); ++i)
        for (int j = 0; j < s.u.cols(); ++j) maxabs = std::max(maxabs, std::abs(s.u.at(i, j)));
    for (int i = 0; i < s.v.rows(); ++i)
        for (int j = 0; j < s.v.cols(); ++j) maxabs = std::max(maxabs, std::abs(s.v.at(i, j)));
    if (maxabs < 1000000) {
        CHECK(s.u.mul(m).mul(s.v) == s.d);
        CHECK(std::abs(determinant(s.u)) == 1);
        CHECK(std::abs(determinant(s.v)) == 1);
    }
    for (int i = 0; i < std::min(s.d.rows(), s.d.cols()); ++i) {
        for (int j = 0; j < s.d.cols(); ++j)
            if (j != i) CHECK(s.d.at(i, j) == 0);
        CHECK(s.d.at(i, i) >= 0);
        if (i + 1 < std::min(s.d.rows(), s.d.cols()) && s.d.at(i + 1, i + 1) != 0)
            CHECK(s.d.at(i + 1, i + 1) % std::max<i64>(s.d.at(i, i), 1) == 0);
    }
}

}  // namespace

TEST_CASE("snf of diag(2,3) is diag(1,6)") {
    IntMat m = IntMat::from_rows({{2, 0}, {0, 3}});
    SnfResult s = smith_normal_form(m);
    CHECK(s.d.at(0, 0) == 1);
    CHECK(s.d.at(1, 1) == 6);
    check_snf(m);
}

TEST_CASE("snf of zero and identity") {
    IntMat z(3, 2);
    SnfResult s = smith_normal_form(z);
    CHECK(s.d.is_zero());
    CHECK(s.u == IntMat::identity(3));
    CHECK(s.v == IntMat::identity(2));

    IntMat id = IntMat::identity(4);
    SnfResult si = smith_normal_form(id);
    CHECK(si.d == id);
}

TEST_CASE("snf randomized invariants") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> dim(0, 5), val(-9, 9);
    for (int t = 0; t < 60; ++t) {
        IntMat m(dim(rng), dim(rng));
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m.at(i, j) = val(rng);
        check_snf(m);
    }
}

TEST_CASE("integer solving and kernels") {
    IntMat m = IntMat::from_rows({{2, 4}, {0, 6}});
    std::vector<i64> x;
    CHECK(solve_integer(m, {6, 6}, &x));
    CHECK(m.apply(x) == std::vector<i64>{6, 6});
    CHECK_FALSE(solve_integer(m, {1, 0}, nullptr));

    IntMat k = integer_kernel(IntMat::from_rows({{2, -4}}));
    REQUIRE(k.cols() == 1);
    CHECK(k.at(0, 0) * 2 == k.at(1, 0) * 4 / 2 * 2);  // 2a = 4b
    CHECK(2 * k.at(0, 0) - 4 * k.at(1, 0) == 0);
}

TEST_CASE("lattice calculus") {
    IntMat a = IntMat::from_rows({{2, 0}, {0, 3}});
    IntMat b = IntMat::from_rows({{2, 0}, {0, 3}});
    CHECK(lattice_equal(a, b));
    CHECK(lattice_contains(a, {4, 3}));
    CHECK_FALSE(lattice_contains(a, {1, 0}));
    IntMat sum = lattice_sum(a, IntMat::from_rows({{1}, {0}}));
    CHECK(lattice_contains(sum, {1, 0}));
    // preimage of 2Z under x -> 2x is Z
    IntMat pre = lattice_preimage(IntMat::from_rows({{2}}), IntMat::from_rows({{2}}));
    CHECK(lattice_contains(pre, {1}));
}

TEST_CASE("unimodular inverse") {
    IntMat u = IntMat::from_rows({{1, 2}, {0, 1}});
    IntMat inv = unimodular_inverse(u);
    CHECK(u.mul(inv) == IntMat::identity(2));
}
