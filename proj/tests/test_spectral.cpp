#include "doctest.h"

#include <random>

#include "gersten/generators.hpp"
#include "gersten/spectral.hpp"

using namespace gersten;

namespace {

// X = Z/4 filtered by 0 < 2Z/4 < Z/4, one bounded step
ReesSystem two_step_filtration() {
    AbChainComplex C = make_ab_chain_complex({fgab_cyclic(4)}, {});
    std::vector<std::vector<IntMat>> lambda(2);
    lambda[1] = {lattice_hnf(IntMat::from_rows({{4}}))};
    lambda[0] = {lattice_hnf(IntMat::from_rows({{2}}))};
    return rees_from_filtration(C, lambda);
}

}  // namespace

TEST_CASE("two-step filtration matches the hand computation") {
    ReesSystem s = two_step_filtration();
    ReesReport rr = validate_rees(s);
    INFO((rr.failures.empty() ? std::string("ok") : rr.failures[0]));
    CHECK(rr.valid);
    CHECK(obj_desc(*s.xp(0, 0)) == "Z/2");
    CHECK(obj_desc(*s.xp(1, 0)) == "Z/4");
    CHECK(obj_desc(*s.fp(0, 0)) == "Z/2");
    CHECK(obj_desc(*s.fp(1, 0)) == "Z/2");

    CoupleData c = right_couple(s);
    CoupleReport cr = validate_couple(c);
    INFO((cr.failures.empty() ? std::string("ok") : cr.failures[0]));
    CHECK(cr.valid);

    Page e2 = page_direct(c, 2);
    CHECK(obj_desc(*e2.terms[0][0].value) == "Z/2");
    CHECK(obj_desc(*e2.terms[1][0].value) == "Z/2");

    Page e2a = page(c, 2);
    PageComparison cmp = compare_pages(c, e2a, e2);
    INFO((cmp.mismatches.empty() ? std::string("ok") : cmp.mismatches[0]));
    CHECK(cmp.isomorphic);

    AbutmentReport ab = diagonal_terms(s, 3);
    CHECK(ab.counts_reassemble);
    for (const auto& dr : ab.diagonal) CHECK(dr.match);
}

TEST_CASE("trivial tower: everything collapses") {
    AbChainComplex C = make_ab_chain_complex({fgab_cyclic(6), fgab_free(1)},
                                             {IntMat::from_rows({{2}})});
    std::vector<std::vector<IntMat>> lambda(1);
    lambda[0] = {lattice_hnf(C.term(0).rels), lattice_hnf(C.term(1).rels)};
    ReesSystem s = rees_from_filtration(C, lambda);
    CHECK(validate_rees(s).valid);
    for (int q = 0; q <= s.d + 2; ++q) {
        DegeneracyReport dr = degeneracy_check(s, q);
        CHECK(dr.agree);
        CHECK(dr.cond_i);
        CHECK(dr.collapses);
    }
}

TEST_CASE("randomized abelian towers: oracle equivalence of the two page routes") {
    std::mt19937 rng(2024);
    TowerGenOptions opt;
    opt.d = 2;
    opt.top_degree = 2;
    int checked = 0;
    for (int t = 0; t < 8; ++t) {
        ReesSystem s = random_abelian_rees(rng, opt);
        ReesReport rr = validate_rees(s);
        INFO("fixture " << t << ": " << (rr.failures.empty() ? "ok" : rr.failures[0]));
        REQUIRE(rr.valid);
        CoupleData c = right_couple(s);
        CoupleReport cr = validate_couple(c);
        INFO("couple " << t << ": " << (cr.failures.empty() ? "ok" : cr.failures[0]));
        REQUIRE(cr.valid);
        for (int n = 1; n <= 4; ++n) {
            Page a = page(c, n);
            Page b = page_direct(c, n);
            PageComparison cmp = compare_pages(c, a, b);
            INFO("page " << n << " fixture " << t << ": "
                         << (cmp.mismatches.empty() ? "ok" : cmp.mismatches[0]));
            CHECK(cmp.isomorphic);
            CHECK(page_differentials_square_to_zero(b));
        }
        ++checked;
    }
    CHECK(checked == 8);
}

TEST_CASE("randomized group towers: validation and pages") {
    std::mt19937 rng(777);
    TowerGenOptions opt;
    opt.d = 2;
    for (int t = 0; t < 6; ++t) {
        ReesSystem s = random_group_rees(rng, opt);
        ReesReport rr = validate_rees(s);
        INFO("fixture " << t << ": " << (rr.failures.empty() ? "ok" : rr.failures[0]));
        REQUIRE(rr.valid);
        CoupleData c = right_couple(s);
        CoupleData l = left_couple(s);
        CHECK(validate_couple(c).valid);
        CHECK(validate_couple(l).valid);
        for (int n = 1; n <= 3; ++n) {
            Page a = page(c, n);
            Page b = page_direct(c, n);
            PageComparison cmp = compare_pages(c, a, b);
            INFO("page " << n << ": " << (cmp.mismatches.empty() ? "ok" : cmp.mismatches[0]));
            CHECK(cmp.isomorphic);
        }
    }
}

TEST_CASE("degeneracy conditions: (i) <=> (i') <=> (ii) and (i) => (iii)") {
    std::mt19937 rng(31415);
    TowerGenOptions opt;
    opt.d = 2;
    opt.top_degree = 2;
    for (int t = 0; t < 6; ++t) {
        ReesSystem s = t % 2 ? random_group_rees(rng, opt) : random_abelian_rees(rng, opt);
        REQUIRE(validate_rees(s).valid);
        for (int q = 0; q <= s.d + 2; ++q) {
            DegeneracyReport dr = degeneracy_check(s, q);
            INFO("fixture " << t << " q=" << q << " i=" << dr.cond_i << " i'=" << dr.cond_i_prime
                            << " ii=" << dr.cond_ii << " iii=" << dr.cond_iii);
            CHECK(dr.cond_i == dr.cond_i_prime);
            CHECK(dr.cond_i == dr.cond_ii);
            if (dr.cond_i) CHECK(dr.cond_iii);
        }
    }
}

TEST_CASE("left/right pages agree on randomized systems") {
    std::mt19937 rng(999);
    TowerGenOptions opt;
    opt.d = 2;
    opt.top_degree = 2;
    for (int t = 0; t < 4; ++t) {
        ReesSystem s = t % 2 ? random_group_rees(rng, opt) : random_abelian_rees(rng, opt);
        REQUIRE(validate_rees(s).valid);
        PairPagesReport pr = couple_pair_pages(s, 3);
        INFO("fixture " << t << ": " << (pr.mismatches.empty() ? "ok" : pr.mismatches[0]));
        CHECK(pr.consistent);
    }
}

TEST_CASE("corrupted couple is pinpointed") {
    ReesSystem s = two_step_filtration();
    CoupleData c = right_couple(s);
    c.gamma_[1][0] = trivial_map(c.E_at(1, 0), c.D_at(1, 0));
    CoupleReport cr = validate_couple(c);
    CHECK_FALSE(cr.valid);
    REQUIRE(!cr.failures.empty());
    bool pinpointed = false;
    for (const auto& f : cr.failures)
        if (f.find("p=1") != std::string::npos) pinpointed = true;
    CHECK(pinpointed);
}

TEST_CASE("truncated degeneracy: e = 0 agrees with the full criterion") {
    std::mt19937 rng(555);
    TowerGenOptions opt;
    opt.d = 2;
    opt.top_degree = 2;
    for (int t = 0; t < 4; ++t) {
        ReesSystem s = random_abelian_rees(rng, opt);
        REQUIRE(validate_rees(s).valid);
        for (int q = 0; q <= s.d + 1; ++q) {
            DegeneracyReport full = degeneracy_check(s, q);
            TruncatedDegeneracyReport tr = truncated_degeneracy(s, 0, q);
            CHECK(tr.hypothesis == full.cond_i);
            if (tr.hypothesis && tr.checked) CHECK(tr.exact);
        }
    }
}
