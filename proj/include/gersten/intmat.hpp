#pragma once
// Dense integer matrices with exact arithmetic: Smith/Hermite normal forms,
// linear solving over Z, and the lattice calculus backing all finitely
// generated abelian group computations.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gersten {

using i64 = long long;

struct arithmetic_overflow : std::runtime_error {
    arithmetic_overflow() : std::runtime_error("integer overflow in exact arithmetic") {}
};

inline i64 chk_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) throw arithmetic_overflow();
    return r;
}
inline i64 chk_sub(i64 a, i64 b) {
    i64 r;
    if (__builtin_sub_overflow(a, b, &r)) throw arithmetic_overflow();
    return r;
}
inline i64 chk_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw arithmetic_overflow();
    return r;
}

i64 gcd_ll(i64 a, i64 b);

// Row-major dense matrix over Z. A matrix with 0 rows or columns is legal and
// represents the obvious degenerate linear map.
class IntMat {
  public:
    IntMat() = default;
    IntMat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols, 0) {}
    static IntMat identity(int n);
    static IntMat zero(int rows, int cols) { return IntMat(rows, cols); }
    static IntMat from_rows(const std::vector<std::vector<i64>>& rows);
    static IntMat col_vector(const std::vector<i64>& v);

    int rows() const { return r_; }
    int cols() const { return c_; }
    i64& at(int i, int j) { return a_[size_t(i) * c_ + j]; }
    i64 at(int i, int j) const { return a_[size_t(i) * c_ + j]; }

    bool operator==(const IntMat& o) const = default;
    bool is_zero() const;

    IntMat mul(const IntMat& o) const;
    IntMat add(const IntMat& o) const;
    IntMat negate() const;
    IntMat transpose() const;
    IntMat hcat(const IntMat& o) const;           // [this | o]
    IntMat col_slice(int from, int to) const;     // columns [from, to)
    std::vector<i64> apply(const std::vector<i64>& v) const;
    std::vector<i64> col(int j) const;

    std::string to_string() const;

  private:
    int r_ = 0, c_ = 0;
    std::vector<i64> a_;
};

struct SnfResult {
    IntMat u, d, v;  // u * m * v == d, u and v unimodular, d diagonal with d_i | d_{i+1}
};

// Smith normal form with transform tracking; total on any integer matrix.
SnfResult smith_normal_form(const IntMat& m);

// Determinant via fraction-free elimination (exact); matrix must be square.
i64 determinant(const IntMat& m);

// Inverse of a unimodular matrix (throws if not unimodular).
IntMat unimodular_inverse(const IntMat& u);

// Column-style Hermite normal form of the column span; the result is a
// canonical generating matrix (full column rank) of the lattice spanned by
// the columns of m. Zero lattice yields a (rows x 0) matrix.
IntMat lattice_hnf(const IntMat& m);

// Solve m * x = b over Z. Returns true and writes a solution into x.
bool solve_integer(const IntMat& m, const std::vector<i64>& b, std::vector<i64>* x);

// Generators of { x : m * x = 0 }.
IntMat integer_kernel(const IntMat& m);

// Lattice predicates; all arguments are generator matrices with equal row count.
bool lattice_contains(const IntMat& gens, const std::vector<i64>& v);
bool lattice_subset(const IntMat& inner, const IntMat& outer);
bool lattice_equal(const IntMat& a, const IntMat& b);
IntMat lattice_sum(const IntMat& a, const IntMat& b);
// { x : m * x \in lattice(gens) }, as a generator matrix in the source space.
IntMat lattice_preimage(const IntMat& m, const IntMat& gens);

}  // namespace gersten
