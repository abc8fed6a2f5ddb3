#include "gersten/intmat.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace gersten {

i64 gcd_ll(i64 a, i64 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

IntMat IntMat::identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMat IntMat::from_rows(const std::vector<std::vector<i64>>& rows) {
    if (rows.empty()) return IntMat(0, 0);
    IntMat m(int(rows.size()), int(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i) {
        if (int(rows[i].size()) != m.cols()) throw std::invalid_argument("ragged matrix rows");
        for (int j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

IntMat IntMat::col_vector(const std::vector<i64>& v) {
    IntMat m(int(v.size()), 1);
    for (int i = 0; i < m.rows(); ++i) m.at(i, 0) = v[i];
    return m;
}

bool IntMat::is_zero() const {
    for (i64 x : a_)
        if (x != 0) return false;
    return true;
}

IntMat IntMat::mul(const IntMat& o) const {
    if (c_ != o.r_) throw std::invalid_argument("matrix product shape mismatch");
    IntMat res(r_, o.c_);
    for (int i = 0; i < r_; ++i)
        for (int k = 0; k < c_; ++k) {
            i64 x = at(i, k);
            if (x == 0) continue;
            for (int j = 0; j < o.c_; ++j)
                res.at(i, j) = chk_add(res.at(i, j), chk_mul(x, o.at(k, j)));
        }
    return res;
}

IntMat IntMat::add(const IntMat& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("matrix sum shape mismatch");
    IntMat res(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) res.a_[i] = chk_add(a_[i], o.a_[i]);
    return res;
}

IntMat IntMat::negate() const {
    IntMat res(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) res.a_[i] = chk_sub(0, a_[i]);
    return res;
}

IntMat IntMat::transpose() const {
    IntMat res(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) res.at(j, i) = at(i, j);
    return res;
}

IntMat IntMat::hcat(const IntMat& o) const {
    if (r_ != o.r_) throw std::invalid_argument("hcat row mismatch");
    IntMat res(r_, c_ + o.c_);
    for (int i = 0; i < r_; ++i) {
        for (int j = 0; j < c_; ++j) res.at(i, j) = at(i, j);
        for (int j = 0; j < o.c_; ++j) res.at(i, c_ + j) = o.at(i, j);
    }
    return res;
}

IntMat IntMat::col_slice(int from, int to) const {
    IntMat res(r_, to - from);
    for (int i = 0; i < r_; ++i)
        for (int j = from; j < to; ++j) res.at(i, j - from) = at(i, j);
    return res;
}

std::vector<i64> IntMat::apply(const std::vector<i64>& v) const {
    if (int(v.size()) != c_) throw std::invalid_argument("apply shape mismatch");
    std::vector<i64> res(r_, 0);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j)
            if (at(i, j) != 0 && v[j] != 0) res[i] = chk_add(res[i], chk_mul(at(i, j), v[j]));
    return res;
}

std::vector<i64> IntMat::col(int j) const {
    std::vector<i64> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = at(i, j);
    return v;
}

std::string IntMat::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < r_; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < c_; ++j) os << (j ? " " : "") << at(i, j);
    }
    os << "]";
    return os.str();
}

namespace {

using i128 = __int128;

i128 abs128(i128 x) { return x < 0 ? -x : x; }

i128 chk_add128(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw arithmetic_overflow();
    return r;
}
i128 chk_mul128(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw arithmetic_overflow();
    return r;
}

// SNF runs in 128-bit internally: the transform matrices can transiently grow
// well past the inputs even when the final answer is small.
struct Mat128 {
    int r = 0, c = 0;
    std::vector<i128> a;
    Mat128(int rows, int cols) : r(rows), c(cols), a(size_t(rows) * cols, 0) {}
    static Mat128 from(const IntMat& m) {
        Mat128 w(m.rows(), m.cols());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) w.at(i, j) = m.at(i, j);
        return w;
    }
    static Mat128 identity(int n) {
        Mat128 w(n, n);
        for (int i = 0; i < n; ++i) w.at(i, i) = 1;
        return w;
    }
    i128& at(int i, int j) { return a[size_t(i) * c + j]; }
    i128 at(int i, int j) const { return a[size_t(i) * c + j]; }
    IntMat narrow() const {
        IntMat m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) {
                i128 x = at(i, j);
                if (x > std::numeric_limits<i64>::max() || x < std::numeric_limits<i64>::min())
                    throw arithmetic_overflow();
                m.at(i, j) = i64(x);
            }
        return m;
    }
};

struct SnfWork {
    Mat128 d, u, v;

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < d.c; ++k) std::swap(d.at(i, k), d.at(j, k));
        for (int k = 0; k < u.c; ++k) std::swap(u.at(i, k), u.at(j, k));
    }
    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < d.r; ++k) std::swap(d.at(k, i), d.at(k, j));
        for (int k = 0; k < v.r; ++k) std::swap(v.at(k, i), v.at(k, j));
    }
    void addmul_row(int dst, int src, i128 q) {  // row_dst += q * row_src
        if (q == 0) return;
        for (int k = 0; k < d.c; ++k) d.at(dst, k) = chk_add128(d.at(dst, k), chk_mul128(q, d.at(src, k)));
        for (int k = 0; k < u.c; ++k) u.at(dst, k) = chk_add128(u.at(dst, k), chk_mul128(q, u.at(src, k)));
    }
    void addmul_col(int dst, int src, i128 q) {
        if (q == 0) return;
        for (int k = 0; k < d.r; ++k) d.at(k, dst) = chk_add128(d.at(k, dst), chk_mul128(q, d.at(k, src)));
        for (int k = 0; k < v.r; ++k) v.at(k, dst) = chk_add128(v.at(k, dst), chk_mul128(q, v.at(k, src)));
    }
    void negate_row(int i) {
        for (int k = 0; k < d.c; ++k) d.at(i, k) = -d.at(i, k);
        for (int k = 0; k < u.c; ++k) u.at(i, k) = -u.at(i, k);
    }
};

// Locate the entry of minimal nonzero absolute value in the trailing block;
// pivoting on small entries keeps coefficient growth in check.
bool min_pivot(const Mat128& d, int t, int* pi, int* pj) {
    i128 best = 0;
    bool found = false;
    for (int i = t; i < d.r; ++i)
        for (int j = t; j < d.c; ++j) {
            i128 x = abs128(d.at(i, j));
            if (x != 0 && (!found || x < best)) {
                best = x;
                *pi = i;
                *pj = j;
                found = true;
            }
        }
    return found;
}

}  // namespace

SnfResult smith_normal_form(const IntMat& m) {
    SnfWork w{Mat128::from(m), Mat128::identity(m.rows()), Mat128::identity(m.cols())};
    int n = std::min(m.rows(), m.cols());
    // phase 1: diagonalize by Euclidean elimination on min pivots
    for (int t = 0; t < n; ++t) {
        int pi, pj;
        if (!min_pivot(w.d, t, &pi, &pj)) break;
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        for (;;) {
            bool dirty = false;
            for (int i = t + 1; i < w.d.r; ++i) {
                if (w.d.at(i, t) == 0) continue;
                i128 q = w.d.at(i, t) / w.d.at(t, t);
                w.addmul_row(i, t, -q);
                if (w.d.at(i, t) != 0) {  // remainder smaller than pivot: swap up and restart
                    w.swap_rows(t, i);
                    dirty = true;
                }
            }
            for (int j = t + 1; j < w.d.c; ++j) {
                if (w.d.at(t, j) == 0) continue;
                i128 q = w.d.at(t, j) / w.d.at(t, t);
                w.addmul_col(j, t, -q);
                if (w.d.at(t, j) != 0) {
                    w.swap_cols(t, j);
                    dirty = true;
                }
            }
            if (!dirty) break;
        }
    }
    // phase 2: bubble the divisibility chain with 2x2 block operations
    auto clear_2x2 = [&](int i) {
        for (;;) {
            if (w.d.at(i + 1, i) != 0) {
                if (w.d.at(i, i) == 0 ||
                    abs128(w.d.at(i + 1, i)) < abs128(w.d.at(i, i)))
                    w.swap_rows(i, i + 1);
                if (w.d.at(i + 1, i) != 0) {
                    i128 q = w.d.at(i + 1, i) / w.d.at(i, i);
                    w.addmul_row(i + 1, i, -q);
                }
                continue;
            }
            if (w.d.at(i, i + 1) != 0) {
                if (w.d.at(i, i) == 0 ||
                    abs128(w.d.at(i, i + 1)) < abs128(w.d.at(i, i)))
                    w.swap_cols(i, i + 1);
                if (w.d.at(i, i + 1) != 0) {
                    i128 q = w.d.at(i, i + 1) / w.d.at(i, i);
                    w.addmul_col(i + 1, i, -q);
                }
                continue;
            }
            break;
        }
    };
    for (bool ok = false; !ok;) {
        ok = true;
        for (int i = 0; i + 1 < n; ++i) {
            i128 a = w.d.at(i, i), b = w.d.at(i + 1, i + 1);
            if (a == 0 && b != 0) {
                w.swap_rows(i, i + 1);
                w.swap_cols(i, i + 1);
                ok = false;
            } else if (a != 0 && b % a != 0) {
                w.addmul_col(i, i + 1, 1);
                clear_2x2(i);
                ok = false;
            }
        }
    }
    for (int t = 0; t < n; ++t)
        if (w.d.at(t, t) < 0) w.negate_row(t);
    // verify u*m*v == d in wide arithmetic before returning
    {
        Mat128 um(w.u.r, m.cols());
        for (int i = 0; i < w.u.r; ++i)
            for (int k = 0; k < m.rows(); ++k) {
                i128 x = w.u.at(i, k);
                if (x == 0) continue;
                for (int j = 0; j < m.cols(); ++j)
                    um.at(i, j) = chk_add128(um.at(i, j), chk_mul128(x, m.at(k, j)));
            }
        for (int i = 0; i < w.d.r; ++i)
            for (int j = 0; j < w.d.c; ++j) {
                i128 acc = 0;
                for (int k = 0; k < um.c; ++k)
                    acc = chk_add128(acc, chk_mul128(um.at(i, k), w.v.at(k, j)));
                if (acc != w.d.at(i, j)) throw std::logic_error("smith normal form verification failed");
            }
    }
    return {w.u.narrow(), w.d.narrow(), w.v.narrow()};
}

i64 determinant(const IntMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    int n = m.rows();
    if (n == 0) return 1;
    // Bareiss fraction-free elimination in 128-bit intermediates.
    std::vector<__int128> a(size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[size_t(i) * n + j] = m.at(i, j);
    __int128 prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[size_t(k) * n + k] == 0) {
            int s = -1;
            for (int i = k + 1; i < n; ++i)
                if (a[size_t(i) * n + k] != 0) {
                    s = i;
                    break;
                }
            if (s < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(a[size_t(k) * n + j], a[size_t(s) * n + j]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                __int128 num = a[size_t(i) * n + j] * a[size_t(k) * n + k] -
                               a[size_t(i) * n + k] * a[size_t(k) * n + j];
                a[size_t(i) * n + j] = num / prev;
            }
        prev = a[size_t(k) * n + k];
    }
    __int128 det = a[size_t(n - 1) * n + (n - 1)] * sign;
    if (det > std::numeric_limits<i64>::max() || det < std::numeric_limits<i64>::min())
        throw arithmetic_overflow();
    return i64(det);
}

IntMat unimodular_inverse(const IntMat& u) {
    SnfResult s = smith_normal_form(u);
    if (s.d != IntMat::identity(u.rows())) throw std::invalid_argument("matrix is not unimodular");
    // u^-1 = V U; multiply in wide arithmetic, the entries must narrow
    Mat128 prod(s.v.rows(), s.u.cols());
    for (int i = 0; i < s.v.rows(); ++i)
        for (int k = 0; k < s.v.cols(); ++k) {
            i128 x = s.v.at(i, k);
            if (x == 0) continue;
            for (int j = 0; j < s.u.cols(); ++j)
                prod.at(i, j) = chk_add128(prod.at(i, j), chk_mul128(x, i128(s.u.at(k, j))));
        }
    return prod.narrow();
}

IntMat lattice_hnf(const IntMat& m) {
    // Column operations only (right-unimodular), canonical lower echelon.
    IntMat d = m;
    IntMat dummy = IntMat::identity(0);
    int row = 0, piv = 0;
    while (row < d.rows() && piv < d.cols()) {
        // gcd-reduce the entries of this row across columns piv..end
        for (;;) {
            int best = -1;
            i64 bv = 0;
            for (int j = piv; j < d.cols(); ++j) {
                i64 x = d.at(row, j) < 0 ? -d.at(row, j) : d.at(row, j);
                if (x != 0 && (best < 0 || x < bv)) {
                    best = j;
                    bv = x;
                }
            }
            if (best < 0) break;
            // swap best into pivot column
            if (best != piv)
                for (int k = 0; k < d.rows(); ++k) std::swap(d.at(k, piv), d.at(k, best));
            bool clean = true;
            for (int j = piv + 1; j < d.cols(); ++j) {
                if (d.at(row, j) == 0) continue;
                i64 q = d.at(row, j) / d.at(row, piv);
                for (int k = 0; k < d.rows(); ++k)
                    d.at(k, j) = chk_sub(d.at(k, j), chk_mul(q, d.at(k, piv)));
                if (d.at(row, j) != 0) clean = false;
            }
            if (clean) break;
        }
        if (d.at(row, piv) != 0) {
            if (d.at(row, piv) < 0)
                for (int k = 0; k < d.rows(); ++k) d.at(k, piv) = chk_sub(0, d.at(k, piv));
            // reduce earlier columns against this pivot for canonicity
            for (int j = 0; j < piv; ++j) {
                i64 q = d.at(row, j) / d.at(row, piv);
                if (d.at(row, j) - q * d.at(row, piv) < 0) q -= 1;  // floor division
                if (q)
                    for (int k = 0; k < d.rows(); ++k)
                        d.at(k, j) = chk_sub(d.at(k, j), chk_mul(q, d.at(k, piv)));
            }
            ++piv;
        }
        ++row;
    }
    return d.col_slice(0, piv);
}

bool solve_integer(const IntMat& m, const std::vector<i64>& b, std::vector<i64>* x) {
    SnfResult s = smith_normal_form(m);
    std::vector<i64> c = s.u.apply(b);
    int n = std::min(m.rows(), m.cols());
    std::vector<i64> y(m.cols(), 0);
    for (int i = 0; i < m.rows(); ++i) {
        i64 d = i < n ? s.d.at(i, i) : 0;
        if (d == 0) {
            if (c[i] != 0) return false;
        } else {
            if (c[i] % d != 0) return false;
            if (i < m.cols()) y[i] = c[i] / d;
        }
    }
    if (x) *x = s.v.apply(y);
    return true;
}

IntMat integer_kernel(const IntMat& m) {
    SnfResult s = smith_normal_form(m);
    int n = std::min(m.rows(), m.cols());
    std::vector<int> free_cols;
    for (int j = 0; j < m.cols(); ++j)
        if (j >= n || s.d.at(j, j) == 0) free_cols.push_back(j);
    IntMat k(m.cols(), int(free_cols.size()));
    for (int t = 0; t < int(free_cols.size()); ++t)
        for (int i = 0; i < m.cols(); ++i) k.at(i, t) = s.v.at(i, free_cols[t]);
    return lattice_hnf(k);  // normalized generators keep later arithmetic small
}

bool lattice_contains(const IntMat& gens, const std::vector<i64>& v) {
    return solve_integer(gens, v, nullptr);
}

bool lattice_subset(const IntMat& inner, const IntMat& outer) {
    for (int j = 0; j < inner.cols(); ++j)
        if (!lattice_contains(outer, inner.col(j))) return false;
    return true;
}

bool lattice_equal(const IntMat& a, const IntMat& b) {
    return lattice_hnf(a) == lattice_hnf(b);
}

IntMat lattice_sum(const IntMat& a, const IntMat& b) {
    return lattice_hnf(a.hcat(b));
}

IntMat lattice_preimage(const IntMat& m, const IntMat& gens) {
    // x in preimage iff exists y with m x - gens y = 0
    IntMat stacked = m.hcat(gens.negate());
    IntMat k = integer_kernel(stacked);
    IntMat proj(m.cols(), k.cols());
    for (int i = 0; i < m.cols(); ++i)
        for (int j = 0; j < k.cols(); ++j) proj.at(i, j) = k.at(i, j);
    return lattice_hnf(proj);
}

}  // namespace gersten
