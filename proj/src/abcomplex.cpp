#include "gersten/abcomplex.hpp"

namespace gersten {

const FgAb& AbChainComplex::term(int n) const {
    static const FgAb zero = fgab_free(0);
    if (n < 0 || n > top()) return zero;
    return terms[size_t(n)];
}

IntMat AbChainComplex::d_into(int n) const {
    if (n < 0 || n >= top()) return IntMat(term(n).ngens, term(n + 1).ngens);
    return d[size_t(n)];
}

AbChainComplex make_ab_chain_complex(std::vector<FgAb> terms, std::vector<IntMat> d) {
    AbChainComplex c{std::move(terms), std::move(d)};
    validate_ab_chain_complex(c);
    return c;
}

void validate_ab_chain_complex(const AbChainComplex& c) {
    if (c.terms.empty()) throw engine_error("empty chain complex");
    if (c.d.size() + 1 != c.terms.size()) throw engine_error("differential count mismatch");
    for (int n = 0; n < c.top(); ++n) {
        const IntMat& m = c.d[size_t(n)];
        if (m.rows() != c.term(n).ngens || m.cols() != c.term(n + 1).ngens)
            throw engine_error("chain differential shape mismatch");
        // well-defined on presentations
        IntMat moved = m.mul(c.term(n + 1).rels);
        for (int j = 0; j < moved.cols(); ++j)
            if (!lattice_contains(c.term(n).rels, moved.col(j)))
                throw engine_error("chain differential breaks relations");
    }
    for (int n = 0; n + 1 < c.top(); ++n) {
        IntMat dd = c.d[size_t(n)].mul(c.d[size_t(n + 1)]);
        for (int j = 0; j < dd.cols(); ++j)
            if (!lattice_contains(c.term(n).rels, dd.col(j)))
                throw engine_error("d d != 0 in chain complex");
    }
}

void validate_ab_chain_map(const AbChainComplex& src, const AbChainComplex& dst,
                           const AbChainMap& f) {
    int top = std::max(src.top(), dst.top());
    if (int(f.comps.size()) <= top) throw engine_error("chain map missing components");
    for (int n = 0; n <= top; ++n) {
        const IntMat& m = f.comps[size_t(n)];
        if (m.rows() != dst.term(n).ngens || m.cols() != src.term(n).ngens)
            throw engine_error("chain map shape mismatch");
        IntMat moved = m.mul(src.term(n).rels);
        for (int j = 0; j < moved.cols(); ++j)
            if (!lattice_contains(dst.term(n).rels, moved.col(j)))
                throw engine_error("chain map breaks relations");
    }
    for (int n = 0; n < top; ++n) {
        IntMat lhs = f.comps[size_t(n)].mul(src.d_into(n));
        IntMat rhs = dst.d_into(n).mul(f.comps[size_t(n + 1)]);
        IntMat diff = lhs.add(rhs.negate());
        for (int j = 0; j < diff.cols(); ++j)
            if (!lattice_contains(dst.term(n).rels, diff.col(j)))
                throw engine_error("chain map does not commute with d");
    }
}

HomologyData homology_at(const AbChainComplex& c, int n) {
    const FgAb& cn = c.term(n);
    ObjPtr parent = make_obj(cn);
    // cycles: x with d(x) in rels of the target
    IntMat dout = n >= 1 ? c.d[size_t(n - 1)] : IntMat(c.term(n - 1).ngens, cn.ngens);
    if (n == 0) dout = IntMat(0, cn.ngens);
    IntMat cycles = lattice_preimage(dout, n >= 1 ? c.term(n - 1).rels : IntMat(dout.rows(), 0));
    // boundaries: image of d_into + relations
    IntMat bnd = lattice_sum(c.d_into(n), cn.rels);
    SubqCert cert;
    cert.sub = subobj_from_lattice(cn, cycles);
    cert.collapse = bnd;
    SubqMaterialized mat = materialize_subq(parent, cert);
    return {std::move(cert), std::move(mat), parent};
}

Map induced_on_homology(const AbChainComplex& src, const AbChainComplex& dst, const AbChainMap& f,
                        int n, const HomologyData& hsrc, const HomologyData& hdst) {
    (void)src;
    (void)dst;
    const auto& hs = std::get<FgAb>(*hsrc.mat.obj);
    IntMat m(std::get<FgAb>(*hdst.mat.obj).ngens, hs.ngens);
    for (int j = 0; j < hs.ngens; ++j) {
        std::vector<i64> e(hs.ngens, 0);
        e[j] = 1;
        std::vector<i64> lifted = subq_lift_vec(std::get<FgAb>(*hsrc.parent), hsrc.mat, e);
        std::vector<i64> moved = f.comps.at(size_t(n)).apply(lifted);
        std::vector<i64> cls = subq_project_vec(std::get<FgAb>(*hdst.parent), hdst.mat, moved);
        for (int i = 0; i < m.rows(); ++i) m.at(i, j) = cls[size_t(i)];
    }
    return make_ab_hom(hsrc.mat.obj, hdst.mat.obj, m);
}

Map connecting_on_homology(const AbChainComplex& a, const AbChainComplex& b,
                           const AbChainComplex& cc, const AbChainMap& incl, const AbChainMap& proj,
                           const HomologyData& hc, const HomologyData& ha_lower, int n) {
    // z in H_n(C): lift through proj to b_n, apply d, pull back through incl
    const auto& hcg = std::get<FgAb>(*hc.mat.obj);
    IntMat m(std::get<FgAb>(*ha_lower.mat.obj).ngens, hcg.ngens);
    const FgAb& bn = b.term(n);
    const FgAb& bn1 = b.term(n - 1);
    const FgAb& an1 = a.term(n - 1);
    for (int j = 0; j < hcg.ngens; ++j) {
        std::vector<i64> e(hcg.ngens, 0);
        e[j] = 1;
        std::vector<i64> z = subq_lift_vec(std::get<FgAb>(*hc.parent), hc.mat, e);
        // lift through proj: solve proj_n * y = z  (mod rels of C_n)
        IntMat sys = proj.comps[size_t(n)].hcat(cc.term(n).rels);
        std::vector<i64> sol;
        if (!solve_integer(sys, z, &sol)) throw engine_error("projection lift failed in snake");
        std::vector<i64> y(sol.begin(), sol.begin() + bn.ngens);
        std::vector<i64> dy = b.d_into(n - 1).apply(y);
        (void)bn1;
        // pull back through incl: solve incl_{n-1} * w = dy (mod rels of B_{n-1})
        IntMat sys2 = incl.comps[size_t(n - 1)].hcat(b.term(n - 1).rels);
        std::vector<i64> sol2;
        if (!solve_integer(sys2, dy, &sol2)) throw engine_error("inclusion pullback failed in snake");
        std::vector<i64> w(sol2.begin(), sol2.begin() + an1.ngens);
        std::vector<i64> cls = subq_project_vec(std::get<FgAb>(*ha_lower.parent), ha_lower.mat, w);
        for (int i = 0; i < m.rows(); ++i) m.at(i, j) = cls[size_t(i)];
    }
    return make_ab_hom(hc.mat.obj, ha_lower.mat.obj, m);
}

KernelComplex kernel_complex(const AbChainComplex& src, const AbChainComplex& dst,
                             const AbChainMap& f) {
    validate_ab_chain_map(src, dst, f);
    int top = src.top();
    std::vector<FgAb> terms;
    std::vector<IntMat> bases;
    for (int n = 0; n <= top; ++n) {
        const FgAb& sn = src.term(n);
        IntMat ker = lattice_preimage(f.comps[size_t(n)], dst.term(n).rels);
        IntMat basis = lattice_hnf(ker);
        IntMat rel = lattice_preimage(basis, sn.rels);
        terms.push_back(make_fgab(basis.cols(), rel));
        bases.push_back(basis);
    }
    std::vector<IntMat> d;
    for (int n = 0; n < top; ++n) {
        // d restricted to the kernel: solve basis_n * y = d * basis_{n+1} col by col
        IntMat moved = src.d_into(n).mul(bases[size_t(n + 1)]);
        IntMat sys = bases[size_t(n)].hcat(src.term(n).rels);
        IntMat dk(terms[size_t(n)].ngens, terms[size_t(n + 1)].ngens);
        for (int j = 0; j < moved.cols(); ++j) {
            std::vector<i64> sol;
            if (!solve_integer(sys, moved.col(j), &sol))
                throw engine_error("kernel complex differential does not restrict");
            for (int i = 0; i < dk.rows(); ++i) dk.at(i, j) = sol[size_t(i)];
        }
        d.push_back(dk);
    }
    AbChainComplex k = make_ab_chain_complex(std::move(terms), std::move(d));
    AbChainMap incl;
    for (int n = 0; n <= top; ++n) incl.comps.push_back(bases[size_t(n)]);
    return {std::move(k), std::move(incl)};
}

}  // namespace gersten
