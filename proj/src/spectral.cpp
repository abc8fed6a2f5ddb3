#include "gersten/spectral.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace gersten {

namespace {

std::string at_pq(int p, int h) {
    return "(p=" + std::to_string(p) + ",q=" + std::to_string(p + h) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// CoupleData accessors

ObjPtr CoupleData::trivial_term(int h) const {
    if (abelian_flavor) return trivial_ab();
    if (h == 0) return trivial_pointed_set();
    if (h == 1) return trivial_group();
    return trivial_ab();
}

ObjPtr CoupleData::D_at(int p, int h) const {
    if (h < 0 || h > nmax) return trivial_term(std::max(h, 0));
    int dmax = int(D.size()) - 1;
    if (p < 0) return trivial_term(h);
    if (p > dmax) return stable_beyond ? D[size_t(dmax)][size_t(h)] : trivial_term(h);
    return D[size_t(p)][size_t(h)];
}

ObjPtr CoupleData::E_at(int p, int h) const {
    if (h < 0 || h > nmax || p < 0 || p > int(E.size()) - 1) return trivial_term(std::max(h, 0));
    return E[size_t(p)][size_t(h)];
}

Map CoupleData::alpha_at(int p, int h) const {
    if (h < 0 || h > nmax) return trivial_map(D_at(p, h), D_at(p - 1, h));
    int dmax = int(D.size()) - 1;
    if (p <= 0) return trivial_map(D_at(p, h), D_at(p - 1, h));
    if (p > dmax) {
        if (stable_beyond) return identity_map(D_at(dmax, h));
        return trivial_map(D_at(p, h), D_at(p - 1, h));
    }
    return alpha_[size_t(p)][size_t(h)];
}

Map CoupleData::beta_at(int p, int h) const {
    int dmax = int(D.size()) - 1;
    int tp = p + (left ? 0 : degree);
    int th = left ? h : h - 1;
    if ((left ? h < 0 : h < 1) || h > nmax || p < 0 || p > dmax)
        return trivial_map(D_at(p, h), E_at(tp, th));
    return beta_[size_t(p)][size_t(h)];
}

Map CoupleData::gamma_at(int p, int h) const {
    if (left) {
        // left couples: gamma is the boundary E(p,h) -> D(p+1,h-1)
        if (h < 1 || h > nmax || p < 0 || p > int(E.size()) - 1)
            return trivial_map(E_at(p, h), D_at(p + 1, h - 1));
        return gamma_[size_t(p)][size_t(h)];
    }
    if (h < 0 || h > nmax || p < 0 || p > int(E.size()) - 1)
        return trivial_map(E_at(p, h), D_at(p, h));
    return gamma_[size_t(p)][size_t(h)];
}

Map CoupleData::alpha_power_into(int p, int h, int s) const {
    Map m = identity_map(D_at(p + s, h));
    for (int k = p + s; k > p; --k) m = compose(alpha_at(k, h), m);
    return m;
}

const Action* CoupleData::row_action_at(int p) const {
    if (p < 0 || p >= int(row_action.size())) return nullptr;
    return &row_action[size_t(p)];
}

Map CoupleData::differential_at(int p, int h) const {
    if (left) return compose(beta_at(p + 1, h - 1), gamma_at(p, h));
    return compose(beta_at(p, h), gamma_at(p, h));
}

void init_anchors(CoupleData& c) {
    int P = int(c.E.size()) - 1, N = c.nmax;
    c.base_E = c.E;
    c.e_anchor.assign(size_t(P) + 1, std::vector<SubqCert>(size_t(N) + 1));
    c.e_basis.assign(size_t(P) + 1, std::vector<IntMat>(size_t(N) + 1));
    c.e_rep.assign(size_t(P) + 1, std::vector<std::vector<int>>(size_t(N) + 1));
    for (int p = 0; p <= P; ++p)
        for (int h = 0; h <= N; ++h) {
            c.e_anchor[size_t(p)][size_t(h)] = subq_full(*c.E_at(p, h));
            if (const auto* a = std::get_if<FgAb>(c.E_at(p, h).get())) {
                c.e_basis[size_t(p)][size_t(h)] = IntMat::identity(a->ngens);
            } else {
                std::vector<int> rep(size_t(obj_size(*c.E_at(p, h))));
                std::iota(rep.begin(), rep.end(), 0);
                c.e_rep[size_t(p)][size_t(h)] = std::move(rep);
            }
        }
}

// ---------------------------------------------------------------------------
// validation

namespace {

LongHtpySequence right_row_sequence(const CoupleData& c, int p) {
    int trunc = std::max(c.nmax, 1);
    auto structure_at = [&](std::function<ObjPtr(int)> term) {
        std::vector<ObjPtr> higher;
        for (int n = 2; n <= trunc; ++n) higher.push_back(term(n));
        return make_pi_structure(term(0), term(1), higher, {}, trunc);
    };
    PiStructure F = structure_at([&](int n) { return c.E_at(p, n); });
    PiStructure G = structure_at([&](int n) { return c.D_at(p, n); });
    PiStructure H = structure_at([&](int n) { return c.D_at(p - 1, n); });
    std::vector<Map> fc, gc, bnd;
    for (int n = 0; n <= trunc; ++n) {
        fc.push_back(c.gamma_at(p, n));
        gc.push_back(c.alpha_at(p, n));
    }
    for (int n = 0; n < trunc; ++n) bnd.push_back(c.beta_at(p - 1, n + 1));
    const Action* act = c.row_action_at(p);
    Action a = act ? *act : Action::make_trivial(c.D_at(p - 1, 1), c.E_at(p, 0));
    return make_long_sequence(F, G, H, make_pi_morphism(F, G, fc), make_pi_morphism(G, H, gc),
                              bnd, a);
}

LongHtpySequence left_row_sequence(const CoupleData& c, int p) {
    int trunc = std::max(c.nmax, 1);
    auto structure_at = [&](std::function<ObjPtr(int)> term) {
        std::vector<ObjPtr> higher;
        for (int n = 2; n <= trunc; ++n) higher.push_back(term(n));
        return make_pi_structure(term(0), term(1), higher, {}, trunc);
    };
    PiStructure F = structure_at([&](int n) { return c.D_at(p + 1, n); });
    PiStructure G = structure_at([&](int n) { return c.D_at(p, n); });
    PiStructure H = structure_at([&](int n) { return c.E_at(p, n); });
    std::vector<Map> fc, gc, bnd;
    for (int n = 0; n <= trunc; ++n) {
        fc.push_back(c.alpha_at(p + 1, n));
        gc.push_back(c.beta_at(p, n));
    }
    for (int n = 0; n < trunc; ++n) bnd.push_back(c.gamma_at(p, n + 1));
    const Action* act = c.row_action_at(p);
    Action a = act ? *act : Action::make_trivial(c.E_at(p, 1), c.D_at(p + 1, 0));
    return make_long_sequence(F, G, H, make_pi_morphism(F, G, fc), make_pi_morphism(G, H, gc),
                              bnd, a);
}

}  // namespace

CoupleReport validate_couple(const CoupleData& c) {
    CoupleReport r;
    r.valid = true;
    auto fail = [&](const std::string& what) {
        r.valid = false;
        r.failures.push_back(what);
    };
    if (c.degree == 1) {
        int rows = c.left ? int(c.E.size()) : int(c.E.size());
        for (int p = 0; p < rows; ++p) {
            try {
                LongHtpySequence row = c.left ? left_row_sequence(c, p) : right_row_sequence(c, p);
                SequenceAxiomReport ax = validate_long_sequence(row);
                if (!ax.all()) {
                    for (const auto& n : ax.notes) fail("row p=" + std::to_string(p) + ": " + n);
                    continue;
                }
                ExactnessReport ex = check_long_exactness(row);
                if (!ex.exact)
                    for (const auto& w : ex.failures)
                        fail("row p=" + std::to_string(p) + " not exact at " + w);
            } catch (const engine_error& e) {
                fail("row p=" + std::to_string(p) + ": " + e.what());
            }
        }
        return r;
    }
    // degree >= 2 (derived couples): node checks along the zigzag
    for (int p = 0; p <= c.pmax; ++p)
        for (int h = 0; h <= c.nmax; ++h) {
            try {
                Map bin = c.beta_at(p - c.degree, h + 1);
                if (!exact_at(bin, c.gamma_at(p, h))) fail("E node " + at_pq(p, h));
                if (!exact_at(c.gamma_at(p, h), c.alpha_at(p, h))) fail("D node " + at_pq(p, h));
                if (!exact_at(c.alpha_at(p + 1, h), c.beta_at(p, h)))
                    fail("D node (beta side) " + at_pq(p, h));
            } catch (const engine_error& e) {
                fail(std::string("node check ") + at_pq(p, h) + ": " + e.what());
            }
        }
    for (int p = 0; p <= c.pmax; ++p)
        for (int h = 1; h <= c.nmax; ++h)
            if (!map_is_trivial(
                    compose(c.differential_at(p + c.degree, h - 1), c.differential_at(p, h))))
                fail("d d != * at " + at_pq(p, h));
    return r;
}

// ---------------------------------------------------------------------------
// anchors

namespace {

SubqCert compose_anchor(ObjPtr base_parent, const SubqCert& outer, const SubqCert& inner) {
    SubqMaterialized m0 = materialize_subq(base_parent, outer);
    if (outer.is_finite_form()) {
        Subobj inner_sub = subobj_as_mask(*m0.obj, inner.sub);
        std::vector<int> inner_cls;
        if (inner.is_finite_form()) {
            inner_cls = std::get<std::vector<int>>(inner.collapse);
        } else {
            const auto& mid = std::get<FgAb>(*m0.obj);
            SubqMaterialized mm = materialize_subq(m0.obj, inner);
            inner_cls.assign(size_t(mid.order()), -1);
            for (i64 x = 0; x < mid.order(); ++x) {
                if (!inner_sub.mask()[size_t(x)]) continue;
                std::vector<i64> cls = subq_project_vec(mid, mm, mid.element(x));
                inner_cls[size_t(x)] = int(std::get<FgAb>(*mm.obj).index_of(cls));
            }
        }
        const auto& outer_cls = m0.class_of;
        std::vector<char> sub(outer_cls.size(), 0);
        std::vector<int> cls(outer_cls.size(), -1);
        for (size_t x = 0; x < outer_cls.size(); ++x) {
            int c0 = outer_cls[x];
            if (c0 < 0 || !inner_sub.mask()[size_t(c0)]) continue;
            sub[x] = 1;
            cls[x] = inner_cls[size_t(c0)];
        }
        SubqCert out;
        out.sub = Subobj{std::move(sub)};
        out.collapse = std::move(cls);
        return out;
    }
    const IntMat& b0 = m0.basis;
    IntMat inner_s = inner.sub.lattice();
    IntMat inner_n = std::get<IntMat>(inner.collapse);
    IntMat outer_n = std::get<IntMat>(outer.collapse);
    SubqCert out;
    out.sub = subobj_from_lattice(std::get<FgAb>(*base_parent),
                                  lattice_sum(b0.mul(inner_s), outer_n));
    out.collapse = lattice_hnf(lattice_sum(b0.mul(inner_n), outer_n));
    return out;
}

struct LineData {
    HtpyComplex cx;
    AugMap eps;
};

LineData build_line(const CoupleData& c, int p, int h) {
    int deg = c.degree;
    int p0 = p + deg * h;  // diagonal column of the line through (p,h)
    int ktop = std::min(c.nmax, p0 / deg);
    ktop = std::max(ktop, h);
    std::vector<ObjPtr> terms;
    std::vector<Map> diffs;
    for (int k = 0; k <= ktop; ++k) terms.push_back(c.E_at(p0 - deg * k, k));
    for (int k = 0; k < ktop; ++k) diffs.push_back(c.differential_at(p0 - deg * (k + 1), k + 1));
    const Action* ra = c.row_action_at(p0);
    Action base_act = ra ? *ra : Action::make_trivial(c.D_at(p0 - deg, 1), c.E_at(p0, 0));
    Action act = ktop >= 1 ? pull_back_action(base_act, c.gamma_at(p0 - deg, 1))
                           : Action::make_trivial(trivial_group(), c.E_at(p0, 0));
    HtpyComplex cx = make_htpy_complex(std::move(terms), std::move(diffs), act);
    AugMap eps{c.gamma_at(p0, 0), image_subobj(c.alpha_at(p0 + 1, 0))};
    return {std::move(cx), std::move(eps)};
}

bool all_matrix_maps(std::initializer_list<const Map*> maps) {
    for (const Map* m : maps)
        if (m->is_elem()) return false;
    return true;
}

int scan_preimage(const Map& tabulated, int value) {
    for (size_t u = 0; u < tabulated.images().size(); ++u)
        if (tabulated.images()[u] == value) return int(u);
    return -1;
}

}  // namespace

CoupleData derive_couple(const CoupleData& c) {
    if (c.left) throw engine_error("only right couples are derived");
    CoupleData d;
    d.degree = c.degree + 1;
    d.left = false;
    d.stable_beyond = c.stable_beyond;
    d.pmax = c.pmax;
    d.nmax = c.nmax;
    d.abelian_flavor = c.abelian_flavor;
    int P = c.pmax, N = c.nmax;
    d.D.assign(size_t(P) + 1, std::vector<ObjPtr>(size_t(N) + 1));
    d.E.assign(size_t(P) + 1, std::vector<ObjPtr>(size_t(N) + 1));
    d.alpha_.assign(size_t(P) + 1, std::vector<Map>(size_t(N) + 1));
    d.beta_.assign(size_t(P) + 1, std::vector<Map>(size_t(N) + 1));
    d.gamma_.assign(size_t(P) + 1, std::vector<Map>(size_t(N) + 1));
    d.e_anchor.assign(size_t(P) + 1, std::vector<SubqCert>(size_t(N) + 1));
    d.e_basis.assign(size_t(P) + 1, std::vector<IntMat>(size_t(N) + 1));
    d.e_rep.assign(size_t(P) + 1, std::vector<std::vector<int>>(size_t(N) + 1));
    d.base_E = c.base_E;
    std::vector<std::vector<SubObjResult>> dsub(size_t(P) + 1,
                                                std::vector<SubObjResult>(size_t(N) + 1));
    std::vector<std::vector<SubqMaterialized>> emat(size_t(P) + 1,
                                                    std::vector<SubqMaterialized>(size_t(N) + 1));

    for (int p = 0; p <= P; ++p)
        for (int h = 0; h <= N; ++h) {
            dsub[size_t(p)][size_t(h)] =
                materialize_sub(c.D_at(p, h), image_subobj(c.alpha_at(p + 1, h)));
            d.D[size_t(p)][size_t(h)] = dsub[size_t(p)][size_t(h)].obj;
        }
    for (int p = 0; p <= P; ++p)
        for (int h = 0; h <= N; ++h) {
            LineData line = build_line(c, p, h);
            auto [cert, value] =
                homotopy_at(line.cx, h, h == 0 ? std::optional<AugMap>(line.eps) : std::nullopt);
            emat[size_t(p)][size_t(h)] = materialize_subq(c.E_at(p, h), cert);
            d.E[size_t(p)][size_t(h)] = emat[size_t(p)][size_t(h)].obj;
            d.e_anchor[size_t(p)][size_t(h)] =
                compose_anchor(c.base_E[size_t(p)][size_t(h)], c.e_anchor[size_t(p)][size_t(h)],
                               cert);
            // identification data with the base couple
            const SubqMaterialized& em = emat[size_t(p)][size_t(h)];
            if (std::holds_alternative<FgAb>(*d.E[size_t(p)][size_t(h)])) {
                d.e_basis[size_t(p)][size_t(h)] =
                    c.e_base_basis(p, h).mul(em.basis);
            } else {
                std::vector<int> rep(em.lift.size());
                for (size_t k = 0; k < em.lift.size(); ++k)
                    rep[k] = c.e_base_rep(p, h, em.lift[k]);
                d.e_rep[size_t(p)][size_t(h)] = std::move(rep);
            }
        }
    for (int p = 1; p <= P; ++p)
        for (int h = 0; h <= N; ++h)
            d.alpha_[size_t(p)][size_t(h)] =
                corestrict(compose(c.alpha_at(p, h), dsub[size_t(p)][size_t(h)].incl),
                           dsub[size_t(p) - 1][size_t(h)]);
    for (int p = 0; p <= P; ++p)
        for (int h = 0; h <= N; ++h) {
            ObjPtr eobj = d.E[size_t(p)][size_t(h)];
            const SubqMaterialized& em = emat[size_t(p)][size_t(h)];
            Map g = c.gamma_at(p, h);
            Map into_parent;
            if (!g.is_elem() && std::holds_alternative<FgAb>(*eobj)) {
                const auto& src = std::get<FgAb>(*eobj);
                const auto& dparent = std::get<FgAb>(*c.D_at(p, h));
                IntMat m(dparent.ngens, src.ngens);
                for (int j = 0; j < src.ngens; ++j) {
                    std::vector<i64> e(src.ngens, 0);
                    e[j] = 1;
                    std::vector<i64> lifted = subq_lift_vec(std::get<FgAb>(*c.E_at(p, h)), em, e);
                    std::vector<i64> moved = g.matrix().apply(lifted);
                    for (int i = 0; i < m.rows(); ++i) m.at(i, j) = moved[size_t(i)];
                }
                into_parent = Map{eobj, c.D_at(p, h), std::move(m)};
            } else {
                i64 nclasses = obj_size(*eobj);
                std::vector<int> img(size_t(nclasses), 0);
                for (i64 k = 0; k < nclasses; ++k)
                    img[size_t(k)] = map_apply_idx(g, em.lift[size_t(k)]);
                into_parent = Map{eobj, c.D_at(p, h), std::move(img)};
            }
            d.gamma_[size_t(p)][size_t(h)] = corestrict(into_parent, dsub[size_t(p)][size_t(h)]);
        }
    for (int p = 0; p <= P; ++p)
        for (int h = 1; h <= N; ++h) {
            int tp = p + d.degree, th = h - 1;
            ObjPtr src_obj = d.D[size_t(p)][size_t(h)];
            ObjPtr tgt_obj = d.E_at(tp, th);
            if (tp > P) {
                d.beta_[size_t(p)][size_t(h)] = trivial_map(src_obj, tgt_obj);
                continue;
            }
            Map incl = dsub[size_t(p)][size_t(h)].incl;
            Map alpha = c.alpha_at(p + 1, h);
            Map beta = c.beta_at(p + 1, h);
            const SubqMaterialized& tm = emat[size_t(tp)][size_t(th)];
            if (all_matrix_maps({&incl, &alpha, &beta})) {
                const auto& sg = std::get<FgAb>(*src_obj);
                IntMat m(std::get<FgAb>(*tgt_obj).ngens, sg.ngens);
                const auto& lift_src = std::get<FgAb>(*c.D_at(p + 1, h));
                IntMat sys = alpha.matrix().hcat(std::get<FgAb>(*c.D_at(p, h)).rels);
                for (int j = 0; j < sg.ngens; ++j) {
                    std::vector<i64> e(sg.ngens, 0);
                    e[j] = 1;
                    std::vector<i64> v = incl.matrix().apply(e);
                    std::vector<i64> sol;
                    if (!solve_integer(sys, v, &sol))
                        throw engine_error("derived beta: lift through alpha failed");
                    std::vector<i64> x(sol.begin(), sol.begin() + lift_src.ngens);
                    std::vector<i64> w = beta.matrix().apply(x);
                    std::vector<i64> cls = subq_project_vec(std::get<FgAb>(*c.E_at(tp, th)), tm, w);
                    for (int i = 0; i < m.rows(); ++i) m.at(i, j) = cls[size_t(i)];
                }
                d.beta_[size_t(p)][size_t(h)] = Map{src_obj, tgt_obj, std::move(m)};
            } else {
                Map alpha_t = tabulate(alpha);
                Map beta_t = tabulate(beta);
                i64 nsrc = obj_size(*src_obj);
                std::vector<int> img(size_t(nsrc), 0);
                for (i64 k = 0; k < nsrc; ++k) {
                    int v = map_apply_idx(incl, int(k));
                    int x = scan_preimage(alpha_t, v);
                    if (x < 0) throw engine_error("derived beta: lift through alpha failed");
                    int w = beta_t.images()[size_t(x)];
                    int cls = tm.class_of[size_t(w)];
                    if (cls < 0) throw engine_error("derived beta: image misses the page term");
                    img[size_t(k)] = cls;
                }
                d.beta_[size_t(p)][size_t(h)] = Map{src_obj, tgt_obj, std::move(img)};
            }
        }
    d.row_action.clear();
    for (int p = 0; p <= P; ++p) {
        int gp = p - d.degree;
        ObjPtr group = d.D_at(gp, 1);
        ObjPtr carrier = d.E_at(p, 0);
        if (gp < 0 || is_trivial_obj(*group) || is_trivial_obj(*carrier)) {
            d.row_action.push_back(Action::make_trivial(group, carrier));
            continue;
        }
        const Action* base = c.row_action_at(p);
        Action ba = base ? *base : Action::make_trivial(c.D_at(p - c.degree, 1), c.E_at(p, 0));
        const SubObjResult& gsub = dsub[size_t(gp)][1];
        const SubqMaterialized& em = emat[size_t(p)][0];
        Map alpha = c.alpha_at(gp + 1, 1);
        if (ba.kind == Action::Kind::trivial) {
            d.row_action.push_back(Action::make_trivial(group, carrier));
        } else if (ba.kind == Action::Kind::translation && !gsub.incl.is_elem() &&
                   !alpha.is_elem() && !(*ba.phi).is_elem()) {
            const Map& phi = *ba.phi;
            const auto& gg = std::get<FgAb>(*group);
            IntMat m(std::get<FgAb>(*carrier).ngens, gg.ngens);
            const auto& lift_src = std::get<FgAb>(*c.D_at(gp + 1, 1));
            IntMat sys = alpha.matrix().hcat(std::get<FgAb>(*c.D_at(gp, 1)).rels);
            for (int j = 0; j < gg.ngens; ++j) {
                std::vector<i64> e(gg.ngens, 0);
                e[j] = 1;
                std::vector<i64> v = gsub.incl.matrix().apply(e);
                std::vector<i64> sol;
                if (!solve_integer(sys, v, &sol))
                    throw engine_error("derived action: lift through alpha failed");
                std::vector<i64> x(sol.begin(), sol.begin() + lift_src.ngens);
                std::vector<i64> w = map_apply_vec(phi, x);
                std::vector<i64> cls = subq_project_vec(std::get<FgAb>(*c.E_at(p, 0)), em, w);
                for (int i = 0; i < m.rows(); ++i) m.at(i, j) = cls[size_t(i)];
            }
            d.row_action.push_back(Action::make_translation(Map{group, carrier, std::move(m)}));
        } else {
            Map alpha_t = tabulate(alpha);
            i64 ng = obj_size(*group), nc = obj_size(*carrier);
            std::vector<std::vector<int>> perms(size_t(ng), std::vector<int>(size_t(nc), 0));
            for (i64 g = 0; g < ng; ++g) {
                int v = map_apply_idx(gsub.incl, int(g));
                int x = scan_preimage(alpha_t, v);
                if (x < 0) throw engine_error("derived action: lift through alpha failed");
                for (i64 k = 0; k < nc; ++k) {
                    int rep = em.lift[size_t(k)];
                    int moved = action_apply(ba, x, rep);
                    int cls = em.class_of[size_t(moved)];
                    if (cls < 0) throw engine_error("derived action leaves the page term");
                    perms[size_t(g)][size_t(k)] = cls;
                }
            }
            d.row_action.push_back(Action::make_table(group, carrier, std::move(perms)));
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// pages

namespace {

Page page_from_derived(const CoupleData& dc) {
    Page pg;
    pg.index = dc.degree;
    pg.pmax = dc.pmax;
    pg.nmax = dc.nmax;
    pg.terms.assign(size_t(pg.pmax) + 1, std::vector<PageTerm>(size_t(pg.nmax) + 1));
    pg.dmap.assign(size_t(pg.pmax) + 1, std::vector<std::optional<Map>>(size_t(pg.nmax) + 1));
    std::vector<std::vector<SubqMaterialized>> canon(
        size_t(pg.pmax) + 1, std::vector<SubqMaterialized>(size_t(pg.nmax) + 1));
    std::vector<std::vector<Map>> ident(size_t(pg.pmax) + 1, std::vector<Map>(size_t(pg.nmax) + 1));
    for (int p = 0; p <= pg.pmax; ++p)
        for (int h = 0; h <= pg.nmax; ++h) {
            const SubqCert& cert = dc.e_anchor[size_t(p)][size_t(h)];
            ObjPtr parent = dc.base_E[size_t(p)][size_t(h)];
            canon[size_t(p)][size_t(h)] = materialize_subq(parent, cert);
            pg.terms[size_t(p)][size_t(h)] = {cert, canon[size_t(p)][size_t(h)].obj};
        }
    for (int p = 0; p <= pg.pmax; ++p)
        for (int h = 0; h <= pg.nmax; ++h) {
            ObjPtr from = dc.E[size_t(p)][size_t(h)];
            ObjPtr to = pg.terms[size_t(p)][size_t(h)].value;
            ObjPtr parent = dc.base_E[size_t(p)][size_t(h)];
            const SubqMaterialized& cm = canon[size_t(p)][size_t(h)];
            if (std::holds_alternative<FgAb>(*from)) {
                const auto& fg = std::get<FgAb>(*from);
                IntMat m(std::get<FgAb>(*to).ngens, fg.ngens);
                const IntMat& btotal = dc.e_base_basis(p, h);
                for (int j = 0; j < fg.ngens; ++j) {
                    std::vector<i64> e(fg.ngens, 0);
                    e[j] = 1;
                    std::vector<i64> basevec = btotal.apply(e);
                    std::vector<i64> cls = subq_project_vec(std::get<FgAb>(*parent), cm, basevec);
                    for (int i = 0; i < m.rows(); ++i) m.at(i, j) = cls[size_t(i)];
                }
                ident[size_t(p)][size_t(h)] = Map{from, to, std::move(m)};
            } else {
                i64 n = obj_size(*from);
                std::vector<int> img(size_t(n), 0);
                for (i64 k = 0; k < n; ++k)
                    img[size_t(k)] = cm.class_of[size_t(dc.e_base_rep(p, h, int(k)))];
                ident[size_t(p)][size_t(h)] = Map{from, to, std::move(img)};
            }
        }
    for (int p = 0; p <= pg.pmax; ++p)
        for (int h = 0; h <= pg.nmax; ++h) {
            int tp = p + pg.index, th = h - 1;
            if (th < 0 || tp > pg.pmax) continue;
            Map dmap_derived = dc.differential_at(p, h);
            pg.dmap[size_t(p)][size_t(h)] =
                compose(ident[size_t(tp)][size_t(th)],
                        compose(dmap_derived, inverse_iso(ident[size_t(p)][size_t(h)])));
        }
    return pg;
}

}  // namespace

Page page(const CoupleData& c, int n) {
    if (n < c.degree) throw engine_error("page index below the couple degree");
    CoupleData cur = c;
    while (cur.degree < n) cur = derive_couple(cur);
    return page_from_derived(cur);
}

Page page_direct(const CoupleData& c, int n) {
    if (c.degree != 1 || c.left)
        throw engine_error("direct pages start from a degree-1 right couple");
    int s = n - 1;
    Page pg;
    pg.index = n;
    pg.pmax = c.pmax;
    pg.nmax = c.nmax;
    pg.terms.assign(size_t(pg.pmax) + 1, std::vector<PageTerm>(size_t(pg.nmax) + 1));
    pg.dmap.assign(size_t(pg.pmax) + 1, std::vector<std::optional<Map>>(size_t(pg.nmax) + 1));
    std::vector<std::vector<SubqMaterialized>> mats(
        size_t(pg.pmax) + 1, std::vector<SubqMaterialized>(size_t(pg.nmax) + 1));
    for (int p = 0; p <= pg.pmax; ++p)
        for (int h = 0; h <= pg.nmax; ++h) {
            ObjPtr parent = c.E_at(p, h);
            Map gamma = c.gamma_at(p, h);
            Subobj s_sub = preimage_subobj(gamma, image_subobj(c.alpha_power_into(p, h, s)));
            SubqCert cert;
            cert.sub = s_sub;
            if (h >= 1) {
                Map apow = c.alpha_power_into(p - 1 - s, h + 1, s);
                Subobj k = kernel_subobj(apow);
                Subobj nimg = image_of_subobj(c.beta_at(p - 1, h + 1), k);
                if (s_sub.is_mask()) {
                    Subobj nmask = subobj_as_mask(*parent, nimg);
                    const auto& sm = s_sub.mask();
                    std::vector<int> cls(sm.size(), -1);
                    int next = 0;
                    for (size_t a = 0; a < sm.size(); ++a) {
                        if (!sm[a] || cls[a] != -1) continue;
                        cls[a] = next;
                        for (size_t x = 0; x < sm.size(); ++x)
                            if (nmask.mask()[x]) {
                                int b = obj_op(*parent, int(a), int(x));
                                if (sm[size_t(b)]) cls[size_t(b)] = next;
                            }
                        ++next;
                    }
                    cert.collapse = std::move(cls);
                } else {
                    cert.collapse = subobj_as_lattice(*parent, nimg).lattice();
                }
            } else {
                Map apow = c.alpha_power_into(p - 1 - s, 1, s);
                Subobj k = kernel_subobj(apow);
                const Action* ra = c.row_action_at(p);
                Action act = ra ? *ra : Action::make_trivial(c.D_at(p - 1, 1), parent);
                if (s_sub.is_mask()) {
                    Subobj kmask = subobj_as_mask(*c.D_at(p - 1, 1), k);
                    const auto& sm = s_sub.mask();
                    std::vector<int> uf(sm.size(), 0);
                    std::iota(uf.begin(), uf.end(), 0);
                    std::function<int(int)> find = [&](int x) {
                        return uf[size_t(x)] == x ? x : uf[size_t(x)] = find(uf[size_t(x)]);
                    };
                    for (size_t g = 0; g < kmask.mask().size(); ++g) {
                        if (!kmask.mask()[g]) continue;
                        for (size_t x = 0; x < sm.size(); ++x) {
                            if (!sm[x]) continue;
                            int y = action_apply(act, int(g), int(x));
                            int rx = find(int(x)), ry = find(y);
                            if (rx != ry) uf[size_t(rx)] = ry;
                        }
                    }
                    std::vector<int> cls(sm.size(), -1);
                    std::map<int, int> renum;
                    for (size_t x = 0; x < sm.size(); ++x) {
                        if (!sm[x]) continue;
                        int r0 = find(int(x));
                        auto it = renum.find(r0);
                        if (it == renum.end()) it = renum.emplace(r0, int(renum.size())).first;
                        cls[x] = it->second;
                    }
                    cert.collapse = std::move(cls);
                } else {
                    if (act.kind == Action::Kind::trivial) {
                        cert.collapse = lattice_hnf(std::get<FgAb>(*parent).rels);
                    } else if (act.kind == Action::Kind::translation) {
                        Subobj moved = image_of_subobj(*act.phi, k);
                        cert.collapse = subobj_as_lattice(*parent, moved).lattice();
                    } else {
                        throw engine_error("table action on an infinite diagonal term");
                    }
                }
            }
            mats[size_t(p)][size_t(h)] = materialize_subq(parent, cert);
            pg.terms[size_t(p)][size_t(h)] = {cert, mats[size_t(p)][size_t(h)].obj};
        }
    for (int p = 0; p <= pg.pmax; ++p)
        for (int h = 0; h <= pg.nmax; ++h) {
            int tp = p + n, th = h - 1;
            if (th < 0 || tp > pg.pmax) continue;
            ObjPtr src_obj = pg.terms[size_t(p)][size_t(h)].value;
            ObjPtr dst_obj = pg.terms[size_t(tp)][size_t(th)].value;
            Map gamma = c.gamma_at(p, h);
            Map apow = c.alpha_power_into(p, h, s);
            Map beta = c.beta_at(p + s, h);
            if (std::holds_alternative<FgAb>(*src_obj) &&
                all_matrix_maps({&gamma, &apow, &beta})) {
                const auto& sg = std::get<FgAb>(*src_obj);
                IntMat m(std::get<FgAb>(*dst_obj).ngens, sg.ngens);
                IntMat sys = apow.matrix().hcat(std::get<FgAb>(*c.D_at(p, h)).rels);
                const auto& lift_src = std::get<FgAb>(*c.D_at(p + s, h));
                for (int j = 0; j < sg.ngens; ++j) {
                    std::vector<i64> e(sg.ngens, 0);
                    e[j] = 1;
                    std::vector<i64> in_e =
                        subq_lift_vec(std::get<FgAb>(*c.E_at(p, h)), mats[size_t(p)][size_t(h)], e);
                    std::vector<i64> v = gamma.matrix().apply(in_e);
                    std::vector<i64> sol;
                    if (!solve_integer(sys, v, &sol))
                        throw engine_error("page differential: alpha-power lift failed");
                    std::vector<i64> x(sol.begin(), sol.begin() + lift_src.ngens);
                    std::vector<i64> w = beta.matrix().apply(x);
                    std::vector<i64> cls = subq_project_vec(std::get<FgAb>(*c.E_at(tp, th)),
                                                            mats[size_t(tp)][size_t(th)], w);
                    for (int i = 0; i < m.rows(); ++i) m.at(i, j) = cls[size_t(i)];
                }
                pg.dmap[size_t(p)][size_t(h)] = Map{src_obj, dst_obj, std::move(m)};
            } else {
                Map gamma_t = tabulate(gamma);
                Map apow_t = tabulate(apow);
                Map beta_t = tabulate(beta);
                const SubqMaterialized& sm = mats[size_t(p)][size_t(h)];
                const SubqMaterialized& dm = mats[size_t(tp)][size_t(th)];
                i64 nsrc = obj_size(*src_obj);
                std::vector<int> img(size_t(nsrc), -1);
                for (size_t x = 0; x < sm.class_of.size(); ++x) {
                    int kcls = sm.class_of[x];
                    if (kcls < 0) continue;
                    int v = gamma_t.images()[x];
                    int u = scan_preimage(apow_t, v);
                    if (u < 0) throw engine_error("page differential: alpha-power lift failed");
                    int w = beta_t.images()[size_t(u)];
                    int cls = dm.class_of[size_t(w)];
                    if (cls < 0) throw engine_error("page differential misses the target term");
                    if (img[size_t(kcls)] == -1)
                        img[size_t(kcls)] = cls;
                    else if (img[size_t(kcls)] != cls)
                        throw engine_error("page differential not constant on classes");
                }
                for (i64 k = 0; k < nsrc; ++k)
                    if (img[size_t(k)] < 0) throw engine_error("page term missing representative");
                pg.dmap[size_t(p)][size_t(h)] =
                    Map{src_obj, dst_obj, std::vector<int>(img.begin(), img.end())};
            }
        }
    return pg;
}

PageComparison compare_pages(const CoupleData& base, const Page& a, const Page& b) {
    PageComparison r;
    r.isomorphic = true;
    auto fail = [&](const std::string& w) {
        r.isomorphic = false;
        r.mismatches.push_back(w);
    };
    if (a.pmax != b.pmax || a.nmax != b.nmax || a.index != b.index) {
        fail("page shapes differ");
        return r;
    }
    for (int p = 0; p <= a.pmax; ++p)
        for (int h = 0; h <= a.nmax; ++h) {
            ObjPtr parent =
                base.base_E.empty() ? base.E_at(p, h) : base.base_E[size_t(p)][size_t(h)];
            if (!subq_equal(*parent, a.terms[size_t(p)][size_t(h)].cert,
                            b.terms[size_t(p)][size_t(h)].cert))
                fail("term certificates differ at " + at_pq(p, h));
            const auto& da = a.dmap[size_t(p)][size_t(h)];
            const auto& db = b.dmap[size_t(p)][size_t(h)];
            if (da.has_value() != db.has_value()) {
                fail("differential presence differs at " + at_pq(p, h));
                continue;
            }
            if (da && !map_equal(*da, *db)) fail("differentials differ at " + at_pq(p, h));
        }
    return r;
}

bool page_differentials_square_to_zero(const Page& pg) {
    for (int p = 0; p <= pg.pmax; ++p)
        for (int h = 0; h <= pg.nmax; ++h) {
            const auto& d1 = pg.dmap[size_t(p)][size_t(h)];
            if (!d1) continue;
            int tp = p + pg.index, th = h - 1;
            if (tp > pg.pmax || th < 1) continue;
            const auto& d2 = pg.dmap[size_t(tp)][size_t(th)];
            if (!d2) continue;
            if (!map_is_trivial(compose(*d2, *d1))) return false;
        }
    return true;
}

}  // namespace gersten
