#include "gersten/pistruct.hpp"

#include <algorithm>
#include <sstream>

namespace gersten {

ObjPtr PiStructure::at(int n) const {
    if (n == 0) return deg0;
    if (n == 1) return deg1;
    int k = n - 2;
    if (k < int(higher.size())) return higher[size_t(k)];
    return trivial_ab();
}

const Action* PiStructure::action_at(int n) const {
    int k = n - 2;
    if (n >= 2 && k < int(actions.size())) return &actions[size_t(k)];
    return nullptr;
}

PiStructure make_pi_structure(ObjPtr deg0, ObjPtr deg1, std::vector<ObjPtr> higher,
                              std::vector<Action> actions, int trunc) {
    PiStructure p{std::move(deg0), std::move(deg1), std::move(higher), std::move(actions), trunc};
    while (int(p.higher.size()) < trunc - 1) p.higher.push_back(trivial_ab());
    while (int(p.actions.size()) < trunc - 1)
        p.actions.push_back(Action::make_trivial(p.deg1, p.higher[p.actions.size()]));
    validate_pi_structure(p);
    return p;
}

PiStructure trivial_pi_structure(int trunc) {
    return make_pi_structure(trivial_pointed_set(), trivial_group(), {}, {}, trunc);
}

void validate_pi_structure(const PiStructure& p) {
    if (!p.deg0 || !p.deg1) throw engine_error("pi-structure with missing degrees");
    if (!is_group_like(*p.deg1)) throw engine_error("degree 1 must be a group");
    for (const auto& h : p.higher)
        if (!std::holds_alternative<FgAb>(*h))
            throw engine_error("degrees >= 2 must be f.g. abelian groups");
    if (p.actions.size() != p.higher.size()) throw engine_error("action list length mismatch");
    for (size_t k = 0; k < p.actions.size(); ++k) {
        const Action& a = p.actions[k];
        if (a.carrier != p.higher[k] && a.carrier.get() != p.higher[k].get())
            throw engine_error("action carrier mismatch");
        if (!action_valid(a)) throw engine_error("invalid action data");
        if (!action_by_automorphisms(a))
            throw engine_error("degree-1 action must be by group automorphisms");
    }
    if (p.trunc < 1 || int(p.higher.size()) != p.trunc - 1)
        throw engine_error("truncation bookkeeping mismatch");
}

bool pi_structure_trivial(const PiStructure& p) {
    if (!is_trivial_obj(*p.deg0) || !is_trivial_obj(*p.deg1)) return false;
    for (const auto& h : p.higher)
        if (!is_trivial_obj(*h)) return false;
    return true;
}

PiMorphism make_pi_morphism(const PiStructure& src, const PiStructure& dst, std::vector<Map> comps) {
    PiMorphism m{std::move(comps)};
    while (int(m.comps.size()) <= src.trunc)
        m.comps.push_back(trivial_map(src.at(int(m.comps.size())), dst.at(int(m.comps.size()))));
    validate_pi_morphism(src, dst, m);
    return m;
}

PiMorphism trivial_pi_morphism(const PiStructure& src, const PiStructure& dst) {
    std::vector<Map> comps;
    for (int n = 0; n <= src.trunc; ++n) comps.push_back(trivial_map(src.at(n), dst.at(n)));
    return PiMorphism{std::move(comps)};
}

PiMorphism identity_pi_morphism(const PiStructure& p) {
    std::vector<Map> comps;
    for (int n = 0; n <= p.trunc; ++n) comps.push_back(identity_map(p.at(n)));
    return PiMorphism{std::move(comps)};
}

void validate_pi_morphism(const PiStructure& src, const PiStructure& dst, const PiMorphism& m) {
    if (int(m.comps.size()) <= src.trunc) throw engine_error("morphism missing components");
    for (int n = 0; n <= src.trunc; ++n) {
        const Map& f = m.at(n);
        if (f.src != src.at(n) && f.src.get() != src.at(n).get())
            throw engine_error("morphism component source mismatch");
        if (!map_is_structural(f)) throw engine_error("morphism component breaks structure");
    }
    // components in degrees >= 2 are equivariant through the degree-1 component
    for (int n = 2; n <= src.trunc; ++n) {
        const Action* as = src.action_at(n);
        const Action* ad = dst.action_at(n);
        Action triv_s = Action::make_trivial(src.deg1, src.at(n));
        Action triv_d = Action::make_trivial(dst.deg1, dst.at(n));
        if (!is_equivariant_along(m.at(n), m.at(1), as ? *as : triv_s, ad ? *ad : triv_d))
            throw engine_error("higher component not equivariant through degree 1");
    }
}

bool pi_morphism_is_iso(const PiMorphism& m) {
    for (const Map& f : m.comps)
        if (!is_injective(f) || !is_surjective(f)) return false;
    return true;
}

// -------------------------------------------------------------------------
// long homotopy sequences

LongHtpySequence make_long_sequence(PiStructure F, PiStructure G, PiStructure H, PiMorphism f,
                                    PiMorphism g, std::vector<Map> boundary, Action h1_on_f0) {
    LongHtpySequence s{std::move(F), std::move(G), std::move(H),
                       std::move(f), std::move(g), std::move(boundary),
                       std::move(h1_on_f0)};
    while (int(s.boundary.size()) < s.trunc())
        s.boundary.push_back(
            trivial_map(s.H.at(int(s.boundary.size()) + 1), s.F.at(int(s.boundary.size()))));
    return s;
}

LongHtpySequence trivial_long_sequence(int trunc) {
    PiStructure t = trivial_pi_structure(trunc);
    PiMorphism id = trivial_pi_morphism(t, t);
    std::vector<Map> bnd;
    for (int n = 0; n < trunc; ++n) bnd.push_back(trivial_map(t.at(n + 1), t.at(n)));
    Action a = Action::make_trivial(t.deg1, t.deg0);
    return make_long_sequence(t, t, t, id, id, bnd, a);
}

SequenceAxiomReport validate_long_sequence(const LongHtpySequence& s) {
    SequenceAxiomReport r;
    try {
        if (s.F.trunc != s.G.trunc || s.F.trunc != s.H.trunc)
            throw engine_error("structures disagree on truncation");
        if (int(s.boundary.size()) < s.trunc()) throw engine_error("missing boundary components");
        for (int n = 0; n < s.trunc(); ++n) {
            const Map& b = s.bnd(n);
            if ((b.src != s.H.at(n + 1) && b.src.get() != s.H.at(n + 1).get()) ||
                (b.dst != s.F.at(n) && b.dst.get() != s.F.at(n).get()))
                throw engine_error("boundary endpoints mismatch");
        }
        r.wellformed = true;
    } catch (const engine_error& e) {
        r.notes.push_back(std::string("malformed: ") + e.what());
        return r;
    }

    try {
        validate_pi_structure(s.F);
        validate_pi_structure(s.G);
        validate_pi_structure(s.H);
        validate_pi_morphism(s.F, s.G, s.f);
        validate_pi_morphism(s.G, s.H, s.g);
        r.ax_structures = true;
    } catch (const engine_error& e) {
        r.notes.push_back(std::string("structures: ") + e.what());
    }

    r.ax_boundary = true;
    for (int n = 0; n < s.trunc(); ++n) {
        if (!map_is_structural(s.bnd(n))) {
            r.ax_boundary = false;
            r.notes.push_back("boundary " + std::to_string(n + 1) + " not structural");
        }
    }

    try {
        bool ok = action_valid(s.h1_on_f0);
        if (ok && s.trunc() >= 1) {
            Action left = left_mult_action(s.H.at(1));
            ok = is_equivariant(s.bnd(0), left, s.h1_on_f0);
        }
        if (ok) {
            Action triv = Action::make_trivial(s.H.deg1, s.G.at(0));
            ok = is_equivariant(s.f.at(0), s.h1_on_f0, triv);
        }
        r.ax_equivariance = ok;
        if (!ok) r.notes.push_back("equivariance of boundary_1 or f_0 fails");
    } catch (const engine_error& e) {
        r.ax_equivariance = false;
        r.notes.push_back(std::string("equivariance: ") + e.what());
    }

    if (s.trunc() >= 2) {
        Subobj im = image_subobj(s.bnd(1));
        r.ax_central = subobj_central(*s.F.at(1), im);
        if (!r.ax_central) r.notes.push_back("image of boundary_2 is not central in F_1");
    } else {
        r.ax_central = true;
    }

    r.ax_composites = true;
    for (int n = 0; n <= s.trunc(); ++n) {
        if (!map_is_trivial(compose(s.g.at(n), s.f.at(n)))) {
            r.ax_composites = false;
            r.notes.push_back("g f not trivial in degree " + std::to_string(n));
        }
        if (n < s.trunc()) {
            if (!map_is_trivial(compose(s.f.at(n), s.bnd(n)))) {
                r.ax_composites = false;
                r.notes.push_back("f boundary not trivial at degree " + std::to_string(n));
            }
            if (!map_is_trivial(compose(s.bnd(n), s.g.at(n + 1)))) {
                r.ax_composites = false;
                r.notes.push_back("boundary g not trivial at degree " + std::to_string(n + 1));
            }
        }
    }

    try {
        r.boundary_is_orbit_map = map_equal(s.bnd(0), action_on_basepoint(s.h1_on_f0));
    } catch (const engine_error&) {
        r.boundary_is_orbit_map = false;
    }
    if (!r.boundary_is_orbit_map) r.notes.push_back("boundary_1 differs from the orbit map");

    r.basepoint_orbit_nontrivial = !map_is_trivial(action_on_basepoint(s.h1_on_f0));
    return r;
}

ExactnessReport check_long_exactness(const LongHtpySequence& s) {
    SequenceAxiomReport ax = validate_long_sequence(s);
    if (!ax.wellformed) throw engine_error("cannot check exactness of a malformed sequence");
    ExactnessReport r;
    r.weak_exact = true;
    auto fail = [&](const std::string& where) {
        r.weak_exact = false;
        r.failures.push_back(where);
    };
    for (int n = 0; n <= s.trunc(); ++n) {
        if (!exact_at(s.f.at(n), s.g.at(n))) fail("G_" + std::to_string(n));
        if (n < s.trunc()) {
            if (!exact_at(s.g.at(n + 1), s.bnd(n))) fail("H_" + std::to_string(n + 1));
            if (!exact_at(s.bnd(n), s.f.at(n))) fail("F_" + std::to_string(n));
        }
    }
    // top slot: with everything above the truncation trivial, the kernel at
    // the top F degree must vanish for honest exactness of the cut-off
    if (!subobj_is_trivial(*s.F.at(s.trunc()), kernel_subobj(s.f.at(s.trunc()))))
        fail("F_" + std::to_string(s.trunc()) + " (truncation top)");
    bool orbit_mono = orbit_map_injective(s.f.at(0), s.h1_on_f0);
    if (!orbit_mono) r.failures.push_back("F_0/H_1 -> G_0 not mono");
    r.exact = r.weak_exact && orbit_mono;
    return r;
}

// -------------------------------------------------------------------------
// products

PiStructure pi_product(const std::vector<PiStructure>& xs) {
    int trunc = kDefaultTruncation;
    for (const auto& x : xs) trunc = std::max(trunc, x.trunc);
    if (xs.empty()) return trivial_pi_structure(trunc);
    std::vector<ObjPtr> d0s, d1s;
    for (const auto& x : xs) {
        d0s.push_back(x.deg0);
        d1s.push_back(x.deg1);
    }
    ObjPtr deg0 = restricted_product(d0s);
    ObjPtr deg1 = restricted_product(d1s);
    std::vector<ObjPtr> higher;
    std::vector<Action> actions;
    for (int n = 2; n <= trunc; ++n) {
        std::vector<ObjPtr> hs;
        for (const auto& x : xs) hs.push_back(x.at(n));
        ObjPtr h = restricted_product(hs);
        higher.push_back(h);
        bool all_trivial = true;
        for (const auto& x : xs) {
            const Action* a = x.action_at(n);
            if (a && !action_is_trivial(*a)) all_trivial = false;
        }
        if (all_trivial) {
            actions.push_back(Action::make_trivial(deg1, h));
        } else if (obj_finite(*deg1) && obj_finite(*h)) {
            i64 gn = obj_size(*deg1), hn = obj_size(*h);
            std::vector<std::vector<int>> perms(size_t(gn), std::vector<int>(size_t(hn), 0));
            for (int g = 0; g < gn; ++g) {
                std::vector<int> gc = product_coords(d1s, g);
                for (int v = 0; v < hn; ++v) {
                    std::vector<int> vc = product_coords(hs, v);
                    std::vector<int> out(vc.size());
                    for (size_t i = 0; i < xs.size(); ++i) {
                        const Action* a = xs[i].action_at(n);
                        out[i] = a ? action_apply(*a, gc[i], vc[i]) : vc[i];
                    }
                    perms[g][v] = product_index(hs, out);
                }
            }
            actions.push_back(Action::make_table(deg1, h, std::move(perms)));
        } else {
            throw engine_error("product of nontrivial actions with infinite carriers");
        }
    }
    return make_pi_structure(deg0, deg1, std::move(higher), std::move(actions), trunc);
}

// -------------------------------------------------------------------------
// posets and colimits

FinitePoset make_finite_poset(int n, std::vector<std::pair<int, int>> relations) {
    FinitePoset p;
    p.n = n;
    p.leq.assign(size_t(n) * n, 0);
    for (int i = 0; i < n; ++i) p.leq[size_t(i) * n + i] = 1;
    for (auto [a, b] : relations) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw engine_error("poset relation out of range");
        p.leq[size_t(a) * n + b] = 1;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (p.le(i, k))
                for (int j = 0; j < n; ++j)
                    if (p.le(k, j)) p.leq[size_t(i) * n + j] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && p.le(i, j) && p.le(j, i)) throw engine_error("poset relation has a cycle");
    return p;
}

bool poset_is_filtered(const FinitePoset& p) {
    if (p.n == 0) return false;
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j) {
            bool ok = false;
            for (int k = 0; k < p.n && !ok; ++k) ok = p.le(i, k) && p.le(j, k);
            if (!ok) return false;
        }
    return true;
}

std::optional<int> poset_maximum(const FinitePoset& p) {
    for (int m = 0; m < p.n; ++m) {
        bool top = true;
        for (int i = 0; i < p.n && top; ++i) top = p.le(i, m);
        if (top) return m;
    }
    return std::nullopt;
}

ColimitResult filtered_colimit_pi(const PiDiagram& d) {
    if (!poset_is_filtered(d.poset)) throw engine_error("index poset is not filtered");
    auto m = poset_maximum(d.poset);
    if (!m) throw engine_error("finite filtered poset lost its maximum");
    for (const auto& [i, j, mor] : d.maps) {
        if (!d.poset.le(i, j)) throw engine_error("diagram map against the order");
        validate_pi_morphism(d.values[size_t(i)], d.values[size_t(j)], mor);
    }
    return {d.values[size_t(*m)], *m};
}

void validate_seq_morphism(const LongHtpySequence& src, const LongHtpySequence& dst,
                           const SeqMorphism& m) {
    validate_pi_morphism(src.F, dst.F, m.on_F);
    validate_pi_morphism(src.G, dst.G, m.on_G);
    validate_pi_morphism(src.H, dst.H, m.on_H);
    for (int n = 0; n <= src.trunc(); ++n) {
        if (!map_equal(compose(m.on_G.at(n), src.f.at(n)), compose(dst.f.at(n), m.on_F.at(n))))
            throw engine_error("square with f does not commute");
        if (!map_equal(compose(m.on_H.at(n), src.g.at(n)), compose(dst.g.at(n), m.on_G.at(n))))
            throw engine_error("square with g does not commute");
        if (n < src.trunc() &&
            !map_equal(compose(m.on_F.at(n), src.bnd(n)), compose(dst.bnd(n), m.on_H.at(n + 1))))
            throw engine_error("square with the boundary does not commute");
    }
    if (!is_equivariant_along(m.on_F.at(0), m.on_H.at(1), src.h1_on_f0, dst.h1_on_f0))
        throw engine_error("degree-0 component not equivariant for the H_1 actions");
}

SeqColimitResult filtered_colimit_seq(const SeqDiagram& d) {
    if (!poset_is_filtered(d.poset)) throw engine_error("index poset is not filtered");
    auto m = poset_maximum(d.poset);
    if (!m) throw engine_error("finite filtered poset lost its maximum");
    for (const auto& [i, j, mor] : d.maps) {
        if (!d.poset.le(i, j)) throw engine_error("diagram map against the order");
        validate_seq_morphism(d.values[size_t(i)], d.values[size_t(j)], mor);
    }
    return {d.values[size_t(*m)], *m};
}

std::pair<PiStructure, int> colimit_stabilizing(const StabilizingChain& c) {
    if (c.values.empty()) throw engine_error("empty chain");
    if (c.steps.size() + 1 != c.values.size()) throw engine_error("chain shape mismatch");
    for (size_t i = 0; i < c.steps.size(); ++i)
        validate_pi_morphism(c.values[i], c.values[i + 1], c.steps[i]);
    // the supplied chain is a prefix of an infinite system: stabilization must
    // be witnessed by actual isomorphisms up to and including the final step
    int stage = -1;
    for (int s = 0; s < int(c.steps.size()); ++s) {
        bool all_iso = true;
        for (size_t i = size_t(s); i < c.steps.size() && all_iso; ++i)
            all_iso = pi_morphism_is_iso(c.steps[i]);
        if (all_iso) {
            stage = s;
            break;
        }
    }
    if (c.steps.empty()) stage = 0;  // constant chain
    if (stage < 0) throw non_stabilizing_error("colimit not representable in finite engine");
    return {c.values.back(), stage};
}

}  // namespace gersten
