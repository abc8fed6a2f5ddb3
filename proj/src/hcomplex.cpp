#include "gersten/hcomplex.hpp"

#include <sstream>

namespace gersten {

ObjPtr HtpyComplex::term(int n) const {
    if (n < 0 || n > top()) return trivial_ab();
    return terms[size_t(n)];
}

Map HtpyComplex::diff_into(int n) const {
    if (n < 0 || n >= top()) return trivial_map(term(n + 1), term(n));
    return diffs[size_t(n)];
}

HtpyComplex make_htpy_complex(std::vector<ObjPtr> terms, std::vector<Map> diffs, Action e1_on_e0) {
    HtpyComplex c{std::move(terms), std::move(diffs), std::move(e1_on_e0)};
    validate_htpy_complex(c);
    return c;
}

HtpyComplex make_abelian_complex(std::vector<ObjPtr> terms, std::vector<Map> diffs) {
    if (terms.empty()) throw engine_error("empty complex");
    Action act = terms.size() >= 2 ? Action::make_translation(diffs.at(0))
                                   : Action::make_trivial(trivial_ab(), terms[0]);
    return make_htpy_complex(std::move(terms), std::move(diffs), act);
}

void validate_htpy_complex(const HtpyComplex& c) {
    if (c.terms.empty()) throw engine_error("empty complex");
    if (c.diffs.size() + 1 != c.terms.size()) throw engine_error("differential count mismatch");
    for (int n = 0; n <= c.top(); ++n) {
        if (n == 1 && !is_group_like(*c.term(1))) throw engine_error("E_1 must be a group");
        if (n >= 2 && !std::holds_alternative<FgAb>(*c.term(n)))
            throw engine_error("E_n must be abelian for n >= 2");
    }
    for (int n = 0; n < c.top(); ++n) {
        const Map& d = c.diffs[size_t(n)];
        if ((d.src != c.term(n + 1) && d.src.get() != c.term(n + 1).get()) ||
            (d.dst != c.term(n) && d.dst.get() != c.term(n).get()))
            throw engine_error("differential endpoints mismatch");
        if (!map_is_structural(d)) throw engine_error("differential is not structural");
    }
    for (int n = 0; n + 1 < c.top(); ++n)
        if (!map_is_trivial(compose(c.diffs[size_t(n)], c.diffs[size_t(n + 1)])))
            throw engine_error("d after d is not trivial");
    if (!action_valid(c.e1_on_e0)) throw engine_error("invalid E_1 action on E_0");
    if (c.top() >= 1 && !map_equal(c.diffs[0], action_on_basepoint(c.e1_on_e0)))
        throw engine_error("d_1 is not the E_1-action applied to the basepoint");
}

AugMap plain_augmentation(Map eps) {
    Subobj killed = subobj_trivial(*eps.dst);
    return AugMap{std::move(eps), std::move(killed)};
}

Subobj aug_kernel(const AugMap& a) {
    if (a.killed.is_mask()) {
        // preimage of killed (which already contains the basepoint)
        return preimage_subobj(a.to, a.killed);
    }
    return preimage_subobj(a.to, a.killed);
}

bool aug_equal_images(const AugMap& a, int x, int y) {
    int ix = map_apply_idx(a.to, x), iy = map_apply_idx(a.to, y);
    if (ix == iy) return true;
    const auto& m = subobj_as_mask(*a.to.dst, a.killed).mask();
    return m[ix] && m[iy];
}

bool aug_is_equivariant(const AugMap& a, const Action& e1_on_e0) {
    if (obj_finite(*a.to.src) && obj_finite(*a.to.dst) && obj_finite(*e1_on_e0.group)) {
        i64 n = obj_size(*e1_on_e0.group), m = obj_size(*a.to.src);
        for (int g = 0; g < n; ++g)
            for (int x = 0; x < m; ++x)
                if (!aug_equal_images(a, x, action_apply(e1_on_e0, g, x))) return false;
        return true;
    }
    // abelian path: the translated images must not move modulo the killed lattice
    if (e1_on_e0.kind == Action::Kind::trivial) return true;
    if (e1_on_e0.kind != Action::Kind::translation)
        throw engine_error("unsupported action kind for infinite augmentation check");
    Map moved = compose(a.to, *e1_on_e0.phi);
    // need to(phi(g) + x) ~ to(x), i.e. to(phi(g)) inside the killed lattice
    for (int j = 0; j < moved.matrix().cols(); ++j)
        if (!lattice_contains(a.killed.lattice(), moved.matrix().col(j))) return false;
    return true;
}

void validate_biaugmented(const BiAugmentedComplex& c) {
    validate_htpy_complex(c.cx);
    int d = c.trunc_d();
    if (c.tau) {
        const Map& t = *c.tau;
        if (t.dst != c.cx.term(d) && t.dst.get() != c.cx.term(d).get())
            throw engine_error("augmentation target is not C^0");
        if (!map_is_structural(t)) throw engine_error("augmentation is not structural");
        // source kind per truncation: pointed / group / abelian
        if (d >= 1 && !is_group_like(*t.src))
            throw engine_error("augmentation source must be a group for d >= 1");
        if (d >= 2 && !std::holds_alternative<FgAb>(*t.src))
            throw engine_error("augmentation source must be abelian for d >= 2");
        if (d >= 1 && !map_is_trivial(compose(c.cx.diff_into(d - 1), t)))
            throw engine_error("d^0 tau is not trivial");
    }
    if (c.eps) {
        const AugMap& e = *c.eps;
        if (e.to.src != c.cx.term(0) && e.to.src.get() != c.cx.term(0).get())
            throw engine_error("coaugmentation source is not E_0");
        if (!map_is_structural(e.to)) throw engine_error("coaugmentation is not structural");
        if (!aug_is_equivariant(e, c.cx.e1_on_e0))
            throw engine_error("coaugmentation is not E_1-invariant");
        if (d >= 1) {
            // eps . d_1 must be trivial: image of d_1 maps into the killed part
            Subobj im = image_of_subobj(e.to, image_subobj(c.cx.diff_into(0)));
            Subobj killed_with_bp = e.killed;
            if (!subobj_contains(*e.to.dst, killed_with_bp, im))
                throw engine_error("eps d_1 is not trivial");
        }
    }
}

namespace {

SubqCert homotopy_cert_positive(const HtpyComplex& c, int n, std::vector<std::string>* warnings) {
    if (n < 1) throw engine_error("degree-0 homotopy needs an augmentation");
    Map din = c.diff_into(n);  // E_{n+1} -> E_n
    Subobj ker = n <= c.top() ? kernel_subobj(c.diffs[size_t(n - 1)]) : subobj_full(*c.term(n));
    Subobj im = image_subobj(din);
    ObjPtr parent = c.term(n);
    if (ker.is_mask() != im.is_mask()) {
        // mixed map representations over one carrier: align to lattice form
        ker = subobj_as_lattice(*parent, ker);
        im = subobj_as_lattice(*parent, im);
    }
    if (!subobj_contains(*parent, ker, im))
        throw engine_error("image not inside kernel (d d != * ?)");
    SubqCert cert;
    cert.sub = ker;
    if (ker.is_mask()) {
        // partition of ker by cosets of the image subgroup (degree >= 1) or by
        // the image subset collapse (degree 0, not used here)
        Subobj im_mask = subobj_as_mask(*parent, im);
        if (n >= 1) {
            if (!subobj_is_subgroup(*parent, im_mask))
                throw engine_error("image is not a subgroup");
            // normality of im inside ker
            Subobj ker_mask = subobj_as_mask(*parent, ker);
            if (n == 1) {
                bool central = subobj_central(*parent, im_mask);
                bool normal = true;
                const auto& km = ker_mask.mask();
                const auto& nm = im_mask.mask();
                for (size_t a = 0; a < km.size() && normal; ++a) {
                    if (!km[a]) continue;
                    for (size_t h = 0; h < nm.size() && normal; ++h) {
                        if (!nm[h]) continue;
                        int conj = obj_op(*parent, obj_op(*parent, int(a), int(h)),
                                          obj_inv(*parent, int(a)));
                        if (!nm[conj]) normal = false;
                    }
                }
                if (!normal) {
                    std::string w = "image of d_2 not normal in Ker(d_1) at degree 1";
                    throw normality_error(w, w);
                }
                if (!central && warnings)
                    warnings->push_back("pi_1 quotient by a normal non-central image");
            }
            // classes = cosets of im within ker
            const auto& km = std::get<std::vector<char>>(ker_mask.data);
            std::vector<int> cls(km.size(), -1);
            int next = 0;
            for (size_t a = 0; a < km.size(); ++a) {
                if (!km[a] || cls[a] != -1) continue;
                cls[a] = next;
                for (size_t h = 0; h < km.size(); ++h)
                    if (im_mask.mask()[h]) {
                        int b = obj_op(*parent, int(a), int(h));
                        cls[b] = next;
                    }
                ++next;
            }
            cert.collapse = std::move(cls);
        } else {
            throw engine_error("degree-0 homotopy needs an augmentation");
        }
    } else {
        cert.collapse = im.lattice();
    }
    return cert;
}

SubqCert homotopy_cert_zero(const HtpyComplex& c, const AugMap& aug) {
    Subobj ker = aug_kernel(aug);
    ObjPtr parent = c.term(0);
    if (!ker.is_mask() &&
        (c.e1_on_e0.kind == Action::Kind::table || c.e1_on_e0.kind == Action::Kind::matrices))
        ker = subobj_as_mask(*parent, ker);
    // sanity: the incoming differential image must sit inside ker(eps)
    Subobj im = image_subobj(c.diff_into(0));
    if (!subobj_contains(*parent, ker, im)) throw engine_error("eps d_1 not trivial");
    SubqCert cert;
    cert.sub = ker;
    if (ker.is_mask()) {
        if (!action_stabilizes(c.e1_on_e0, ker))
            throw engine_error("kernel of eps is not stable under the E_1-action");
        OrbitResult orb = orbit_space_restricted(c.e1_on_e0, ker);
        // partition over the parent indexed by orbit classes
        const auto& km = ker.mask();
        std::vector<int> cls(km.size(), -1);
        SubObjResult sub = materialize_sub(parent, ker);
        for (int k = 0; k < int(obj_size(*sub.obj)); ++k)
            cls[size_t(map_apply_idx(sub.incl, k))] = map_apply_idx(orb.proj, k);
        cert.collapse = std::move(cls);
    } else {
        // abelian: collapse by the translation image
        if (c.e1_on_e0.kind != Action::Kind::translation &&
            c.e1_on_e0.kind != Action::Kind::trivial)
            throw engine_error("unsupported action kind on an infinite E_0");
        const auto& pa = std::get<FgAb>(*parent);
        IntMat orbit_lattice =
            c.e1_on_e0.kind == Action::Kind::trivial
                ? lattice_hnf(pa.rels)
                : lattice_sum((*c.e1_on_e0.phi).matrix(), pa.rels);
        cert.collapse = orbit_lattice;
    }
    return cert;
}

}  // namespace

std::pair<SubqCert, ObjPtr> homotopy_at(const HtpyComplex& c, int n,
                                        const std::optional<AugMap>& aug) {
    SubqCert cert;
    if (n == 0) {
        if (!aug) throw engine_error("degree-0 homotopy needs an augmentation");
        cert = homotopy_cert_zero(c, *aug);
    } else {
        cert = homotopy_cert_positive(c, n, nullptr);
    }
    SubqMaterialized m = materialize_subq(c.term(n), cert);
    return {cert, m.obj};
}

HomotopyGroups homotopy_groups(const HtpyComplex& c, const std::optional<AugMap>& aug) {
    HomotopyGroups out;
    out.certs.resize(size_t(c.top()) + 1);
    out.groups.resize(size_t(c.top()) + 1, trivial_pointed_set());
    for (int n = 1; n <= c.top(); ++n) {
        SubqCert cert = homotopy_cert_positive(c, n, &out.warnings);
        out.groups[size_t(n)] = materialize_subq(c.term(n), cert).obj;
        out.certs[size_t(n)] = std::move(cert);
    }
    if (aug) {
        SubqCert cert = homotopy_cert_zero(c, *aug);
        out.groups[0] = materialize_subq(c.term(0), cert).obj;
        out.certs[0] = std::move(cert);
    }
    return out;
}

ComplexExactness check_exact(const BiAugmentedComplex& c, ExactMode mode) {
    validate_biaugmented(c);
    ComplexExactness r;
    r.exact = true;
    int d = c.trunc_d();
    auto fail = [&](int p, const std::string& why) {
        r.exact = false;
        r.failures.push_back("C^" + std::to_string(p) + ": " + why);
    };
    // internal slots E_n for 0 < n < d (cohomotopical C^{d-n})
    for (int n = 1; n < d; ++n) {
        try {
            auto [cert, grp] = homotopy_at(c.cx, n, std::nullopt);
            if (!is_trivial_obj(*grp)) fail(d - n, "homotopy group " + obj_desc(*grp));
        } catch (const normality_error& e) {
            fail(d - n, std::string("normality: ") + e.what());
        }
    }
    // at tau: Ker(tau) = * and im(tau) = Ker(d^0)
    if (c.tau) {
        const Map& t = *c.tau;
        if (!subobj_is_trivial(*t.src, kernel_subobj(t))) fail(0, "Ker(tau) nontrivial");
        if (d >= 1) {
            Subobj ker_d0 = kernel_subobj(c.cx.diff_into(d - 1));
            if (!subobj_equal(*t.dst, image_subobj(t), ker_d0)) fail(0, "im(tau) != Ker(d^0)");
        }
    }
    // at eps: E_1 acts transitively on Ker(eps)
    if (c.eps) {
        Subobj ker = aug_kernel(*c.eps);
        if (!action_transitive_on(c.cx.e1_on_e0, ker))
            fail(d, "E_1 not transitive on Ker(eps)");
    }
    r.strong = r.exact;
    if (mode == ExactMode::strong && c.eps) {
        // induced map E_0/E_1 -> F must be mono
        const AugMap& e = *c.eps;
        bool mono = true;
        if (obj_finite(*e.to.src) && obj_finite(*e.to.dst)) {
            OrbitResult orb = orbit_space(c.cx.e1_on_e0);
            i64 m = obj_size(*e.to.src);
            for (int x = 0; x < m && mono; ++x)
                for (int y = x + 1; y < m && mono; ++y) {
                    bool same_orbit =
                        map_apply_idx(orb.proj, x) == map_apply_idx(orb.proj, y);
                    if (!same_orbit && aug_equal_images(e, x, y)) mono = false;
                }
        } else {
            // abelian: ker(collapsed eps) inside the orbit lattice
            Subobj keraug = aug_kernel(e);
            const auto& pa = std::get<FgAb>(*e.to.src);
            IntMat orbit_lattice =
                c.cx.e1_on_e0.kind == Action::Kind::translation
                    ? lattice_sum((*c.cx.e1_on_e0.phi).matrix(), pa.rels)
                    : lattice_hnf(pa.rels);
            mono = lattice_subset(keraug.lattice(), orbit_lattice);
        }
        if (!mono) {
            r.strong = false;
            r.failures.push_back("C^" + std::to_string(d) + ": induced eps not mono");
        }
    }
    if (mode == ExactMode::strong) r.exact = r.exact && r.strong;
    return r;
}

CohPresentation reindex(const HtpyComplex& c, int d) {
    if (c.top() != d) throw engine_error("complex is not d-truncated as claimed");
    CohPresentation p;
    for (int n = 0; n <= d; ++n) p.terms.push_back(c.term(d - n));
    for (int n = 0; n < d; ++n) p.diffs.push_back(c.diffs[size_t(d - n - 1)]);
    return p;
}

HtpyComplex reindex_back(const CohPresentation& p, const Action& e1_on_e0) {
    int d = int(p.terms.size()) - 1;
    std::vector<ObjPtr> terms;
    std::vector<Map> diffs;
    for (int n = 0; n <= d; ++n) terms.push_back(p.terms[size_t(d - n)]);
    for (int n = 0; n < d; ++n) diffs.push_back(p.diffs[size_t(d - n - 1)]);
    return make_htpy_complex(std::move(terms), std::move(diffs), e1_on_e0);
}

bool complexes_structurally_equal(const HtpyComplex& a, const HtpyComplex& b) {
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        if (a.terms[i].get() == b.terms[i].get()) continue;
        if (obj_kind(*a.terms[i]) != obj_kind(*b.terms[i])) return false;
        if (obj_desc(*a.terms[i]) != obj_desc(*b.terms[i])) return false;
    }
    for (size_t i = 0; i < a.diffs.size(); ++i)
        if (!map_equal(a.diffs[i], b.diffs[i])) return false;
    return true;
}

}  // namespace gersten
