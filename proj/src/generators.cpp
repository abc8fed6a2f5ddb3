#include "gersten/generators.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>

namespace gersten {

// ---------------------------------------------------------------------------
// group tables

FinGroup table_cyclic(int n) {
    std::vector<int> t(size_t(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) t[size_t(a) * n + b] = (a + b) % n;
    return make_fin_group(n, std::move(t));
}

FinGroup table_dihedral(int n) {
    // elements r^i s^j, index i + n*j
    int order = 2 * n;
    std::vector<int> t(size_t(order) * order);
    auto idx = [n](int i, int j) { return i + n * j; };
    for (int i1 = 0; i1 < n; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < n; ++i2)
                for (int j2 = 0; j2 < 2; ++j2) {
                    int i = ((i1 + (j1 ? -i2 : i2)) % n + n) % n;
                    int j = (j1 + j2) % 2;
                    t[size_t(idx(i1, j1)) * order + idx(i2, j2)] = idx(i, j);
                }
    return make_fin_group(order, std::move(t));
}

FinGroup table_sym3() {
    auto cp = [](const std::array<int, 3>& f, const std::array<int, 3>& g) {
        std::array<int, 3> h{};
        for (int i = 0; i < 3; ++i) h[i] = f[g[i]];
        return h;
    };
    std::array<int, 3> e{0, 1, 2}, r{1, 2, 0}, s{1, 0, 2};
    std::vector<std::array<int, 3>> el{e, r, cp(r, r), s, cp(s, r), cp(s, cp(r, r))};
    auto find = [&](const std::array<int, 3>& p) {
        for (size_t i = 0; i < el.size(); ++i)
            if (el[i] == p) return int(i);
        return -1;
    };
    std::vector<int> t(36);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) t[a * 6 + b] = find(cp(el[a], el[b]));
    return make_fin_group(6, std::move(t), {"e", "r", "r2", "s", "sr", "sr2"});
}

FinGroup table_quaternion8() {
    auto mul = [](int a, int b) {
        auto sign = [](int x) { return x & 1; };
        auto unit = [](int x) { return x >> 1; };  // 0:1, 1:i, 2:j, 3:k
        static const int utab[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
        static const int stab[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
        int u = utab[unit(a)][unit(b)];
        int s = sign(a) ^ sign(b) ^ stab[unit(a)][unit(b)];
        return (u << 1) | s;
    };
    std::vector<int> t(64);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) t[a * 8 + b] = mul(a, b);
    return make_fin_group(8, std::move(t));
}

FinGroup table_direct_product(const FinGroup& a, const FinGroup& b) {
    int n = a.order * b.order;
    std::vector<int> t(size_t(n) * n);
    auto idx = [&](int x, int y) { return x + a.order * y; };
    for (int x1 = 0; x1 < a.order; ++x1)
        for (int y1 = 0; y1 < b.order; ++y1)
            for (int x2 = 0; x2 < a.order; ++x2)
                for (int y2 = 0; y2 < b.order; ++y2)
                    t[size_t(idx(x1, y1)) * n + idx(x2, y2)] = idx(a.mul(x1, x2), b.mul(y1, y2));
    return make_fin_group(n, std::move(t));
}

FinGroup table_alternating4() {
    std::vector<std::array<int, 4>> el;
    std::array<int, 4> p{0, 1, 2, 3};
    do {
        int inv = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (p[i] > p[j]) ++inv;
        if (inv % 2 == 0) el.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    for (size_t i = 0; i < el.size(); ++i)
        if (el[i] == std::array<int, 4>{0, 1, 2, 3}) std::swap(el[0], el[i]);
    auto cp = [](const std::array<int, 4>& f, const std::array<int, 4>& g) {
        std::array<int, 4> h{};
        for (int i = 0; i < 4; ++i) h[i] = f[g[i]];
        return h;
    };
    auto find = [&](const std::array<int, 4>& q) {
        for (size_t i = 0; i < el.size(); ++i)
            if (el[i] == q) return int(i);
        return -1;
    };
    std::vector<int> t(144);
    for (int a = 0; a < 12; ++a)
        for (int b = 0; b < 12; ++b) t[a * 12 + b] = find(cp(el[a], el[b]));
    return make_fin_group(12, std::move(t));
}

// ---------------------------------------------------------------------------
// abelian towers

namespace {

struct HomTable {
    std::vector<HomologyData> h;
};

HomTable homology_table(const AbChainComplex& c, int nmax) {
    HomTable t;
    for (int n = 0; n <= nmax; ++n) t.h.push_back(homology_at(c, n));
    return t;
}

}  // namespace

ReesSystem rees_from_filtration(const AbChainComplex& C,
                                const std::vector<std::vector<IntMat>>& lambda) {
    int d = int(lambda.size()) - 1;
    int nmax = C.top();
    ReesSystem s;
    s.d = d;
    s.nmax = nmax;
    s.abelian_flavor = true;

    auto quotient_complex = [&](const std::vector<IntMat>& lam) {
        std::vector<FgAb> terms;
        std::vector<IntMat> diffs;
        for (int n = 0; n <= nmax; ++n)
            terms.push_back(make_fgab(C.term(n).ngens, lam[size_t(n)]));
        for (int n = 0; n < nmax; ++n) diffs.push_back(C.d[size_t(n)]);
        return make_ab_chain_complex(std::move(terms), std::move(diffs));
    };
    auto lattice_complex = [&](const std::vector<IntMat>& lam, std::vector<IntMat>* bases) {
        std::vector<FgAb> terms;
        std::vector<IntMat> diffs;
        std::vector<IntMat> bs;
        for (int n = 0; n <= nmax; ++n) {
            IntMat basis = lattice_hnf(lam[size_t(n)]);
            bs.push_back(basis);
            terms.push_back(make_fgab(basis.cols(), lattice_preimage(basis, C.term(n).rels)));
        }
        for (int n = 0; n < nmax; ++n) {
            IntMat moved = C.d[size_t(n)].mul(bs[size_t(n + 1)]);
            IntMat sys = bs[size_t(n)].hcat(C.term(n).rels);
            IntMat dk(terms[size_t(n)].ngens, terms[size_t(n + 1)].ngens);
            for (int j = 0; j < moved.cols(); ++j) {
                std::vector<i64> sol;
                if (!solve_integer(sys, moved.col(j), &sol))
                    throw engine_error("filtration is not a subcomplex chain");
                for (int i = 0; i < dk.rows(); ++i) dk.at(i, j) = sol[size_t(i)];
            }
            diffs.push_back(dk);
        }
        if (bases) *bases = bs;
        return make_ab_chain_complex(std::move(terms), std::move(diffs));
    };
    auto rel_quotient_on_basis = [&](const std::vector<IntMat>& bases,
                                     const std::vector<IntMat>& sublam,
                                     const AbChainComplex& gcx) {
        std::vector<FgAb> terms;
        std::vector<IntMat> diffs = gcx.d;
        for (int n = 0; n <= nmax; ++n)
            terms.push_back(make_fgab(bases[size_t(n)].cols(),
                                      lattice_preimage(bases[size_t(n)], sublam[size_t(n)])));
        return make_ab_chain_complex(std::move(terms), std::move(diffs));
    };

    std::vector<IntMat> full;
    for (int n = 0; n <= nmax; ++n) full.push_back(IntMat::identity(C.term(n).ngens));

    std::vector<AbChainComplex> T, G, K;
    std::vector<std::vector<IntMat>> GB, KB;
    for (int p = 0; p <= d; ++p) T.push_back(quotient_complex(lambda[size_t(p)]));
    for (int p = 0; p <= d; ++p) {
        std::vector<IntMat> bs;
        G.push_back(lattice_complex(lambda[size_t(p)], &bs));
        GB.push_back(bs);
    }
    for (int p = 0; p <= d; ++p) {
        const std::vector<IntMat>& outer = p == 0 ? full : GB[size_t(p - 1)];
        const AbChainComplex& outer_cx = p == 0 ? C : G[size_t(p - 1)];
        K.push_back(rel_quotient_on_basis(outer, lambda[size_t(p)], outer_cx));
        KB.push_back(outer);
    }

    HomTable HX = homology_table(C, nmax);
    std::vector<HomTable> HT, HG, HK;
    for (int p = 0; p <= d; ++p) {
        HT.push_back(homology_table(T[size_t(p)], nmax));
        HG.push_back(homology_table(G[size_t(p)], nmax));
        HK.push_back(homology_table(K[size_t(p)], nmax));
    }

    for (int n = 0; n <= nmax; ++n) s.PIX.push_back(HX.h[size_t(n)].mat.obj);
    s.XP.assign(size_t(d) + 1, {});
    s.FP.assign(size_t(d) + 1, {});
    s.GP.assign(size_t(d) + 1, {});
    for (int p = 0; p <= d; ++p)
        for (int n = 0; n <= nmax; ++n) {
            s.XP[size_t(p)].push_back(HT[size_t(p)].h[size_t(n)].mat.obj);
            s.FP[size_t(p)].push_back(HK[size_t(p)].h[size_t(n)].mat.obj);
            s.GP[size_t(p)].push_back(HG[size_t(p)].h[size_t(n)].mat.obj);
        }

    auto id_mats = [&](const AbChainComplex& src) {
        std::vector<IntMat> m;
        for (int n = 0; n <= nmax; ++n) m.push_back(IntMat::identity(src.term(n).ngens));
        return m;
    };
    auto solve_incl = [&](const std::vector<IntMat>& inner, const std::vector<IntMat>& outer) {
        std::vector<IntMat> m;
        for (int n = 0; n <= nmax; ++n) {
            IntMat sys = outer[size_t(n)].hcat(C.term(n).rels);
            IntMat out(outer[size_t(n)].cols(), inner[size_t(n)].cols());
            for (int j = 0; j < inner[size_t(n)].cols(); ++j) {
                std::vector<i64> sol;
                if (!solve_integer(sys, inner[size_t(n)].col(j), &sol))
                    throw engine_error("filtration lattices are not nested");
                for (int i = 0; i < out.rows(); ++i) out.at(i, j) = sol[size_t(i)];
            }
            m.push_back(out);
        }
        return m;
    };

    s.a_.assign(size_t(d) + 1, {});
    s.alpha_.assign(size_t(d) + 1, {});
    s.beta_.assign(size_t(d) + 1, {});
    s.gamma_.assign(size_t(d) + 1, {});
    s.abar_.assign(size_t(d) + 1, {});
    s.bbar_.assign(size_t(d) + 1, {});
    s.gbar_.assign(size_t(d) + 1, {});
    s.b_.assign(size_t(d) + 1, {});
    s.c_.assign(size_t(d) + 1, {});

    for (int p = 0; p <= d; ++p) {
        AbChainMap a_map{id_mats(C)};
        AbChainMap gamma_map{KB[size_t(p)]};
        AbChainMap c_map{GB[size_t(p)]};
        AbChainMap bbar_map{id_mats(p == 0 ? C : G[size_t(p - 1)])};
        AbChainMap abar_map;
        if (p >= 1) abar_map.comps = solve_incl(GB[size_t(p)], GB[size_t(p - 1)]);
        AbChainMap alpha_map{id_mats(C)};
        const AbChainComplex& outer_cx = p == 0 ? C : G[size_t(p - 1)];
        const HomTable& houter = p == 0 ? HX : HG[size_t(p - 1)];
        for (int n = 0; n <= nmax; ++n) {
            s.a_[size_t(p)].push_back(induced_on_homology(C, T[size_t(p)], a_map, n,
                                                          HX.h[size_t(n)],
                                                          HT[size_t(p)].h[size_t(n)]));
            s.gamma_[size_t(p)].push_back(
                induced_on_homology(K[size_t(p)], T[size_t(p)], gamma_map, n,
                                    HK[size_t(p)].h[size_t(n)], HT[size_t(p)].h[size_t(n)]));
            s.c_[size_t(p)].push_back(induced_on_homology(G[size_t(p)], C, c_map, n,
                                                          HG[size_t(p)].h[size_t(n)],
                                                          HX.h[size_t(n)]));
            s.bbar_[size_t(p)].push_back(
                induced_on_homology(outer_cx, K[size_t(p)], bbar_map, n, houter.h[size_t(n)],
                                    HK[size_t(p)].h[size_t(n)]));
            if (p >= 1) {
                s.abar_[size_t(p)].push_back(
                    induced_on_homology(G[size_t(p)], G[size_t(p - 1)], abar_map, n,
                                        HG[size_t(p)].h[size_t(n)],
                                        HG[size_t(p - 1)].h[size_t(n)]));
                s.alpha_[size_t(p)].push_back(
                    induced_on_homology(T[size_t(p)], T[size_t(p - 1)], alpha_map, n,
                                        HT[size_t(p)].h[size_t(n)],
                                        HT[size_t(p - 1)].h[size_t(n)]));
            } else {
                // abar_0 : G_0 -> G_{-1} = X is the lattice inclusion
                s.abar_[size_t(p)].push_back(induced_on_homology(
                    G[0], C, c_map, n, HG[0].h[size_t(n)], HX.h[size_t(n)]));
                s.alpha_[size_t(p)].push_back(
                    trivial_map(s.XP[0][size_t(n)], s.trivial_term(n)));
            }
        }
    }
    // connecting maps with the alternating sign convention:
    //   beta_p, gbar_p carry (-1)^{p+1}, b_p carries (-1)^p
    for (int p = 0; p <= d; ++p) {
        AbChainMap incl1{KB[size_t(p)]};
        AbChainMap proj1{id_mats(C)};
        AbChainMap incl2;
        if (p >= 1)
            incl2.comps = solve_incl(GB[size_t(p)], GB[size_t(p - 1)]);
        else
            incl2.comps = GB[0];
        AbChainMap proj2{id_mats(p == 0 ? C : G[size_t(p - 1)])};
        AbChainMap incl3{GB[size_t(p)]};
        AbChainMap proj3{id_mats(C)};
        const AbChainComplex& outer2 = p == 0 ? C : G[size_t(p - 1)];
        std::vector<Map> betas, gbars, bs;
        betas.push_back(trivial_map(s.xp(p - 1, 1), s.fp(p, 0)));   // filled below per degree
        betas.clear();
        for (int n = 0; n + 1 <= nmax; ++n) {
            Map bsnake = p >= 1 ? connecting_on_homology(
                                      K[size_t(p)], T[size_t(p)], T[size_t(p - 1)], incl1, proj1,
                                      HT[size_t(p - 1)].h[size_t(n + 1)],
                                      HK[size_t(p)].h[size_t(n)], n + 1)
                                : trivial_map(s.xp(p - 1, n + 1), s.fp(p, n));
            betas.push_back((p + 1) % 2 == 0 ? bsnake : negate_map(bsnake));
            Map gsnake = connecting_on_homology(G[size_t(p)], outer2, K[size_t(p)], incl2, proj2,
                                                HK[size_t(p)].h[size_t(n + 1)],
                                                HG[size_t(p)].h[size_t(n)], n + 1);
            gbars.push_back((p + 1) % 2 == 0 ? gsnake : negate_map(gsnake));
            Map bsn = connecting_on_homology(G[size_t(p)], C, T[size_t(p)], incl3, proj3,
                                             HT[size_t(p)].h[size_t(n + 1)],
                                             HG[size_t(p)].h[size_t(n)], n + 1);
            bs.push_back(p % 2 == 0 ? bsn : negate_map(bsn));
        }
        s.beta_[size_t(p)] = betas;  // beta_[p][n] : Pi_{n+1}(X_{p-1}) -> Pi_n(F_p)
        // gbar_[p][n] : Pi_n(F_p) -> Pi_{n-1}(G_p); shift by one degree
        std::vector<Map> gb, bb;
        gb.push_back(trivial_map(s.fp(p, 0), s.trivial_term(0)));
        for (auto& m : gbars) gb.push_back(m);
        s.gbar_[size_t(p)] = std::move(gb);
        bb.push_back(trivial_map(s.xp(p, 0), s.trivial_term(0)));
        for (auto& m : bs) bb.push_back(m);
        s.b_[size_t(p)] = std::move(bb);
    }
    for (int p = 0; p <= d; ++p) {
        s.act1.push_back(nmax >= 1 ? Action::make_translation(s.beta_at(p, 0))
                                   : Action::make_trivial(s.xp(p - 1, 1), s.fp(p, 0)));
        s.act2.push_back(nmax >= 1 ? Action::make_translation(s.gbar_at(p, 1))
                                   : Action::make_trivial(s.fp(p, 1), s.gp(p, 0)));
        s.act3.push_back(nmax >= 1 ? Action::make_translation(s.b_at(p, 1))
                                   : Action::make_trivial(s.xp(p, 1), s.gp(p, 0)));
    }
    return s;
}

ReesSystem random_abelian_rees(std::mt19937& rng, const TowerGenOptions& opt) {
    std::uniform_int_distribution<int> coin(0, 1), tor(2, std::max(2, opt.max_torsion)),
        deg(0, opt.top_degree), mult(1, 3), small(-2, 2);
    int K = opt.top_degree;
    std::vector<int> gens(size_t(K) + 1, 0);
    struct Rel {
        int degree, gen;
        i64 value;
    };
    std::vector<Rel> torsion;
    struct Elem {
        int degree_top, gen_top, gen_bot;
        i64 m;
    };
    std::vector<Elem> pairs;
    int nfree = 1 + coin(rng) + coin(rng);
    for (int i = 0; i < nfree; ++i) gens[size_t(deg(rng))]++;
    int ntor = coin(rng) + coin(rng);
    for (int i = 0; i < ntor; ++i) {
        int dd = deg(rng);
        torsion.push_back({dd, gens[size_t(dd)], i64(tor(rng))});
        gens[size_t(dd)]++;
    }
    int npairs = 1 + coin(rng) + coin(rng);
    for (int i = 0; i < npairs; ++i) {
        int dd = std::max(1, std::min(K, 1 + deg(rng) % std::max(K, 1)));
        Elem e{dd, gens[size_t(dd)], gens[size_t(dd - 1)], i64(mult(rng))};
        gens[size_t(dd)]++;
        gens[size_t(dd - 1)]++;
        pairs.push_back(e);
    }
    std::vector<FgAb> terms;
    std::vector<IntMat> dmats;
    for (int n = 0; n <= K; ++n) {
        std::vector<Rel> rels_here;
        for (const auto& r : torsion)
            if (r.degree == n) rels_here.push_back(r);
        IntMat rels(std::max(gens[size_t(n)], 0), int(rels_here.size()));
        for (size_t j = 0; j < rels_here.size(); ++j)
            rels.at(rels_here[j].gen, int(j)) = rels_here[j].value;
        terms.push_back(make_fgab(gens[size_t(n)], rels));
    }
    for (int n = 0; n < K; ++n) {
        IntMat m(gens[size_t(n)], gens[size_t(n + 1)]);
        for (const auto& e : pairs)
            if (e.degree_top == n + 1) m.at(e.gen_bot, e.gen_top) = e.m;
        dmats.push_back(m);
    }
    AbChainComplex C = make_ab_chain_complex(std::move(terms), std::move(dmats));
    int d = opt.d;
    std::vector<std::vector<IntMat>> lambda(size_t(d) + 1);
    for (int n = 0; n <= K; ++n) lambda[size_t(d)].push_back(lattice_hnf(C.term(n).rels));
    for (int p = d - 1; p >= 0; --p) {
        lambda[size_t(p)] = lambda[size_t(p + 1)];
        int extra = 1 + coin(rng);
        for (int t = 0; t < extra; ++t) {
            int n = deg(rng);
            if (C.term(n).ngens == 0) continue;
            std::vector<i64> v(size_t(C.term(n).ngens), 0);
            for (auto& x : v) x = small(rng);
            lambda[size_t(p)][size_t(n)] =
                lattice_sum(lambda[size_t(p)][size_t(n)], IntMat::col_vector(v));
            if (n >= 1) {
                std::vector<i64> dv = C.d[size_t(n - 1)].apply(v);
                lambda[size_t(p)][size_t(n - 1)] =
                    lattice_sum(lambda[size_t(p)][size_t(n - 1)], IntMat::col_vector(dv));
            }
        }
    }
    return rees_from_filtration(C, lambda);
}

// ---------------------------------------------------------------------------
// group towers

ReesSystem rees_from_group_tower(const FinGroup& g, const std::vector<std::vector<char>>& chain) {
    int d = int(chain.size());
    int nmax = 2;  // degrees 0,1 carry content; degree 2 is a trivial guard
    ReesSystem s;
    s.d = d;
    s.nmax = nmax;
    s.abelian_flavor = false;
    ObjPtr G = make_obj(g);

    auto subgroup_mask = [&](int p) -> std::vector<char> {
        if (p < 0) return std::vector<char>(size_t(g.order), 1);
        if (p >= d) {
            std::vector<char> m(size_t(g.order), 0);
            m[0] = 1;
            return m;
        }
        return chain[size_t(p)];
    };
    std::vector<QuotientResult> T;
    for (int p = 0; p <= d; ++p) T.push_back(materialize_quotient(G, Subobj{subgroup_mask(p)}));
    std::vector<SubObjResult> N;
    for (int p = 0; p <= d; ++p) N.push_back(materialize_sub(G, Subobj{subgroup_mask(p)}));
    // K_p = image of N_{p-1} in T_p (K_0 = all of T_0)
    std::vector<SubObjResult> Kp;
    for (int p = 0; p <= d; ++p) {
        Subobj img = p == 0 ? subobj_full(*T[0].obj)
                            : image_subobj(compose(T[size_t(p)].proj, N[size_t(p - 1)].incl));
        Kp.push_back(materialize_sub(T[size_t(p)].obj, img));
    }

    auto triv0 = trivial_pointed_set();
    auto trivab = trivial_ab();
    for (int n = 0; n <= nmax; ++n) s.PIX.push_back(n == 1 ? G : (n == 0 ? triv0 : trivab));
    s.XP.assign(size_t(d) + 1, {});
    s.FP.assign(size_t(d) + 1, {});
    s.GP.assign(size_t(d) + 1, {});
    for (int p = 0; p <= d; ++p)
        for (int n = 0; n <= nmax; ++n) {
            s.XP[size_t(p)].push_back(n == 1 ? T[size_t(p)].obj : (n == 0 ? triv0 : trivab));
            s.FP[size_t(p)].push_back(n == 1 ? Kp[size_t(p)].obj : (n == 0 ? triv0 : trivab));
            s.GP[size_t(p)].push_back(n == 1 ? N[size_t(p)].obj : (n == 0 ? triv0 : trivab));
        }
    s.a_.assign(size_t(d) + 1, {});
    s.alpha_.assign(size_t(d) + 1, {});
    s.beta_.assign(size_t(d) + 1, {});
    s.gamma_.assign(size_t(d) + 1, {});
    s.abar_.assign(size_t(d) + 1, {});
    s.bbar_.assign(size_t(d) + 1, {});
    s.gbar_.assign(size_t(d) + 1, {});
    s.b_.assign(size_t(d) + 1, {});
    s.c_.assign(size_t(d) + 1, {});
    for (int p = 0; p <= d; ++p) {
        for (int n = 0; n <= nmax; ++n) {
            if (n != 1) {
                s.a_[size_t(p)].push_back(trivial_map(s.PIX[size_t(n)], s.xp(p, n)));
                s.alpha_[size_t(p)].push_back(trivial_map(s.xp(p, n), s.xp(p - 1, n)));
                s.gamma_[size_t(p)].push_back(trivial_map(s.fp(p, n), s.xp(p, n)));
                s.abar_[size_t(p)].push_back(trivial_map(s.gp(p, n), s.gp(p - 1, n)));
                s.bbar_[size_t(p)].push_back(trivial_map(s.gp(p - 1, n), s.fp(p, n)));
                s.c_[size_t(p)].push_back(trivial_map(s.gp(p, n), s.PIX[size_t(n)]));
            } else {
                s.a_[size_t(p)].push_back(T[size_t(p)].proj);
                if (p >= 1) {
                    std::vector<int> img(size_t(obj_size(*T[size_t(p)].obj)), -1);
                    for (int x = 0; x < g.order; ++x) {
                        int cp_ = map_apply_idx(T[size_t(p)].proj, x);
                        int cm = map_apply_idx(T[size_t(p - 1)].proj, x);
                        img[size_t(cp_)] = cm;
                    }
                    s.alpha_[size_t(p)].push_back(make_elem_map_checked(
                        T[size_t(p)].obj, T[size_t(p - 1)].obj,
                        std::vector<int>(img.begin(), img.end())));
                } else {
                    s.alpha_[size_t(p)].push_back(trivial_map(s.xp(0, 1), s.xp(-1, 1)));
                }
                s.gamma_[size_t(p)].push_back(Kp[size_t(p)].incl);
                if (p >= 1) {
                    std::vector<int> img(size_t(obj_size(*N[size_t(p)].obj)), -1);
                    std::vector<int> where(size_t(g.order), -1);
                    for (i64 y = 0; y < obj_size(*N[size_t(p - 1)].obj); ++y)
                        where[size_t(map_apply_idx(N[size_t(p - 1)].incl, int(y)))] = int(y);
                    for (i64 x = 0; x < obj_size(*N[size_t(p)].obj); ++x) {
                        int w = where[size_t(map_apply_idx(N[size_t(p)].incl, int(x)))];
                        if (w < 0) throw engine_error("normal chain is not nested");
                        img[size_t(x)] = w;
                    }
                    s.abar_[size_t(p)].push_back(make_elem_map_checked(
                        N[size_t(p)].obj, N[size_t(p - 1)].obj,
                        std::vector<int>(img.begin(), img.end())));
                } else {
                    s.abar_[size_t(p)].push_back(N[0].incl);
                }
                Map into_t =
                    p == 0 ? T[0].proj : compose(T[size_t(p)].proj, N[size_t(p - 1)].incl);
                s.bbar_[size_t(p)].push_back(corestrict(into_t, Kp[size_t(p)]));
                s.c_[size_t(p)].push_back(N[size_t(p)].incl);
            }
        }
        for (int n = 0; n <= nmax; ++n) {
            s.beta_[size_t(p)].push_back(trivial_map(s.xp(p - 1, n + 1), s.fp(p, n)));
            s.gbar_[size_t(p)].push_back(trivial_map(s.fp(p, n), s.gp(p, n - 1)));
            s.b_[size_t(p)].push_back(trivial_map(s.xp(p, n), s.gp(p, n - 1)));
        }
        s.act1.push_back(Action::make_trivial(s.xp(p - 1, 1), s.fp(p, 0)));
        s.act2.push_back(Action::make_trivial(s.fp(p, 1), s.gp(p, 0)));
        s.act3.push_back(Action::make_trivial(s.xp(p, 1), s.gp(p, 0)));
    }
    return s;
}

ReesSystem random_group_rees(std::mt19937& rng, const TowerGenOptions& opt) {
    std::uniform_int_distribution<int> pick(0, 5);
    FinGroup g = table_sym3();
    switch (pick(rng)) {
        case 0: g = table_sym3(); break;
        case 1: g = table_dihedral(4); break;
        case 2: g = table_quaternion8(); break;
        case 3: g = table_cyclic(8); break;
        case 4: g = table_alternating4(); break;
        case 5: g = table_direct_product(table_sym3(), table_cyclic(2)); break;
    }
    if (g.order > opt.max_group_order) g = table_sym3();
    Obj gobj = g;
    int d = opt.d;
    std::vector<std::vector<char>> chain(size_t(d), std::vector<char>{});
    std::vector<char> cur(size_t(g.order), 0);
    cur[0] = 1;
    std::uniform_int_distribution<int> elt(0, g.order - 1);
    for (int p = d - 1; p >= 0; --p) {
        if (pick(rng) % 2 == 0) {
            std::vector<char> withx = cur;
            withx[size_t(elt(rng))] = 1;
            cur = normal_closure(gobj, Subobj{withx}).mask();
        }
        chain[size_t(p)] = cur;
    }
    return rees_from_group_tower(g, chain);
}

}  // namespace gersten
