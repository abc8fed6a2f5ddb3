#include "doctest.h"

#include <array>

#include "gersten/pistruct.hpp"

using namespace gersten;

namespace {

FinGroup sym3() {
    auto compose_perm = [](const std::array<int, 3>& f, const std::array<int, 3>& g) {
        std::array<int, 3> h{};
        for (int i = 0; i < 3; ++i) h[i] = f[g[i]];
        return h;
    };
    std::vector<std::array<int, 3>> elems;
    std::array<int, 3> e{0, 1, 2}, r{1, 2, 0}, s{1, 0, 2};
    elems = {e, r, compose_perm(r, r), s, compose_perm(s, r), compose_perm(s, compose_perm(r, r))};
    auto find = [&](const std::array<int, 3>& p) {
        for (size_t i = 0; i < elems.size(); ++i)
            if (elems[i] == p) return int(i);
        return -1;
    };
    std::vector<int> table(36);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) table[a * 6 + b] = find(compose_perm(elems[a], elems[b]));
    return make_fin_group(6, table);
}

constexpr int kT = 4;  // truncation for the small fixtures

PiStructure group_structure(ObjPtr g) {
    return make_pi_structure(trivial_pointed_set(), g, {}, {}, kT);
}

}  // namespace

TEST_CASE("all-trivial long sequence passes every axiom and is exact") {
    LongHtpySequence s = trivial_long_sequence(kT);
    SequenceAxiomReport r = validate_long_sequence(s);
    CHECK(r.all());
    ExactnessReport e = check_long_exactness(s);
    CHECK(e.exact);
    CHECK(e.weak_exact);
}

TEST_CASE("non-central boundary image fails axiom 4") {
    ObjPtr s3 = make_obj(sym3());
    ObjPtr z2g = make_obj(make_fin_group(2, {0, 1, 1, 0}));
    ObjPtr z3 = make_obj(fgab_cyclic(3));

    PiStructure F = group_structure(s3);
    PiStructure G = group_structure(z2g);
    PiStructure H = make_pi_structure(trivial_pointed_set(), trivial_group(), {z3}, {}, kT);

    std::vector<Map> fc{trivial_map(F.at(0), G.at(0)),
                        make_group_hom(s3, z2g, {0, 0, 0, 1, 1, 1})};
    PiMorphism f = make_pi_morphism(F, G, fc);
    PiMorphism g = trivial_pi_morphism(G, H);
    // boundary_2 : Z/3 -> S_3 onto the rotations (not central)
    std::vector<Map> bnd{trivial_map(H.at(1), F.at(0)), make_group_hom(z3, s3, {0, 1, 2})};
    Action act = Action::make_trivial(H.deg1, F.deg0);
    LongHtpySequence s = make_long_sequence(F, G, H, f, g, bnd, act);

    SequenceAxiomReport r = validate_long_sequence(s);
    CHECK(r.ax_structures);
    CHECK(r.ax_composites);
    CHECK_FALSE(r.ax_central);
}

TEST_CASE("non-equivariant f_0 fails axiom 3") {
    ObjPtr f0 = make_obj(make_pointed_set({"*", "a"}, 0));
    ObjPtr g0 = make_obj(make_pointed_set({"*", "b"}, 0));
    ObjPtr z2g = make_obj(make_fin_group(2, {0, 1, 1, 0}));

    PiStructure F = make_pi_structure(f0, trivial_group(), {}, {}, kT);
    PiStructure G = make_pi_structure(g0, trivial_group(), {}, {}, kT);
    PiStructure H = make_pi_structure(trivial_pointed_set(), z2g, {}, {}, kT);

    // H_1 = Z/2 swaps the two points of F_0; f_0 separates the orbit
    Action act = Action::make_table(z2g, f0, {{0, 1}, {1, 0}});
    std::vector<Map> fc{make_pointed_map(f0, g0, {0, 1})};
    PiMorphism f = make_pi_morphism(F, G, fc);
    PiMorphism g = trivial_pi_morphism(G, H);
    std::vector<Map> bnd{make_pointed_map(z2g, f0, {0, 1})};
    LongHtpySequence s = make_long_sequence(F, G, H, f, g, bnd, act);

    SequenceAxiomReport r = validate_long_sequence(s);
    CHECK_FALSE(r.ax_equivariance);
    CHECK(r.boundary_is_orbit_map);
    CHECK(r.basepoint_orbit_nontrivial);
}

TEST_CASE("1 -> A3 -> S3 -> Z/2 -> 1 is exact") {
    ObjPtr s3 = make_obj(sym3());
    ObjPtr a3 = make_obj(make_fin_group(3, {0, 1, 2, 1, 2, 0, 2, 0, 1}));
    ObjPtr z2g = make_obj(make_fin_group(2, {0, 1, 1, 0}));

    PiStructure F = group_structure(a3);
    PiStructure G = group_structure(s3);
    PiStructure H = group_structure(z2g);

    std::vector<Map> fc{trivial_map(F.at(0), G.at(0)), make_group_hom(a3, s3, {0, 1, 2})};
    std::vector<Map> gc{trivial_map(G.at(0), H.at(0)),
                        make_group_hom(s3, z2g, {0, 0, 0, 1, 1, 1})};
    PiMorphism f = make_pi_morphism(F, G, fc);
    PiMorphism g = make_pi_morphism(G, H, gc);
    std::vector<Map> bnd{make_pointed_map(z2g, F.at(0), {0, 0})};
    Action act = Action::make_trivial(z2g, F.deg0);
    LongHtpySequence s = make_long_sequence(F, G, H, f, g, bnd, act);

    CHECK(validate_long_sequence(s).all());
    ExactnessReport e = check_long_exactness(s);
    CHECK(e.exact);
}

TEST_CASE("identity three-term sequence is exact") {
    ObjPtr x0 = make_obj(make_pointed_set({"*", "p", "q"}, 0));
    ObjPtr x1 = make_obj(fgab_cyclic(4));
    PiStructure X = make_pi_structure(x0, x1, {}, {}, kT);
    PiStructure T = trivial_pi_structure(kT);
    PiMorphism id = identity_pi_morphism(X);
    PiMorphism g = trivial_pi_morphism(X, T);
    std::vector<Map> bnd;
    for (int n = 0; n < kT; ++n) bnd.push_back(trivial_map(T.at(n + 1), X.at(n)));
    Action act = Action::make_trivial(T.deg1, X.deg0);
    LongHtpySequence s = make_long_sequence(X, X, T, id, g, bnd, act);
    ExactnessReport e = check_long_exactness(s);
    CHECK(e.exact);
}

TEST_CASE("transitive H_1 action gives exactness at F_0") {
    ObjPtr f0 = make_obj(make_pointed_set({"*", "a"}, 0));
    ObjPtr z2g = make_obj(make_fin_group(2, {0, 1, 1, 0}));
    PiStructure F = make_pi_structure(f0, trivial_group(), {}, {}, kT);
    PiStructure G = trivial_pi_structure(kT);
    PiStructure H = make_pi_structure(trivial_pointed_set(), z2g, {}, {}, kT);
    Action act = Action::make_table(z2g, f0, {{0, 1}, {1, 0}});
    PiMorphism f = trivial_pi_morphism(F, G);
    PiMorphism g = trivial_pi_morphism(G, H);
    std::vector<Map> bnd{make_pointed_map(z2g, f0, {0, 1})};
    LongHtpySequence s = make_long_sequence(F, G, H, f, g, bnd, act);
    CHECK(validate_long_sequence(s).all());
    ExactnessReport e = check_long_exactness(s);
    CHECK(e.exact);
}

TEST_CASE("pi_product recovers factors") {
    ObjPtr z4 = make_obj(fgab_cyclic(4));
    PiStructure A = make_pi_structure(make_obj(make_pointed_set({"*", "x"}, 0)), z4,
                                      {make_obj(fgab_cyclic(3))}, {}, kT);
    PiStructure T = trivial_pi_structure(kT);

    PiStructure P = pi_product({A, T});
    CHECK(obj_iso(*P.deg0, *A.deg0));
    CHECK(obj_iso(*P.deg1, *A.deg1));
    CHECK(obj_iso(*P.at(2), *A.at(2)));

    PiStructure Q = pi_product({A, A});
    CHECK(obj_size(*Q.deg0) == 4);
    CHECK(obj_size(*Q.at(2)) == 9);

    PiStructure E = pi_product({});
    CHECK(pi_structure_trivial(E));
}

TEST_CASE("filtered colimit over a finite filtered poset is the top value") {
    FinitePoset poset = make_finite_poset(3, {{0, 1}, {1, 2}});
    CHECK(poset_is_filtered(poset));
    CHECK(poset_maximum(poset) == 2);
    ObjPtr z2 = make_obj(fgab_cyclic(2));
    PiStructure S = make_pi_structure(trivial_pointed_set(), z2, {}, {}, kT);
    PiDiagram d;
    d.poset = poset;
    d.values = {trivial_pi_structure(kT), trivial_pi_structure(kT), S};
    d.maps.emplace_back(0, 1, trivial_pi_morphism(d.values[0], d.values[1]));
    d.maps.emplace_back(1, 2, trivial_pi_morphism(d.values[1], d.values[2]));
    ColimitResult r = filtered_colimit_pi(d);
    CHECK(r.at_index == 2);
    CHECK(obj_iso(*r.value.deg1, *z2));

    FinitePoset bad = make_finite_poset(2, {});
    CHECK_FALSE(poset_is_filtered(bad));
    PiDiagram db;
    db.poset = bad;
    db.values = {S, S};
    CHECK_THROWS_AS(filtered_colimit_pi(db), engine_error);
}

TEST_CASE("stabilizing chain detects the stable stage") {
    auto cyc = [&](i64 n) {
        return make_pi_structure(trivial_pointed_set(), make_obj(fgab_cyclic(n)), {}, {}, kT);
    };
    StabilizingChain c;
    c.values = {cyc(8), cyc(4), cyc(2), cyc(2), cyc(2)};
    auto red = [&](const PiStructure& a, const PiStructure& b) {
        std::vector<Map> comps{trivial_map(a.at(0), b.at(0)),
                               make_ab_hom(a.deg1, b.deg1, IntMat::from_rows({{1}}))};
        return make_pi_morphism(a, b, comps);
    };
    c.steps = {red(c.values[0], c.values[1]), red(c.values[1], c.values[2]),
               red(c.values[2], c.values[3]), red(c.values[3], c.values[4])};
    auto [value, stage] = colimit_stabilizing(c);
    CHECK(stage == 2);
    CHECK(obj_iso(*value.deg1, Obj(fgab_cyclic(2))));

    StabilizingChain cc;
    cc.values = {cyc(2), cyc(2)};
    cc.steps = {red(cc.values[0], cc.values[1])};
    CHECK(colimit_stabilizing(cc).second == 0);

    StabilizingChain nc;
    nc.values = {cyc(8), cyc(4), cyc(2)};
    nc.steps = {red(nc.values[0], nc.values[1]), red(nc.values[1], nc.values[2])};
    CHECK_THROWS_AS(colimit_stabilizing(nc), non_stabilizing_error);
}
