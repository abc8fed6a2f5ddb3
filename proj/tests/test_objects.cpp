#include "doctest.h"

#include "gersten/objects.hpp"

using namespace gersten;

namespace {

// S_3 given by its multiplication table on {e, r, r2, s, sr, sr2}
FinGroup sym3() {
    // permutation model: r = (123), s = (12)
    auto compose_perm = [](const std::array<int, 3>& f, const std::array<int, 3>& g) {
        std::array<int, 3> h{};
        for (int i = 0; i < 3; ++i) h[i] = f[g[i]];
        return h;
    };
    std::vector<std::array<int, 3>> elems;
    std::array<int, 3> e{0, 1, 2}, r{1, 2, 0}, s{1, 0, 2};
    elems.push_back(e);
    elems.push_back(r);
    elems.push_back(compose_perm(r, r));
    elems.push_back(s);
    elems.push_back(compose_perm(s, r));
    elems.push_back(compose_perm(s, compose_perm(r, r)));
    auto find = [&](const std::array<int, 3>& p) {
        for (size_t i = 0; i < elems.size(); ++i)
            if (elems[i] == p) return int(i);
        return -1;
    };
    std::vector<int> table(36);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) table[a * 6 + b] = find(compose_perm(elems[a], elems[b]));
    return make_fin_group(6, table, {"e", "r", "r2", "s", "sr", "sr2"});
}

FinGroup dihedral8() {
    // D4 = <r, s | r^4, s^2, srs = r^-1>, elements r^i s^j
    std::vector<int> table(64);
    auto idx = [](int i, int j) { return i + 4 * j; };
    for (int i1 = 0; i1 < 4; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 4; ++i2)
                for (int j2 = 0; j2 < 2; ++j2) {
                    // (r^i1 s^j1)(r^i2 s^j2) = r^(i1 + i2*(-1)^j1) s^(j1+j2)
                    int i = ((i1 + (j1 ? -i2 : i2)) % 4 + 4) % 4;
                    int j = (j1 + j2) % 2;
                    table[idx(i1, j1) * 8 + idx(i2, j2)] = idx(i, j);
                }
    return make_fin_group(8, table);
}

}  // namespace

TEST_CASE("pointed set basics") {
    PointedSet s = make_pointed_set({"*", "a", "b"}, 0);
    ObjPtr o = make_obj(s);
    CHECK(obj_size(*o) == 3);
    CHECK_FALSE(is_group_like(*o));
    CHECK_THROWS_AS(make_pointed_set({"x", "x"}, 0), engine_error);
    CHECK_THROWS_AS(make_pointed_set({"x"}, 2), engine_error);
}

TEST_CASE("fgab normal form is presentation independent") {
    // Z/2 + Z/4 via two different presentations
    FgAb a = fgab_from_factors(0, {2, 4});
    FgAb b = make_fgab(2, IntMat::from_rows({{2, 0}, {2, 4}}));
    CHECK(a.invariant_factors == b.invariant_factors);
    CHECK(a.free_rank == b.free_rank);
    CHECK(b.order() == 8);

    FgAb c = make_fgab(2, IntMat::from_rows({{2, 0}, {0, 3}}));
    CHECK(c.invariant_factors == std::vector<i64>{6});  // Z/2 + Z/3 = Z/6
}

TEST_CASE("kernel image cokernel: multiplication by 2 on Z") {
    ObjPtr z = make_obj(fgab_free(1));
    Map f = make_ab_hom(z, z, IntMat::from_rows({{2}}));
    CHECK(subobj_is_trivial(*z, kernel_subobj(f)));
    CHECK_FALSE(is_surjective(f));
    QuotientResult q = cokernel(f);
    CHECK(obj_desc(*q.obj) == "Z/2");
}

TEST_CASE("kernel image cokernel: Z/4 -> Z/2") {
    ObjPtr z4 = make_obj(fgab_cyclic(4));
    ObjPtr z2 = make_obj(fgab_cyclic(2));
    Map f = make_ab_hom(z4, z2, IntMat::from_rows({{1}}));
    CHECK(subobj_size(*z4, kernel_subobj(f)) == 2);
    CHECK(is_surjective(f));
    CHECK(is_trivial_obj(*cokernel(f).obj));
    // |image| * |kernel| = |source|
    CHECK(subobj_size(*z2, image_subobj(f)) * subobj_size(*z4, kernel_subobj(f)) == 4);
}

TEST_CASE("sign map on S3") {
    FinGroup s3 = sym3();
    ObjPtr g = make_obj(s3);
    ObjPtr z2 = make_obj(fgab_cyclic(2));
    // sign: rotations -> 0, reflections -> 1
    Map sign = make_group_hom(g, z2, {0, 0, 0, 1, 1, 1});
    Subobj ker = kernel_subobj(sign);
    CHECK(subobj_size(*g, ker) == 3);
    CHECK(subobj_is_subgroup(*g, ker));
    CHECK(is_trivial_obj(*cokernel(sign).obj));
}

TEST_CASE("centers") {
    CHECK(subobj_size(Obj(sym3()), group_center(Obj(sym3()))) == 1);
    CHECK(subobj_size(Obj(dihedral8()), group_center(Obj(dihedral8()))) == 2);
    FgAb z6 = fgab_cyclic(6);
    CHECK(subobj_is_full(Obj(z6), group_center(Obj(z6))));
}

TEST_CASE("classify_map flags") {
    ObjPtr x = make_obj(make_pointed_set({"*", "a", "b"}, 0));
    ObjPtr y = make_obj(make_pointed_set({"*", "c"}, 0));
    Map f = make_pointed_map(x, y, {0, 1, 1});
    MapClassification c = classify_map(f);
    CHECK(c.trivial_kernel);
    CHECK_FALSE(c.mono);  // trivial kernel does not imply mono for pointed maps
    CHECK(c.epi);

    ObjPtr z2 = make_obj(fgab_cyclic(2));
    ObjPtr z4 = make_obj(fgab_cyclic(4));
    Map g = make_ab_hom(z2, z4, IntMat::from_rows({{2}}));
    MapClassification cg = classify_map(g);
    CHECK(cg.mono);
    CHECK_FALSE(cg.epi);

    Map id = identity_map(x);
    MapClassification ci = classify_map(id);
    CHECK(ci.mono);
    CHECK(ci.epi);
}

TEST_CASE("orbit spaces") {
    ObjPtr s = make_obj(make_pointed_set({"*", "a", "b"}, 0));
    ObjPtr z2 = make_obj(fgab_cyclic(2));
    // swap a and b
    Action swap_ab = Action::make_table(z2, s, {{0, 1, 2}, {0, 2, 1}});
    OrbitResult orb = orbit_space(swap_ab);
    CHECK(obj_size(*orb.obj) == 2);
    CHECK_FALSE(orb.transitive);

    Action triv = Action::make_trivial(z2, s);
    CHECK(obj_size(*orbit_space(triv).obj) == 3);

    // group acting on itself by left multiplication
    FinGroup s3 = sym3();
    ObjPtr g = make_obj(s3);
    std::vector<std::vector<int>> perms(6, std::vector<int>(6));
    for (int a = 0; a < 6; ++a)
        for (int x = 0; x < 6; ++x) perms[a][x] = s3.mul(a, x);
    Action left = Action::make_table(g, g, perms);
    CHECK(orbit_space(left).transitive);
}

TEST_CASE("orbit space rejects non-stable subsets") {
    ObjPtr s = make_obj(make_pointed_set({"*", "a", "b"}, 0));
    ObjPtr z2 = make_obj(fgab_cyclic(2));
    Action swap_ab = Action::make_table(z2, s, {{0, 1, 2}, {0, 2, 1}});
    Subobj bad = subobj_from_mask(*s, {1, 1, 0});
    CHECK_THROWS_AS(orbit_space_restricted(swap_ab, bad), engine_error);
}

TEST_CASE("restricted products") {
    ObjPtr a = make_obj(make_pointed_set({"*", "x"}, 0));
    ObjPtr b = make_obj(make_pointed_set({"*", "y", "z"}, 0));
    ObjPtr p = restricted_product({a, b});
    CHECK(obj_size(*p) == 6);
    CHECK(obj_size(*restricted_product({})) == 1);
    ObjPtr z2 = make_obj(fgab_cyclic(2));
    ObjPtr z3 = make_obj(fgab_cyclic(3));
    ObjPtr q = restricted_product({z2, z3});
    CHECK(obj_size(*q) == 6);
    CHECK(obj_iso(*q, Obj(fgab_cyclic(6))));
}

TEST_CASE("materialize subgroup and quotient of finite group") {
    FinGroup s3 = sym3();
    ObjPtr g = make_obj(s3);
    Subobj a3 = subobj_from_mask(*g, {1, 1, 1, 0, 0, 0});
    CHECK(subobj_is_subgroup(*g, a3));
    CHECK(subobj_is_normal(*g, a3));
    SubObjResult sub = materialize_sub(g, a3);
    CHECK(obj_size(*sub.obj) == 3);
    QuotientResult q = materialize_quotient(g, a3);
    CHECK(obj_size(*q.obj) == 2);
    CHECK(is_group_like(*q.obj));
}

TEST_CASE("translation actions and abelian orbits") {
    ObjPtr z = make_obj(fgab_free(1));
    ObjPtr z4 = make_obj(fgab_cyclic(4));
    Map phi = make_ab_hom(z, z4, IntMat::from_rows({{2}}));
    Action t = Action::make_translation(phi);
    OrbitResult orb = orbit_space(t);
    CHECK(obj_desc(*orb.obj) == "Z/2");  // Z/4 modulo translations by 2Z/4
}

TEST_CASE("subquotient certificates agree across construction order") {
    ObjPtr z4 = make_obj(fgab_cyclic(4));
    SubqCert a;
    a.sub = subobj_from_lattice(std::get<FgAb>(*z4), IntMat::from_rows({{2}}));
    a.collapse = lattice_hnf(IntMat::from_rows({{4}}));
    SubqCert b;
    b.sub = subobj_from_lattice(std::get<FgAb>(*z4), IntMat::from_rows({{-2}}));
    b.collapse = lattice_hnf(IntMat::from_rows({{-4}}));
    CHECK(subq_equal(*z4, a, b));
    SubqMaterialized m = materialize_subq(z4, a);
    CHECK(obj_desc(*m.obj) == "Z/2");
}

TEST_CASE("group iso fallback") {
    CHECK(obj_iso(Obj(sym3()), Obj(sym3())));
    CHECK_FALSE(obj_iso(Obj(sym3()), Obj(fgab_cyclic(6))));
    CHECK(obj_iso(Obj(fgab_cyclic(6)), Obj(fgab_from_factors(0, {2, 3}))));
}
