#include "gersten/objects.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace gersten {

// ---------------------------------------------------------------------------
// FinGroup

int FinGroup::inv(int a) const {
    for (int b = 0; b < order; ++b)
        if (mul(a, b) == 0) return b;
    throw engine_error("element without inverse");
}

int FinGroup::pow(int a, long long e) const {
    int r = 0;
    long long n = e >= 0 ? e : -e;
    for (long long i = 0; i < n; ++i) r = mul(r, a);
    return e >= 0 ? r : inv(r);
}

FinGroup make_fin_group(int order, std::vector<int> table, std::vector<std::string> names) {
    if (order <= 0 || int(table.size()) != order * order)
        throw engine_error("bad multiplication table shape");
    FinGroup g{order, std::move(table), std::move(names)};
    for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b)
            if (g.mul(a, b) < 0 || g.mul(a, b) >= order) throw engine_error("table entry out of range");
    for (int a = 0; a < order; ++a)
        if (g.mul(0, a) != a || g.mul(a, 0) != a) throw engine_error("element 0 is not an identity");
    for (int a = 0; a < order; ++a) {
        bool has_inv = false;
        for (int b = 0; b < order; ++b) has_inv |= g.mul(a, b) == 0;
        if (!has_inv) throw engine_error("missing inverse");
    }
    if (order <= 512) {  // full associativity check only at validation scale
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order; ++b)
                for (int c = 0; c < order; ++c)
                    if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                        throw engine_error("multiplication table is not associative");
    } else {
        // spot-check on generators-of-random-triples scale
        for (int t = 0; t < 20000; ++t) {
            int a = (t * 7919) % order, b = (t * 104729 + 1) % order, c = (t * 1299709 + 2) % order;
            if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                throw engine_error("multiplication table is not associative");
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// FgAb

FgAb make_fgab(int ngens, IntMat rels) {
    if (rels.rows() != ngens) {
        if (rels.rows() == 0 && rels.cols() == 0)
            rels = IntMat(ngens, 0);
        else
            throw engine_error("relation matrix row count must equal generator count");
    }
    FgAb a;
    a.ngens = ngens;
    a.rels = lattice_hnf(rels);  // canonical presentation, keeps transforms small
    SnfResult s = smith_normal_form(a.rels);
    a.umat = s.u;
    a.uinv = unimodular_inverse(s.u);
    a.diag.assign(ngens, 0);
    int n = std::min(a.rels.rows(), a.rels.cols());
    for (int i = 0; i < n; ++i) a.diag[i] = s.d.at(i, i);
    a.free_rank = 0;
    for (int i = 0; i < ngens; ++i) {
        if (a.diag[i] == 0)
            ++a.free_rank;
        else if (a.diag[i] > 1)
            a.invariant_factors.push_back(a.diag[i]);
    }
    return a;
}

FgAb fgab_cyclic(i64 n) {
    IntMat rels(1, n == 0 ? 0 : 1);
    if (n != 0) rels.at(0, 0) = n;
    return make_fgab(1, rels);
}

FgAb fgab_free(int rank) { return make_fgab(rank, IntMat(rank, 0)); }

FgAb fgab_from_factors(int free_rank, const std::vector<i64>& torsion) {
    int n = free_rank + int(torsion.size());
    IntMat rels(n, int(torsion.size()));
    for (int i = 0; i < int(torsion.size()); ++i) rels.at(free_rank + i, i) = torsion[i];
    return make_fgab(n, rels);
}

i64 FgAb::order() const {
    if (!finite()) throw engine_error("infinite abelian group has no order");
    i64 o = 1;
    for (i64 d : diag) o = chk_mul(o, d == 0 ? 1 : d);
    return o;
}

std::vector<i64> FgAb::reduce(const std::vector<i64>& x) const {
    std::vector<i64> z = umat.apply(x);
    for (int i = 0; i < ngens; ++i)
        if (diag[i] != 0) {
            z[i] %= diag[i];
            if (z[i] < 0) z[i] += diag[i];
        }
    return uinv.apply(z);
}

bool FgAb::same_element(const std::vector<i64>& x, const std::vector<i64>& y) const {
    return reduce(x) == reduce(y);
}

std::vector<i64> FgAb::element(i64 index) const {
    if (!finite()) throw engine_error("cannot enumerate an infinite group");
    std::vector<i64> z(ngens, 0);
    for (int i = 0; i < ngens; ++i) {
        i64 d = diag[i] == 0 ? 1 : diag[i];
        z[i] = index % d;
        index /= d;
    }
    return uinv.apply(z);
}

i64 FgAb::index_of(const std::vector<i64>& x) const {
    if (!finite()) throw engine_error("cannot index into an infinite group");
    std::vector<i64> z = umat.apply(x);
    i64 idx = 0, mult = 1;
    for (int i = 0; i < ngens; ++i) {
        i64 d = diag[i] == 0 ? 1 : diag[i];
        i64 zi = z[i] % d;
        if (zi < 0) zi += d;
        idx += zi * mult;
        mult *= d;
    }
    return idx;
}

// ---------------------------------------------------------------------------
// Obj helpers

ObjPtr make_obj(PointedSet s) { return std::make_shared<const Obj>(std::move(s)); }
ObjPtr make_obj(FinGroup g) { return std::make_shared<const Obj>(std::move(g)); }
ObjPtr make_obj(FgAb a) { return std::make_shared<const Obj>(std::move(a)); }

ObjPtr trivial_pointed_set() {
    static ObjPtr t = make_obj(make_pointed_set({"*"}, 0));
    return t;
}
ObjPtr trivial_group() {
    static ObjPtr t = make_obj(make_fin_group(1, {0}));
    return t;
}
ObjPtr trivial_ab() {
    static ObjPtr t = make_obj(fgab_free(0));
    return t;
}

PointedSet make_pointed_set(std::vector<std::string> elements, int basepoint) {
    if (elements.empty() || basepoint < 0 || basepoint >= int(elements.size()))
        throw engine_error("bad pointed set");
    std::set<std::string> seen(elements.begin(), elements.end());
    if (seen.size() != elements.size()) throw engine_error("pointed set labels must be distinct");
    return PointedSet{std::move(elements), basepoint};
}

ObjKind obj_kind(const Obj& o) {
    if (std::holds_alternative<PointedSet>(o)) return ObjKind::pointed;
    if (std::holds_alternative<FinGroup>(o)) return ObjKind::group;
    return ObjKind::ab;
}

bool is_group_like(const Obj& o) { return obj_kind(o) != ObjKind::pointed; }

bool is_abelian(const Obj& o) {
    if (std::holds_alternative<FgAb>(o)) return true;
    if (const auto* g = std::get_if<FinGroup>(&o)) {
        for (int a = 0; a < g->order; ++a)
            for (int b = a + 1; b < g->order; ++b)
                if (g->mul(a, b) != g->mul(b, a)) return false;
        return true;
    }
    return false;
}

bool is_trivial_obj(const Obj& o) {
    if (const auto* s = std::get_if<PointedSet>(&o)) return s->elements.size() == 1;
    if (const auto* g = std::get_if<FinGroup>(&o)) return g->order == 1;
    const auto& a = std::get<FgAb>(o);
    return a.free_rank == 0 && a.invariant_factors.empty();
}

bool obj_finite(const Obj& o) {
    if (const auto* a = std::get_if<FgAb>(&o)) return a->finite();
    return true;
}

i64 obj_size(const Obj& o) {
    if (const auto* s = std::get_if<PointedSet>(&o)) return i64(s->elements.size());
    if (const auto* g = std::get_if<FinGroup>(&o)) return g->order;
    return std::get<FgAb>(o).order();
}

int obj_basepoint_index(const Obj& o) {
    if (const auto* s = std::get_if<PointedSet>(&o)) return s->basepoint;
    if (std::get_if<FinGroup>(&o)) return 0;
    return int(std::get<FgAb>(o).index_of(std::vector<i64>(std::get<FgAb>(o).ngens, 0)));
}

std::string obj_desc(const Obj& o) {
    std::ostringstream os;
    if (const auto* s = std::get_if<PointedSet>(&o)) {
        os << "pointed set of size " << s->elements.size();
    } else if (const auto* g = std::get_if<FinGroup>(&o)) {
        os << (is_abelian(o) ? "abelian group of order " : "group of order ") << g->order;
    } else {
        const auto& a = std::get<FgAb>(o);
        if (a.free_rank == 0 && a.invariant_factors.empty()) return "0";
        bool first = true;
        if (a.free_rank == 1) {
            os << "Z";
            first = false;
        } else if (a.free_rank > 1) {
            os << "Z^" << a.free_rank;
            first = false;
        }
        for (i64 d : a.invariant_factors) {
            os << (first ? "" : " + ") << "Z/" << d;
            first = false;
        }
    }
    return os.str();
}

std::string elem_name(const Obj& o, int idx) {
    if (const auto* s = std::get_if<PointedSet>(&o)) return s->elements[idx];
    if (const auto* g = std::get_if<FinGroup>(&o)) {
        if (!g->names.empty()) return g->names[idx];
        return "g" + std::to_string(idx);
    }
    const auto& a = std::get<FgAb>(o);
    std::vector<i64> v = a.element(idx);
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < a.ngens; ++i) os << (i ? "," : "") << v[i];
    os << ")";
    return os.str();
}

namespace {

// brute-force isomorphism search for small groups (used only as a fallback)
bool groups_isomorphic(const FinGroup& g, const FinGroup& h) {
    if (g.order != h.order) return false;
    int n = g.order;
    std::vector<int> go(n), ho(n);
    auto elem_order = [](const FinGroup& k, int a) {
        int o = 1, x = a;
        while (x != 0) {
            x = k.mul(x, a);
            ++o;
        }
        return o;
    };
    for (int i = 0; i < n; ++i) go[i] = elem_order(g, i), ho[i] = elem_order(h, i);
    {
        auto gs = go, hs = ho;
        std::sort(gs.begin(), gs.end());
        std::sort(hs.begin(), hs.end());
        if (gs != hs) return false;
    }
    std::vector<int> f(n, -1), used(n, 0);
    f[0] = 0;
    used[0] = 1;
    // backtracking over images, pruning by mult-table consistency
    std::function<bool(int)> rec = [&](int a) -> bool {
        if (a == n) return true;
        if (f[a] != -1) return rec(a + 1);
        for (int b = 0; b < n; ++b) {
            if (used[b] || go[a] != ho[b]) continue;
            std::vector<std::pair<int, int>> assigned;
            bool ok = true;
            f[a] = b;
            used[b] = 1;
            assigned.push_back({a, b});
            for (int x = 0; x < n && ok; ++x) {
                if (f[x] == -1) continue;
                int p = g.mul(a, x), q = h.mul(b, f[x]);
                if (f[p] == -1 && !used[q]) {
                    f[p] = q;
                    used[q] = 1;
                    assigned.push_back({p, q});
                } else if (f[p] != q) {
                    ok = false;
                }
                if (!ok) break;
                p = g.mul(x, a), q = h.mul(f[x], b);
                if (f[p] == -1 && !used[q]) {
                    f[p] = q;
                    used[q] = 1;
                    assigned.push_back({p, q});
                } else if (f[p] != q) {
                    ok = false;
                }
            }
            if (ok && rec(a + 1)) return true;
            for (auto [x, y] : assigned) {
                f[x] = -1;
                used[y] = 0;
            }
        }
        return false;
    };
    return rec(1);
}

std::vector<i64> fin_ab_invariants(const FinGroup& g) {
    // invariant factors of a finite abelian multiplication-table group
    std::vector<i64> factors;
    // realize as quotient of free abelian on all elements by relation a+b-c
    int n = g.order;
    std::vector<std::vector<i64>> rels;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            std::vector<i64> r(n, 0);
            r[a] += 1;
            r[b] += 1;
            r[g.mul(a, b)] -= 1;
            rels.push_back(r);
        }
    std::vector<i64> id(n, 0);
    id[0] = 1;
    rels.push_back(id);
    IntMat m = IntMat::from_rows(rels).transpose();
    FgAb a = make_fgab(n, m);
    return a.invariant_factors;
}

}  // namespace

bool obj_iso(const Obj& a, const Obj& b) {
    // cross-kind comparisons reduce to a common shape where possible
    if (obj_kind(a) == ObjKind::pointed || obj_kind(b) == ObjKind::pointed) {
        if (obj_kind(a) != ObjKind::pointed || obj_kind(b) != ObjKind::pointed) return false;
        return obj_size(a) == obj_size(b);
    }
    bool ab_a = is_abelian(a), ab_b = is_abelian(b);
    if (ab_a != ab_b) return false;
    if (ab_a) {
        auto invs = [](const Obj& o) -> std::pair<int, std::vector<i64>> {
            if (const auto* g = std::get_if<FgAb>(&o)) return {g->free_rank, g->invariant_factors};
            return {0, fin_ab_invariants(std::get<FinGroup>(o))};
        };
        return invs(a) == invs(b);
    }
    return groups_isomorphic(std::get<FinGroup>(a), std::get<FinGroup>(b));
}

int obj_op(const Obj& o, int a, int b) {
    if (const auto* g = std::get_if<FinGroup>(&o)) return g->mul(a, b);
    if (const auto* ab = std::get_if<FgAb>(&o)) {
        std::vector<i64> x = ab->element(a), y = ab->element(b);
        for (int i = 0; i < ab->ngens; ++i) x[i] = chk_add(x[i], y[i]);
        return int(ab->index_of(x));
    }
    throw engine_error("pointed set has no group law");
}

int obj_inv(const Obj& o, int a) {
    if (const auto* g = std::get_if<FinGroup>(&o)) return g->inv(a);
    if (const auto* ab = std::get_if<FgAb>(&o)) {
        std::vector<i64> x = ab->element(a);
        for (auto& v : x) v = -v;
        return int(ab->index_of(x));
    }
    throw engine_error("pointed set has no group law");
}

// ---------------------------------------------------------------------------
// subobjects

Subobj subobj_full(const Obj& parent) {
    if (const auto* a = std::get_if<FgAb>(&parent))
        return subobj_from_lattice(*a, IntMat::identity(a->ngens));
    return Subobj{std::vector<char>(size_t(obj_size(parent)), 1)};
}

Subobj subobj_trivial(const Obj& parent) {
    if (const auto* a = std::get_if<FgAb>(&parent)) return subobj_from_lattice(*a, IntMat(a->ngens, 0));
    std::vector<char> m(size_t(obj_size(parent)), 0);
    m[obj_basepoint_index(parent)] = 1;
    return Subobj{std::move(m)};
}

Subobj subobj_from_mask(const Obj& parent, std::vector<char> mask) {
    if (int64_t(mask.size()) != obj_size(parent)) throw engine_error("mask size mismatch");
    if (!mask[obj_basepoint_index(parent)]) throw engine_error("subobject must contain the basepoint");
    return Subobj{std::move(mask)};
}

Subobj subobj_from_lattice(const FgAb& parent, const IntMat& gens) {
    return Subobj{lattice_hnf(gens.hcat(parent.rels))};
}

Subobj subobj_as_mask(const Obj& parent, const Subobj& s) {
    if (s.is_mask()) return s;
    const auto& pa = std::get<FgAb>(parent);
    if (!pa.finite()) throw engine_error("cannot enumerate an infinite subobject");
    i64 n = pa.order();
    std::vector<char> m(size_t(n), 0);
    for (i64 i = 0; i < n; ++i) m[size_t(i)] = lattice_contains(s.lattice(), pa.element(i));
    return Subobj{std::move(m)};
}

Subobj subobj_as_lattice(const Obj& parent, const Subobj& s) {
    if (!s.is_mask()) return s;
    const auto& pa = std::get<FgAb>(parent);
    IntMat gens(pa.ngens, int(std::count(s.mask().begin(), s.mask().end(), char(1))));
    int col = 0;
    for (size_t i = 0; i < s.mask().size(); ++i) {
        if (!s.mask()[i]) continue;
        std::vector<i64> v = pa.element(i64(i));
        for (int r = 0; r < pa.ngens; ++r) gens.at(r, col) = v[r];
        ++col;
    }
    return subobj_from_lattice(pa, gens);
}

namespace {

// bring two subobjects of the same parent into a common representation
std::pair<Subobj, Subobj> align_subobjs(const Obj& parent, const Subobj& a, const Subobj& b) {
    if (a.is_mask() == b.is_mask()) return {a, b};
    return {subobj_as_mask(parent, a), subobj_as_mask(parent, b)};
}

}  // namespace

bool subobj_equal(const Obj& parent, const Subobj& a0, const Subobj& b0) {
    auto [a, b] = align_subobjs(parent, a0, b0);
    if (a.is_mask()) return a.mask() == b.mask();
    return a.lattice() == b.lattice();  // both canonical HNF
}

bool subobj_contains(const Obj& parent, const Subobj& outer0, const Subobj& inner0) {
    auto [outer, inner] = align_subobjs(parent, outer0, inner0);
    if (outer.is_mask()) {
        for (size_t i = 0; i < outer.mask().size(); ++i)
            if (inner.mask()[i] && !outer.mask()[i]) return false;
        return true;
    }
    return lattice_subset(inner.lattice(), outer.lattice());
}

bool subobj_is_trivial(const Obj& parent, const Subobj& s) {
    return subobj_equal(parent, s, subobj_trivial(parent));
}

bool subobj_is_full(const Obj& parent, const Subobj& s) {
    return subobj_equal(parent, s, subobj_full(parent));
}

i64 subobj_size(const Obj& parent, const Subobj& s) {
    if (s.is_mask()) return std::count(s.mask().begin(), s.mask().end(), char(1));
    const auto& a = std::get<FgAb>(parent);
    // order of L/rels: present L on its own basis with relations pulled back
    IntMat basis = s.lattice();
    IntMat rel_in_basis = lattice_preimage(basis, a.rels);
    FgAb q = make_fgab(basis.cols(), rel_in_basis);
    return q.order();
}

bool subobj_is_subgroup(const Obj& parent, const Subobj& s) {
    if (!is_group_like(parent)) return false;
    if (!s.is_mask()) return true;
    const auto& m = s.mask();
    for (size_t a = 0; a < m.size(); ++a) {
        if (!m[a]) continue;
        if (!m[obj_inv(parent, int(a))]) return false;
        for (size_t b = 0; b < m.size(); ++b)
            if (m[b] && !m[obj_op(parent, int(a), int(b))]) return false;
    }
    return true;
}

Subobj subobj_intersect(const Obj& parent, const Subobj& a, const Subobj& b) {
    if (a.is_mask()) {
        std::vector<char> m(a.mask().size());
        for (size_t i = 0; i < m.size(); ++i) m[i] = a.mask()[i] && b.mask()[i];
        return Subobj{std::move(m)};
    }
    // intersection of lattices: x = A u = B v
    const IntMat& A = a.lattice();
    const IntMat& B = b.lattice();
    IntMat stacked = A.hcat(B.negate());
    IntMat k = integer_kernel(stacked);
    IntMat ugens(A.cols(), k.cols());
    for (int i = 0; i < A.cols(); ++i)
        for (int j = 0; j < k.cols(); ++j) ugens.at(i, j) = k.at(i, j);
    return subobj_from_lattice(std::get<FgAb>(parent), A.mul(ugens));
}

std::string subobj_desc(const Obj& parent, const Subobj& s) {
    std::ostringstream os;
    if (s.is_mask()) {
        os << "{";
        bool first = true;
        for (size_t i = 0; i < s.mask().size(); ++i)
            if (s.mask()[i]) {
                os << (first ? "" : ",") << elem_name(parent, int(i));
                first = false;
            }
        os << "}";
    } else {
        os << "lattice " << s.lattice().to_string();
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// maps

namespace {

void check_endpoint_sizes(const Map& f) {
    if (f.is_elem()) {
        if (i64(f.images().size()) != obj_size(*f.src)) throw engine_error("element map size mismatch");
        i64 n = obj_size(*f.dst);
        for (int v : f.images())
            if (v < 0 || v >= n) throw engine_error("element map image out of range");
    } else {
        const auto* sa = std::get_if<FgAb>(f.src.get());
        const auto* da = std::get_if<FgAb>(f.dst.get());
        if (!sa || !da) throw engine_error("matrix maps require FgAb endpoints");
        if (f.matrix().rows() != da->ngens || f.matrix().cols() != sa->ngens)
            throw engine_error("matrix map shape mismatch");
    }
}

bool matmap_valid(const Map& f) {
    const auto& sa = std::get<FgAb>(*f.src);
    const auto& da = std::get<FgAb>(*f.dst);
    // well-defined: M . rels(src) lands in the relation lattice of dst
    IntMat image_of_rels = f.matrix().mul(sa.rels);
    IntMat dst_rels = da.rels;
    for (int j = 0; j < image_of_rels.cols(); ++j)
        if (!lattice_contains(dst_rels, image_of_rels.col(j))) return false;
    return true;
}

}  // namespace

Map make_pointed_map(ObjPtr src, ObjPtr dst, std::vector<int> images) {
    Map f{std::move(src), std::move(dst), std::move(images)};
    check_endpoint_sizes(f);
    if (f.images()[obj_basepoint_index(*f.src)] != obj_basepoint_index(*f.dst))
        throw engine_error("map does not preserve the basepoint");
    return f;
}

Map make_group_hom(ObjPtr src, ObjPtr dst, std::vector<int> images) {
    Map f = make_pointed_map(std::move(src), std::move(dst), std::move(images));
    if (!is_group_like(*f.src) || !is_group_like(*f.dst)) throw engine_error("group hom needs groups");
    i64 n = obj_size(*f.src);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (f.images()[obj_op(*f.src, a, b)] != obj_op(*f.dst, f.images()[a], f.images()[b]))
                throw engine_error("map is not a homomorphism");
    return f;
}

Map make_ab_hom(ObjPtr src, ObjPtr dst, IntMat m) {
    Map f{std::move(src), std::move(dst), std::move(m)};
    check_endpoint_sizes(f);
    if (!matmap_valid(f)) throw engine_error("matrix does not respect relations");
    return f;
}

Map make_elem_map_checked(ObjPtr src, ObjPtr dst, std::vector<int> images) {
    if (is_group_like(*src) && is_group_like(*dst))
        return make_group_hom(std::move(src), std::move(dst), std::move(images));
    return make_pointed_map(std::move(src), std::move(dst), std::move(images));
}

Map identity_map(ObjPtr o) {
    if (const auto* a = std::get_if<FgAb>(o.get()))
        return Map{o, o, IntMat::identity(a->ngens)};
    std::vector<int> img(size_t(obj_size(*o)), 0);
    std::iota(img.begin(), img.end(), 0);
    return Map{o, o, std::move(img)};
}

Map trivial_map(ObjPtr src, ObjPtr dst) {
    const auto* sa = std::get_if<FgAb>(src.get());
    const auto* da = std::get_if<FgAb>(dst.get());
    if (sa && da) return Map{src, dst, IntMat(da->ngens, sa->ngens)};
    std::vector<int> img(size_t(obj_size(*src)), obj_basepoint_index(*dst));
    return Map{src, dst, std::move(img)};
}

int map_apply_idx(const Map& f, int i) {
    if (f.is_elem()) return f.images()[i];
    const auto& sa = std::get<FgAb>(*f.src);
    const auto& da = std::get<FgAb>(*f.dst);
    return int(da.index_of(f.matrix().apply(sa.element(i))));
}

std::vector<i64> map_apply_vec(const Map& f, const std::vector<i64>& x) {
    if (!f.is_elem()) return std::get<FgAb>(*f.dst).reduce(f.matrix().apply(x));
    const auto& sa = std::get<FgAb>(*f.src);
    const auto& da = std::get<FgAb>(*f.dst);
    return da.element(f.images()[sa.index_of(x)]);
}

Map compose(const Map& g, const Map& f) {
    if (!f.is_elem() && !g.is_elem()) return Map{f.src, g.dst, g.matrix().mul(f.matrix())};
    if (f.is_elem() && g.is_elem()) {
        std::vector<int> img(f.images().size());
        for (size_t i = 0; i < img.size(); ++i) img[i] = g.images()[f.images()[i]];
        return Map{f.src, g.dst, std::move(img)};
    }
    // mixed: tabulate through the finite middle object
    std::vector<int> img(size_t(obj_size(*f.src)), 0);
    for (size_t i = 0; i < img.size(); ++i) img[i] = map_apply_idx(g, map_apply_idx(f, int(i)));
    return Map{f.src, g.dst, std::move(img)};
}

Map tabulate(const Map& f) {
    if (f.is_elem()) return f;
    std::vector<int> img(size_t(obj_size(*f.src)), 0);
    for (size_t i = 0; i < img.size(); ++i) img[i] = map_apply_idx(f, int(i));
    return Map{f.src, f.dst, std::move(img)};
}

bool map_equal(const Map& f, const Map& g) {
    if (f.is_elem() && g.is_elem()) return f.images() == g.images();
    if (!f.is_elem() && !g.is_elem()) {
        const auto& da = std::get<FgAb>(*f.dst);
        IntMat diff = f.matrix().add(g.matrix().negate());
        for (int j = 0; j < diff.cols(); ++j)
            if (!lattice_contains(da.rels, diff.col(j))) return false;
        return true;
    }
    return map_equal(tabulate(f), tabulate(g));
}

Map negate_map(const Map& f) {
    if (!f.is_elem()) return Map{f.src, f.dst, f.matrix().negate()};
    if (!is_group_like(*f.dst)) throw engine_error("cannot negate a map into a bare pointed set");
    std::vector<int> img(f.images().size());
    for (size_t i = 0; i < img.size(); ++i) img[i] = obj_inv(*f.dst, f.images()[i]);
    return Map{f.src, f.dst, std::move(img)};
}

bool maps_equal_up_to_sign(const Map& f, const Map& g) {
    if (is_group_like(*f.dst)) return map_equal(f, negate_map(g));
    return map_equal(f, g);
}

bool map_is_structural(const Map& f) {
    try {
        if (!f.is_elem()) return matmap_valid(f);
        if (f.images()[obj_basepoint_index(*f.src)] != obj_basepoint_index(*f.dst)) return false;
        if (is_group_like(*f.src) && is_group_like(*f.dst)) {
            i64 n = obj_size(*f.src);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    if (f.images()[obj_op(*f.src, a, b)] != obj_op(*f.dst, f.images()[a], f.images()[b]))
                        return false;
        }
        return true;
    } catch (const engine_error&) {
        return false;
    }
}

bool map_is_trivial(const Map& f) {
    if (f.is_elem()) {
        int bp = obj_basepoint_index(*f.dst);
        for (int v : f.images())
            if (v != bp) return false;
        return true;
    }
    const auto& da = std::get<FgAb>(*f.dst);
    for (int j = 0; j < f.matrix().cols(); ++j)
        if (!lattice_contains(da.rels, f.matrix().col(j))) return false;
    return true;
}

Subobj kernel_subobj(const Map& f) {
    if (f.is_elem()) {
        int bp = obj_basepoint_index(*f.dst);
        std::vector<char> m(f.images().size(), 0);
        for (size_t i = 0; i < m.size(); ++i) m[i] = f.images()[i] == bp;
        return Subobj{std::move(m)};
    }
    const auto& sa = std::get<FgAb>(*f.src);
    const auto& da = std::get<FgAb>(*f.dst);
    return subobj_from_lattice(sa, lattice_preimage(f.matrix(), da.rels));
}

Subobj image_subobj(const Map& f) {
    if (f.is_elem()) {
        std::vector<char> m(size_t(obj_size(*f.dst)), 0);
        for (int v : f.images()) m[v] = 1;
        m[obj_basepoint_index(*f.dst)] = 1;
        return Subobj{std::move(m)};
    }
    const auto& da = std::get<FgAb>(*f.dst);
    return subobj_from_lattice(da, f.matrix());
}

bool is_injective(const Map& f) {
    if (f.is_elem()) {
        std::set<int> seen(f.images().begin(), f.images().end());
        return seen.size() == f.images().size();
    }
    return subobj_is_trivial(*f.src, kernel_subobj(f));
}

bool is_surjective(const Map& f) {
    return subobj_is_full(*f.dst, image_subobj(f));
}

bool exact_at(const Map& incoming, const Map& outgoing) {
    return subobj_equal(*outgoing.src, image_subobj(incoming), kernel_subobj(outgoing));
}

QuotientResult cokernel(const Map& f) {
    ObjPtr dst = f.dst;
    if (!f.is_elem()) {
        const auto& da = std::get<FgAb>(*dst);
        Subobj im = image_subobj(f);
        ObjPtr q = make_obj(make_fgab(da.ngens, im.lattice()));
        return {q, make_ab_hom(dst, q, IntMat::identity(da.ngens))};
    }
    Subobj im = image_subobj(f);
    if (obj_kind(*dst) == ObjKind::group) {
        Subobj nc = normal_closure(*dst, im);
        return materialize_quotient(dst, nc);
    }
    return materialize_quotient(dst, im);
}

SubObjResult materialize_sub(ObjPtr parent, const Subobj& s) {
    if (!s.is_mask()) {
        const auto& pa = std::get<FgAb>(*parent);
        IntMat basis = s.lattice();
        IntMat rel = lattice_preimage(basis, pa.rels);
        ObjPtr sub = make_obj(make_fgab(basis.cols(), rel));
        return {sub, make_ab_hom(sub, parent, basis)};
    }
    const auto& m = s.mask();
    std::vector<int> elems;
    for (size_t i = 0; i < m.size(); ++i)
        if (m[i]) elems.push_back(int(i));
    std::vector<int> pos(m.size(), -1);
    for (size_t k = 0; k < elems.size(); ++k) pos[elems[k]] = int(k);
    if (is_group_like(*parent) && subobj_is_subgroup(*parent, s)) {
        int n = int(elems.size());
        // identity must be first
        int id_pos = pos[obj_basepoint_index(*parent)];
        if (id_pos != 0) {
            std::swap(elems[0], elems[id_pos]);
            pos[elems[0]] = 0;
            pos[elems[id_pos]] = id_pos;
        }
        std::vector<int> table(size_t(n) * n);
        std::vector<std::string> names(n);
        for (int a = 0; a < n; ++a) {
            names[a] = elem_name(*parent, elems[a]);
            for (int b = 0; b < n; ++b) table[size_t(a) * n + b] = pos[obj_op(*parent, elems[a], elems[b])];
        }
        ObjPtr sub = make_obj(make_fin_group(n, std::move(table), std::move(names)));
        return {sub, make_group_hom(sub, parent, elems)};
    }
    std::vector<std::string> labels(elems.size());
    int bp = -1;
    for (size_t k = 0; k < elems.size(); ++k) {
        labels[k] = elem_name(*parent, elems[k]);
        if (elems[k] == obj_basepoint_index(*parent)) bp = int(k);
    }
    ObjPtr sub = make_obj(make_pointed_set(std::move(labels), bp));
    return {sub, make_pointed_map(sub, parent, elems)};
}

QuotientResult materialize_quotient(ObjPtr parent, const Subobj& s) {
    if (!s.is_mask()) {
        const auto& pa = std::get<FgAb>(*parent);
        ObjPtr q = make_obj(make_fgab(pa.ngens, s.lattice()));
        return {q, make_ab_hom(parent, q, IntMat::identity(pa.ngens))};
    }
    i64 n = obj_size(*parent);
    if (is_group_like(*parent) && subobj_is_subgroup(*parent, s) && subobj_is_normal(*parent, s)) {
        // coset group
        std::vector<int> coset(size_t(n), -1);
        std::vector<int> reps;
        for (int a = 0; a < n; ++a) {
            if (coset[a] != -1) continue;
            int c = int(reps.size());
            reps.push_back(a);
            for (i64 h = 0; h < n; ++h)
                if (s.mask()[h]) coset[obj_op(*parent, a, int(h))] = c;
        }
        int m = int(reps.size());
        std::vector<int> table(size_t(m) * m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) table[size_t(a) * m + b] = coset[obj_op(*parent, reps[a], reps[b])];
        // coset of identity must be index 0
        if (coset[obj_basepoint_index(*parent)] != 0) throw engine_error("internal: identity coset");
        ObjPtr q = make_obj(make_fin_group(m, std::move(table)));
        return {q, make_group_hom(parent, q, coset)};
    }
    // pointed collapse of a subset
    std::vector<int> cls(size_t(n), -1);
    std::vector<std::string> labels;
    labels.push_back("*");
    for (int a = 0; a < n; ++a) {
        if (s.mask()[a])
            cls[a] = 0;
        else {
            cls[a] = int(labels.size());
            labels.push_back(elem_name(*parent, a));
        }
    }
    ObjPtr q = make_obj(make_pointed_set(std::move(labels), 0));
    return {q, make_pointed_map(parent, q, cls)};
}

Map inverse_iso(const Map& f) {
    if (f.is_elem()) {
        if (!is_injective(f) || !is_surjective(f)) throw engine_error("map is not an isomorphism");
        std::vector<int> inv(f.images().size());
        for (size_t i = 0; i < inv.size(); ++i) inv[f.images()[i]] = int(i);
        return Map{f.dst, f.src, std::move(inv)};
    }
    const auto& sa = std::get<FgAb>(*f.src);
    const auto& da = std::get<FgAb>(*f.dst);
    if (!is_injective(f) || !is_surjective(f)) throw engine_error("map is not an isomorphism");
    // solve f(x_j) = e_j mod rels for each target generator
    IntMat inv(sa.ngens, da.ngens);
    IntMat sys = f.matrix().hcat(da.rels);
    for (int j = 0; j < da.ngens; ++j) {
        std::vector<i64> e(da.ngens, 0);
        e[j] = 1;
        std::vector<i64> sol;
        if (!solve_integer(sys, e, &sol)) throw engine_error("iso inversion failed");
        for (int i = 0; i < sa.ngens; ++i) inv.at(i, j) = sol[i];
    }
    return make_ab_hom(f.dst, f.src, inv);
}

Subobj preimage_subobj(const Map& f, const Subobj& t0) {
    if (f.is_elem()) {
        Subobj t = t0.is_mask() ? t0 : subobj_as_mask(*f.dst, t0);
        std::vector<char> m(f.images().size(), 0);
        for (size_t i = 0; i < m.size(); ++i) m[i] = t.mask()[f.images()[i]];
        return Subobj{std::move(m)};
    }
    if (t0.is_mask()) return preimage_subobj(tabulate(f), t0);
    const auto& sa = std::get<FgAb>(*f.src);
    return subobj_from_lattice(sa, lattice_preimage(f.matrix(), t0.lattice()));
}

Subobj image_of_subobj(const Map& f, const Subobj& s0) {
    if (f.is_elem()) {
        Subobj s = s0.is_mask() ? s0 : subobj_as_mask(*f.src, s0);
        std::vector<char> m(size_t(obj_size(*f.dst)), 0);
        for (size_t i = 0; i < f.images().size(); ++i)
            if (s.mask()[i]) m[f.images()[i]] = 1;
        m[obj_basepoint_index(*f.dst)] = 1;
        return Subobj{std::move(m)};
    }
    if (s0.is_mask()) return image_of_subobj(tabulate(f), s0);
    const auto& da = std::get<FgAb>(*f.dst);
    return subobj_from_lattice(da, f.matrix().mul(s0.lattice()));
}

Map restrict_map(const Map& f, const SubObjResult& sub) {
    return compose(f, sub.incl);
}

// ---------------------------------------------------------------------------
// actions

Action Action::make_trivial(ObjPtr group, ObjPtr carrier) {
    Action a;
    a.kind = Kind::trivial;
    a.group = std::move(group);
    a.carrier = std::move(carrier);
    return a;
}

Action Action::make_table(ObjPtr group, ObjPtr carrier, std::vector<std::vector<int>> perms) {
    Action a;
    a.kind = Kind::table;
    a.group = std::move(group);
    a.carrier = std::move(carrier);
    a.perms = std::move(perms);
    if (!action_valid(a)) throw engine_error("action table violates the action axioms");
    return a;
}

Action Action::make_translation(Map phi) {
    Action a;
    a.kind = Kind::translation;
    a.group = phi.src;
    a.carrier = phi.dst;
    if (!is_group_like(*a.carrier)) throw engine_error("translation action needs a group carrier");
    a.phi = std::move(phi);
    return a;
}

Action Action::make_matrices(ObjPtr group, ObjPtr carrier, std::vector<IntMat> mats) {
    Action a;
    a.kind = Kind::matrices;
    a.group = std::move(group);
    a.carrier = std::move(carrier);
    a.mats = std::move(mats);
    if (!action_valid(a)) throw engine_error("matrix action violates the action axioms");
    return a;
}

bool action_valid(const Action& a) {
    switch (a.kind) {
        case Action::Kind::trivial:
            return true;
        case Action::Kind::table: {
            i64 n = obj_size(*a.group), m = obj_size(*a.carrier);
            if (i64(a.perms.size()) != n) return false;
            for (const auto& p : a.perms) {
                if (i64(p.size()) != m) return false;
                std::vector<char> seen(size_t(m), 0);
                for (int v : p) {
                    if (v < 0 || v >= m || seen[v]) return false;
                    seen[v] = 1;
                }
            }
            // identity and compatibility
            for (i64 x = 0; x < m; ++x)
                if (a.perms[0][size_t(x)] != x) return false;
            for (int g = 0; g < n; ++g)
                for (int h = 0; h < n; ++h) {
                    int gh = obj_op(*a.group, g, h);
                    for (int x = 0; x < m; ++x)
                        if (a.perms[gh][x] != a.perms[g][a.perms[h][x]]) return false;
                }
            return true;
        }
        case Action::Kind::translation:
            return map_is_structural(*a.phi);
        case Action::Kind::matrices: {
            const auto* ca = std::get_if<FgAb>(a.carrier.get());
            if (!ca) return false;
            i64 n = obj_size(*a.group);
            if (i64(a.mats.size()) != n) return false;
            for (const auto& m : a.mats) {
                Map f{a.carrier, a.carrier, m};
                if (!map_is_structural(f) || !is_injective(f) || !is_surjective(f)) return false;
            }
            // compatibility with the group law
            for (int g = 0; g < n; ++g)
                for (int h = 0; h < n; ++h) {
                    int gh = obj_op(*a.group, g, h);
                    Map lhs{a.carrier, a.carrier, a.mats[gh]};
                    Map rhs{a.carrier, a.carrier, a.mats[g].mul(a.mats[h])};
                    if (!map_equal(lhs, rhs)) return false;
                }
            return true;
        }
    }
    return false;
}

bool action_by_automorphisms(const Action& a) {
    switch (a.kind) {
        case Action::Kind::trivial:
        case Action::Kind::matrices:
            return true;
        case Action::Kind::translation:
            return map_is_trivial(*a.phi);
        case Action::Kind::table: {
            if (!is_group_like(*a.carrier)) return false;
            i64 n = obj_size(*a.group), m = obj_size(*a.carrier);
            for (int g = 0; g < n; ++g)
                for (int x = 0; x < m; ++x)
                    for (int y = 0; y < m; ++y)
                        if (a.perms[g][obj_op(*a.carrier, x, y)] !=
                            obj_op(*a.carrier, a.perms[g][x], a.perms[g][y]))
                            return false;
            return true;
        }
    }
    return false;
}

int action_apply(const Action& a, int g, int x) {
    switch (a.kind) {
        case Action::Kind::trivial:
            return x;
        case Action::Kind::table:
            return a.perms[g][x];
        case Action::Kind::translation:
            return obj_op(*a.carrier, map_apply_idx(*a.phi, g), x);
        case Action::Kind::matrices: {
            const auto& ca = std::get<FgAb>(*a.carrier);
            return int(ca.index_of(a.mats[g].apply(ca.element(x))));
        }
    }
    throw engine_error("bad action kind");
}

std::vector<i64> action_apply_vec(const Action& a, const std::vector<i64>& g, const std::vector<i64>& x) {
    const auto& ca = std::get<FgAb>(*a.carrier);
    switch (a.kind) {
        case Action::Kind::trivial:
            return ca.reduce(x);
        case Action::Kind::translation: {
            std::vector<i64> t = map_apply_vec(*a.phi, g);
            std::vector<i64> r(x.size());
            for (size_t i = 0; i < x.size(); ++i) r[i] = chk_add(t[i], x[i]);
            return ca.reduce(r);
        }
        default:
            throw engine_error("vector action only for trivial/translation kinds");
    }
}

bool action_is_trivial(const Action& a) {
    switch (a.kind) {
        case Action::Kind::trivial:
            return true;
        case Action::Kind::translation:
            return map_is_trivial(*a.phi);
        case Action::Kind::table: {
            for (const auto& p : a.perms)
                for (size_t x = 0; x < p.size(); ++x)
                    if (p[x] != int(x)) return false;
            return true;
        }
        case Action::Kind::matrices: {
            Map id = identity_map(a.carrier);
            for (const auto& m : a.mats)
                if (!map_equal(Map{a.carrier, a.carrier, m}, id)) return false;
            return true;
        }
    }
    return false;
}

Map action_on_basepoint(const Action& a) {
    if (a.kind == Action::Kind::translation) return *a.phi;
    if (a.kind == Action::Kind::trivial) return trivial_map(a.group, a.carrier);
    int bp = obj_basepoint_index(*a.carrier);
    std::vector<int> img(size_t(obj_size(*a.group)), 0);
    for (size_t g = 0; g < img.size(); ++g) img[g] = action_apply(a, int(g), bp);
    return Map{a.group, a.carrier, std::move(img)};
}

bool action_equal(const Action& a, const Action& b) {
    if (obj_finite(*a.group) && obj_finite(*a.carrier)) {
        i64 n = obj_size(*a.group), m = obj_size(*a.carrier);
        for (int g = 0; g < n; ++g)
            for (int x = 0; x < m; ++x)
                if (action_apply(a, g, x) != action_apply(b, g, x)) return false;
        return true;
    }
    // infinite path: both must be trivial or translations
    auto as_phi = [](const Action& c) -> Map {
        if (c.kind == Action::Kind::translation) return *c.phi;
        if (c.kind == Action::Kind::trivial) return trivial_map(c.group, c.carrier);
        throw engine_error("cannot compare infinite non-translation actions");
    };
    return map_equal(as_phi(a), as_phi(b));
}

// lattice of { phi(g) : g } inside an FgAb carrier (works for both map forms)
static IntMat translation_image_lattice(const Action& a) {
    const auto& ca = std::get<FgAb>(*a.carrier);
    if (a.kind == Action::Kind::trivial) return lattice_hnf(ca.rels);
    const Map& phi = *a.phi;
    if (!phi.is_elem()) return lattice_sum(phi.matrix(), ca.rels);
    IntMat gens(ca.ngens, int(phi.images().size()));
    for (size_t g = 0; g < phi.images().size(); ++g) {
        std::vector<i64> v = ca.element(phi.images()[g]);
        for (int i = 0; i < ca.ngens; ++i) gens.at(i, int(g)) = v[i];
    }
    return lattice_sum(gens, ca.rels);
}

OrbitResult orbit_space(const Action& a) {
    OrbitResult r = orbit_space_restricted(a, subobj_full(*a.carrier));
    // re-anchor the projection at the carrier itself (the full subobject is a copy)
    Map from_copy = r.proj;
    SubObjResult sub = materialize_sub(a.carrier, subobj_full(*a.carrier));
    r.proj = compose(from_copy, inverse_iso(sub.incl));
    return r;
}

OrbitResult orbit_space_restricted(const Action& a, const Subobj& stable) {
    if (!action_stabilizes(a, stable)) throw engine_error("subobject is not stable under the action");
    if (!stable.is_mask() &&
        (a.kind == Action::Kind::translation || a.kind == Action::Kind::trivial)) {
        // abelian path: quotient of the stable subgroup by im(phi)
        IntMat collapse = translation_image_lattice(a);
        SubObjResult sub = materialize_sub(a.carrier, stable);
        const auto& sa = std::get<FgAb>(*sub.obj);
        IntMat collapse_in_sub = lattice_preimage(std::get<IntMat>(sub.incl.data), collapse);
        ObjPtr q = make_obj(make_fgab(sa.ngens, lattice_sum(collapse_in_sub, sa.rels)));
        Map proj = make_ab_hom(sub.obj, q, IntMat::identity(sa.ngens));
        bool trans = is_trivial_obj(*q);
        return {q, proj, trans};
    }
    // finite path: union-find over the stable subset
    i64 m = obj_size(*a.carrier);
    const auto& mask = stable.mask();
    std::vector<int> parent(size_t(m), 0);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    i64 n = obj_size(*a.group);
    for (int g = 0; g < n; ++g)
        for (int x = 0; x < m; ++x) {
            if (!mask[x]) continue;
            int y = action_apply(a, g, x);
            int rx = find(x), ry = find(y);
            if (rx != ry) parent[rx] = ry;
        }
    std::map<int, int> root_to_class;
    int bp = obj_basepoint_index(*a.carrier);
    root_to_class[find(bp)] = 0;
    std::vector<std::string> labels{"*"};
    std::vector<int> cls(size_t(m), -1);
    for (int x = 0; x < m; ++x) {
        if (!mask[x]) continue;
        int r = find(x);
        auto it = root_to_class.find(r);
        if (it == root_to_class.end()) {
            it = root_to_class.emplace(r, int(labels.size())).first;
            labels.push_back("[" + elem_name(*a.carrier, x) + "]");
        }
        cls[x] = it->second;
    }
    ObjPtr q = make_obj(make_pointed_set(std::move(labels), 0));
    // proj defined on the materialized stable subset
    SubObjResult sub = materialize_sub(a.carrier, stable);
    std::vector<int> img(size_t(obj_size(*sub.obj)), 0);
    for (size_t k = 0; k < img.size(); ++k) img[k] = cls[map_apply_idx(sub.incl, int(k))];
    Map proj = make_pointed_map(sub.obj, q, std::move(img));
    return {q, proj, root_to_class.size() == 1};
}

bool action_stabilizes(const Action& a, const Subobj& s) {
    if (!s.is_mask()) {
        if (a.kind == Action::Kind::trivial) return true;
        if (a.kind == Action::Kind::translation)
            return lattice_subset(translation_image_lattice(a), s.lattice());
        if (a.kind == Action::Kind::matrices) {
            for (const auto& m : a.mats)
                if (!lattice_subset(m.mul(s.lattice()), s.lattice())) return false;
            return true;
        }
        throw engine_error("table action on infinite carrier");
    }
    i64 n = obj_size(*a.group), m = obj_size(*a.carrier);
    for (int g = 0; g < n; ++g)
        for (int x = 0; x < m; ++x)
            if (s.mask()[x] && !s.mask()[action_apply(a, g, x)]) return false;
    return true;
}

bool is_equivariant_along(const Map& f, const Map& group_map, const Action& on_src,
                          const Action& on_dst) {
    if (obj_finite(*on_src.group) && obj_finite(*f.src) && obj_finite(*f.dst) &&
        obj_finite(*group_map.dst)) {
        i64 n = obj_size(*on_src.group), m = obj_size(*f.src);
        for (int g = 0; g < n; ++g)
            for (int x = 0; x < m; ++x)
                if (map_apply_idx(f, action_apply(on_src, g, x)) !=
                    action_apply(on_dst, map_apply_idx(group_map, g), map_apply_idx(f, x)))
                    return false;
        return true;
    }
    auto phi_of = [](const Action& a) -> Map {
        if (a.kind == Action::Kind::translation) return *a.phi;
        if (a.kind == Action::Kind::trivial) return trivial_map(a.group, a.carrier);
        throw engine_error("unsupported action combination in equivariance check");
    };
    return map_equal(compose(f, phi_of(on_src)), compose(phi_of(on_dst), group_map));
}

Action left_mult_action(ObjPtr g) {
    if (!is_group_like(*g)) throw engine_error("left multiplication needs a group");
    if (std::holds_alternative<FgAb>(*g)) return Action::make_translation(identity_map(g));
    i64 n = obj_size(*g);
    std::vector<std::vector<int>> perms(size_t(n), std::vector<int>(size_t(n), 0));
    for (int a = 0; a < n; ++a)
        for (int x = 0; x < n; ++x) perms[a][x] = obj_op(*g, a, x);
    return Action::make_table(g, g, std::move(perms));
}

bool is_equivariant(const Map& f, const Action& on_src, const Action& on_dst) {
    if (obj_finite(*f.src) && obj_finite(*f.dst) && obj_finite(*on_src.group) &&
        obj_finite(*on_dst.group) && f.is_elem()) {
        i64 n = obj_size(*on_src.group), m = obj_size(*f.src);
        for (int g = 0; g < n; ++g)
            for (int x = 0; x < m; ++x)
                if (f.images()[action_apply(on_src, g, x)] != action_apply(on_dst, g, f.images()[x]))
                    return false;
        return true;
    }
    // abelian path: translations along phi commute with f iff f.phi_src == phi_dst
    auto phi_of = [](const Action& a) -> Map {
        if (a.kind == Action::Kind::translation) return *a.phi;
        if (a.kind == Action::Kind::trivial) return trivial_map(a.group, a.carrier);
        throw engine_error("unsupported action combination in equivariance check");
    };
    return map_equal(compose(f, phi_of(on_src)), phi_of(on_dst));
}

bool action_transitive_on(const Action& a, const Subobj& s) {
    if (!action_stabilizes(a, s)) return false;
    if (!s.is_mask()) {
        // translation path: S contained in a single coset of im(phi) through 0
        if (a.kind == Action::Kind::trivial) return subobj_is_trivial(*a.carrier, s);
        return lattice_subset(s.lattice(), translation_image_lattice(a));
    }
    OrbitResult orb = orbit_space_restricted(a, s);
    return orb.transitive;
}

bool orbit_map_injective(const Map& f, const Action& a) {
    // does f factor through carrier/G injectively?
    if (f.is_elem()) {
        i64 m = obj_size(*f.src);
        OrbitResult orb = orbit_space(a);
        // map classes to f-images; injective iff classes with equal image collapse
        std::map<int, std::set<int>> by_image;
        for (int x = 0; x < m; ++x) by_image[f.images()[x]].insert(map_apply_idx(orb.proj, x));
        std::set<int> used;
        for (auto& [img, classes] : by_image) {
            if (classes.size() > 1) return false;
            if (!used.insert(*classes.begin()).second) return false;
        }
        return true;
    }
    // abelian: ker(f) must land inside im(phi)
    return lattice_subset(kernel_subobj(f).lattice(), translation_image_lattice(a));
}

Action restrict_action_to_subgroup(const Action& a, const SubObjResult& subgroup) {
    switch (a.kind) {
        case Action::Kind::trivial:
            return Action::make_trivial(subgroup.obj, a.carrier);
        case Action::Kind::translation:
            return Action::make_translation(compose(*a.phi, subgroup.incl));
        case Action::Kind::table: {
            i64 n = obj_size(*subgroup.obj);
            std::vector<std::vector<int>> perms(size_t(n), std::vector<int>{});
            for (int g = 0; g < n; ++g) perms[g] = a.perms[map_apply_idx(subgroup.incl, g)];
            return Action::make_table(subgroup.obj, a.carrier, std::move(perms));
        }
        case Action::Kind::matrices: {
            i64 n = obj_size(*subgroup.obj);
            std::vector<IntMat> mats(size_t(n), IntMat{});
            for (int g = 0; g < n; ++g) mats[g] = a.mats[map_apply_idx(subgroup.incl, g)];
            return Action::make_matrices(subgroup.obj, a.carrier, std::move(mats));
        }
    }
    throw engine_error("bad action kind");
}

Action pull_back_action(const Action& a, const Map& group_map) {
    switch (a.kind) {
        case Action::Kind::trivial:
            return Action::make_trivial(group_map.src, a.carrier);
        case Action::Kind::translation:
            return Action::make_translation(compose(*a.phi, group_map));
        case Action::Kind::table: {
            i64 n = obj_size(*group_map.src);
            std::vector<std::vector<int>> perms;
            perms.reserve(size_t(n));
            for (int g = 0; g < n; ++g) perms.push_back(a.perms[size_t(map_apply_idx(group_map, g))]);
            return Action::make_table(group_map.src, a.carrier, std::move(perms));
        }
        case Action::Kind::matrices: {
            i64 n = obj_size(*group_map.src);
            std::vector<IntMat> mats;
            mats.reserve(size_t(n));
            for (int g = 0; g < n; ++g) mats.push_back(a.mats[size_t(map_apply_idx(group_map, g))]);
            return Action::make_matrices(group_map.src, a.carrier, std::move(mats));
        }
    }
    throw engine_error("bad action kind");
}

Map corestrict(const Map& f, const SubObjResult& target_sub) {
    if (f.is_elem() || target_sub.incl.is_elem()) {
        Map ft = tabulate(f);
        Map it = tabulate(target_sub.incl);
        std::vector<int> where(size_t(obj_size(*it.dst)), -1);
        for (size_t k = 0; k < it.images().size(); ++k) where[size_t(it.images()[k])] = int(k);
        std::vector<int> img(ft.images().size());
        for (size_t i = 0; i < img.size(); ++i) {
            int w = where[size_t(ft.images()[i])];
            if (w < 0) throw engine_error("map does not factor through the subobject");
            img[i] = w;
        }
        return Map{f.src, target_sub.obj, std::move(img)};
    }
    const auto& sub = std::get<FgAb>(*target_sub.obj);
    const auto& amb = std::get<FgAb>(*f.dst);
    IntMat sys = target_sub.incl.matrix().hcat(amb.rels);
    IntMat out(sub.ngens, f.matrix().cols());
    for (int j = 0; j < f.matrix().cols(); ++j) {
        std::vector<i64> sol;
        if (!solve_integer(sys, f.matrix().col(j), &sol))
            throw engine_error("map does not factor through the subobject");
        for (int i = 0; i < sub.ngens; ++i) out.at(i, j) = sol[size_t(i)];
    }
    return make_ab_hom(f.src, target_sub.obj, out);
}

Action transport_action(const Action& a, const Map& carrier_iso) {
    // new carrier = carrier_iso.dst; acts by conjugating with the iso
    Map inv = inverse_iso(carrier_iso);
    switch (a.kind) {
        case Action::Kind::trivial:
            return Action::make_trivial(a.group, carrier_iso.dst);
        case Action::Kind::translation:
            return Action::make_translation(compose(carrier_iso, *a.phi));
        case Action::Kind::table: {
            i64 n = obj_size(*a.group), m = obj_size(*carrier_iso.dst);
            std::vector<std::vector<int>> perms(size_t(n), std::vector<int>(size_t(m), 0));
            for (int g = 0; g < n; ++g)
                for (int y = 0; y < m; ++y)
                    perms[g][y] = map_apply_idx(carrier_iso, action_apply(a, g, map_apply_idx(inv, y)));
            return Action::make_table(a.group, carrier_iso.dst, std::move(perms));
        }
        case Action::Kind::matrices: {
            std::vector<IntMat> mats;
            mats.reserve(a.mats.size());
            for (const auto& m : a.mats) mats.push_back(carrier_iso.matrix().mul(m).mul(inv.matrix()));
            return Action::make_matrices(a.group, carrier_iso.dst, std::move(mats));
        }
    }
    throw engine_error("bad action kind");
}

// ---------------------------------------------------------------------------
// spec-level operations

MapClassification classify_map(const Map& f, const std::optional<std::pair<Action, Action>>& actions) {
    MapClassification c;
    c.trivial_kernel = subobj_is_trivial(*f.src, kernel_subobj(f));
    c.epi = is_surjective(f);
    if (actions) {
        if (!is_equivariant(f, actions->first, actions->second))
            throw engine_error("map is not equivariant for the supplied actions");
        if (action_transitive_on(actions->first, subobj_full(*f.src))) {
            // (T3): transitive equivariant source turns trivial kernel into mono
            c.mono = c.trivial_kernel;
            return c;
        }
    }
    if (is_group_like(*f.src) && is_group_like(*f.dst))
        c.mono = c.trivial_kernel;  // (T2)
    else
        c.mono = is_injective(f);
    return c;
}

ObjPtr restricted_product(const std::vector<ObjPtr>& family) {
    if (family.empty()) return trivial_pointed_set();
    bool all_ab = true, all_finite_grouplike = true, any_pointed = false;
    for (const auto& o : family) {
        if (!std::holds_alternative<FgAb>(*o)) all_ab = false;
        if (!is_group_like(*o) || !obj_finite(*o)) all_finite_grouplike = false;
        if (!is_group_like(*o)) any_pointed = true;
    }
    if (all_ab) {
        int n = 0, k = 0;
        for (const auto& o : family) {
            n += std::get<FgAb>(*o).ngens;
            k += std::get<FgAb>(*o).rels.cols();
        }
        IntMat rels(n, k);
        int ro = 0, co = 0;
        for (const auto& o : family) {
            const auto& a = std::get<FgAb>(*o);
            for (int i = 0; i < a.ngens; ++i)
                for (int j = 0; j < a.rels.cols(); ++j) rels.at(ro + i, co + j) = a.rels.at(i, j);
            ro += a.ngens;
            co += a.rels.cols();
        }
        return make_obj(make_fgab(n, rels));
    }
    if (all_finite_grouplike && !any_pointed) {
        i64 total = 1;
        for (const auto& o : family) total = chk_mul(total, obj_size(*o));
        if (total > 2000000) throw engine_error("finite product too large");
        int n = int(total);
        std::vector<int> table(size_t(n) * n);
        for (int a = 0; a < n; ++a) {
            std::vector<int> ca = product_coords(family, a);
            for (int b = 0; b < n; ++b) {
                std::vector<int> cb = product_coords(family, b);
                std::vector<int> cc(ca.size());
                for (size_t i = 0; i < ca.size(); ++i) cc[i] = obj_op(*family[i], ca[i], cb[i]);
                table[size_t(a) * n + b] = product_index(family, cc);
            }
        }
        return make_obj(make_fin_group(n, std::move(table)));
    }
    // pointed product
    i64 total = 1;
    for (const auto& o : family) total = chk_mul(total, obj_size(*o));
    if (total > 2000000) throw engine_error("finite product too large");
    int n = int(total);
    std::vector<std::string> labels(size_t(n), std::string{});
    for (int a = 0; a < n; ++a) {
        std::vector<int> ca = product_coords(family, a);
        std::string s = "(";
        for (size_t i = 0; i < ca.size(); ++i) s += (i ? "," : "") + elem_name(*family[i], ca[i]);
        labels[a] = s + ")";
    }
    std::vector<int> bp_coords(family.size());
    for (size_t i = 0; i < family.size(); ++i) bp_coords[i] = obj_basepoint_index(*family[i]);
    return make_obj(make_pointed_set(std::move(labels), product_index(family, bp_coords)));
}

int product_index(const std::vector<ObjPtr>& family, const std::vector<int>& coords) {
    i64 idx = 0, mult = 1;
    for (size_t i = 0; i < family.size(); ++i) {
        idx += coords[i] * mult;
        mult *= obj_size(*family[i]);
    }
    return int(idx);
}

std::vector<int> product_coords(const std::vector<ObjPtr>& family, int index) {
    std::vector<int> coords(family.size());
    i64 idx = index;
    for (size_t i = 0; i < family.size(); ++i) {
        i64 m = obj_size(*family[i]);
        coords[i] = int(idx % m);
        idx /= m;
    }
    return coords;
}

Subobj group_center(const Obj& g) {
    if (std::holds_alternative<FgAb>(g)) return subobj_full(g);
    const auto& gr = std::get<FinGroup>(g);
    std::vector<char> m(size_t(gr.order), 0);
    for (int a = 0; a < gr.order; ++a) {
        bool central = true;
        for (int b = 0; b < gr.order && central; ++b) central = gr.mul(a, b) == gr.mul(b, a);
        m[a] = central;
    }
    return Subobj{std::move(m)};
}

Subobj normal_closure(const Obj& g, const Subobj& s) {
    if (!s.is_mask()) return s;  // abelian
    i64 n = obj_size(g);
    std::vector<char> m = s.mask();
    m[obj_basepoint_index(g)] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (int a = 0; a < n; ++a) {
            if (!m[a]) continue;
            // conjugates
            for (int x = 0; x < n; ++x) {
                int c = obj_op(g, obj_op(g, x, a), obj_inv(g, x));
                if (!m[c]) {
                    m[c] = 1;
                    grew = true;
                }
            }
            // products and inverses
            int ia = obj_inv(g, a);
            if (!m[ia]) {
                m[ia] = 1;
                grew = true;
            }
            for (int b = 0; b < n; ++b)
                if (m[b] && !m[obj_op(g, a, b)]) {
                    m[obj_op(g, a, b)] = 1;
                    grew = true;
                }
        }
    }
    return Subobj{std::move(m)};
}

bool subobj_is_normal(const Obj& g, const Subobj& s) {
    if (!s.is_mask()) return true;
    i64 n = obj_size(g);
    for (int a = 0; a < n; ++a) {
        if (!s.mask()[a]) continue;
        for (int x = 0; x < n; ++x)
            if (!s.mask()[obj_op(g, obj_op(g, x, a), obj_inv(g, x))]) return false;
    }
    return true;
}

bool subobj_central(const Obj& g, const Subobj& s) {
    return subobj_contains(g, group_center(g), s);
}

// ---------------------------------------------------------------------------
// subquotient certificates

SubqCert subq_full(const Obj& parent) {
    SubqCert c;
    c.sub = subobj_full(parent);
    if (c.sub.is_mask()) {
        std::vector<int> cls(c.sub.mask().size());
        std::iota(cls.begin(), cls.end(), 0);
        c.collapse = std::move(cls);
    } else {
        c.collapse = std::get<FgAb>(parent).rels.cols() == 0
                         ? lattice_hnf(IntMat(std::get<FgAb>(parent).ngens, 0))
                         : lattice_hnf(std::get<FgAb>(parent).rels);
    }
    return c;
}

namespace {

std::vector<int> canonical_partition(const std::vector<int>& cls) {
    std::map<int, int> renum;
    std::vector<int> out(cls.size(), -1);
    for (size_t i = 0; i < cls.size(); ++i) {
        if (cls[i] < 0) continue;
        auto it = renum.find(cls[i]);
        if (it == renum.end()) it = renum.emplace(cls[i], int(renum.size())).first;
        out[i] = it->second;
    }
    return out;
}

}  // namespace

bool subq_equal(const Obj& parent, const SubqCert& a, const SubqCert& b) {
    if (!subobj_equal(parent, a.sub, b.sub)) return false;
    if (a.is_finite_form() != b.is_finite_form()) return false;
    if (a.is_finite_form())
        return canonical_partition(std::get<std::vector<int>>(a.collapse)) ==
               canonical_partition(std::get<std::vector<int>>(b.collapse));
    return lattice_hnf(std::get<IntMat>(a.collapse)) == lattice_hnf(std::get<IntMat>(b.collapse));
}

std::string subq_desc(const Obj& parent, const SubqCert& c) {
    SubqMaterialized m = materialize_subq(std::make_shared<const Obj>(parent), c);
    return obj_desc(*m.obj);
}

SubqMaterialized materialize_subq(ObjPtr parent, const SubqCert& c) {
    SubqMaterialized out;
    if (c.is_finite_form()) {
        const auto& cls_raw = std::get<std::vector<int>>(c.collapse);
        std::vector<int> cls = canonical_partition(cls_raw);
        int nclasses = 0;
        for (int v : cls) nclasses = std::max(nclasses, v + 1);
        out.class_of = cls;
        out.lift.assign(size_t(nclasses), -1);
        for (size_t i = 0; i < cls.size(); ++i)
            if (cls[i] >= 0 && out.lift[cls[i]] < 0) out.lift[cls[i]] = int(i);
        int bp_class = cls[obj_basepoint_index(*parent)];
        // does the class partition define a group quotient? only when parent is
        // group-like, S is a subgroup, the basepoint class N is normal in S and
        // classes are exactly N-cosets
        bool group_quotient = false;
        if (is_group_like(*parent) && subobj_is_subgroup(*parent, c.sub)) {
            std::vector<char> nmask(cls.size(), 0);
            for (size_t i = 0; i < cls.size(); ++i) nmask[i] = cls[i] == bp_class;
            Subobj n = Subobj{nmask};
            if (subobj_is_subgroup(*parent, n)) {
                // cosets within S
                group_quotient = true;
                for (size_t i = 0; i < cls.size() && group_quotient; ++i) {
                    if (cls[i] < 0) continue;
                    for (size_t j = 0; j < cls.size() && group_quotient; ++j) {
                        if (cls[j] < 0) continue;
                        bool same_coset =
                            nmask[obj_op(*parent, obj_inv(*parent, int(i)), int(j))] != 0;
                        if (same_coset != (cls[i] == cls[j])) group_quotient = false;
                    }
                }
                // normality of N in S
                if (group_quotient)
                    for (size_t i = 0; i < cls.size() && group_quotient; ++i) {
                        if (cls[i] < 0 || !nmask[i]) continue;
                        for (size_t x = 0; x < cls.size(); ++x) {
                            if (cls[x] < 0) continue;
                            int conj = obj_op(*parent, obj_op(*parent, int(x), int(i)),
                                              obj_inv(*parent, int(x)));
                            if (!nmask[conj]) {
                                group_quotient = false;
                                break;
                            }
                        }
                    }
            }
        }
        if (group_quotient) {
            int n = int(out.lift.size());
            // basepoint class must be element 0 of the quotient group
            if (bp_class != 0) {
                // renumber so that the identity class comes first
                std::vector<int> perm(size_t(n), 0);
                for (int i = 0; i < n; ++i) perm[i] = i == bp_class ? 0 : (i < bp_class ? i + 1 : i);
                // rebuild via canonical ordering with identity first
                std::vector<int> cls2(cls.size(), -1);
                for (size_t i = 0; i < cls.size(); ++i)
                    if (cls[i] >= 0) cls2[i] = perm[cls[i]];
                cls = cls2;
                out.class_of = cls;
                out.lift.assign(size_t(n), -1);
                for (size_t i = 0; i < cls.size(); ++i)
                    if (cls[i] >= 0 && out.lift[cls[i]] < 0) out.lift[cls[i]] = int(i);
            }
            std::vector<int> table(size_t(n) * n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    table[size_t(a) * n + b] = cls[obj_op(*parent, out.lift[a], out.lift[b])];
            out.obj = make_obj(make_fin_group(n, std::move(table)));
        } else {
            std::vector<std::string> labels(out.lift.size());
            for (size_t k = 0; k < out.lift.size(); ++k) labels[k] = "[" + elem_name(*parent, out.lift[k]) + "]";
            // basepoint class must be position 0 for canonical pointed sets
            if (bp_class != 0) {
                std::swap(labels[0], labels[bp_class]);
                std::swap(out.lift[0], out.lift[bp_class]);
                for (auto& v : out.class_of) {
                    if (v == 0)
                        v = bp_class;
                    else if (v == bp_class)
                        v = 0;
                }
            }
            out.obj = make_obj(make_pointed_set(std::move(labels), 0));
        }
        return out;
    }
    // FgAb path: sub lattice S, collapse lattice N; object = S/N presented on
    // a basis of S
    const auto& pa = std::get<FgAb>(*parent);
    IntMat basis = c.sub.lattice();
    IntMat n_in_basis = lattice_preimage(basis, lattice_sum(std::get<IntMat>(c.collapse), pa.rels));
    out.basis = basis;
    out.obj = make_obj(make_fgab(basis.cols(), n_in_basis));
    return out;
}

int subq_class_of(const Obj& parent, const SubqMaterialized& m, int elem) {
    (void)parent;
    return m.class_of[elem];
}

std::vector<i64> subq_project_vec(const FgAb& parent, const SubqMaterialized& m, const std::vector<i64>& x) {
    // the canonical representative of an element of the subobject lies in the
    // sublattice whenever any representative does
    std::vector<i64> xr = parent.reduce(x);
    std::vector<i64> y;
    if (!solve_integer(m.basis, xr, &y)) throw engine_error("element not in subobject");
    return std::get<FgAb>(*m.obj).reduce(y);
}

std::vector<i64> subq_lift_vec(const FgAb& parent, const SubqMaterialized& m, const std::vector<i64>& y) {
    (void)parent;
    return m.basis.apply(y);
}

}  // namespace gersten
