#pragma once
// Finite pointed sets, finite groups given by multiplication tables, and
// finitely generated abelian groups given by relation matrices, together with
// the morphism / kernel / image / cokernel / orbit calculus used everywhere
// else in the engine.
//
// Every value is immutable after construction and safe to share across
// threads. Objects are held by shared_ptr<const Obj>; maps and actions keep
// their endpoints alive.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gersten/intmat.hpp"

namespace gersten {

struct engine_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// carriers

struct PointedSet {
    std::vector<std::string> elements;
    int basepoint = 0;
};

struct FinGroup {
    int order = 1;
    std::vector<int> table;  // order x order, identity is element 0
    std::vector<std::string> names;

    int mul(int a, int b) const { return table[size_t(a) * order + b]; }
    int inv(int a) const;
    int pow(int a, long long e) const;
};

// Z^ngens modulo the column span of rels. The Smith normal form of rels is
// cached at construction; invariant_factors lists the torsion coefficients
// > 1 in divisibility order.
struct FgAb {
    int ngens = 0;
    IntMat rels;  // ngens x k

    std::vector<i64> invariant_factors;
    int free_rank = 0;

    // z = umat * x puts the relation lattice in diagonal form; diag[i] is the
    // modulus of coordinate i (0 = free).
    IntMat umat, uinv;
    std::vector<i64> diag;

    bool finite() const { return free_rank == 0; }
    i64 order() const;  // throws on infinite
    std::vector<i64> reduce(const std::vector<i64>& x) const;  // canonical representative
    bool same_element(const std::vector<i64>& x, const std::vector<i64>& y) const;
    // element enumeration (finite only)
    std::vector<i64> element(i64 index) const;
    i64 index_of(const std::vector<i64>& x) const;
};

enum class ObjKind { pointed, group, ab };

using Obj = std::variant<PointedSet, FinGroup, FgAb>;
using ObjPtr = std::shared_ptr<const Obj>;

ObjPtr make_obj(PointedSet s);
ObjPtr make_obj(FinGroup g);
ObjPtr make_obj(FgAb a);
ObjPtr trivial_pointed_set();
ObjPtr trivial_group();
ObjPtr trivial_ab();

PointedSet make_pointed_set(std::vector<std::string> elements, int basepoint);
FinGroup make_fin_group(int order, std::vector<int> table, std::vector<std::string> names = {});
FgAb make_fgab(int ngens, IntMat rels);
FgAb fgab_cyclic(i64 n);       // Z/n, or Z when n == 0
FgAb fgab_free(int rank);
FgAb fgab_from_factors(int free_rank, const std::vector<i64>& torsion);

ObjKind obj_kind(const Obj& o);
bool is_group_like(const Obj& o);   // FinGroup or FgAb
bool is_abelian(const Obj& o);      // FgAb, or abelian FinGroup
bool is_trivial_obj(const Obj& o);
bool obj_finite(const Obj& o);
i64 obj_size(const Obj& o);                      // throws on infinite
int obj_basepoint_index(const Obj& o);           // finite only
std::string obj_desc(const Obj& o);              // human-readable isomorphism type
std::string elem_name(const Obj& o, int idx);
// Same isomorphism type? (pointed: equal cardinality; ab: equal invariants;
// finite groups: equal order + abelian invariants, exhaustive search for
// small nonabelian pairs.)
bool obj_iso(const Obj& a, const Obj& b);

// group operations through element indices (finite carriers only)
int obj_op(const Obj& o, int a, int b);
int obj_inv(const Obj& o, int a);

// ---------------------------------------------------------------------------
// subobjects

// A subobject of a parent Obj: an element mask for finite carriers, or a
// sublattice (canonical HNF generators, always containing the relations) for
// FgAb parents.
struct Subobj {
    std::variant<std::vector<char>, IntMat> data;

    const std::vector<char>& mask() const { return std::get<std::vector<char>>(data); }
    const IntMat& lattice() const { return std::get<IntMat>(data); }
    bool is_mask() const { return std::holds_alternative<std::vector<char>>(data); }
};

Subobj subobj_full(const Obj& parent);
Subobj subobj_trivial(const Obj& parent);
Subobj subobj_from_mask(const Obj& parent, std::vector<char> mask);
Subobj subobj_from_lattice(const FgAb& parent, const IntMat& gens);  // rels added, HNF'd
// convert a lattice subobject of a finite FgAb parent to mask form
Subobj subobj_as_mask(const Obj& parent, const Subobj& s);
// convert a mask subobject of a finite FgAb parent to lattice form (the mask
// must be closed under the group law)
Subobj subobj_as_lattice(const Obj& parent, const Subobj& s);
bool subobj_equal(const Obj& parent, const Subobj& a, const Subobj& b);
bool subobj_contains(const Obj& parent, const Subobj& outer, const Subobj& inner);
bool subobj_is_trivial(const Obj& parent, const Subobj& s);
bool subobj_is_full(const Obj& parent, const Subobj& s);
i64 subobj_size(const Obj& parent, const Subobj& s);  // throws if infinite
bool subobj_is_subgroup(const Obj& parent, const Subobj& s);
Subobj subobj_intersect(const Obj& parent, const Subobj& a, const Subobj& b);
std::string subobj_desc(const Obj& parent, const Subobj& s);

// ---------------------------------------------------------------------------
// morphisms

// Structure-respecting map between carriers. Finite carriers use element
// tables, FgAb -> FgAb maps use integer matrices on generators.
struct Map {
    ObjPtr src, dst;
    std::variant<std::vector<int>, IntMat> data;

    bool is_elem() const { return std::holds_alternative<std::vector<int>>(data); }
    const std::vector<int>& images() const { return std::get<std::vector<int>>(data); }
    const IntMat& matrix() const { return std::get<IntMat>(data); }
};

// checked constructors
Map make_pointed_map(ObjPtr src, ObjPtr dst, std::vector<int> images);
Map make_group_hom(ObjPtr src, ObjPtr dst, std::vector<int> images);
Map make_ab_hom(ObjPtr src, ObjPtr dst, IntMat m);
Map make_elem_map_checked(ObjPtr src, ObjPtr dst, std::vector<int> images);  // hom iff both group-like
Map identity_map(ObjPtr o);
Map trivial_map(ObjPtr src, ObjPtr dst);

int map_apply_idx(const Map& f, int i);                       // finite path
std::vector<i64> map_apply_vec(const Map& f, const std::vector<i64>& x);
Map compose(const Map& g, const Map& f);                      // g after f
Map tabulate(const Map& f);                                   // force element form (finite carriers)
bool map_equal(const Map& f, const Map& g);
bool maps_equal_up_to_sign(const Map& f, const Map& g);       // f == -g (inverse map); plain equality on bare pointed sets
bool map_is_structural(const Map& f);                         // respects structure of both endpoints
bool map_is_trivial(const Map& f);
Map negate_map(const Map& f);                                 // group-valued maps only

Subobj kernel_subobj(const Map& f);   // preimage of basepoint
Subobj image_subobj(const Map& f);
bool is_injective(const Map& f);
bool is_surjective(const Map& f);
bool exact_at(const Map& incoming, const Map& outgoing);  // im(incoming) == ker(outgoing)

struct QuotientResult {
    ObjPtr obj;
    Map proj;
};

// Pointed cokernel: target with the image collapsed to the basepoint
// (pointed sets and finite groups; for finite groups this is the quotient by
// the normal closure of the image). Abelian cokernel: target / image.
QuotientResult cokernel(const Map& f);

struct SubObjResult {
    ObjPtr obj;
    Map incl;
};
SubObjResult materialize_sub(ObjPtr parent, const Subobj& s);
// quotient of parent by a subobject: group quotient when parent is group-like
// (subgroup must be normal), pointed collapse otherwise
QuotientResult materialize_quotient(ObjPtr parent, const Subobj& s);

// inverse of an isomorphism
Map inverse_iso(const Map& f);

// preimage of a subobject of dst
Subobj preimage_subobj(const Map& f, const Subobj& t);
// image of a subobject of src
Subobj image_of_subobj(const Map& f, const Subobj& s);
// restriction of f to a subobject (materializes the subobject)
Map restrict_map(const Map& f, const SubObjResult& sub);

// ---------------------------------------------------------------------------
// group actions

// Left action of a group-like Obj on a pointed carrier.
//  - trivial: every element acts as identity.
//  - table: per group element a permutation of the (finite) carrier.
//  - translation: g . x = phi(g) * x where phi is a structural map from the
//    group to the (group-like) carrier; covers boundary actions of abelian
//    theories.
//  - matrices: per group element an automorphism matrix of an FgAb carrier
//    (degree-1 actions on higher degrees).
struct Action {
    enum class Kind { trivial, table, translation, matrices };
    Kind kind = Kind::trivial;
    ObjPtr group, carrier;
    std::vector<std::vector<int>> perms;  // table
    std::optional<Map> phi;               // translation
    std::vector<IntMat> mats;             // matrices

    static Action make_trivial(ObjPtr group, ObjPtr carrier);
    static Action make_table(ObjPtr group, ObjPtr carrier, std::vector<std::vector<int>> perms);
    static Action make_translation(Map phi);
    static Action make_matrices(ObjPtr group, ObjPtr carrier, std::vector<IntMat> mats);
};

bool action_valid(const Action& a);
bool action_by_automorphisms(const Action& a);
int action_apply(const Action& a, int g, int x);  // finite path
std::vector<i64> action_apply_vec(const Action& a, const std::vector<i64>& g, const std::vector<i64>& x);
bool action_is_trivial(const Action& a);
// the map g -> g . basepoint
Map action_on_basepoint(const Action& a);
bool action_equal(const Action& a, const Action& b);

// orbit space as pointed set (basepoint = orbit of basepoint); finite path
// returns the orbit partition, translation path the cokernel of phi.
struct OrbitResult {
    ObjPtr obj;  // pointed set of orbits (or FgAb quotient for translations)
    Map proj;    // carrier -> orbits (elem form when finite)
    bool transitive = false;
};
OrbitResult orbit_space(const Action& a);
OrbitResult orbit_space_restricted(const Action& a, const Subobj& stable);  // throws if not stable

bool action_stabilizes(const Action& a, const Subobj& s);
bool is_equivariant(const Map& f, const Action& on_src, const Action& on_dst);
// f(g . x) == group_map(g) . f(x)
bool is_equivariant_along(const Map& f, const Map& group_map, const Action& on_src,
                          const Action& on_dst);
// the left-multiplication action of a group-like object on itself
Action left_mult_action(ObjPtr g);
bool action_transitive_on(const Action& a, const Subobj& s);
// is the induced map carrier/G -> dst injective?
bool orbit_map_injective(const Map& f, const Action& a);

// restrict an action to a subgroup of the acting group
Action restrict_action_to_subgroup(const Action& a, const SubObjResult& subgroup);
// pull back the acting group along a group map (group' = group_map.src)
Action pull_back_action(const Action& a, const Map& group_map);
// factor f through a subobject of its target: f = incl . result
Map corestrict(const Map& f, const SubObjResult& target_sub);
// transport an action along an isomorphism of carriers
Action transport_action(const Action& a, const Map& carrier_iso);

// ---------------------------------------------------------------------------
// spec-level operations

struct MapClassification {
    bool mono = false;
    bool epi = false;
    bool trivial_kernel = false;
};
// With an action supplied, f must be equivariant (throws engine_error
// otherwise) and monomorphy may be derived from trivial kernel when the
// action on the source is transitive.
MapClassification classify_map(const Map& f, const std::optional<std::pair<Action, Action>>& actions = {});

// finite restricted product = plain product (pointwise basepoint); abelian
// families produce the direct sum
ObjPtr restricted_product(const std::vector<ObjPtr>& family);
// projection to one factor, and the product element indexing
int product_index(const std::vector<ObjPtr>& family, const std::vector<int>& coords);
std::vector<int> product_coords(const std::vector<ObjPtr>& family, int index);

Subobj group_center(const Obj& g);
Subobj normal_closure(const Obj& g, const Subobj& s);
bool subobj_is_normal(const Obj& g, const Subobj& s);
bool subobj_central(const Obj& g, const Subobj& s);

// ---------------------------------------------------------------------------
// subquotient certificates (spectral pages are stored in this form)

// A subquotient of a parent object: a subobject S together with collapse
// data on S. Finite path: partition of S given by class indices in canonical
// (first-occurrence) numbering. FgAb path: collapse lattice N with
// rels <= N <= S.
struct SubqCert {
    Subobj sub;
    std::variant<std::vector<int>, IntMat> collapse;

    bool is_finite_form() const { return std::holds_alternative<std::vector<int>>(collapse); }
};

SubqCert subq_full(const Obj& parent);
bool subq_equal(const Obj& parent, const SubqCert& a, const SubqCert& b);
std::string subq_desc(const Obj& parent, const SubqCert& c);

struct SubqMaterialized {
    ObjPtr obj;
    // parent element -> class index (finite; -1 outside S), or matrix data
    std::vector<int> class_of;
    std::vector<int> lift;  // class -> representative parent element
    // FgAb path: obj = (S-lattice)/(N-lattice) presented on S-basis; basis
    // columns map S-coordinates to parent coordinates
    IntMat basis;
};
SubqMaterialized materialize_subq(ObjPtr parent, const SubqCert& c);
// class index of a parent element / vector under a materialization
int subq_class_of(const Obj& parent, const SubqMaterialized& m, int elem);
std::vector<i64> subq_project_vec(const FgAb& parent, const SubqMaterialized& m, const std::vector<i64>& x);
std::vector<i64> subq_lift_vec(const FgAb& parent, const SubqMaterialized& m, const std::vector<i64>& y);

}  // namespace gersten
