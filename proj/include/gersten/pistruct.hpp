#pragma once
// Graded homotopy-style structures: pointed set in degree 0, group in degree
// 1, abelian groups with a degree-1 action above, their morphisms, products,
// filtered colimits, and long homotopy sequences with axiom and exactness
// checking.

#include <optional>
#include <string>
#include <vector>

#include "gersten/objects.hpp"

namespace gersten {

inline constexpr int kDefaultTruncation = 8;

struct PiStructure {
    ObjPtr deg0;
    ObjPtr deg1;
    std::vector<ObjPtr> higher;    // degrees 2..trunc
    std::vector<Action> actions;   // deg1 acting on each higher degree
    int trunc = kDefaultTruncation;

    ObjPtr at(int n) const;
    const Action* action_at(int n) const;  // nullptr = trivial
};

PiStructure make_pi_structure(ObjPtr deg0, ObjPtr deg1, std::vector<ObjPtr> higher,
                              std::vector<Action> actions, int trunc = kDefaultTruncation);
PiStructure trivial_pi_structure(int trunc = kDefaultTruncation);
void validate_pi_structure(const PiStructure& p);  // throws engine_error
bool pi_structure_trivial(const PiStructure& p);

struct PiMorphism {
    std::vector<Map> comps;  // degree n component at index n

    const Map& at(int n) const { return comps.at(size_t(n)); }
};

PiMorphism make_pi_morphism(const PiStructure& src, const PiStructure& dst, std::vector<Map> comps);
PiMorphism trivial_pi_morphism(const PiStructure& src, const PiStructure& dst);
PiMorphism identity_pi_morphism(const PiStructure& p);
void validate_pi_morphism(const PiStructure& src, const PiStructure& dst, const PiMorphism& m);
bool pi_morphism_is_iso(const PiMorphism& m);

// -------------------------------------------------------------------------
// long homotopy sequences
//
//  ... H_2 => F_1 -> G_1 -> H_1 => F_0 -> G_0 -> H_0
// with boundary of degree -1 and an action of H_1 on F_0.

struct LongHtpySequence {
    PiStructure F, G, H;
    PiMorphism f, g;            // f : F -> G, g : G -> H
    std::vector<Map> boundary;  // boundary[n] : H_{n+1} -> F_n, n = 0..trunc-1
    Action h1_on_f0;

    int trunc() const { return F.trunc; }
    const Map& bnd(int n_target) const { return boundary.at(size_t(n_target)); }
};

LongHtpySequence make_long_sequence(PiStructure F, PiStructure G, PiStructure H, PiMorphism f,
                                    PiMorphism g, std::vector<Map> boundary, Action h1_on_f0);
LongHtpySequence trivial_long_sequence(int trunc = kDefaultTruncation);

struct SequenceAxiomReport {
    bool wellformed = false;       // component gradings/kinds parse
    bool ax_structures = false;    // (1) pi-structures and morphisms valid
    bool ax_boundary = false;      // (2) boundary degree -1, group homs above degree 1
    bool ax_equivariance = false;  // (3) H_1-object structure, equivariant boundary, f_0 invariant
    bool ax_central = false;       // (4) image of boundary into degree 1 is central
    bool ax_composites = false;    // (5) consecutive composites trivial
    bool boundary_is_orbit_map = false;  // Remark: boundary_1 = action applied to the basepoint
    bool basepoint_orbit_nontrivial = false;  // flagged, permitted
    std::vector<std::string> notes;

    bool all() const {
        return wellformed && ax_structures && ax_boundary && ax_equivariance && ax_central &&
               ax_composites && boundary_is_orbit_map;
    }
};

SequenceAxiomReport validate_long_sequence(const LongHtpySequence& s);

struct ExactnessReport {
    bool exact = false;       // strong form (includes the orbit monomorphism)
    bool weak_exact = false;  // image = kernel at every slot only
    std::vector<std::string> failures;
};

ExactnessReport check_long_exactness(const LongHtpySequence& s);

// -------------------------------------------------------------------------
// products and filtered colimits

PiStructure pi_product(const std::vector<PiStructure>& xs);

// finite poset given by a reflexive-transitive "leq" relation matrix
struct FinitePoset {
    int n = 0;
    std::vector<char> leq;  // n x n, leq[i*n+j] = (i <= j)

    bool le(int i, int j) const { return leq[size_t(i) * n + j] != 0; }
};
FinitePoset make_finite_poset(int n, std::vector<std::pair<int, int>> relations);
bool poset_is_filtered(const FinitePoset& p);
std::optional<int> poset_maximum(const FinitePoset& p);

struct PiDiagram {
    FinitePoset poset;
    std::vector<PiStructure> values;
    // maps[{i,j}] for i <= j covering pairs (validated on composites)
    std::vector<std::tuple<int, int, PiMorphism>> maps;
};

struct ColimitResult {
    PiStructure value;
    int at_index = -1;  // index realizing the colimit
};
ColimitResult filtered_colimit_pi(const PiDiagram& d);  // throws engine_error if not filtered

struct SeqMorphism {
    PiMorphism on_F, on_G, on_H;
};
void validate_seq_morphism(const LongHtpySequence& src, const LongHtpySequence& dst,
                           const SeqMorphism& m);

struct SeqDiagram {
    FinitePoset poset;
    std::vector<LongHtpySequence> values;
    std::vector<std::tuple<int, int, SeqMorphism>> maps;
};

struct SeqColimitResult {
    LongHtpySequence value;
    int at_index = -1;
};
SeqColimitResult filtered_colimit_seq(const SeqDiagram& d);

// sequential tower X_0 -> X_1 -> ...; must become isomorphisms at some stage
struct StabilizingChain {
    std::vector<PiStructure> values;
    std::vector<PiMorphism> steps;  // steps[i] : values[i] -> values[i+1]
};
struct non_stabilizing_error : engine_error {
    using engine_error::engine_error;
};
// returns the stable value and the detected stage
std::pair<PiStructure, int> colimit_stabilizing(const StabilizingChain& c);

}  // namespace gersten
