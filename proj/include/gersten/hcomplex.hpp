#pragma once
// Homotopical complexes (pointed set in degree 0, group in degree 1, abelian
// above, differentials of degree -1 with d.d = *), augmentations and
// coaugmentations, homotopy groups, exactness and strong exactness, and the
// homotopical <-> cohomotopical reindexing.

#include <optional>
#include <string>
#include <vector>

#include "gersten/objects.hpp"

namespace gersten {

struct HtpyComplex {
    std::vector<ObjPtr> terms;  // E_0 .. E_d
    std::vector<Map> diffs;     // diffs[n] : E_{n+1} -> E_n
    Action e1_on_e0;            // d_1 must be this action applied to the basepoint

    int top() const { return int(terms.size()) - 1; }
    ObjPtr term(int n) const;
    // differential into degree n (trivial outside range)
    Map diff_into(int n) const;
};

HtpyComplex make_htpy_complex(std::vector<ObjPtr> terms, std::vector<Map> diffs, Action e1_on_e0);
// convenience: E_1 acts by translation along d_1 (abelian carriers)
HtpyComplex make_abelian_complex(std::vector<ObjPtr> terms, std::vector<Map> diffs);
void validate_htpy_complex(const HtpyComplex& c);  // throws engine_error

// Augmentation target with an implicitly collapsed subobject: eps factors as
// E_0 --to--> D --collapse killed--> F. A plain pointed-map augmentation is
// the special case killed = trivial.
struct AugMap {
    Map to;
    Subobj killed;
};
AugMap plain_augmentation(Map eps);
Subobj aug_kernel(const AugMap& a);
// do two elements of the source have equal images under the collapsed map?
bool aug_equal_images(const AugMap& a, int x, int y);
bool aug_is_equivariant(const AugMap& a, const Action& e1_on_e0);

// d-truncated cohomotopical complex C^0 -> ... -> C^d with augmentation
// tau : X -> C^0 and coaugmentation eps : C^d -> F, stored homotopically
// (C^n = E_{d-n}).
struct BiAugmentedComplex {
    HtpyComplex cx;
    std::optional<Map> tau;     // X -> E_d
    std::optional<AugMap> eps;  // E_0 -> F

    int trunc_d() const { return cx.top(); }
    ObjPtr coterm(int p) const { return cx.term(cx.top() - p); }  // C^p
};

void validate_biaugmented(const BiAugmentedComplex& c);

struct normality_error : engine_error {
    std::string witness;
    explicit normality_error(std::string msg, std::string w)
        : engine_error(std::move(msg)), witness(std::move(w)) {}
};

struct HomotopyGroups {
    // certs[n] is a subquotient certificate of E_n; index 0 is present only
    // when an augmentation was supplied
    std::vector<std::optional<SubqCert>> certs;
    std::vector<ObjPtr> groups;  // materialized values (trivial placeholder at skipped 0)
    std::vector<std::string> warnings;
};

HomotopyGroups homotopy_groups(const HtpyComplex& c, const std::optional<AugMap>& aug);
// single position; n >= 1, or n == 0 with augmentation
std::pair<SubqCert, ObjPtr> homotopy_at(const HtpyComplex& c, int n,
                                        const std::optional<AugMap>& aug);

enum class ExactMode { exact, strong };

struct ComplexExactness {
    bool exact = false;
    bool strong = false;
    std::vector<std::string> failures;  // cohomotopical positions
};

ComplexExactness check_exact(const BiAugmentedComplex& c, ExactMode mode);

// cohomotopical presentation (C^n = E_{d-n}); reindexing twice is the identity
struct CohPresentation {
    std::vector<ObjPtr> terms;  // C^0 .. C^d
    std::vector<Map> diffs;     // diffs[n] : C^n -> C^{n+1}
};
CohPresentation reindex(const HtpyComplex& c, int d);  // throws if c is not d-truncated
HtpyComplex reindex_back(const CohPresentation& p, const Action& e1_on_e0);
bool complexes_structurally_equal(const HtpyComplex& a, const HtpyComplex& b);

}  // namespace gersten
