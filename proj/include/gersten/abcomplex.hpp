#pragma once
// Chain complexes of finitely generated abelian groups presented by relation
// matrices, with homology as explicit subquotients, induced maps, and snake
// connecting maps. Backbone for nerve cohomology and for the tower-based
// exact-couple generators.

#include <vector>

#include "gersten/objects.hpp"

namespace gersten {

// terms indexed by chain degree n >= 0; d[n] : terms[n+1] -> terms[n]
struct AbChainComplex {
    std::vector<FgAb> terms;
    std::vector<IntMat> d;

    int top() const { return int(terms.size()) - 1; }
    const FgAb& term(int n) const;
    IntMat d_into(int n) const;  // zero matrix outside range
};

AbChainComplex make_ab_chain_complex(std::vector<FgAb> terms, std::vector<IntMat> d);
void validate_ab_chain_complex(const AbChainComplex& c);

struct AbChainMap {
    std::vector<IntMat> comps;  // comps[n] : src.terms[n] -> dst.terms[n]
};
void validate_ab_chain_map(const AbChainComplex& src, const AbChainComplex& dst,
                           const AbChainMap& f);

// homology subquotient at degree n, anchored in terms[n]
struct HomologyData {
    SubqCert cert;
    SubqMaterialized mat;
    ObjPtr parent;
};
HomologyData homology_at(const AbChainComplex& c, int n);

// map H_n(src) -> H_n(dst) induced by a chain map
Map induced_on_homology(const AbChainComplex& src, const AbChainComplex& dst, const AbChainMap& f,
                        int n, const HomologyData& hsrc, const HomologyData& hdst);

// snake map H_n(C) -> H_{n-1}(A) of a degreewise short exact sequence
//   0 -> A -> B -> C -> 0
Map connecting_on_homology(const AbChainComplex& a, const AbChainComplex& b,
                           const AbChainComplex& cc, const AbChainMap& incl, const AbChainMap& proj,
                           const HomologyData& hc, const HomologyData& ha_lower, int n);

// degreewise kernel subcomplex of a surjective chain map, with its inclusion
struct KernelComplex {
    AbChainComplex complex;
    AbChainMap incl;
};
KernelComplex kernel_complex(const AbChainComplex& src, const AbChainComplex& dst,
                             const AbChainMap& f);

}  // namespace gersten
