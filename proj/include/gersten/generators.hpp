#pragma once
// Random bounded towers with exact rows by construction: abelian filtered
// chain complexes and finite-group quotient towers. These feed the oracle
// corpora for pages, degeneracy, and colimit checks.

#include <random>

#include "gersten/abcomplex.hpp"
#include "gersten/spectral.hpp"

namespace gersten {

struct TowerGenOptions {
    int d = 2;           // boundedness
    int top_degree = 3;  // chain degrees 0..top_degree
    int gens_per_degree = 3;
    int max_torsion = 4;
    int max_group_order = 24;
};

// Rees system of a random filtered chain complex of f.g. abelian groups.
ReesSystem random_abelian_rees(std::mt19937& rng, const TowerGenOptions& opt);
// Rees system of a random tower of quotients of a finite group (degrees 0/1).
ReesSystem random_group_rees(std::mt19937& rng, const TowerGenOptions& opt);

// Rees system of an explicit filtration: lambda[p][n] are nested lattices in
// the presentation of C (lambda[d] must be the relation lattice).
ReesSystem rees_from_filtration(const AbChainComplex& C,
                                const std::vector<std::vector<IntMat>>& lambda);

// Rees system of a finite-group tower given by a descending chain of normal
// subgroup masks (chain[d-1] down to ... chain[0] largest; N_d = 1 implicit).
ReesSystem rees_from_group_tower(const FinGroup& g, const std::vector<std::vector<char>>& chain);

// small finite group tables for fixtures
FinGroup table_cyclic(int n);
FinGroup table_dihedral(int n);  // order 2n
FinGroup table_sym3();
FinGroup table_quaternion8();
FinGroup table_direct_product(const FinGroup& a, const FinGroup& b);
FinGroup table_alternating4();

}  // namespace gersten
