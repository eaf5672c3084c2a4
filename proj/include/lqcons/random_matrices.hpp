#pragma once

#include <random>

#include "lqcons/resistance.hpp"
#include "lqcons/stochastic_core.hpp"

namespace lqcons {

using Rng = std::mt19937_64;

/// Random nonreversible consensus matrix: a random Hamiltonian cycle (for
/// irreducibility) plus independent extra directed edges with probability
/// `edge_prob`; weights uniform on [0.1, 1], rows normalized.
ConsensusMatrix random_consensus(int n, Rng& rng, double edge_prob = 0.4);

/// Same construction with a symmetric support pattern but independent weights.
ConsensusMatrix random_symmetric_support_consensus(int n, Rng& rng, double edge_prob = 0.4);

/// Row-normalized random symmetric weight matrix (reversible, pi proportional to row sums).
ConsensusMatrix random_symmetric_normalized(int n, Rng& rng, double edge_prob = 0.4);

/// Symmetric stochastic matrix (doubly stochastic and normal).
ConsensusMatrix random_symmetric_stochastic(int n, Rng& rng, double edge_prob = 0.4);

/// Connected random conductance matrix; `positive_diagonal` adds self loops.
ConductanceMatrix random_conductance(int n, Rng& rng, bool positive_diagonal = true, double edge_prob = 0.4);

/// Psi of a random positive-diagonal conductance matrix.
ConsensusMatrix random_reversible(int n, Rng& rng, double edge_prob = 0.4);

/// Random circulant on Z_n with offsets {0, 1} always present plus random extras.
ConsensusMatrix random_circulant(int n, Rng& rng);

/// The i-th member of a mixed family of commuting matrices: circulants, Cayley
/// case 1/2 tori, the 4x4 commuting example, and symmetric stochastic matrices.
ConsensusMatrix commuting_family_member(int i, Rng& rng);

}  // namespace lqcons
