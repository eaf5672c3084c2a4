#include "lqcons/random_matrices.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "lqcons/graph_gen.hpp"

namespace lqcons {

namespace {

// 0/1 pattern containing a random Hamiltonian cycle, the diagonal, and extra edges.
Matrix random_pattern(int n, Rng& rng, double edge_prob, bool symmetric) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix pattern = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    int u = order[static_cast<std::size_t>(i)], v = order[static_cast<std::size_t>((i + 1) % n)];
    pattern(u, v) = 1.0;
    if (symmetric) pattern(v, u) = 1.0;
  }
  std::bernoulli_distribution extra(edge_prob);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v || (symmetric && v < u)) continue;
      if (extra(rng)) {
        pattern(u, v) = 1.0;
        if (symmetric) pattern(v, u) = 1.0;
      }
    }
  return pattern;
}

Matrix weights_on(const Matrix& pattern, Rng& rng) {
  std::uniform_real_distribution<double> w(0.1, 1.0);
  Matrix m = Matrix::Zero(pattern.rows(), pattern.cols());
  for (Index u = 0; u < m.rows(); ++u)
    for (Index v = 0; v < m.cols(); ++v)
      if (pattern(u, v) > 0.0) m(u, v) = w(rng);
  return m;
}

Matrix normalize_rows(const Matrix& m) { return m.rowwise().sum().cwiseInverse().asDiagonal() * m; }

}  // namespace

ConsensusMatrix random_consensus(int n, Rng& rng, double edge_prob) {
  return validate_consensus(normalize_rows(weights_on(random_pattern(n, rng, edge_prob, false), rng)));
}

ConsensusMatrix random_symmetric_support_consensus(int n, Rng& rng, double edge_prob) {
  return validate_consensus(normalize_rows(weights_on(random_pattern(n, rng, edge_prob, true), rng)));
}

ConsensusMatrix random_symmetric_normalized(int n, Rng& rng, double edge_prob) {
  Matrix w = weights_on(random_pattern(n, rng, edge_prob, true), rng);
  Matrix sym = (w + w.transpose()) / 2.0;
  return validate_consensus(normalize_rows(sym));
}

ConsensusMatrix random_symmetric_stochastic(int n, Rng& rng, double edge_prob) {
  Matrix w = weights_on(random_pattern(n, rng, edge_prob, true), rng);
  Matrix sym = (w + w.transpose()) / 2.0;
  sym.diagonal().setZero();
  // Scale so every off-diagonal row sum stays below 1, then fill the diagonal.
  std::uniform_real_distribution<double> slack(0.2, 0.8);
  sym *= slack(rng) / sym.rowwise().sum().maxCoeff();
  sym.diagonal() = Vector::Ones(n) - sym.rowwise().sum();
  return validate_consensus(sym);
}

ConductanceMatrix random_conductance(int n, Rng& rng, bool positive_diagonal, double edge_prob) {
  Matrix pattern = random_pattern(n, rng, edge_prob, true);
  if (!positive_diagonal) pattern.diagonal().setZero();
  Matrix w = weights_on(pattern, rng);
  return make_conductance((w + w.transpose()) / 2.0);
}

ConsensusMatrix random_reversible(int n, Rng& rng, double edge_prob) {
  return psi_map(random_conductance(n, rng, true, edge_prob));
}

ConsensusMatrix random_circulant(int n, Rng& rng) {
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::bernoulli_distribution extra(0.3);
  Vector g = Vector::Zero(n);
  g(0) = w(rng);
  g(1) = w(rng);
  for (int k = 2; k < n; ++k)
    if (extra(rng)) g(k) = w(rng);
  g /= g.sum();
  Matrix m(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) m(u, v) = g((u - v + n) % n);
  return validate_consensus(m);
}

ConsensusMatrix commuting_family_member(int i, Rng& rng) {
  std::uniform_int_distribution<int> small(3, 10);
  switch (i % 5) {
    case 0: return random_circulant(small(rng), rng);
    case 1: return cayley_case1(std::uniform_int_distribution<int>(3, 4)(rng), 2, rng()).second;
    case 2: return cayley_case2(std::uniform_int_distribution<int>(3, 5)(rng), 1 + static_cast<int>(rng() % 2));
    case 3: {
      if (i % 15 == 3) return commuting_example();
      return random_symmetric_normalized(small(rng), rng);
    }
    default: return random_symmetric_stochastic(small(rng), rng);
  }
}

}  // namespace lqcons
