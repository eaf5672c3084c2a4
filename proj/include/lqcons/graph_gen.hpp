#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lqcons/graph.hpp"
#include "lqcons/stochastic_core.hpp"
#include "lqcons/types.hpp"

namespace lqcons {

using Offset = std::vector<int>;

/// Weights g(h) on offsets h in {-1,0,1}^d, summing to one, with g(0) > 0.
struct CayleyGenerator {
  int d = 1;
  std::map<Offset, double> weights;

  /// Throws InvalidGenerator.
  void validate() const;
};

/// P_uv = g(u - v mod n) on Z_n^d, node index sum_k u_k n^k. Requires n >= 3.
ConsensusMatrix cayley_matrix(int n, const CayleyGenerator& gen);

/// Index of the torus point with the given coordinates.
int torus_index(const std::vector<int>& coords, int n);

struct CayleyCase1Options {
  double p_min = -1.0;  // negative: per-dimension default
  double p_max = -1.0;
  int max_attempts = 1000000;
};

/// Uniform (0,1] weights on all 3^d offsets, normalized, accepted iff all lie in
/// [p_min, p_max]. Defaults (0.05, 0.2) for d = 2 and (0.01, 0.1) for d = 3.
/// Throws RejectionExhausted.
std::pair<CayleyGenerator, ConsensusMatrix> cayley_case1(int n, int d, std::uint64_t seed,
                                                         const CayleyCase1Options& options = {});

/// Weight 1/(d+1) on {0, e_1, ..., e_d}.
CayleyGenerator cayley_case2_generator(int d);
ConsensusMatrix cayley_case2(int n, int d);

/// The 3x3 matrix [[e, 1-e, 0], [0, e, 1-e], [1/2, 0, 1/2]] for 0 < e <= 1/2. Throws OutOfRange.
ConsensusMatrix p_epsilon(double epsilon);
Matrix p_epsilon_entries(double epsilon);

/// The 4x4 example over denominator 2 + sqrt(10): commuting, neither reversible nor normal.
ConsensusMatrix commuting_example();

/// n agents on a circle: weight p to the left neighbour, q to the right, 1-p-q to self.
/// Throws InvalidWeights.
ConsensusMatrix circle_matrix(int n, double p, double q);

struct GeometricParams {
  double s = 0.1;
  double r = 1.0;
  double gamma = 1.0;
  double rho = 0.052;
  double p_e = 0.8;
  double p_d = 0.1;
  double c = 0.5;
  double b = 0.8;
  double pi_bar_min = 0.1;
  double pi_bar_max = 3.0;
  int gamma_divisions = 30;
  int max_attempts = 1000;
  int max_node_attempts = 10000;
  // Discard on n*pi_max > pi_bar_min instead of n*pi_max > pi_bar_max.
  bool paper_literal_pi_check = false;

  /// Throws OutOfRange.
  void validate() const;
};

struct GeometricAudit {
  int attempts = 0;
  long rejected_nodes = 0;
  int disconnected = 0;
  int gamma_rejects = 0;
  int rho_rejects = 0;
  int reducible = 0;
  int pi_range_rejects = 0;
  bool paper_literal_pi_check = false;

  std::string to_key_value() const;
};

struct GeometricMeasured {
  double s_n = 0.0;  // minimum pairwise node distance
  double r_n = 0.0;  // maximum edge length
  bool gamma_ok = false;
  double rho_n = 0.0;
};

struct GeometricInstance {
  int d = 0;
  double box_length = 0.0;
  Matrix coordinates;  // n x d
  UndirectedGraph graph;
  ConsensusMatrix matrix;
  GeometricMeasured measured;
  GeometricAudit audit;
};

/// Samples a random geometric graph and a nonreversible consensus matrix on it,
/// restarting from node placement whenever any acceptance test fails.
/// Pure function of (params, n, d, seed). Throws RejectionExhausted or InfeasibleDensity.
GeometricInstance sample_geometric(const GeometricParams& params, int n, int d, std::uint64_t seed);

/// True iff every point of the (divisions+1)^d grid on [0,l]^d lies within
/// gamma - (l/divisions) sqrt(d)/2 of some node. A pass guarantees gamma_n <= gamma.
bool gamma_check(const Matrix& coordinates, double l, double gamma, int divisions = 30);

/// rho_n = min over u != v of d_E(u,v) / d_G(u,v) with hop-count graph distance
/// (Floyd-Warshall). Returns (rho_n >= rho, rho_n). Throws Disconnected.
std::pair<bool, double> rho_check(const UndirectedGraph& graph, const Matrix& coordinates, double rho);

}  // namespace lqcons
