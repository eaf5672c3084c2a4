#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lqcons/graph.hpp"
#include "lqcons/stochastic_core.hpp"

namespace lqcons {

enum class BoundTheorem { Resistance, Topology, Normal };

std::string_view to_string(BoundTheorem theorem);

/// 4 d^2 + 2 d - 2
inline double f_delta(int d) { return 4.0 * d * d + 2.0 * d - 2.0; }

struct BoundConstants {
  double pi_min = 0.0;
  double pi_max = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
  int delta_in = 0;
  int delta_out = 0;
  double f_delta_in = 0.0;
  double rbar = 0.0;  // R(C_{P*P}) for the resistance theorem, R(G(P)) otherwise
};

/// Upper/lower bounds on J(P) and J_w(P). Lower values are always filled in;
/// they are certified only when `lower_applicable` (P*P = PP*) holds.
struct BoundsReport {
  std::optional<double> j_upper;
  std::optional<double> j_lower;
  std::optional<double> jw_upper;
  std::optional<double> jw_lower;
  BoundTheorem theorem = BoundTheorem::Resistance;
  bool lower_applicable = false;
  BoundConstants constants;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Bounds from the average resistance of C_{P*P} = n P^T Pi P.
BoundsReport theorem_resistance_bounds(const ConsensusMatrix& p);

/// Bounds from the unit-conductance average resistance of G(P), p_min, p_max,
/// the extremes of pi and the maximum in-degree.
BoundsReport theorem_topology_bounds(const ConsensusMatrix& p);

/// Two-sided bound on J(P) for normal P. Throws NotNormal.
BoundsReport corollary_normal_bounds(const ConsensusMatrix& p);

/// Undirected support of P*P built from back-and-forth paths: {u,v} is an edge
/// iff some pivot w has P_wu > 0 and P_wv > 0.
struct FuzzSupport {
  UndirectedGraph edges;
  std::map<std::pair<int, int>, int> pivots;  // (u<v) -> smallest-index pivot
  std::vector<std::pair<int, int>> new_edges;  // edges absent from G(P)
};

FuzzSupport reversiblization_support(const ConsensusMatrix& p);

struct SandwichMargins {
  double min_lower_slack = 0.0;  // min_uv R_uv(G(P*P)) - R_uv(G(P)) / (4 delta - 2)
  double min_upper_slack = 0.0;  // min_uv R_uv(G(P)) - R_uv(G(P*P))
  int delta = 0;
  bool used_in_degree = false;  // commuting P uses delta_in, otherwise delta_out
  int pairs = 0;
};

SandwichMargins resistance_sandwich_check(const ConsensusMatrix& p);

}  // namespace lqcons
