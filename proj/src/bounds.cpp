#include "lqcons/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqcons/resistance.hpp"

namespace lqcons {

std::string_view to_string(BoundTheorem theorem) {
  switch (theorem) {
    case BoundTheorem::Resistance: return "resistance";
    case BoundTheorem::Topology: return "topology";
    case BoundTheorem::Normal: return "normal";
  }
  return "unknown";
}

std::string BoundsReport::csv_header() {
  return "theorem,j_upper,j_lower,jw_upper,jw_lower,lower_applicable,pi_min,pi_max,p_min,p_max,delta_in,delta_out,"
         "f_delta_in,rbar";
}

std::string BoundsReport::csv_row() const {
  std::ostringstream out;
  out.precision(17);
  auto opt = [&](const std::optional<double>& v) {
    if (v) out << *v;
    out << ",";
  };
  out << to_string(theorem) << ",";
  opt(j_upper);
  opt(j_lower);
  opt(jw_upper);
  opt(jw_lower);
  out << (lower_applicable ? 1 : 0) << "," << constants.pi_min << "," << constants.pi_max << "," << constants.p_min
      << "," << constants.p_max << "," << constants.delta_in << "," << constants.delta_out << ","
      << constants.f_delta_in << "," << constants.rbar;
  return out.str();
}

namespace {

BoundConstants base_constants(const ConsensusMatrix& p, const SupportGraphs& s) {
  BoundConstants c;
  c.pi_min = p.measure().min();
  c.pi_max = p.measure().max();
  c.p_min = s.p_min;
  c.p_max = s.p_max;
  c.delta_in = s.delta_in;
  c.delta_out = s.delta_out;
  c.f_delta_in = f_delta(s.delta_in);
  return c;
}

}  // namespace

BoundsReport theorem_resistance_bounds(const ConsensusMatrix& p) {
  const double n = static_cast<double>(p.size());
  BoundsReport r;
  r.theorem = BoundTheorem::Resistance;
  r.constants = base_constants(p, support_graphs(p));
  r.constants.rbar = average_resistance(effective_resistance(reversiblization_conductance(p)));
  r.lower_applicable = classify(p).commuting;

  const double lo = r.constants.pi_min, hi = r.constants.pi_max, rbar = r.constants.rbar;
  r.j_upper = hi * hi * hi * n * n / lo * rbar;
  r.jw_upper = hi * hi * hi * n * n * n * rbar;
  r.j_lower = lo * lo * lo * n * n / hi * rbar;
  r.jw_lower = lo * lo * lo * n * n * n * rbar;
  return r;
}

BoundsReport theorem_topology_bounds(const ConsensusMatrix& p) {
  const double n = static_cast<double>(p.size());
  SupportGraphs s = support_graphs(p);
  BoundsReport r;
  r.theorem = BoundTheorem::Topology;
  r.constants = base_constants(p, s);
  r.constants.rbar = average_resistance(effective_resistance(unit_conductance(s.undirected)));
  r.lower_applicable = classify(p).commuting;

  const double lo = r.constants.pi_min, hi = r.constants.pi_max, rbar = r.constants.rbar;
  const double pmin2 = s.p_min * s.p_min, pmax2 = s.p_max * s.p_max, f = r.constants.f_delta_in;
  r.j_upper = hi * hi * hi * n / (pmin2 * lo * lo) * rbar;
  r.jw_upper = hi * hi * hi * n * n / (pmin2 * lo) * rbar;
  r.j_lower = lo * lo * lo * n / (pmax2 * f * hi * hi) * rbar;
  r.jw_lower = lo * lo * lo * n * n / (pmax2 * f * hi) * rbar;
  return r;
}

BoundsReport corollary_normal_bounds(const ConsensusMatrix& p) {
  MatrixClass cls = classify(p);
  if (!cls.normal) {
    std::ostringstream msg;
    msg << "P^T P - P P^T has max-norm " << cls.normal_residual;
    throw Error(ErrorKind::NotNormal, msg.str());
  }
  SupportGraphs s = support_graphs(p);
  BoundsReport r;
  r.theorem = BoundTheorem::Normal;
  r.constants = base_constants(p, s);
  r.constants.rbar = average_resistance(effective_resistance(unit_conductance(s.undirected)));
  r.lower_applicable = true;
  r.j_upper = r.constants.rbar / (s.p_min * s.p_min);
  r.j_lower = r.constants.rbar / (s.p_max * s.p_max * r.constants.f_delta_in);
  return r;
}

FuzzSupport reversiblization_support(const ConsensusMatrix& p) {
  const int n = static_cast<int>(p.size());
  SupportGraphs s = support_graphs(p);
  FuzzSupport fuzz;
  fuzz.edges = UndirectedGraph(n);

  // Pivot w reaches itself through its self loop, so out(w) + {w} are its targets.
  for (int w = 0; w < n; ++w) {
    std::vector<int> targets = s.directed.out(w);
    targets.insert(std::lower_bound(targets.begin(), targets.end(), w), w);
    for (std::size_t a = 0; a < targets.size(); ++a) {
      for (std::size_t b = a + 1; b < targets.size(); ++b) {
        int u = targets[a], v = targets[b];
        if (fuzz.edges.add_edge(u, v)) fuzz.pivots.emplace(std::make_pair(u, v), w);
      }
    }
  }
  for (const auto& e : fuzz.edges.edges())
    if (!s.undirected.has_edge(e.first, e.second)) fuzz.new_edges.push_back(e);
  return fuzz;
}

SandwichMargins resistance_sandwich_check(const ConsensusMatrix& p) {
  SupportGraphs s = support_graphs(p);
  FuzzSupport fuzz = reversiblization_support(p);
  ResistanceMatrix original = effective_resistance(unit_conductance(s.undirected));
  ResistanceMatrix fuzzed = effective_resistance(unit_conductance(fuzz.edges));

  SandwichMargins m;
  m.used_in_degree = classify(p).commuting;
  m.delta = m.used_in_degree ? s.delta_in : s.delta_out;
  const double factor = 1.0 / (4.0 * m.delta - 2.0);
  m.min_lower_slack = std::numeric_limits<double>::infinity();
  m.min_upper_slack = std::numeric_limits<double>::infinity();
  const Index n = p.size();
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      m.min_lower_slack = std::min(m.min_lower_slack, fuzzed(u, v) - factor * original(u, v));
      m.min_upper_slack = std::min(m.min_upper_slack, original(u, v) - fuzzed(u, v));
      ++m.pairs;
    }
  }
  return m;
}

}  // namespace lqcons
