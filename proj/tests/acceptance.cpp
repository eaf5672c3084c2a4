// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lqcons/bounds.hpp"
#include "lqcons/experiments.hpp"
#include "lqcons/graph_gen.hpp"
#include "lqcons/lqcost.hpp"
#include "lqcons/random_matrices.hpp"
#include "lqcons/resistance.hpp"
#include "lqcons/stochastic_core.hpp"
#include "oracles.hpp"

using namespace lqcons;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

double rel_slack(double big, double small) { return (big - small) / std::max(std::abs(small), 1e-300); }

ConsensusMatrix uniform(int n) { return validate_consensus(Matrix::Constant(n, n, 1.0 / n)); }

std::vector<std::vector<int>> adjacency_lists(const UndirectedGraph& g) {
  std::vector<std::vector<int>> adj;
  for (int u = 0; u < g.size(); ++u) adj.push_back(g.neighbors(u));
  return adj;
}

int random_size(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, pattern, a, b);
  return buffer;
}

Outcome closed_forms() {
  double worst = 0.0;
  for (int n = 3; n <= 10; ++n)
    worst = std::max(worst, std::abs(lq_cost_exact(uniform(n)).j - (n - 1.0) / n));
  auto circle = circle_matrix(3, 0.5, 0.0);
  double exact = lq_cost_exact(circle).j;
  double truncated = lq_cost_truncated(circle).j;
  Outcome out;
  out.ok = worst <= 1e-10 && std::abs(exact - 8.0 / 9.0) <= 1e-8 && std::abs(truncated - 8.0 / 9.0) <= 1e-8;
  out.detail = fmt("uniform err %.2e, circle err %.2e", worst, std::max(std::abs(exact - 8.0 / 9.0), std::abs(truncated - 8.0 / 9.0)));
  return out;
}

Outcome trace_inequality() {
  Rng rng(2001);
  double worst_gap = -1e300, worst_equality = 0.0;
  int reversible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = random_size(rng, 3, 12);
    auto p = trial % 2 == 0 ? random_consensus(n, rng) : random_reversible(n, rng);
    bool rev = classify(p).reversible;
    reversible += rev;
    for (int t = 0; t <= 8; ++t) {
      auto [lhs, rhs] = trace_pair(p, t);
      worst_gap = std::max(worst_gap, lhs - rhs);
      if (rev) worst_equality = std::max(worst_equality, std::abs(lhs - rhs));
    }
  }
  Outcome out;
  out.ok = worst_gap <= 1e-9 && worst_equality <= 1e-9 && reversible > 0;
  out.detail = fmt("max lhs-rhs %.2e, reversible |gap| %.2e", worst_gap, worst_equality) +
               ", reversible instances " + std::to_string(reversible);
  return out;
}

Outcome green_resistance() {
  Rng rng(2002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_conductance(random_size(rng, 3, 12), rng, true);
    auto p = psi_map(c);
    double rbar_w = weighted_average_resistance(effective_resistance(phi_map(p)), p.measure());
    worst = std::max(worst, std::abs(rbar_w - green_matrix(p).trace() / static_cast<double>(p.size())));
  }
  return {worst <= 1e-8, fmt("max |Rw - trG/n| %.2e", worst)};
}

Outcome bound_validity() {
  Rng rng(2003);
  double worst_upper = 1e300, worst_lower = 1e300;
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_consensus(random_size(rng, 3, 12), rng);
    double j = lq_cost_exact(p).j;
    worst_upper = std::min({worst_upper, rel_slack(*theorem_resistance_bounds(p).j_upper, j),
                            rel_slack(*theorem_topology_bounds(p).j_upper, j)});
  }
  bool applicable = true;
  for (int trial = 0; trial < 100; ++trial) {
    auto p = commuting_family_member(trial, rng);
    double j = lq_cost_exact(p).j;
    auto res = theorem_resistance_bounds(p);
    auto top = theorem_topology_bounds(p);
    applicable = applicable && res.lower_applicable && top.lower_applicable;
    worst_lower = std::min({worst_lower, rel_slack(j, *res.j_lower), rel_slack(j, *top.j_lower)});
  }
  Outcome out;
  out.ok = worst_upper >= -1e-9 && worst_lower >= -1e-9 && applicable;
  out.detail = fmt("min upper slack %.3e, min lower slack %.3e", worst_upper, worst_lower);
  return out;
}

Outcome tightness() {
  auto p = uniform(3);
  auto b = theorem_resistance_bounds(p);
  double j = lq_cost_exact(p).j;
  double err = std::max({std::abs(*b.j_upper - 2.0 / 3.0), std::abs(*b.j_lower - 2.0 / 3.0), std::abs(j - 2.0 / 3.0)});
  return {err <= 1e-10, fmt("max deviation from 2/3 %.2e", err)};
}

Outcome epsilon_sweep() {
  experiments::ExperimentConfig config(experiments::ExperimentKind::EpsilonSweep);
  auto rows = experiments::run_epsilon_sweep(config).rows;
  bool upper = true, hypothetical = true;
  int small_eps = 0;
  for (const auto& row : rows) {
    upper = upper && row.worst_upper_violation() <= 1e-9;
    if (*row.param <= 0.1) {
      ++small_eps;
      hypothetical = hypothetical && *row.res_j_lower > row.j;
    }
  }
  const auto& last = rows.back();
  bool at_half = *last.param == 0.5 && last.lower_applicable && *last.res_j_lower <= last.j * (1 + 1e-12);
  Outcome out;
  out.ok = rows.size() == 100 && rows.front().param.value() == 0.001 && upper && hypothetical && at_half;
  out.detail = "points " + std::to_string(rows.size()) + ", eps<=0.1 points " + std::to_string(small_eps) +
               ", (a) " + (upper ? "ok" : "bad") + " (b) " + (hypothetical ? "ok" : "bad") + " (c) " +
               (at_half ? "ok" : "bad");
  return out;
}

Outcome sandwich() {
  Rng rng(2007);
  double lower = 1e300, upper = 1e300;
  bool degrees = true;
  for (int trial = 0; trial < 100; ++trial) {
    auto m = resistance_sandwich_check(random_consensus(random_size(rng, 3, 12), rng));
    lower = std::min(lower, m.min_lower_slack);
    upper = std::min(upper, m.min_upper_slack);
  }
  for (int trial = 0; trial < 40; ++trial) {
    auto m = resistance_sandwich_check(commuting_family_member(trial, rng));
    degrees = degrees && m.used_in_degree;
    lower = std::min(lower, m.min_lower_slack);
    upper = std::min(upper, m.min_upper_slack);
  }
  Outcome out;
  out.ok = lower >= -1e-9 && upper >= -1e-9 && degrees;
  out.detail = fmt("min lower slack %.3e, min upper slack %.3e", lower, upper);
  return out;
}

Outcome cayley_scaling() {
  std::vector<double> ratios, flat;
  for (int n : {8, 12, 16, 20, 24}) ratios.push_back(lq_cost_exact(cayley_case2(n, 2)).j / std::log(double(n) * n));
  for (int n : {4, 6, 8}) flat.push_back(lq_cost_exact(cayley_case2(n, 3)).j);
  auto spread = [](const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
  };
  double s2 = spread(ratios), s3 = spread(flat);
  return {s2 <= 3.0 && s3 <= 2.0, fmt("d=2 J/log spread %.4f, d=3 J spread %.4f", s2, s3)};
}

Outcome geometric_audit() {
  GeometricParams params;
  const int n = 25;
  int accepted = 0, bad = 0;
  double min_rho = 1e300, worst_uncovered = 0.0;
  for (int i = 0; accepted < 15 && i < 100; ++i) {
    std::optional<GeometricInstance> sampled;
    try {
      sampled = sample_geometric(params, n, 2, experiments::derive_seed(9, 9, static_cast<std::uint64_t>(i)));
    } catch (const Error&) {
      continue;
    }
    ++accepted;
    const auto& inst = *sampled;
    const auto& x = inst.coordinates;
    const auto& p = inst.matrix;
    bool ok = x.rows() == n && inst.graph.connected();
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        double dist = (x.row(u) - x.row(v)).norm();
        ok = ok && dist >= params.s;
        if (inst.graph.has_edge(u, v)) ok = ok && dist <= params.r;
      }
    ok = ok && x.minCoeff() >= 0.0 && x.maxCoeff() <= inst.box_length;
    ok = ok && support_graphs(p).directed.first_unreachable() == -1;
    const double floor = params.b / (params.b + inst.graph.max_degree());
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (p(u, v) > 0.0) ok = ok && p(u, v) >= floor - 1e-15;
        if (u != v && p(u, v) > 0.0) ok = ok && inst.graph.has_edge(u, v);
      }
    ok = ok && n * p.measure().min() >= params.pi_bar_min && n * p.measure().max() <= params.pi_bar_max;

    double uncovered = oracle::max_uncovered(x, inst.box_length, 10 * params.gamma_divisions);
    worst_uncovered = std::max(worst_uncovered, uncovered);
    ok = ok && inst.measured.gamma_ok && uncovered <= params.gamma;

    auto hops = oracle::bfs_distances(adjacency_lists(inst.graph));
    double rho = 1e300;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) rho = std::min(rho, (x.row(u) - x.row(v)).norm() / hops[u][v]);
    ok = ok && std::abs(rho - inst.measured.rho_n) <= 1e-12 && rho >= params.rho;
    min_rho = std::min(min_rho, rho);
    bad += !ok;
  }
  Outcome out;
  out.ok = accepted == 15 && bad == 0;
  out.detail = "accepted " + std::to_string(accepted) + ", invariant failures " + std::to_string(bad) +
               fmt(", min rho %.4f, worst fine-grid gap %.4f", min_rho, worst_uncovered);
  return out;
}

Outcome monte_carlo() {
  double worst = 0.0;
  std::uint64_t seed = 10;
  for (const auto& p : {uniform(4), p_epsilon(0.5)}) {
    double exact = lq_cost_exact(p).j;
    double estimate = noisy_consensus_estimate(p, 500, 100000, seed++);
    worst = std::max(worst, std::abs(estimate - exact) / exact);
  }
  return {worst <= 0.05, fmt("max relative error %.4f", worst)};
}

Outcome oracle_equivalence() {
  Rng rng(2011);
  int mismatched = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_consensus(random_size(rng, 3, 12), rng);
    const Matrix& a = p.entries();
    const Vector& pi = p.pi();
    Matrix pstar_p = pi.cwiseInverse().asDiagonal() * a.transpose() * pi.asDiagonal() * a;
    std::set<std::pair<int, int>> numeric, combinatorial;
    for (int u = 0; u < p.size(); ++u)
      for (int v = u + 1; v < p.size(); ++v)
        if (pstar_p(u, v) > 0.0) numeric.insert({u, v});
    const auto edges = reversiblization_support(p).edges.edges();
    combinatorial.insert(edges.begin(), edges.end());
    mismatched += numeric != combinatorial;
    double exact = lq_cost_exact(p).j;
    worst = std::max(worst, std::abs(lq_cost_truncated(p).j - exact) / exact);
  }
  Outcome out;
  out.ok = mismatched == 0 && worst <= 1e-5;
  out.detail = "support mismatches " + std::to_string(mismatched) + fmt(", max J relative gap %.2e", worst);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "closed-form J values", 1, closed_forms},
      {2, "trace inequality", 10, trace_inequality},
      {3, "Green trace and weighted resistance", 10, green_resistance},
      {4, "bound validity", 60, bound_validity},
      {5, "tightness on uniform 1/3", 1, tightness},
      {6, "epsilon sweep", 5, epsilon_sweep},
      {7, "resistance sandwich", 60, sandwich},
      {8, "Cayley scaling", 120, cayley_scaling},
      {9, "geometric pipeline audit", 120, geometric_audit},
      {10, "noisy consensus Monte Carlo", 120, monte_carlo},
      {11, "oracle equivalence", 30, oracle_equivalence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = seconds < c.limit_seconds;
    bool pass = out.ok && in_time;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s; %.2f s of %.0f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : " (too slow)");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
