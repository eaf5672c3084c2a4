#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>

#include "lqcons/graph_gen.hpp"
#include "lqcons/lqcost.hpp"
#include "oracles.hpp"

using namespace lqcons;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an lqcons::Error");
  return ErrorKind::ConfigError;
}

std::vector<std::vector<int>> adjacency_lists(const UndirectedGraph& g) {
  std::vector<std::vector<int>> adj;
  for (int u = 0; u < g.size(); ++u) adj.push_back(g.neighbors(u));
  return adj;
}

}  // namespace

TEST_CASE("generator validation") {
  CayleyGenerator g{1, {{{-1}, 0.2}, {{0}, 0.5}, {{1}, 0.3}}};
  CHECK_NOTHROW(g.validate());
  CayleyGenerator no_zero{1, {{{-1}, 0.5}, {{1}, 0.5}}};
  CHECK(kind_of([&] { no_zero.validate(); }) == ErrorKind::InvalidGenerator);
  CayleyGenerator bad_sum{1, {{{0}, 0.5}, {{1}, 0.3}}};
  CHECK(kind_of([&] { bad_sum.validate(); }) == ErrorKind::InvalidGenerator);
  CayleyGenerator bad_offset{1, {{{0}, 0.5}, {{2}, 0.5}}};
  CHECK(kind_of([&] { bad_offset.validate(); }) == ErrorKind::InvalidGenerator);
  CayleyGenerator bad_dim{2, {{{0}, 1.0}}};
  CHECK(kind_of([&] { bad_dim.validate(); }) == ErrorKind::InvalidGenerator);
  CHECK(kind_of([&] { cayley_matrix(2, g); }) == ErrorKind::InvalidGenerator);
}

TEST_CASE("cayley matrix on a circle") {
  const double p = 0.2, q = 0.3;
  CayleyGenerator g{1, {{{-1}, p}, {{0}, 1 - p - q}, {{1}, q}}};
  for (int n : {3, 5, 8}) {
    auto m = cayley_matrix(n, g);
    auto c = circle_matrix(n, p, q);
    // P_uv = g(u - v): offset -1 sits at v = u + 1.
    bool same = (m.entries() - c.entries()).cwiseAbs().maxCoeff() < 1e-15 ||
                (m.entries() - c.entries().transpose()).cwiseAbs().maxCoeff() < 1e-15;
    CHECK(same);
    CHECK(classify(m).normal);
  }
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    CayleyGenerator random{2, {}};
    double total = 0.0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        if ((a == 0 && b == 0) || w(rng) > 0.5) total += random.weights[{a, b}] = w(rng);
    for (auto& [h, x] : random.weights) x /= total;
    CHECK(classify(cayley_matrix(3 + trial % 3, random)).normal);
  }

  CayleyGenerator half{1, {{{0}, 0.5}, {{1}, 0.5}}};
  CHECK(std::abs(lq_cost_exact(cayley_matrix(3, half)).j - 8.0 / 9.0) <= 1e-10);
}

TEST_CASE("cayley matrix matches character oracle") {
  for (int d : {1, 2, 3}) {
    for (int n : {3, 4}) {
      auto gen = cayley_case2_generator(d);
      std::vector<std::pair<std::vector<int>, double>> list(gen.weights.begin(), gen.weights.end());
      auto m = cayley_matrix(n, gen);
      CHECK(std::abs(lq_cost_exact(m).j - oracle::cayley_lq(n, d, list)) <= 1e-9);
      CHECK(m.entries().colwise().sum().isOnes(1e-12));
    }
  }
}

TEST_CASE("torus index") {
  CHECK(torus_index({0, 0}, 5) == 0);
  CHECK(torus_index({1, 0}, 5) == 1);
  CHECK(torus_index({0, 1}, 5) == 5);
  CHECK(torus_index({4, 4, 4}, 5) == 124);
}

TEST_CASE("cayley case 1") {
  auto [g2, m2] = cayley_case1(4, 2, 7);
  CHECK(g2.weights.size() == 9);
  for (const auto& [h, w] : g2.weights) {
    CHECK(w >= 0.05);
    CHECK(w <= 0.2);
  }
  CHECK(support_graphs(m2).delta_in == 8);

  auto [again, m_again] = cayley_case1(4, 2, 7);
  CHECK(again.weights == g2.weights);
  CHECK(m_again.entries() == m2.entries());

  auto [g3, m3] = cayley_case1(3, 3, 9);
  CHECK(g3.weights.size() == 27);
  for (const auto& [h, w] : g3.weights) {
    CHECK(w >= 0.01);
    CHECK(w <= 0.1);
  }

  CayleyCase1Options impossible;
  impossible.p_min = 0.5;
  impossible.p_max = 0.6;
  impossible.max_attempts = 100;
  CHECK(kind_of([&] { cayley_case1(3, 2, 1, impossible); }) == ErrorKind::RejectionExhausted);
}

TEST_CASE("cayley case 2") {
  CHECK(support_graphs(cayley_case2(5, 2)).delta_in == 2);
  auto c = cayley_case2(3, 1);
  auto ref = circle_matrix(3, 0.5, 0.0);
  bool same = (c.entries() - ref.entries()).cwiseAbs().maxCoeff() < 1e-15 ||
              (c.entries() - ref.entries().transpose()).cwiseAbs().maxCoeff() < 1e-15;
  CHECK(same);
  CHECK(std::abs(lq_cost_exact(c).j - 8.0 / 9.0) <= 1e-10);
}

TEST_CASE("P_eps and the commuting example") {
  CHECK(classify(p_epsilon(0.5)).commuting);
  CHECK_FALSE(classify(p_epsilon(0.1)).commuting);
  CHECK(kind_of([] { p_epsilon(0.0); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([] { p_epsilon(0.6); }) == ErrorKind::OutOfRange);

  for (double e : {0.05, 0.2, 0.5}) {
    Eigen::VectorXcd eig = p_epsilon(e).entries().eigenvalues();
    const std::complex<double> plus(-(0.25 - e), 0.5 * std::sqrt(1.75 - 2.0 * e));
    for (auto want : {std::complex<double>(1.0, 0.0), plus, std::conj(plus)}) {
      double best = (eig.array() - want).abs().minCoeff();
      CHECK(best <= 1e-10);
    }
  }

  auto ex = commuting_example();
  CHECK(ex.size() == 4);
  CHECK((ex.entries().rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  Matrix star = time_reversal(ex).entries();
  CHECK((star * ex.entries() - ex.entries() * star).cwiseAbs().maxCoeff() <= 1e-10);
  auto cls = classify(ex);
  CHECK(cls.commuting);
  CHECK_FALSE(cls.reversible);
  CHECK_FALSE(cls.normal);
}

TEST_CASE("circle matrix") {
  CHECK(classify(circle_matrix(6, 0.25, 0.25)).reversible);
  CHECK(kind_of([] { circle_matrix(5, 0.6, 0.5); }) == ErrorKind::InvalidWeights);
  CHECK(kind_of([] { circle_matrix(5, -0.1, 0.5); }) == ErrorKind::InvalidWeights);
  CHECK(std::abs(lq_cost_exact(circle_matrix(3, 0.5, 0.0)).j - 8.0 / 9.0) <= 1e-10);
}

TEST_CASE("gamma check") {
  Matrix center(1, 2);
  center << 0.5, 0.5;
  CHECK(gamma_check(center, 1.0, std::sqrt(2.0) / 2 + 1.0 / 30 * std::sqrt(2.0) / 2 + 1e-9, 30));

  Matrix corner(4, 2);
  corner << 0.0, 0.0, 0.1, 0.0, 0.0, 0.1, 0.1, 0.1;
  CHECK_FALSE(gamma_check(corner, 4.0, 1.0, 30));
  CHECK(oracle::max_uncovered(corner, 4.0, 300) > 1.0);

  // A pass is a certificate: the finer oracle grid agrees.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.5);
  int passes = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix pts(25, 2);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << u(rng), u(rng);
    if (gamma_check(pts, 2.5, 1.0, 30)) {
      ++passes;
      CHECK(oracle::max_uncovered(pts, 2.5, 300) <= 1.0);
    }
  }
  CHECK(passes > 0);
}

TEST_CASE("rho check") {
  UndirectedGraph pair(2);
  pair.add_edge(0, 1);
  Matrix two(2, 1);
  two << 0.0, 0.7;
  CHECK(rho_check(pair, two, 0.5).second == doctest::Approx(0.7));

  UndirectedGraph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  Matrix line(3, 1);
  line << 0.0, 1.0, 2.0;
  auto [ok, rho] = rho_check(path, line, 1.0);
  CHECK(ok);
  CHECK(rho == doctest::Approx(1.0));

  UndirectedGraph split(3);
  split.add_edge(0, 1);
  CHECK(kind_of([&] { rho_check(split, line, 0.1); }) == ErrorKind::Disconnected);
}

TEST_CASE("geometric sampling") {
  GeometricParams params;
  auto inst = sample_geometric(params, 25, 2, 12345);
  const int n = 25;
  CHECK(inst.coordinates.rows() == n);
  CHECK(inst.box_length == doctest::Approx(0.5 * 5.0));
  CHECK(inst.graph.connected());
  CHECK(inst.measured.s_n >= params.s);
  CHECK(inst.measured.r_n <= params.r);
  CHECK(inst.measured.gamma_ok);
  CHECK(inst.measured.rho_n >= params.rho);
  CHECK(oracle::max_uncovered(inst.coordinates, inst.box_length, 300) <= params.gamma);

  // Hop distances from the oracle reproduce rho_n.
  auto dist = oracle::bfs_distances(adjacency_lists(inst.graph));
  double rho = std::numeric_limits<double>::infinity();
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      rho = std::min(rho, (inst.coordinates.row(u) - inst.coordinates.row(v)).norm() / dist[u][v]);
  CHECK(rho == doctest::Approx(inst.measured.rho_n).epsilon(1e-12));

  const auto& p = inst.matrix;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && p(u, v) > 0.0) CHECK(inst.graph.has_edge(u, v));
  const int delta = inst.graph.max_degree();
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (p(u, v) > 0.0) CHECK(p(u, v) >= params.b / (params.b + delta) - 1e-15);
  CHECK(n * p.measure().min() >= params.pi_bar_min);
  CHECK(n * p.measure().max() <= params.pi_bar_max);

  auto again = sample_geometric(params, 25, 2, 12345);
  CHECK(again.coordinates == inst.coordinates);
  CHECK(again.matrix.entries() == inst.matrix.entries());
  CHECK(again.audit.attempts == inst.audit.attempts);

  CHECK(inst.audit.to_key_value().find("attempts=") == 0);
}

TEST_CASE("geometric parameter errors") {
  GeometricParams bad;
  bad.s = 2.0;
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::OutOfRange);

  GeometricParams dense;
  dense.s = 0.9;
  dense.max_node_attempts = 50;
  CHECK(kind_of([&] { sample_geometric(dense, 40, 2, 1); }) == ErrorKind::InfeasibleDensity);

  GeometricParams strict;
  strict.rho = 10.0;
  strict.max_attempts = 5;
  CHECK(kind_of([&] { sample_geometric(strict, 25, 2, 1); }) == ErrorKind::RejectionExhausted);
}
