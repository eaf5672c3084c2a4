#include "lqcons/graph_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace lqcons {

void CayleyGenerator::validate() const {
  if (d < 1) throw Error(ErrorKind::InvalidGenerator, "dimension must be >= 1");
  double total = 0.0;
  for (const auto& [offset, w] : weights) {
    if (static_cast<int>(offset.size()) != d) throw Error(ErrorKind::InvalidGenerator, "offset has wrong dimension");
    for (int c : offset)
      if (c < -1 || c > 1) throw Error(ErrorKind::InvalidGenerator, "offset entries must lie in {-1,0,1}");
    if (!(w > 0.0)) throw Error(ErrorKind::InvalidGenerator, "generator weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::InvalidGenerator, "generator weights must sum to 1");
  auto zero = weights.find(Offset(static_cast<std::size_t>(d), 0));
  if (zero == weights.end()) throw Error(ErrorKind::InvalidGenerator, "zero offset needs positive weight");
}

int torus_index(const std::vector<int>& coords, int n) {
  int index = 0;
  int stride = 1;
  for (int c : coords) {
    index += (((c % n) + n) % n) * stride;
    stride *= n;
  }
  return index;
}

ConsensusMatrix cayley_matrix(int n, const CayleyGenerator& gen) {
  gen.validate();
  if (n < 3) throw Error(ErrorKind::InvalidGenerator, "torus side n must be >= 3");
  int nodes = 1;
  for (int k = 0; k < gen.d; ++k) nodes *= n;

  Matrix p = Matrix::Zero(nodes, nodes);
  std::vector<int> coords(static_cast<std::size_t>(gen.d));
  std::vector<int> target(static_cast<std::size_t>(gen.d));
  for (int u = 0; u < nodes; ++u) {
    int rest = u;
    for (int k = 0; k < gen.d; ++k) {
      coords[static_cast<std::size_t>(k)] = rest % n;
      rest /= n;
    }
    // P_uv = g(u - v)  <=>  v = u - h
    for (const auto& [offset, w] : gen.weights) {
      for (int k = 0; k < gen.d; ++k)
        target[static_cast<std::size_t>(k)] = coords[static_cast<std::size_t>(k)] - offset[static_cast<std::size_t>(k)];
      p(u, torus_index(target, n)) += w;
    }
  }
  return validate_consensus(p);
}

std::pair<CayleyGenerator, ConsensusMatrix> cayley_case1(int n, int d, std::uint64_t seed,
                                                         const CayleyCase1Options& options) {
  if (d != 2 && d != 3) throw Error(ErrorKind::OutOfRange, "case 1 generators are defined for d = 2 or 3");
  double p_min = options.p_min >= 0.0 ? options.p_min : (d == 2 ? 0.05 : 0.01);
  double p_max = options.p_max >= 0.0 ? options.p_max : (d == 2 ? 0.2 : 0.1);
  if (!(p_min > 0.0) || !(p_min < p_max)) throw Error(ErrorKind::OutOfRange, "need 0 < p_min < p_max");

  std::vector<Offset> offsets;
  int count = 1;
  for (int k = 0; k < d; ++k) count *= 3;
  for (int code = 0; code < count; ++code) {
    Offset h(static_cast<std::size_t>(d));
    int rest = code;
    for (int k = 0; k < d; ++k) {
      h[static_cast<std::size_t>(k)] = rest % 3 - 1;
      rest /= 3;
    }
    offsets.push_back(std::move(h));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> draws(offsets.size());
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    double total = 0.0;
    for (double& w : draws) {
      w = 1.0 - uniform(rng);  // (0, 1]
      total += w;
    }
    bool ok = true;
    for (double& w : draws) {
      w /= total;
      ok = ok && w >= p_min && w <= p_max;
    }
    if (!ok) continue;

    CayleyGenerator gen;
    gen.d = d;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
      gen.weights[offsets[i]] = draws[i];
      sum += draws[i];
    }
    gen.weights[offsets.back()] = 1.0 - sum;  // exact unit sum
    return {gen, cayley_matrix(n, gen)};
  }
  throw Error(ErrorKind::RejectionExhausted, "no case-1 generator accepted within the attempt cap");
}

CayleyGenerator cayley_case2_generator(int d) {
  if (d < 1) throw Error(ErrorKind::OutOfRange, "dimension must be >= 1");
  CayleyGenerator gen;
  gen.d = d;
  const double w = 1.0 / (d + 1);
  gen.weights[Offset(static_cast<std::size_t>(d), 0)] = w;
  for (int k = 0; k < d; ++k) {
    Offset e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(k)] = 1;
    gen.weights[e] = w;
  }
  double total = 0.0;
  for (const auto& [h, v] : gen.weights) total += v;
  gen.weights[Offset(static_cast<std::size_t>(d), 0)] += 1.0 - total;
  return gen;
}

ConsensusMatrix cayley_case2(int n, int d) { return cayley_matrix(n, cayley_case2_generator(d)); }

Matrix p_epsilon_entries(double epsilon) {
  Matrix p(3, 3);
  p << epsilon, 1.0 - epsilon, 0.0,
       0.0, epsilon, 1.0 - epsilon,
       0.5, 0.0, 0.5;
  return p;
}

ConsensusMatrix p_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw Error(ErrorKind::OutOfRange, "epsilon must lie in (0, 1/2]");
  return validate_consensus(p_epsilon_entries(epsilon));
}

ConsensusMatrix commuting_example() {
  const double s = std::sqrt(10.0);
  Matrix p(4, 4);
  p << 2.0, 1.0, -1.0 + s, 0.0,
       1.0, 2.0, 0.0, -1.0 + s,
       0.0, 1.0 + s, 1.0, 0.0,
       1.0 + s, 0.0, 0.0, 1.0;
  p /= 2.0 + s;
  return validate_consensus(p);
}

ConsensusMatrix circle_matrix(int n, double p, double q) {
  if (n < 3) throw Error(ErrorKind::InvalidWeights, "circle needs n >= 3");
  if (!(p >= 0.0) || !(q >= 0.0) || !(p + q > 0.0) || !(p + q < 1.0))
    throw Error(ErrorKind::InvalidWeights, "need p, q >= 0 and 0 < p + q < 1");
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 1.0 - p - q;
    m(i, (i + n - 1) % n) += p;
    m(i, (i + 1) % n) += q;
  }
  return validate_consensus(m);
}

void GeometricParams::validate() const {
  if (!(s > 0.0 && s < r)) throw Error(ErrorKind::OutOfRange, "need 0 < s < r");
  if (!(p_e > 0.0 && p_e <= 1.0)) throw Error(ErrorKind::OutOfRange, "p_e must lie in (0, 1]");
  if (!(p_d >= 0.0 && p_d < 0.5)) throw Error(ErrorKind::OutOfRange, "p_d must lie in [0, 1/2)");
  if (!(b > 0.0 && b <= 1.0)) throw Error(ErrorKind::OutOfRange, "b must lie in (0, 1]");
  if (!(pi_bar_min < pi_bar_max)) throw Error(ErrorKind::OutOfRange, "need pi_bar_min < pi_bar_max");
  if (!(c > 0.0) || !(gamma > 0.0) || !(rho >= 0.0)) throw Error(ErrorKind::OutOfRange, "c, gamma must be positive");
  if (gamma_divisions < 1 || max_attempts < 1 || max_node_attempts < 1)
    throw Error(ErrorKind::OutOfRange, "divisions and attempt caps must be >= 1");
}

std::string GeometricAudit::to_key_value() const {
  std::ostringstream out;
  out << "attempts=" << attempts << "\n"
      << "rejected_nodes=" << rejected_nodes << "\n"
      << "rejected_disconnected=" << disconnected << "\n"
      << "rejected_gamma=" << gamma_rejects << "\n"
      << "rejected_rho=" << rho_rejects << "\n"
      << "rejected_reducible=" << reducible << "\n"
      << "rejected_pi_range=" << pi_range_rejects << "\n"
      << "pi_check=" << (paper_literal_pi_check ? "literal(n*pi_max>pi_bar_min)" : "symmetric(n*pi_max>pi_bar_max)")
      << "\n";
  return out.str();
}

bool gamma_check(const Matrix& coordinates, double l, double gamma, int divisions) {
  if (divisions < 1) throw Error(ErrorKind::OutOfRange, "divisions must be >= 1");
  const int d = static_cast<int>(coordinates.cols());
  const double step = l / divisions;
  const double margin = gamma - step * std::sqrt(static_cast<double>(d)) / 2.0;
  if (margin < 0.0) return false;
  const double margin2 = margin * margin;

  long total = 1;
  for (int k = 0; k < d; ++k) total *= divisions + 1;
  Eigen::RowVectorXd point(d);
  for (long code = 0; code < total; ++code) {
    long rest = code;
    for (int k = 0; k < d; ++k) {
      point(k) = static_cast<double>(rest % (divisions + 1)) * step;
      rest /= divisions + 1;
    }
    double nearest = (coordinates.rowwise() - point).rowwise().squaredNorm().minCoeff();
    if (nearest > margin2) return false;
  }
  return true;
}

std::pair<bool, double> rho_check(const UndirectedGraph& graph, const Matrix& coordinates, double rho) {
  const int n = graph.size();
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::vector<int> dist(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), kInf);
  auto at = [&](int u, int v) -> int& { return dist[static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)]; };
  for (int u = 0; u < n; ++u) {
    at(u, u) = 0;
    for (int v : graph.neighbors(u)) at(u, v) = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int u = 0; u < n; ++u) {
      int du = at(u, k);
      if (du == kInf) continue;
      for (int v = 0; v < n; ++v) at(u, v) = std::min(at(u, v), du + at(k, v));
    }

  double best = std::numeric_limits<double>::infinity();
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (at(u, v) == kInf) throw Error(ErrorKind::Disconnected, "graph is not connected", u);
      best = std::min(best, (coordinates.row(u) - coordinates.row(v)).norm() / at(u, v));
    }
  return {best >= rho, best};
}

GeometricInstance sample_geometric(const GeometricParams& params, int n, int d, std::uint64_t seed) {
  params.validate();
  if (n < 2) throw Error(ErrorKind::OutOfRange, "need n >= 2");
  if (d < 1 || d > 3) throw Error(ErrorKind::OutOfRange, "d must be 1, 2 or 3");

  const double l = params.c * std::pow(static_cast<double>(n), 1.0 / d);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, l);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(params.b, 1.0);
  GeometricAudit audit;
  audit.paper_literal_pi_check = params.paper_literal_pi_check;

  Matrix pts(n, d);
  for (audit.attempts = 1; audit.attempts <= params.max_attempts; ++audit.attempts) {
    // Node placement with minimum spacing s.
    for (int i = 0; i < n; ++i) {
      int tries = 0;
      while (true) {
        if (++tries > params.max_node_attempts)
          throw Error(ErrorKind::InfeasibleDensity, "cannot place node " + std::to_string(i) + " at spacing s", i);
        for (int k = 0; k < d; ++k) pts(i, k) = coord(rng);
        bool ok = true;
        for (int j = 0; j < i && ok; ++j) ok = (pts.row(i) - pts.row(j)).norm() >= params.s;
        if (ok) break;
        ++audit.rejected_nodes;
      }
    }

    UndirectedGraph graph(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if ((pts.row(u) - pts.row(v)).norm() <= params.r && unit(rng) < params.p_e) graph.add_edge(u, v);
    if (!graph.connected()) {
      ++audit.disconnected;
      continue;
    }
    if (!gamma_check(pts, l, params.gamma, params.gamma_divisions)) {
      ++audit.gamma_rejects;
      continue;
    }
    auto [rho_ok, rho_n] = rho_check(graph, pts, params.rho);
    if (!rho_ok) {
      ++audit.rho_rejects;
      continue;
    }

    // Symmetric 0/1 pattern with unit diagonal, then one-directional deletions.
    Matrix pattern = graph.adjacency_matrix();
    pattern.diagonal().setOnes();
    for (const auto& [u, v] : graph.edges()) {
      double x = unit(rng);
      if (x < params.p_d) pattern(u, v) = 0.0;
      else if (x < 2.0 * params.p_d) pattern(v, u) = 0.0;
    }
    DirectedGraph directed(n);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (pattern(u, v) > 0.0) directed.add_edge(u, v);
    if (directed.first_unreachable() >= 0) {
      ++audit.reducible;
      continue;
    }

    Matrix p = Matrix::Zero(n, n);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (pattern(u, v) > 0.0) p(u, v) = weight(rng);
    Vector rows = p.rowwise().sum();
    p = rows.cwiseInverse().asDiagonal() * p;
    ConsensusMatrix matrix = validate_consensus(p);

    const double lo = n * matrix.measure().min();
    const double hi = n * matrix.measure().max();
    const double upper_cut = params.paper_literal_pi_check ? params.pi_bar_min : params.pi_bar_max;
    if (lo < params.pi_bar_min || hi > upper_cut) {
      ++audit.pi_range_rejects;
      continue;
    }

    GeometricMeasured measured;
    measured.s_n = std::numeric_limits<double>::infinity();
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) measured.s_n = std::min(measured.s_n, (pts.row(u) - pts.row(v)).norm());
    for (const auto& [u, v] : graph.edges())
      measured.r_n = std::max(measured.r_n, (pts.row(u) - pts.row(v)).norm());
    measured.gamma_ok = true;
    measured.rho_n = rho_n;

    return GeometricInstance{d, l, pts, std::move(graph), std::move(matrix), measured, audit};
  }
  audit.attempts = params.max_attempts;
  throw Error(ErrorKind::RejectionExhausted,
              "no geometric instance accepted within " + std::to_string(params.max_attempts) + " attempts");
}

}  // namespace lqcons
