#include "lqcons/stochastic_core.hpp"

#include <cmath>
#include <sstream>

namespace lqcons {

namespace {

DirectedGraph directed_support(const Matrix& p, double threshold) {
  const int n = static_cast<int>(p.rows());
  DirectedGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (p(u, v) > threshold) g.add_edge(u, v);
  return g;
}

}  // namespace

ConsensusMatrix validate_consensus(const Matrix& entries, double tol, double support_threshold) {
  if (entries.rows() != entries.cols() || entries.rows() < 2) {
    std::ostringstream msg;
    msg << "expected a square matrix with n >= 2, got " << entries.rows() << "x" << entries.cols();
    throw Error(ErrorKind::InvalidShape, msg.str());
  }
  if (!entries.allFinite()) throw Error(ErrorKind::NonFinite, "matrix has non-finite entries");
  const Index n = entries.rows();

  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      if (entries(u, v) < 0.0) {
        std::ostringstream msg;
        msg << "entry (" << u << "," << v << ") = " << entries(u, v) << " is negative";
        throw Error(ErrorKind::NegativeEntry, msg.str(), u);
      }
    }
  }
  for (Index u = 0; u < n; ++u) {
    double sum = entries.row(u).sum();
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream msg;
      msg << "row " << u << " sums to " << sum;
      throw Error(ErrorKind::NotStochastic, msg.str(), u);
    }
  }
  for (Index u = 0; u < n; ++u) {
    if (!(entries(u, u) > tol)) {
      std::ostringstream msg;
      msg << "diagonal entry at node " << u << " is " << entries(u, u);
      throw Error(ErrorKind::ZeroDiagonal, msg.str(), u);
    }
  }
  int bad = directed_support(entries, support_threshold).first_unreachable();
  if (bad >= 0) {
    std::ostringstream msg;
    msg << "support graph is not strongly connected (node " << bad << " is not mutually reachable with node 0)";
    throw Error(ErrorKind::NotIrreducible, msg.str(), bad);
  }

  auto pi = solve_invariant_measure(entries);
  if (!pi) throw Error(ErrorKind::SolveFailure, "invariant measure solve did not converge");
  InvariantMeasure measure{*pi, (pi->transpose() * entries - pi->transpose()).cwiseAbs().maxCoeff()};
  return ConsensusMatrix(entries, tol, support_threshold, std::move(measure));
}

ConsensusMatrix time_reversal(const ConsensusMatrix& p) {
  const Vector& pi = p.pi();
  Matrix reversed = pi.cwiseInverse().asDiagonal() * p.entries().transpose() * pi.asDiagonal();
  return validate_consensus(reversed, p.tol(), p.support_threshold());
}

ConsensusMatrix multiplicative_reversiblization(const ConsensusMatrix& p) {
  const Vector& pi = p.pi();
  // (P*P)_uv = sum_w pi_w P_wu P_wv / pi_u
  Matrix product = pi.cwiseInverse().asDiagonal() * (p.entries().transpose() * pi.asDiagonal() * p.entries());
  return validate_consensus(product, p.tol(), p.support_threshold());
}

MatrixClass classify(const ConsensusMatrix& p, double tol) {
  const Matrix& m = p.entries();
  const Vector& pi = p.pi();
  MatrixClass c;
  c.tol = tol;

  Matrix flow = pi.asDiagonal() * m;
  c.reversible_residual = (flow - flow.transpose()).cwiseAbs().maxCoeff();
  c.normal_residual = (m.transpose() * m - m * m.transpose()).cwiseAbs().maxCoeff();
  Matrix reversed = pi.cwiseInverse().asDiagonal() * m.transpose() * pi.asDiagonal();
  c.commuting_residual = (reversed * m - m * reversed).cwiseAbs().maxCoeff();
  c.column_sum_residual = (m.colwise().sum().array() - 1.0).abs().maxCoeff();

  c.reversible = c.reversible_residual <= tol;
  c.normal = c.normal_residual <= tol;
  c.commuting = c.commuting_residual <= tol;
  c.doubly_stochastic = c.column_sum_residual <= tol;

  // Class inclusions: normal => doubly stochastic and commuting; reversible => commuting.
  if (c.normal) c.doubly_stochastic = true;
  if (c.normal || c.reversible) c.commuting = true;
  return c;
}

SupportGraphs support_graphs(const ConsensusMatrix& p) {
  SupportGraphs s;
  s.directed = directed_support(p.entries(), p.support_threshold());
  s.undirected = s.directed.symmetrized();
  s.delta_in = s.directed.max_in_degree();
  s.delta_out = s.directed.max_out_degree();
  s.delta_undirected = s.undirected.max_degree();

  bool first = true;
  const Matrix& m = p.entries();
  for (Index u = 0; u < m.rows(); ++u) {
    for (Index v = 0; v < m.cols(); ++v) {
      if (!p.in_support(u, v)) continue;
      if (first) {
        s.p_min = s.p_max = m(u, v);
        first = false;
      } else {
        s.p_min = std::min(s.p_min, m(u, v));
        s.p_max = std::max(s.p_max, m(u, v));
      }
    }
  }
  return s;
}

}  // namespace lqcons
