#include "lqcons/resistance.hpp"

#include <sstream>

namespace lqcons {

std::string_view to_string(ResistanceMethod method) {
  return method == ResistanceMethod::Pseudoinverse ? "pseudoinverse" : "grounded";
}

ConductanceMatrix make_conductance(const Matrix& entries, double sym_tol) {
  if (entries.rows() != entries.cols() || entries.rows() < 2)
    throw Error(ErrorKind::InvalidShape, "conductance matrix must be square with n >= 2");
  if (!entries.allFinite()) throw Error(ErrorKind::NonFinite, "conductance matrix has non-finite entries");
  const Index n = entries.rows();
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      if (entries(u, v) < 0.0) {
        std::ostringstream msg;
        msg << "conductance (" << u << "," << v << ") is negative";
        throw Error(ErrorKind::NegativeEntry, msg.str(), u);
      }
      if (std::abs(entries(u, v) - entries(v, u)) > sym_tol * scale) {
        std::ostringstream msg;
        msg << "conductance matrix is not symmetric at (" << u << "," << v << ")";
        throw Error(ErrorKind::NotSymmetric, msg.str(), u);
      }
    }
  }
  Matrix sym = (entries + entries.transpose()) / 2.0;

  UndirectedGraph g(static_cast<int>(n));
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (sym(u, v) > 0.0) g.add_edge(static_cast<int>(u), static_cast<int>(v));
  if (!g.connected()) throw Error(ErrorKind::Disconnected, "conductance support is not connected");
  return ConductanceMatrix(std::move(sym));
}

ConductanceMatrix unit_conductance(const UndirectedGraph& g) { return make_conductance(g.adjacency_matrix()); }

ResistanceMatrix effective_resistance(const ConductanceMatrix& c) {
  return effective_resistance(c, c.size() <= 2000 ? ResistanceMethod::Pseudoinverse : ResistanceMethod::GroundedSolve);
}

ResistanceMatrix effective_resistance(const ConductanceMatrix& c, ResistanceMethod method) {
  Matrix l = laplacian(c);
  ResistanceMatrix r;
  r.method = method;
  r.values = method == ResistanceMethod::Pseudoinverse ? pseudoinverse_resistance(l) : grounded_resistance(l);
  return r;
}

double average_resistance(const ResistanceMatrix& r) {
  const double n = static_cast<double>(r.size());
  return r.values.sum() / (2.0 * n * n);
}

double weighted_average_resistance(const ResistanceMatrix& r, const InvariantMeasure& pi) {
  if (pi.size() != r.size()) throw Error(ErrorKind::DimensionMismatch, "measure and resistance sizes differ");
  return 0.5 * pi.pi.dot(r.values * pi.pi);
}

ConductanceMatrix phi_map(const ConsensusMatrix& p, double alpha, double tol) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::OutOfRange, "alpha must be positive");
  Matrix flow = p.pi().asDiagonal() * p.entries();
  double asym = (flow - flow.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream msg;
    msg << "Pi P is not symmetric (max asymmetry " << asym << ")";
    throw Error(ErrorKind::NotReversible, msg.str());
  }
  return make_conductance(alpha * (flow + flow.transpose()) / 2.0);
}

ConsensusMatrix psi_map(const ConductanceMatrix& c) {
  for (Index u = 0; u < c.size(); ++u) {
    if (!(c(u, u) > 0.0)) {
      std::ostringstream msg;
      msg << "conductance diagonal at node " << u << " is zero";
      throw Error(ErrorKind::ZeroDiagonal, msg.str(), u);
    }
  }
  Vector rows = c.entries().rowwise().sum();
  return validate_consensus(rows.cwiseInverse().asDiagonal() * c.entries());
}

ConductanceMatrix reversiblization_conductance(const ConsensusMatrix& p) {
  const double n = static_cast<double>(p.size());
  Matrix c = n * (p.entries().transpose() * p.pi().asDiagonal() * p.entries());
  return make_conductance((c + c.transpose()) / 2.0);
}

}  // namespace lqcons
