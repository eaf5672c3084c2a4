#pragma once

#include <limits>
#include <optional>

#include "lqcons/error.hpp"
#include "lqcons/graph.hpp"
#include "lqcons/types.hpp"

namespace lqcons {

/// Positive left eigenvector of a consensus matrix for eigenvalue 1, summing to one.
struct InvariantMeasure {
  Vector pi;
  double residual = 0.0;  // max |pi^T P - pi^T|

  double min() const { return pi.minCoeff(); }
  double max() const { return pi.maxCoeff(); }
  Index size() const { return pi.size(); }
};

/// Solves [P^T - I; 1^T] pi = [0; 1] in the least-squares sense, falling back to
/// power iteration if the direct solution is not positive or not accurate. Entries
/// at or below 1000 n eps times the largest one count as zero.
/// Returns nullopt if neither route produces an acceptable measure.
template <class Derived>
std::optional<DenseVector<typename Derived::Scalar>> solve_invariant_measure(const Eigen::MatrixBase<Derived>& p,
                                                                             double accept_residual = 1e-10) {
  using Scalar = typename Derived::Scalar;
  const Index n = p.rows();
  DenseMatrix<Scalar> system(n + 1, n);
  system.topRows(n) = p.transpose();
  system.topRows(n).diagonal().array() -= Scalar(1);
  system.row(n).setOnes();
  DenseVector<Scalar> rhs = DenseVector<Scalar>::Zero(n + 1);
  rhs(n) = Scalar(1);

  // Entries within roundoff of zero mean the chain is reducible, not positive.
  const Scalar floor = Scalar(1000) * Scalar(n) * std::numeric_limits<Scalar>::epsilon();
  auto acceptable = [&](DenseVector<Scalar>& pi) {
    if (!pi.allFinite() || !(pi.minCoeff() > floor * pi.cwiseAbs().maxCoeff())) return false;
    pi /= pi.sum();
    Scalar residual = (pi.transpose() * p - pi.transpose()).cwiseAbs().maxCoeff();
    return residual <= Scalar(accept_residual);
  };

  DenseVector<Scalar> pi = system.colPivHouseholderQr().solve(rhs);
  if (acceptable(pi)) return pi;

  // Positive diagonal makes P aperiodic, so plain power iteration converges.
  pi = DenseVector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  for (int iter = 0; iter < 1000000; ++iter) {
    DenseVector<Scalar> next = (pi.transpose() * p).transpose();
    next /= next.sum();
    Scalar change = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (change < Scalar(1e-15)) break;
  }
  if (acceptable(pi)) return pi;
  return std::nullopt;
}

/// A validated consensus matrix: row stochastic, strictly positive diagonal,
/// strongly connected support. Immutable; the invariant measure is computed once.
class ConsensusMatrix {
 public:
  const Matrix& entries() const { return entries_; }
  double operator()(Index u, Index v) const { return entries_(u, v); }
  Index size() const { return entries_.rows(); }
  double tol() const { return tol_; }
  double support_threshold() const { return support_threshold_; }
  bool in_support(Index u, Index v) const { return entries_(u, v) > support_threshold_; }

  const InvariantMeasure& measure() const { return measure_; }
  const Vector& pi() const { return measure_.pi; }

 private:
  ConsensusMatrix(Matrix entries, double tol, double support_threshold, InvariantMeasure measure)
      : entries_(std::move(entries)), tol_(tol), support_threshold_(support_threshold), measure_(std::move(measure)) {}

  friend ConsensusMatrix validate_consensus(const Matrix&, double, double);

  Matrix entries_;
  double tol_;
  double support_threshold_;
  InvariantMeasure measure_;
};

struct SupportGraphs {
  DirectedGraph directed;
  UndirectedGraph undirected;
  int delta_in = 0;
  int delta_out = 0;
  int delta_undirected = 0;
  double p_min = 0.0;
  double p_max = 0.0;
};

struct MatrixClass {
  bool reversible = false;
  bool normal = false;
  bool commuting = false;
  bool doubly_stochastic = false;
  // Raw max-norm residuals behind each flag.
  double reversible_residual = 0.0;
  double normal_residual = 0.0;
  double commuting_residual = 0.0;
  double column_sum_residual = 0.0;
  double tol = kClassifyTol;
};

/// Throws Error with kind NotStochastic, NegativeEntry, ZeroDiagonal,
/// NotIrreducible, InvalidShape, NonFinite or SolveFailure.
/// `support_threshold` is 0 for generated matrices; use kFileSupportThreshold for parsed ones.
ConsensusMatrix validate_consensus(const Matrix& entries, double tol = kDefaultTol, double support_threshold = 0.0);

inline const InvariantMeasure& invariant_measure(const ConsensusMatrix& p) { return p.measure(); }

/// P* = Pi^{-1} P^T Pi.
ConsensusMatrix time_reversal(const ConsensusMatrix& p);

/// P* P, reversible with the same invariant measure as P.
ConsensusMatrix multiplicative_reversiblization(const ConsensusMatrix& p);

MatrixClass classify(const ConsensusMatrix& p, double tol = kClassifyTol);

SupportGraphs support_graphs(const ConsensusMatrix& p);

/// diag(pi)
inline Matrix pi_diagonal(const ConsensusMatrix& p) { return p.pi().asDiagonal(); }

}  // namespace lqcons
