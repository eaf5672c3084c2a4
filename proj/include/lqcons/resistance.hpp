#pragma once

#include <string_view>

#include <Eigen/Eigenvalues>

#include "lqcons/error.hpp"
#include "lqcons/graph.hpp"
#include "lqcons/stochastic_core.hpp"
#include "lqcons/types.hpp"

namespace lqcons {

/// Symmetric, nonnegative, irreducible matrix of edge conductances. The diagonal
/// (self loops) is allowed and plays no role in the Laplacian.
class ConductanceMatrix {
 public:
  const Matrix& entries() const { return entries_; }
  double operator()(Index u, Index v) const { return entries_(u, v); }
  Index size() const { return entries_.rows(); }

 private:
  explicit ConductanceMatrix(Matrix entries) : entries_(std::move(entries)) {}
  friend ConductanceMatrix make_conductance(const Matrix&, double);

  Matrix entries_;
};

/// Throws InvalidShape, NonFinite, NotSymmetric (beyond `sym_tol` relative to the
/// largest entry), NegativeEntry, or Disconnected. The stored matrix is exactly symmetric.
ConductanceMatrix make_conductance(const Matrix& entries, double sym_tol = 1e-12);

/// Unit conductance on every edge of `g`.
ConductanceMatrix unit_conductance(const UndirectedGraph& g);

/// L(C) = diag(C 1) - C, computed with the diagonal of C removed.
template <class Derived>
DenseMatrix<typename Derived::Scalar> laplacian(const Eigen::MatrixBase<Derived>& c) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> off = c;
  off.diagonal().setZero();
  DenseMatrix<Scalar> l = -off;
  l.diagonal() = off.rowwise().sum();
  return l;
}

inline Matrix laplacian(const ConductanceMatrix& c) { return laplacian(c.entries()); }

enum class ResistanceMethod { Pseudoinverse, GroundedSolve };

std::string_view to_string(ResistanceMethod method);

struct ResistanceMatrix {
  Matrix values;
  ResistanceMethod method = ResistanceMethod::Pseudoinverse;

  double operator()(Index u, Index v) const { return values(u, v); }
  Index size() const { return values.rows(); }
};

/// All-pairs effective resistance from a full symmetric eigendecomposition of L.
/// The graph is declared disconnected when the second-smallest Laplacian eigenvalue
/// is at most 1e-10 times the largest diagonal entry of L.
template <class Derived>
DenseMatrix<typename Derived::Scalar> pseudoinverse_resistance(const Eigen::MatrixBase<Derived>& l) {
  using Scalar = typename Derived::Scalar;
  const Index n = l.rows();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(l);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::SolveFailure, "Laplacian eigendecomposition failed");
  const Scalar scale = l.diagonal().maxCoeff();
  if (n > 1 && !(eig.eigenvalues()(1) > Scalar(1e-10) * scale))
    throw Error(ErrorKind::Disconnected, "Laplacian has a null space of dimension > 1");

  // The smallest eigenvalue belongs to the constant vector; drop it.
  const auto vecs = eig.eigenvectors().rightCols(n - 1);
  DenseVector<Scalar> inv = eig.eigenvalues().tail(n - 1).cwiseInverse();
  DenseMatrix<Scalar> pinv = vecs * inv.asDiagonal() * vecs.transpose();

  DenseVector<Scalar> d = pinv.diagonal();
  DenseMatrix<Scalar> r = d.replicate(1, n) + d.transpose().replicate(n, 1) - Scalar(2) * pinv;
  r.diagonal().setZero();
  DenseMatrix<Scalar> sym = (r + r.transpose()) / Scalar(2);
  return sym.cwiseMax(Scalar(0));
}

/// All-pairs effective resistance by grounding node 0 and solving the reduced
/// (n-1) system for every source. Kept as an independent route to the pseudoinverse.
template <class Derived>
DenseMatrix<typename Derived::Scalar> grounded_resistance(const Eigen::MatrixBase<Derived>& l) {
  using Scalar = typename Derived::Scalar;
  const Index n = l.rows();
  DenseMatrix<Scalar> reduced = l.bottomRightCorner(n - 1, n - 1);
  Eigen::LDLT<DenseMatrix<Scalar>> ldlt(reduced);
  // LDLT silently pseudo-solves through zero pivots, so inspect D directly.
  const auto pivots = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(pivots.minCoeff() > Scalar(1e-10) * pivots.maxCoeff()))
    throw Error(ErrorKind::Disconnected, "grounded Laplacian is singular");
  DenseMatrix<Scalar> inv = ldlt.solve(DenseMatrix<Scalar>::Identity(n - 1, n - 1));
  if (!inv.allFinite()) throw Error(ErrorKind::Disconnected, "grounded Laplacian is singular");

  DenseMatrix<Scalar> g = DenseMatrix<Scalar>::Zero(n, n);
  g.bottomRightCorner(n - 1, n - 1) = inv;
  DenseVector<Scalar> d = g.diagonal();
  DenseMatrix<Scalar> r = d.replicate(1, n) + d.transpose().replicate(n, 1) - Scalar(2) * g;
  r.diagonal().setZero();
  DenseMatrix<Scalar> sym = (r + r.transpose()) / Scalar(2);
  return sym.cwiseMax(Scalar(0));
}

/// Throws Disconnected. Pseudoinverse is the default for n <= 2000.
ResistanceMatrix effective_resistance(const ConductanceMatrix& c);
ResistanceMatrix effective_resistance(const ConductanceMatrix& c, ResistanceMethod method);

/// (1 / 2n^2) sum_{u,v} R_uv
double average_resistance(const ResistanceMatrix& r);

/// (1/2) sum_{u,v} R_uv pi_u pi_v. Throws DimensionMismatch.
double weighted_average_resistance(const ResistanceMatrix& r, const InvariantMeasure& pi);

/// Phi_alpha(P) = alpha * Pi * P. Requires P reversible; throws NotReversible.
ConductanceMatrix phi_map(const ConsensusMatrix& p, double alpha, double tol = kClassifyTol);
inline ConductanceMatrix phi_map(const ConsensusMatrix& p) { return phi_map(p, static_cast<double>(p.size())); }

/// Psi(C) = diag(C 1)^{-1} C. Throws ZeroDiagonal if some C_ii is not positive.
ConsensusMatrix psi_map(const ConductanceMatrix& c);

/// C_{P*P} = n P^T Pi P, symmetrized exactly.
ConductanceMatrix reversiblization_conductance(const ConsensusMatrix& p);

}  // namespace lqcons
