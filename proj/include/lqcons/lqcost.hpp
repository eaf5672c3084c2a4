#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "lqcons/error.hpp"
#include "lqcons/stochastic_core.hpp"
#include "lqcons/types.hpp"

namespace lqcons {

/// G(P) = sum_{t>=0} (P^t - 1 pi^T) = (I - P + 1 pi^T)^{-1} - 1 pi^T.
struct GreenMatrix {
  Matrix values;
  double trace() const { return values.trace(); }
};

/// Throws SolveFailure if the inverse fails or the annihilation identities
/// G 1 = 0, pi^T G = 0 are off by more than 1e-9.
GreenMatrix green_matrix(const ConsensusMatrix& p);

enum class LqMethod { Exact, Truncated };

struct LqReport {
  double j = 0.0;
  double j_weighted = 0.0;
  double t0_term = 0.0;  // t = 0 contribution to J
  LqMethod method = LqMethod::Exact;
  int steps_used = 0;          // truncated: index of the last summed term
  double stein_residual = 0.0; // exact: relative residual of the Stein solve
  bool absolute_change_rule = true;

  /// Flat `key=value` lines.
  std::string to_key_value() const;
};

std::string_view to_string(LqMethod method);

struct SteinSolution {
  Matrix x;
  double residual = 0.0;  // ||A^T X A + Q - X||_F / max(1, ||X||_F)
  int iterations = 0;
};

/// Solves X = A^T X A + Q for a stable A. Direct Kronecker solve for n <= 60,
/// squared-doubling iteration above. Throws SteinDivergence if the residual exceeds `tol`.
template <class DerivedA, class DerivedQ>
DenseMatrix<typename DerivedA::Scalar> solve_stein(const Eigen::MatrixBase<DerivedA>& a,
                                                   const Eigen::MatrixBase<DerivedQ>& q, double tol = 1e-11,
                                                   SteinSolution* info = nullptr) {
  using Scalar = typename DerivedA::Scalar;
  using M = DenseMatrix<Scalar>;
  const Index n = a.rows();
  M x;
  int iterations = 0;

  if (n <= 60) {
    // vec(A^T X A) = (A^T kron A^T) vec(X)
    M at = a.transpose();
    M system(n * n, n * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) system.block(i * n, j * n, n, n) = -at(i, j) * at;
    system.diagonal().array() += Scalar(1);
    DenseVector<Scalar> rhs = Eigen::Map<const DenseVector<Scalar>>(M(q).data(), n * n);
    DenseVector<Scalar> sol = system.partialPivLu().solve(rhs);
    x = Eigen::Map<M>(sol.data(), n, n);
    iterations = 1;
  } else {
    x = q;
    M power = a;
    for (iterations = 1; iterations <= 64; ++iterations) {
      M increment = power.transpose() * x * power;
      x += increment;
      power = (power * power).eval();
      if (increment.norm() <= Scalar(1e-16) * x.norm() || power.cwiseAbs().maxCoeff() == Scalar(0)) break;
    }
  }
  x = ((x + x.transpose()) / Scalar(2)).eval();
  M residual_matrix = a.transpose() * x * a + q - x;
  double residual = static_cast<double>(residual_matrix.norm() / std::max(Scalar(1), x.norm()));
  if (info) {
    info->residual = residual;
    info->iterations = iterations;
  }
  if (!x.allFinite() || !(residual <= tol))
    throw Error(ErrorKind::SteinDivergence, "Stein equation residual " + std::to_string(residual) + " exceeds tolerance");
  return x;
}

/// J(P) and J_w(P) from the Stein fixed point of Abar = P - 1 pi^T, with the
/// t = 0 term handled in closed form.
LqReport lq_cost_exact(const ConsensusMatrix& p);

struct TruncationRule {
  int t_max = 10000;
  double delta = 1e-5;
  int window = 10;
};

/// Partial sum of (1/n)||P^t - 1 pi^T||_F^2, stopping at t_max or once the
/// absolute change of the sum stays below delta for `window` consecutive terms.
LqReport lq_cost_truncated(const ConsensusMatrix& p, const TruncationRule& rule = {});

/// Monte Carlo estimate of (1/n) E||(I - 1 pi^T) x(horizon)||^2 for
/// x(t+1) = P x(t) + n(t), with x(0) and n(t) standard normal. Each trial draws
/// from its own stream derived from (seed, trial), so the result does not depend
/// on `threads` (0 = hardware concurrency).
double noisy_consensus_estimate(const ConsensusMatrix& p, int horizon, int trials, std::uint64_t seed,
                                unsigned threads = 0);

/// (tr((P*)^t P^t), tr((P*P)^t))
std::pair<double, double> trace_pair(const ConsensusMatrix& p, int t);

}  // namespace lqcons
