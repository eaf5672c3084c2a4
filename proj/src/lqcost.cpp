#include "lqcons/lqcost.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

namespace lqcons {

std::string_view to_string(LqMethod method) { return method == LqMethod::Exact ? "exact" : "truncated"; }

std::string LqReport::to_key_value() const {
  std::ostringstream out;
  out.precision(17);
  out << "j=" << j << "\n"
      << "j_weighted=" << j_weighted << "\n"
      << "t0_term=" << t0_term << "\n"
      << "method=" << to_string(method) << "\n";
  if (method == LqMethod::Truncated) {
    out << "steps_used=" << steps_used << "\n"
        << "change_rule=" << (absolute_change_rule ? "absolute" : "relative") << "\n";
  } else {
    out << "stein_residual=" << stein_residual << "\n";
  }
  return out.str();
}

GreenMatrix green_matrix(const ConsensusMatrix& p) {
  const Index n = p.size();
  Matrix limit = Vector::Ones(n) * p.pi().transpose();
  Matrix fundamental = Matrix::Identity(n, n) - p.entries() + limit;
  Eigen::PartialPivLU<Matrix> lu(fundamental);
  GreenMatrix g{lu.inverse() - limit};
  if (!g.values.allFinite()) throw Error(ErrorKind::SolveFailure, "fundamental matrix inverse is not finite");
  double right = (g.values * Vector::Ones(n)).cwiseAbs().maxCoeff();
  double left = (p.pi().transpose() * g.values).cwiseAbs().maxCoeff();
  if (right > 1e-9 || left > 1e-9) {
    std::ostringstream msg;
    msg << "Green matrix annihilation residuals " << right << ", " << left;
    throw Error(ErrorKind::SolveFailure, msg.str());
  }
  return g;
}

LqReport lq_cost_exact(const ConsensusMatrix& p) {
  const Index n = p.size();
  const double nd = static_cast<double>(n);
  const Vector& pi = p.pi();
  const double pi_sq = pi.squaredNorm();
  Matrix centered = p.entries() - Vector::Ones(n) * pi.transpose();

  SteinSolution info_plain, info_weighted;
  Matrix x = solve_stein(centered, Matrix::Identity(n, n), 1e-11, &info_plain);
  Matrix xw = solve_stein(centered, Matrix(pi.asDiagonal()), 1e-11, &info_weighted);

  LqReport report;
  report.method = LqMethod::Exact;
  // ||I - 1 pi^T||_F^2 = n - 2 + n ||pi||^2 and sum_i pi_i ||e_i - pi||^2 = 1 - ||pi||^2
  report.t0_term = (nd - 2.0 + nd * pi_sq) / nd;
  report.j = report.t0_term + (x.trace() - nd) / nd;
  report.j_weighted = (1.0 - pi_sq) + (xw.trace() - 1.0);
  report.stein_residual = std::max(info_plain.residual, info_weighted.residual);
  return report;
}

LqReport lq_cost_truncated(const ConsensusMatrix& p, const TruncationRule& rule) {
  if (rule.t_max < 1 || !(rule.delta > 0.0) || rule.window < 1)
    throw Error(ErrorKind::OutOfRange, "truncation rule needs t_max >= 1, delta > 0, window >= 1");
  const Index n = p.size();
  const double nd = static_cast<double>(n);
  const Vector& pi = p.pi();

  // E_t = P^t - 1 pi^T obeys E_{t+1} = P E_t.
  Matrix err = Matrix::Identity(n, n) - Vector::Ones(n) * pi.transpose();
  Matrix next(n, n);
  LqReport report;
  report.method = LqMethod::Truncated;
  report.t0_term = err.squaredNorm() / nd;
  report.j = report.t0_term;
  report.j_weighted = pi.dot(err.rowwise().squaredNorm());

  int quiet = 0;
  int t = 0;
  while (t < rule.t_max) {
    ++t;
    next.noalias() = p.entries() * err;
    err.swap(next);
    double term = err.squaredNorm() / nd;
    report.j += term;
    report.j_weighted += pi.dot(err.rowwise().squaredNorm());
    quiet = term < rule.delta ? quiet + 1 : 0;
    if (quiet >= rule.window) break;
  }
  report.steps_used = t;
  return report;
}

double noisy_consensus_estimate(const ConsensusMatrix& p, int horizon, int trials, std::uint64_t seed,
                                unsigned threads) {
  if (horizon < 1 || trials < 1) throw Error(ErrorKind::OutOfRange, "horizon and trials must be >= 1");
  const Index n = p.size();
  const Matrix& m = p.entries();
  const Vector& pi = p.pi();
  std::vector<double> samples(static_cast<std::size_t>(trials));

  auto run = [&](int begin, int end) {
    Vector x(n), next(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = begin; trial < end; ++trial) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(trial), 0x6c71u};
      std::mt19937_64 rng(seq);
      normal.reset();
      for (Index i = 0; i < n; ++i) x(i) = normal(rng);
      for (int t = 0; t < horizon; ++t) {
        next.noalias() = m * x;
        for (Index i = 0; i < n; ++i) next(i) += normal(rng);
        x.swap(next);
      }
      double mean = pi.dot(x);
      samples[static_cast<std::size_t>(trial)] = (x.array() - mean).square().sum() / static_cast<double>(n);
    }
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
  if (workers <= 1) {
    run(0, trials);
  } else {
    std::vector<std::thread> pool;
    int chunk = (trials + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (int begin = 0; begin < trials; begin += chunk) pool.emplace_back(run, begin, std::min(trials, begin + chunk));
    for (auto& th : pool) th.join();
  }

  double total = 0.0;
  for (double s : samples) total += s;
  return total / static_cast<double>(trials);
}

std::pair<double, double> trace_pair(const ConsensusMatrix& p, int t) {
  if (t < 0) throw Error(ErrorKind::OutOfRange, "t must be nonnegative");
  const Index n = p.size();
  const Vector& pi = p.pi();
  Matrix reversed = pi.cwiseInverse().asDiagonal() * p.entries().transpose() * pi.asDiagonal();
  Matrix reversible = reversed * p.entries();

  Matrix rev_pow = Matrix::Identity(n, n), fwd_pow = Matrix::Identity(n, n), both_pow = Matrix::Identity(n, n);
  for (int k = 0; k < t; ++k) {
    rev_pow = (rev_pow * reversed).eval();
    fwd_pow = (fwd_pow * p.entries()).eval();
    both_pow = (both_pow * reversible).eval();
  }
  // tr(A B) = sum_ij A_ij B_ji
  double separate = rev_pow.cwiseProduct(fwd_pow.transpose()).sum();
  return {separate, both_pow.trace()};
}

}  // namespace lqcons
