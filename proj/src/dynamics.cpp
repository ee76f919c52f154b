#include "dynamics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "errors.hpp"

namespace steer {

namespace {

void check_alpha(const std::vector<double>& alpha, std::size_t n) {
  if (alpha.size() != n) {
    fail(ErrorCode::DimensionMismatch, "alpha size " +
                                           std::to_string(alpha.size()) +
                                           " does not match node count " +
                                           std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(alpha[i] > 0.0 && alpha[i] < 1.0)) {
      fail(ErrorCode::InvalidArgument,
           "alpha[" + std::to_string(i) + "] outside (0,1)");
    }
  }
}

Eigen::MatrixXd dense_diluted_system(const InteractionMatrix& m,
                                     const std::vector<double>& alpha) {
  // I - (I-A) P
  const std::uint32_t n = m.node_count();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n);
  const auto& offsets = m.row_offsets();
  const auto& cols = m.cols();
  const auto& prob = m.probs();
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      sys(i, cols[k]) -= (1.0 - alpha[i]) * prob[k];
    }
  }
  return sys;
}

void check_dense_limit(std::uint32_t n, std::uint32_t dense_limit,
                       const char* what) {
  if (n > dense_limit) {
    fail(ErrorCode::TooLarge, std::string(what) + ": node count " +
                                  std::to_string(n) + " exceeds dense limit " +
                                  std::to_string(dense_limit));
  }
}

}  // namespace

void EquilibriumEstimate::start(std::uint32_t n, double fill, double eps_alpha) {
  z.assign(n, fill);
  next_.resize(n);
  reset_phase(eps_alpha);
}

void EquilibriumEstimate::reset_phase(double eps_alpha) {
  if (!(eps_alpha > 0.0 && eps_alpha < 1.0)) {
    fail(ErrorCode::InvalidArgument, "eps_alpha outside (0,1)");
  }
  eps = eps_alpha;
  t = 0;
  err = 1.0 / eps;
}

void EquilibriumEstimate::step(const InteractionMatrix& m,
                               const std::vector<double>& alpha,
                               const std::vector<double>& s, ThreadPool& pool) {
  m.apply_diluted(alpha, s, z, next_, pool);
  z.swap(next_);
  ++t;
  err *= (1.0 - eps);
}

void DerivativeEstimate::start(std::uint32_t n, double eps_alpha) {
  r.assign(n, 1.0);
  next_.resize(n);
  reset_phase(eps_alpha);
}

void DerivativeEstimate::reset_phase(double eps_alpha) {
  if (!(eps_alpha > 0.0 && eps_alpha < 1.0)) {
    fail(ErrorCode::InvalidArgument, "eps_alpha outside (0,1)");
  }
  eps = eps_alpha;
  t = 0;
  err_r = static_cast<double>(r.size()) * (1.0 - eps) / eps;
}

void DerivativeEstimate::step(const InteractionMatrix& m,
                              const std::vector<double>& alpha,
                              ThreadPool& pool) {
  m.apply_transpose_diluted(alpha, r, next_, pool);
  r.swap(next_);
  ++t;
  err_r *= (1.0 - eps);
}

std::vector<double> equilibrium_exact(const InteractionMatrix& m,
                                      const std::vector<double>& s,
                                      const std::vector<double>& alpha,
                                      std::uint32_t dense_limit) {
  const std::uint32_t n = m.node_count();
  check_dense_limit(n, dense_limit, "equilibrium_exact");
  check_alpha(alpha, n);
  if (s.size() != n) {
    fail(ErrorCode::DimensionMismatch, "s size does not match node count");
  }

  const Eigen::MatrixXd sys = dense_diluted_system(m, alpha);
  Eigen::VectorXd rhs(n);
  for (std::uint32_t i = 0; i < n; ++i) rhs(i) = alpha[i] * s[i];

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  const Eigen::VectorXd z = lu.solve(rhs);
  const double residual = (sys * z - rhs).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-10)) {
    fail(ErrorCode::SingularSystem,
         "dense equilibrium solve residual " + std::to_string(residual));
  }
  return std::vector<double>(z.data(), z.data() + n);
}

std::vector<double> derivative_vector_exact(const InteractionMatrix& m,
                                            const std::vector<double>& alpha,
                                            std::uint32_t dense_limit) {
  const std::uint32_t n = m.node_count();
  check_dense_limit(n, dense_limit, "derivative_vector_exact");
  check_alpha(alpha, n);

  const Eigen::MatrixXd sys = dense_diluted_system(m, alpha).transpose();
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  const Eigen::VectorXd r = lu.solve(rhs);
  const double residual = (sys * r - rhs).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-8)) {
    fail(ErrorCode::SingularSystem,
         "dense derivative solve residual " + std::to_string(residual));
  }
  return std::vector<double>(r.data(), r.data() + n);
}

double objective_exact(const InteractionMatrix& m, const std::vector<double>& s,
                       const std::vector<double>& alpha,
                       std::uint32_t dense_limit) {
  const std::vector<double> z = equilibrium_exact(m, s, alpha, dense_limit);
  double sum = 0.0;
  for (double v : z) sum += v;
  return sum;
}

IterativeObjective objective_iterative(const InteractionMatrix& m,
                                       const std::vector<double>& s,
                                       const std::vector<double>& alpha,
                                       double coord_tol, ThreadPool& pool) {
  const std::uint32_t n = m.node_count();
  check_alpha(alpha, n);
  if (!(coord_tol > 0.0)) {
    fail(ErrorCode::InvalidArgument, "coord_tol must be positive");
  }
  double eps = 1.0;
  for (double a : alpha) eps = std::min(eps, a);

  EquilibriumEstimate est;
  est.start(n, 1.0, eps);
  // err(t) <= coord_tol needs t >= ln(1/(eps tol)) / -ln(1-eps); cap at the
  // generic phase budget in case coord_tol is far below the guard band.
  const std::uint64_t cap =
      std::max(phase_iteration_cap(eps),
               static_cast<std::uint64_t>(
                   std::ceil(std::log(1.0 / (eps * coord_tol)) /
                             -std::log1p(-eps))) +
                   16);
  while (est.err > coord_tol) {
    if (est.t >= cap) {
      fail(ErrorCode::IterationBudgetExceeded,
           "objective_iterative: cap " + std::to_string(cap) +
               " reached before err " + std::to_string(est.err) +
               " <= " + std::to_string(coord_tol));
    }
    est.step(m, alpha, s, pool);
  }
  IterativeObjective out;
  double sum = 0.0;
  for (double v : est.z) sum += v;
  out.value = sum;
  out.err = static_cast<double>(n) * est.err;
  out.iterations = est.t;
  return out;
}

double partial_derivative_exact(const InteractionMatrix& m,
                                const std::vector<double>& s,
                                const std::vector<double>& alpha,
                                std::uint32_t i, std::uint32_t dense_limit) {
  const std::uint32_t n = m.node_count();
  if (i >= n) {
    fail(ErrorCode::InvalidArgument,
         "coordinate " + std::to_string(i) + " out of range");
  }
  const std::vector<double> z = equilibrium_exact(m, s, alpha, dense_limit);
  const std::vector<double> r = derivative_vector_exact(m, alpha, dense_limit);
  return (s[i] - z[i]) * r[i] / (1.0 - alpha[i]);
}

int derivative_sign_exact(double s_i, double z_exact_i) {
  if (s_i > z_exact_i) return 1;
  if (s_i < z_exact_i) return -1;
  return 0;
}

std::optional<int> derivative_sign_estimate(double s_i, double z_est_i,
                                            double err, double guard) {
  const double gap = s_i - z_est_i;
  if (std::abs(gap) <= err + guard) return std::nullopt;
  return gap > 0.0 ? 1 : -1;
}

std::uint64_t phase_iteration_cap(double eps_alpha) {
  const double tol = kSettleGuard;
  const double steps =
      std::log(1.0 / (eps_alpha * tol)) / -std::log1p(-eps_alpha);
  return 10 * static_cast<std::uint64_t>(std::ceil(steps));
}

}  // namespace steer
