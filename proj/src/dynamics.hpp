#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graph_matrix.hpp"
#include "instance.hpp"
#include "parallel.hpp"

namespace steer {

// Default size cap for dense factorization paths.
inline constexpr std::uint32_t kDefaultDenseLimit = 4096;

// Iterate z <- A s + (I-A) P z. With eps = min_i alpha_i, the map contracts
// with factor (1-eps) in the infinity norm, and any start in [0,1]^n is
// within 1/eps of the fixed point, giving the certificate
//   ||z(t) - z*||_inf <= (1-eps)^t / eps = err(t).
// err is maintained multiplicatively; reset_phase re-arms it after alpha (and
// hence eps and the fixed point) changed.
struct EquilibriumEstimate {
  std::vector<double> z;
  std::uint64_t t = 0;
  double err = 0.0;
  double eps = 0.0;

  void start(std::uint32_t n, double fill, double eps_alpha);
  void reset_phase(double eps_alpha);
  void step(const InteractionMatrix& m, const std::vector<double>& alpha,
            const std::vector<double>& s, ThreadPool& pool);

 private:
  std::vector<double> next_;
};

// Iterate r <- 1 + P^T (I-A) r from r = 1. After t steps r equals the partial
// sum sum_{j<=t} [P^T(I-A)]^j 1, and the tail mass gives the 1-norm bound
//   ||r(t) - r*||_1 <= n (1-eps)^{t+1} / eps = err_r(t).
struct DerivativeEstimate {
  std::vector<double> r;
  std::uint64_t t = 0;
  double err_r = 0.0;
  double eps = 0.0;

  void start(std::uint32_t n, double eps_alpha);
  void reset_phase(double eps_alpha);
  void step(const InteractionMatrix& m, const std::vector<double>& alpha,
            ThreadPool& pool);

 private:
  std::vector<double> next_;
};

// Dense direct solves (Eigen LU behind the scenes). These are the reference
// path: factorization cost O(n^3), guarded by dense_limit (TooLarge beyond,
// SingularSystem when the residual check fails).
std::vector<double> equilibrium_exact(const InteractionMatrix& m,
                                      const std::vector<double>& s,
                                      const std::vector<double>& alpha,
                                      std::uint32_t dense_limit = kDefaultDenseLimit);

// r* = [I - P^T (I-A)]^{-1} 1.
std::vector<double> derivative_vector_exact(
    const InteractionMatrix& m, const std::vector<double>& alpha,
    std::uint32_t dense_limit = kDefaultDenseLimit);

double objective_exact(const InteractionMatrix& m, const std::vector<double>& s,
                       const std::vector<double>& alpha,
                       std::uint32_t dense_limit = kDefaultDenseLimit);

struct IterativeObjective {
  double value = 0.0;
  double err = 0.0;  // objective-level bound: n * err(t)
  std::uint64_t iterations = 0;
};

// Iterates until the per-coordinate certificate err(t) <= coord_tol.
IterativeObjective objective_iterative(const InteractionMatrix& m,
                                       const std::vector<double>& s,
                                       const std::vector<double>& alpha,
                                       double coord_tol, ThreadPool& pool);

// d f / d alpha_i = (s_i - z_i) r_i / (1 - alpha_i), from dense z and r.
double partial_derivative_exact(const InteractionMatrix& m,
                                const std::vector<double>& s,
                                const std::vector<double>& alpha,
                                std::uint32_t i,
                                std::uint32_t dense_limit = kDefaultDenseLimit);

// Sign of s_i - z_i decides the sign of every partial derivative in
// coordinate i. Exact flavor compares exactly; the estimate flavor returns
// nullopt (inconclusive) while |s_i - z_i| is within err + guard of zero.
int derivative_sign_exact(double s_i, double z_exact_i);
std::optional<int> derivative_sign_estimate(double s_i, double z_est_i,
                                            double err, double guard = 1e-9);

// Iteration budget for one certification phase: the formula bounds the
// iterations needed to push err(t) below the 1e-12 settle guard, times a
// safety factor of 10. Exceeding it signals pathological eps_alpha.
std::uint64_t phase_iteration_cap(double eps_alpha);

// Settle guard band: a coordinate counts as resolved only when its gap
// clears err(t) by more than this, keeping FP noise out of flip decisions.
inline constexpr double kSettleGuard = 1e-12;

}  // namespace steer
