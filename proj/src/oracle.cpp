#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace steer {

namespace {

void check_corner_limit(std::uint32_t n, std::uint32_t limit,
                        const char* what) {
  if (n > limit) {
    fail(ErrorCode::TooLarge, std::string(what) + ": node count " +
                                  std::to_string(n) +
                                  " exceeds enumeration limit " +
                                  std::to_string(limit));
  }
}

}  // namespace

std::vector<double> corner_alpha(const ProblemInstance& inst,
                                 std::uint32_t mask) {
  const std::uint32_t n = inst.n();
  check_corner_limit(n, 31, "corner_alpha");
  std::vector<double> alpha(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    alpha[i] = (mask >> i) & 1u ? inst.lower()[i] : inst.upper()[i];
  }
  return alpha;
}

CornerEnumeration enumerate_corners(const ProblemInstance& inst) {
  const std::uint32_t n = inst.n();
  check_corner_limit(n, kBruteForceLimit, "enumerate_corners");

  CornerEnumeration out;
  const std::uint64_t total = 1ull << n;
  out.corners.reserve(total);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    // Gray-code visit order; every corner still gets an independent solve.
    const std::uint32_t mask = static_cast<std::uint32_t>(idx ^ (idx >> 1));
    const double f =
        objective_exact(inst.matrix(), inst.s(), corner_alpha(inst, mask),
                        kDefaultDenseLimit);
    out.corners.push_back({mask, f});
  }

  double min_f = out.corners.front().objective;
  for (const CornerRecord& c : out.corners) min_f = std::min(min_f, c.objective);
  std::uint32_t best_mask = ~0u;
  for (const CornerRecord& c : out.corners) {
    if (c.objective <= min_f + kTieTolerance && c.mask < best_mask) {
      best_mask = c.mask;
    }
  }
  out.best_mask = best_mask;
  out.best_objective = min_f;
  return out;
}

BruteForceOptimum brute_force_optimum(const ProblemInstance& inst) {
  const CornerEnumeration corners = enumerate_corners(inst);
  BruteForceOptimum out;
  out.mask = corners.best_mask;
  out.objective = corners.best_objective;
  out.alpha = corner_alpha(inst, out.mask);
  return out;
}

LocalGlobalReport check_local_global(const ProblemInstance& inst) {
  const std::uint32_t n = inst.n();
  check_corner_limit(n, kLocalGlobalLimit, "check_local_global");

  const std::uint64_t total = 1ull << n;
  std::vector<double> f(total);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    f[mask] = objective_exact(inst.matrix(), inst.s(),
                              corner_alpha(inst, static_cast<std::uint32_t>(mask)),
                              kDefaultDenseLimit);
  }
  LocalGlobalReport report;
  report.global_min = *std::min_element(f.begin(), f.end());
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    bool local_min = true;
    for (std::uint32_t j = 0; j < n && local_min; ++j) {
      if (f[mask] > f[mask ^ (1ull << j)] + kTieTolerance) local_min = false;
    }
    if (local_min && f[mask] > report.global_min + kTieTolerance) {
      report.violating_masks.push_back(static_cast<std::uint32_t>(mask));
    }
  }
  return report;
}

std::optional<std::uint32_t> descending_coordinate_witness(
    const ProblemInstance& inst, std::uint32_t mask_a, std::uint32_t mask_b) {
  const std::uint32_t n = inst.n();
  check_corner_limit(n, kBruteForceLimit, "descending_coordinate_witness");
  const double fa = objective_exact(inst.matrix(), inst.s(),
                                    corner_alpha(inst, mask_a),
                                    kDefaultDenseLimit);
  const double fb = objective_exact(inst.matrix(), inst.s(),
                                    corner_alpha(inst, mask_b),
                                    kDefaultDenseLimit);
  if (!(fa > fb + kTieTolerance)) {
    fail(ErrorCode::PreconditionUnmet,
         "descending_coordinate_witness requires f(a) > f(b) + tolerance");
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    if ((mask_a & bit) == (mask_b & bit)) continue;
    const double f_flip = objective_exact(inst.matrix(), inst.s(),
                                          corner_alpha(inst, mask_a ^ bit),
                                          kDefaultDenseLimit);
    if (f_flip < fa - 1e-12) return i;
  }
  return std::nullopt;
}

SwitchingSample check_switching(const ProblemInstance& inst,
                                std::uint32_t base_mask, std::uint32_t i,
                                std::uint32_t k) {
  const std::uint32_t n = inst.n();
  check_corner_limit(n, kBruteForceLimit, "check_switching");
  if (i == k || i >= n || k >= n) {
    fail(ErrorCode::InvalidArgument,
         "check_switching requires two distinct coordinates");
  }
  if (n < 3) {
    fail(ErrorCode::PreconditionUnmet, "switching property requires n >= 3");
  }
  const std::uint32_t bi = 1u << i;
  const std::uint32_t bk = 1u << k;

  SwitchingSample out;
  auto f_at = [&](std::uint32_t mask) {
    return objective_exact(inst.matrix(), inst.s(), corner_alpha(inst, mask),
                           kDefaultDenseLimit);
  };
  out.faa = f_at(base_mask);
  out.fbb = f_at(base_mask ^ bi ^ bk);
  out.fab = f_at(base_mask ^ bk);
  out.fba = f_at(base_mask ^ bi);

  const double diag_min = std::min(out.faa, out.fbb);
  const double diag_max = std::max(out.faa, out.fbb);
  const double off_min = std::min(out.fab, out.fba);
  out.premise = diag_min < off_min - kTieTolerance;
  out.holds = !out.premise || diag_max > off_min - 1e-12;
  return out;
}

double finite_difference_derivative(const ProblemInstance& inst,
                                    const std::vector<double>& alpha,
                                    std::uint32_t i, double delta,
                                    std::uint32_t dense_limit) {
  if (i >= inst.n()) {
    fail(ErrorCode::InvalidArgument, "coordinate out of range");
  }
  if (!(alpha[i] - delta > 0.0 && alpha[i] + delta < 1.0)) {
    fail(ErrorCode::PreconditionUnmet,
         "finite difference needs alpha_i +/- delta inside (0,1)");
  }
  std::vector<double> probe = alpha;
  probe[i] = alpha[i] + delta;
  const double f_plus =
      objective_exact(inst.matrix(), inst.s(), probe, dense_limit);
  probe[i] = alpha[i] - delta;
  const double f_minus =
      objective_exact(inst.matrix(), inst.s(), probe, dense_limit);
  return (f_plus - f_minus) / (2.0 * delta);
}

}  // namespace steer
