#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dynamics.hpp"
#include "instance.hpp"

namespace steer {

// Desk-scale reference answers, each computed independently of the iterative
// machinery: every corner is solved by a fresh dense factorization.

inline constexpr std::uint32_t kBruteForceLimit = 20;   // 2^n corner solves
inline constexpr std::uint32_t kLocalGlobalLimit = 12;  // n * 2^n comparisons
inline constexpr double kTieTolerance = 1e-10;

// Corner encoding: bit i set means alpha_i = l_i, clear means alpha_i = u_i.
std::vector<double> corner_alpha(const ProblemInstance& inst,
                                 std::uint32_t mask);

struct CornerRecord {
  std::uint32_t mask = 0;
  double objective = 0.0;
};

// All 2^n corners, visited in Gray-code order, each solved independently.
// best_mask is the smallest mask whose objective lies within kTieTolerance
// of the minimum.
struct CornerEnumeration {
  std::vector<CornerRecord> corners;
  std::uint32_t best_mask = 0;
  double best_objective = 0.0;
};

CornerEnumeration enumerate_corners(const ProblemInstance& inst);

struct BruteForceOptimum {
  std::uint32_t mask = 0;
  double objective = 0.0;
  std::vector<double> alpha;
};

BruteForceOptimum brute_force_optimum(const ProblemInstance& inst);

// Checks that every single-flip local minimizer attains the global minimum
// (within kTieTolerance). Reports the masks of any counterexamples.
struct LocalGlobalReport {
  double global_min = 0.0;
  std::vector<std::uint32_t> violating_masks;
  bool holds() const { return violating_masks.empty(); }
};

LocalGlobalReport check_local_global(const ProblemInstance& inst);

// Given corners a, b with f(a) > f(b) + kTieTolerance (PreconditionUnmet
// otherwise), finds a differing coordinate whose single flip from a towards b
// strictly decreases f (by more than 1e-12, the dense-solve noise floor).
// nullopt means the descending-coordinate property failed — a counterexample.
std::optional<std::uint32_t> descending_coordinate_witness(
    const ProblemInstance& inst, std::uint32_t mask_a, std::uint32_t mask_b);

// Evaluates the switching property on the four corners that agree with
// base_mask outside {i, k}: writing faa = f(a_i, a_k) etc., if
// min{faa, fbb} < min{fab, fba} - kTieTolerance (premise with margin), then
// max{faa, fbb} must exceed min{fab, fba} - 1e-12. Premise-false samples are
// vacuously fine.
struct SwitchingSample {
  bool premise = false;
  bool holds = true;
  double faa = 0.0, fbb = 0.0, fab = 0.0, fba = 0.0;
};

SwitchingSample check_switching(const ProblemInstance& inst,
                                std::uint32_t base_mask, std::uint32_t i,
                                std::uint32_t k);

// Centered finite difference of the objective along coordinate i at an
// interior point (delta = 1e-7 keeps alpha +/- delta inside (0,1) for the
// sampled ranges).
double finite_difference_derivative(
    const ProblemInstance& inst, const std::vector<double>& alpha,
    std::uint32_t i, double delta = 1e-7,
    std::uint32_t dense_limit = kDefaultDenseLimit);

}  // namespace steer
