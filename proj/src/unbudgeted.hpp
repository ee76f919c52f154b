#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "instance.hpp"

namespace steer {

// All three strategies return the same certified global optimum; they differ
// in when they commit to flips and therefore in how many iterations they pay.
//   Conservative: flips only once every coordinate's gap clears err(t).
//   Opportunistic: conservative, but a phase may end early once the rate of
//     newly certified coordinates collapses (flips stay certificate-backed).
//   Optimistic: flips on raw comparisons every iteration and repairs the rare
//     mistake when the sign later resolves the other way.
enum class Strategy { Conservative, Opportunistic, Optimistic };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

struct SolverConfig {
  Strategy strategy = Strategy::Conservative;
  int threads = 1;                  // <= 0 selects hardware concurrency
  std::uint64_t seed = 0;           // perturbation substream
  double perturb_magnitude = 1e-9;  // 0 disables tie-breaking noise
  std::uint64_t slope_window = 1000;
  double slope_factor = 0.1;        // 0 degenerates to conservative
  std::uint32_t opportunistic_phase_limit = 6;  // phases 1..limit may end early
  std::uint64_t iteration_cap = 0;  // per phase; 0 derives from eps_alpha
  bool record_trace = true;
};

struct TraceRow {
  std::uint64_t iter;  // global iteration index (1-based)
  double ratio_lower;  // fraction at-or-certified-to the lower bound
  std::uint32_t phase;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
};

struct SolveResult {
  std::vector<double> alpha;           // every coordinate at l_i or u_i
  std::vector<std::uint8_t> flipped;   // 1 iff alpha_i ended at l_i
  std::vector<std::uint32_t> flip_count;  // per-coordinate flip totals
  double objective = 0.0;              // sum of the final iterate
  double objective_err = 0.0;          // certified bound: n * err(t) at exit
  std::uint64_t iterations = 0;        // total across phases
  std::uint32_t phases = 0;
  std::uint64_t mistakes = 0;          // optimistic corrective flips (l -> u)
  double wall_seconds = 0.0;
  SolveTrace trace;
};

SolveResult solve(const ProblemInstance& inst, const SolverConfig& cfg);

// Single-coordinate optimality audit: flipping any checked coordinate to its
// opposite bound must not improve the objective by more than tol. Coordinates
// must sit exactly at a bound (PreconditionUnmet otherwise). An empty coords
// list checks every coordinate. Beyond dense_limit the dense solve gives way
// to certified iteration with tolerance spot_coord_tol, and gaps the
// certificates cannot resolve are reported as inconclusive.
struct OptimalityReport {
  double base_objective = 0.0;
  std::vector<std::uint32_t> violators;
  std::vector<std::uint32_t> inconclusive;
  bool optimal() const { return violators.empty(); }
};

OptimalityReport verify_local_optimality(
    const ProblemInstance& inst, const std::vector<double>& alpha,
    const std::vector<std::uint32_t>& coords, ThreadPool& pool,
    std::uint32_t dense_limit = kDefaultDenseLimit, double tol = 1e-9,
    double spot_coord_tol = 1e-8);

// Result file: one `i alpha_i flipped{0|1}` line per agent, then the footer
//   objective <value> err <bound> iters <t> mistakes <j>
// Budgeted results extend both the per-agent lines (selected column) and the
// footer (see budgeted.hpp); this reader accepts either shape.
struct ResultFile {
  std::vector<double> alpha;
  std::vector<std::uint8_t> flipped;
  std::vector<std::uint8_t> selected;  // empty for unbudgeted files
  double objective = 0.0;
  double objective_err = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t mistakes = 0;
  // budgeted footer, present iff selected is non-empty
  std::uint32_t k = 0;
  std::string strategy;
  bool stalled = false;
};

void write_result_file(const SolveResult& result, const std::string& path);
ResultFile read_result_file(const std::string& path);

void write_trace_csv(const SolveTrace& trace, const std::string& path);

}  // namespace steer
