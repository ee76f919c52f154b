#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "instance.hpp"

namespace steer {

// Heuristics for the budgeted variant: pick at most k agents, set each chosen
// agent's resistance to one of its bounds, leave everyone else at alpha0.
//   MarginalGreedy: evaluates every remaining candidate per round with a full
//     certified solve restricted to the chosen set plus the candidate.
//   BatchGradientGreedy: ranks candidates by certified derivative-step bounds
//     and commits batches once the bounds separate.
//   RandomBaseline: selection-only ablation — random agents, each set to the
//     bound preferred by its derivative sign at the current equilibrium.
enum class BudgetStrategy { MarginalGreedy, BatchGradientGreedy, RandomBaseline };

const char* budget_strategy_name(BudgetStrategy s);
std::optional<BudgetStrategy> budget_strategy_from_name(const std::string& name);

struct BudgetConfig {
  BudgetStrategy strategy = BudgetStrategy::BatchGradientGreedy;
  std::uint32_t k = 1;
  // batch >= 1 is an absolute batch size; batch < 1 is a fraction of k,
  // rounded up. Only BatchGradientGreedy consumes it.
  double batch = 1.0;
  int threads = 1;
  std::uint64_t seed = 0;
  double perturb_magnitude = 1e-9;
  std::uint64_t iteration_cap = 0;  // per certification phase; 0 -> formula
  bool record_sweep = true;
};

std::uint32_t resolve_batch_size(double batch, std::uint32_t k);

// One selection-progress sample: fraction of agents chosen so far and the
// certified average equilibrium opinion at that point.
struct SweepRow {
  double ratio_selected = 0.0;
  double avg_equilibrium = 0.0;
};

struct BudgetedResult {
  std::vector<double> alpha;
  std::vector<std::uint8_t> selected;
  std::vector<std::uint8_t> flipped;  // alpha_i differs from alpha0_i
  double objective = 0.0;
  double objective_err = 0.0;   // n * err(t) at the final certification
  std::uint64_t iterations = 0;  // accepted-path iterations (probes excluded)
  std::uint64_t mistakes = 0;    // corrective flips along the accepted path
  bool stalled = false;          // BGG committed a batch without separation
  std::vector<SweepRow> sweep;
  double wall_seconds = 0.0;
};

BudgetedResult solve_budgeted(const ProblemInstance& inst,
                              const BudgetConfig& cfg);

// Budgeted result file: unbudgeted shape plus a selected column and a second
// footer line `k <k> strategy <name> stalled <0|1>`.
void write_budgeted_result_file(const BudgetedResult& result, std::uint32_t k,
                                BudgetStrategy strategy,
                                const std::string& path);

// Sweep CSV: `ratio_selected,avg_equilibrium,strategy,seed`, one block per
// run; the CLI concatenates runs across seeds into one file.
struct SweepCsvBlock {
  std::vector<SweepRow> rows;
  std::string strategy;
  std::uint64_t seed = 0;
};

void write_sweep_csv(const std::vector<SweepCsvBlock>& blocks,
                     const std::string& path);

}  // namespace steer
