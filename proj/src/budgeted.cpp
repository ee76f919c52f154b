#include "budgeted.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "errors.hpp"
#include "io_util.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace steer {

namespace {

constexpr std::uint8_t kAtLower = 0;
constexpr std::uint8_t kAtUpper = 1;
constexpr std::uint8_t kInterior = 2;

double vector_sum(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum;
}

struct LoopStats {
  std::uint64_t iterations = 0;
  std::uint64_t mistakes = 0;  // corrective flips back to the upper bound
};

struct ScanOut {
  bool any_unresolved = false;
  std::uint64_t to_lower = 0;
  std::uint64_t to_upper = 0;
};

// Fused pass over the current iterate: the loop-continuation test (any gap
// still inside err + guard) plus, when flips are allowed, raw-comparison flip
// marking for every coordinate that sits at a bound. Interior coordinates
// (not part of the chosen set) never flip.
ScanOut scan_round(const std::vector<double>& s, const std::vector<double>& z,
                   double err_guarded, bool allow_flips,
                   const std::vector<std::uint8_t>& state,
                   std::vector<std::uint8_t>& action, ThreadPool& pool) {
  std::atomic<std::uint32_t> unresolved{0};
  std::atomic<std::uint64_t> lower{0};
  std::atomic<std::uint64_t> upper{0};
  pool.for_range(s.size(), [&](std::size_t begin, std::size_t end) {
    bool open = false;
    std::uint64_t to_l = 0;
    std::uint64_t to_u = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double gap = s[i] - z[i];
      if (std::abs(gap) <= err_guarded) open = true;
      if (!allow_flips) continue;
      if (state[i] == kAtUpper && z[i] <= s[i]) {
        action[i] = 1;
        ++to_l;
      } else if (state[i] == kAtLower && z[i] > s[i]) {
        action[i] = 2;
        ++to_u;
      } else {
        action[i] = 0;
      }
    }
    if (open) unresolved.store(1, std::memory_order_relaxed);
    if (to_l) lower.fetch_add(to_l, std::memory_order_relaxed);
    if (to_u) upper.fetch_add(to_u, std::memory_order_relaxed);
  });
  return {unresolved.load() != 0, lower.load(), upper.load()};
}

// Certified optimistic loop restricted to the coordinates that carry a bound
// state. Steps z (and r when dest is given) until every gap |s_i - z_i|
// clears err(t) by the settle guard; flips fire on raw comparisons, reset the
// certificate clock, and keep the iterate. The caller must have started est
// (and dest). Interior coordinates are never moved.
LoopStats run_certified(const InteractionMatrix& m, const std::vector<double>& s,
                        const ProblemInstance& inst, ResistanceVector& alpha,
                        std::vector<std::uint8_t>& state, bool allow_flips,
                        EquilibriumEstimate& est, DerivativeEstimate* dest,
                        std::uint64_t cap_override, ThreadPool& pool) {
  const std::uint32_t n = inst.n();
  LoopStats stats;
  std::vector<std::uint8_t> action(allow_flips ? n : 0, 0);
  bool pending = true;  // err(0) = 1/eps > 1 bounds every gap
  while (pending) {
    const std::uint64_t cap =
        cap_override ? cap_override : phase_iteration_cap(est.eps);
    if (est.t >= cap) {
      fail(ErrorCode::IterationBudgetExceeded,
           "budgeted certification exceeded iteration cap " +
               std::to_string(cap) +
               " (eps_alpha = " + format_double(est.eps) + ")");
    }
    if (dest != nullptr) dest->step(m, alpha.values(), pool);
    est.step(m, alpha.values(), s, pool);
    ++stats.iterations;

    const ScanOut scan = scan_round(s, est.z, est.err + kSettleGuard,
                                    allow_flips, state, action, pool);
    if (scan.to_lower + scan.to_upper > 0) {
      for (std::uint32_t i = 0; i < n; ++i) {
        if (action[i] == 1) {
          alpha.set(i, inst.lower()[i]);
          state[i] = kAtLower;
        } else if (action[i] == 2) {
          alpha.set(i, inst.upper()[i]);
          state[i] = kAtUpper;
        }
      }
      stats.mistakes += scan.to_upper;
      est.reset_phase(alpha.eps());
      if (dest != nullptr) dest->reset_phase(alpha.eps());
      pending = true;  // err was re-armed above 1
    } else {
      // Certificate floor: gaps still inside the guard once err itself is
      // below it are ties at working precision; they keep their bound.
      pending = scan.any_unresolved && est.err > kSettleGuard;
    }
  }
  return stats;
}

void push_sweep(BudgetedResult& result, bool record, std::uint32_t n,
                std::uint32_t chosen, double objective) {
  if (!record) return;
  result.sweep.push_back({static_cast<double>(chosen) / n, objective / n});
}

// Per-round exhaustive candidate scoring: every unchosen agent is probed with
// a fresh certified solve in which the chosen set plus the candidate (pinned
// to its upper bound first) may flip freely. Probes run in parallel across
// candidates; the winner's probe is re-run on the main state, which
// reproduces it exactly because probes start from the identical snapshot.
BudgetedResult marginal_greedy(const ProblemInstance& inst,
                               const BudgetConfig& cfg, ThreadPool& pool) {
  const std::uint32_t n = inst.n();
  const InteractionMatrix& m = inst.matrix();
  const std::vector<double> s =
      perturb_innate(inst.s(), cfg.perturb_magnitude, cfg.seed);

  ResistanceVector alpha(inst.alpha0());
  std::vector<std::uint8_t> state(n, kInterior);
  std::vector<std::uint8_t> selected(n, 0);

  BudgetedResult result;
  ThreadPool probe_pool(1);  // probes already occupy the main pool's workers

  EquilibriumEstimate est;
  if (cfg.record_sweep) {
    est.start(n, 1.0, alpha.eps());
    const LoopStats stats = run_certified(m, s, inst, alpha, state, true, est,
                                          nullptr, cfg.iteration_cap, pool);
    result.iterations += stats.iterations;
    push_sweep(result, true, n, 0, vector_sum(est.z));
  }

  std::vector<std::uint32_t> candidates;
  candidates.reserve(n);
  std::vector<double> probe_value(n);
  std::vector<std::exception_ptr> probe_error(n);

  for (std::uint32_t round = 1; round <= cfg.k; ++round) {
    candidates.clear();
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!selected[i]) candidates.push_back(i);
    }

    const std::vector<double>& alpha_now = alpha.values();
    pool.for_items(candidates.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        const std::uint32_t v = candidates[c];
        try {
          std::vector<double> probe_alpha = alpha_now;
          probe_alpha[v] = inst.upper()[v];
          ResistanceVector a(std::move(probe_alpha));
          std::vector<std::uint8_t> probe_state = state;
          probe_state[v] = kAtUpper;
          EquilibriumEstimate probe_est;
          probe_est.start(n, 1.0, a.eps());
          run_certified(m, s, inst, a, probe_state, true, probe_est, nullptr,
                        cfg.iteration_cap, probe_pool);
          probe_value[v] = vector_sum(probe_est.z);
        } catch (...) {
          probe_error[v] = std::current_exception();
        }
      }
    });

    std::uint32_t best = candidates.front();
    for (const std::uint32_t v : candidates) {
      if (probe_error[v]) std::rethrow_exception(probe_error[v]);
      if (probe_value[v] < probe_value[best]) best = v;
    }

    // Re-run the winner on the main state: same snapshot, same loop, so the
    // accepted path replays the winning probe bit for bit.
    alpha.set(best, inst.upper()[best]);
    state[best] = kAtUpper;
    selected[best] = 1;
    est.start(n, 1.0, alpha.eps());
    const LoopStats stats = run_certified(m, s, inst, alpha, state, true, est,
                                          nullptr, cfg.iteration_cap, pool);
    result.iterations += stats.iterations;
    result.mistakes += stats.mistakes;
    push_sweep(result, cfg.record_sweep, n, round, vector_sum(est.z));
  }

  result.objective = vector_sum(est.z);
  result.objective_err = static_cast<double>(n) * est.err;
  result.alpha = alpha.values();
  result.selected = std::move(selected);
  return result;
}

struct CandidateBound {
  std::uint32_t index = 0;
  double lower = 0.0;  // certified lower bound on the drop from flipping
  double upper = 0.0;  // certified upper bound on the same drop
};

// Batched selection by certified derivative-step bounds: each round co-iterates
// z and r from scratch, lets previously chosen agents repair their side via
// the optimistic rule, then ranks unchosen agents by the certified lower bound
// of their one-flip objective drop. The batch commits once the certified upper
// bound of every rejected candidate falls below the lowest certified bound
// inside the batch; until then the round spends extra co-iterations tightening
// the certificates. If the cap arrives first the ranking is committed as-is
// and the result is flagged stalled.
BudgetedResult batch_gradient_greedy(const ProblemInstance& inst,
                                     const BudgetConfig& cfg,
                                     ThreadPool& pool) {
  const std::uint32_t n = inst.n();
  const InteractionMatrix& m = inst.matrix();
  const std::vector<double> s =
      perturb_innate(inst.s(), cfg.perturb_magnitude, cfg.seed);
  const std::uint32_t batch = resolve_batch_size(cfg.batch, cfg.k);

  ResistanceVector alpha(inst.alpha0());
  std::vector<std::uint8_t> state(n, kInterior);
  std::vector<std::uint8_t> selected(n, 0);
  std::uint32_t chosen = 0;

  BudgetedResult result;
  EquilibriumEstimate est;
  DerivativeEstimate dest;
  std::vector<CandidateBound> ranked;
  ranked.reserve(n);

  while (chosen < cfg.k) {
    est.start(n, 1.0, alpha.eps());
    dest.start(n, alpha.eps());
    const LoopStats stats = run_certified(m, s, inst, alpha, state, true, est,
                                          &dest, cfg.iteration_cap, pool);
    result.iterations += stats.iterations;
    result.mistakes += stats.mistakes;
    push_sweep(result, cfg.record_sweep, n, chosen, vector_sum(est.z));

    const std::uint32_t take = std::min(batch, cfg.k - chosen);
    bool committed = false;
    while (!committed) {
      // Certified enclosure of the objective drop a single flip of agent i
      // would buy: the sign of s_i - z_i picks the bound it would move to,
      // |s_i - z_i| r_i / (1 - alpha_i) is the derivative magnitude, and the
      // certificates err(t) (coordinate-wise on z, n*err(t) mass-wise on r)
      // widen it on both sides. The lower end is clamped at zero: a flip
      // never hurts less than not flipping in this ranking.
      ranked.clear();
      const double nerr = static_cast<double>(n) * est.err;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (selected[i]) continue;
        const double gap = s[i] - est.z[i];
        const double agap = std::abs(gap);
        const double span =
            gap >= 0.0 ? alpha[i] - inst.lower()[i] : inst.upper()[i] - alpha[i];
        const double scale = span / (1.0 - alpha[i]);
        const double hi = (dest.r[i] + nerr) * (agap + est.err) * scale;
        const double lo =
            std::max(0.0, (dest.r[i] - nerr) * (agap - est.err) * scale);
        ranked.push_back({i, lo, hi});
      }
      std::sort(ranked.begin(), ranked.end(),
                [](const CandidateBound& a, const CandidateBound& b) {
                  if (a.lower != b.lower) return a.lower > b.lower;
                  return a.index < b.index;
                });

      double weakest_taken = std::numeric_limits<double>::infinity();
      for (std::uint32_t j = 0; j < take; ++j) {
        weakest_taken = std::min(weakest_taken, ranked[j].lower);
      }
      double strongest_rest = -std::numeric_limits<double>::infinity();
      for (std::size_t j = take; j < ranked.size(); ++j) {
        strongest_rest = std::max(strongest_rest, ranked[j].upper);
      }

      if (strongest_rest <= weakest_taken) {
        committed = true;
      } else {
        const std::uint64_t cap = cfg.iteration_cap ? cfg.iteration_cap
                                                    : phase_iteration_cap(est.eps);
        if (est.t >= cap) {
          result.stalled = true;  // commit the ranking without separation
          committed = true;
        } else {
          dest.step(m, alpha.values(), pool);
          est.step(m, alpha.values(), s, pool);
          ++result.iterations;
        }
      }
    }

    for (std::uint32_t j = 0; j < take; ++j) {
      const std::uint32_t i = ranked[j].index;
      // Post-certification every gap clears err(t), so the sign is earned.
      if (s[i] >= est.z[i]) {
        alpha.set(i, inst.lower()[i]);
        state[i] = kAtLower;
      } else {
        alpha.set(i, inst.upper()[i]);
        state[i] = kAtUpper;
      }
      selected[i] = 1;
    }
    chosen += take;
  }

  // Final certification without r: lets the chosen set settle under the
  // optimistic rule and prices the result.
  est.start(n, 1.0, alpha.eps());
  const LoopStats stats = run_certified(m, s, inst, alpha, state, true, est,
                                        nullptr, cfg.iteration_cap, pool);
  result.iterations += stats.iterations;
  result.mistakes += stats.mistakes;
  push_sweep(result, cfg.record_sweep, n, chosen, vector_sum(est.z));

  result.objective = vector_sum(est.z);
  result.objective_err = static_cast<double>(n) * est.err;
  result.alpha = alpha.values();
  result.selected = std::move(selected);
  return result;
}

// Selection-only ablation: agents are drawn uniformly without replacement;
// each drawn agent is pinned to the bound its certified derivative sign
// prefers and never revisited.
BudgetedResult random_baseline(const ProblemInstance& inst,
                               const BudgetConfig& cfg, ThreadPool& pool) {
  const std::uint32_t n = inst.n();
  const InteractionMatrix& m = inst.matrix();
  const std::vector<double> s =
      perturb_innate(inst.s(), cfg.perturb_magnitude, cfg.seed);

  ResistanceVector alpha(inst.alpha0());
  std::vector<std::uint8_t> state(n, kInterior);
  std::vector<std::uint8_t> selected(n, 0);
  Rng rng(cfg.seed, Stream::BaselineChoice);

  BudgetedResult result;
  EquilibriumEstimate est;
  est.start(n, 1.0, alpha.eps());
  result.iterations += run_certified(m, s, inst, alpha, state, false, est,
                                     nullptr, cfg.iteration_cap, pool)
                           .iterations;
  push_sweep(result, cfg.record_sweep, n, 0, vector_sum(est.z));

  std::vector<std::uint32_t> remaining(n);
  for (std::uint32_t i = 0; i < n; ++i) remaining[i] = i;

  for (std::uint32_t round = 1; round <= cfg.k; ++round) {
    const std::size_t pick = static_cast<std::size_t>(rng.below(remaining.size()));
    const std::uint32_t v = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));

    if (s[v] >= est.z[v]) {
      alpha.set(v, inst.lower()[v]);
      state[v] = kAtLower;
    } else {
      alpha.set(v, inst.upper()[v]);
      state[v] = kAtUpper;
    }
    selected[v] = 1;

    est.start(n, 1.0, alpha.eps());
    result.iterations += run_certified(m, s, inst, alpha, state, false, est,
                                       nullptr, cfg.iteration_cap, pool)
                             .iterations;
    push_sweep(result, cfg.record_sweep, n, round, vector_sum(est.z));
  }

  result.objective = vector_sum(est.z);
  result.objective_err = static_cast<double>(n) * est.err;
  result.alpha = alpha.values();
  result.selected = std::move(selected);
  return result;
}

}  // namespace

const char* budget_strategy_name(BudgetStrategy s) {
  switch (s) {
    case BudgetStrategy::MarginalGreedy:
      return "marginal";
    case BudgetStrategy::BatchGradientGreedy:
      return "bgg";
    case BudgetStrategy::RandomBaseline:
      return "random";
  }
  return "unknown";
}

std::optional<BudgetStrategy> budget_strategy_from_name(const std::string& name) {
  if (name == "marginal") return BudgetStrategy::MarginalGreedy;
  if (name == "bgg") return BudgetStrategy::BatchGradientGreedy;
  if (name == "random") return BudgetStrategy::RandomBaseline;
  return std::nullopt;
}

std::uint32_t resolve_batch_size(double batch, std::uint32_t k) {
  if (!(batch > 0.0) || !std::isfinite(batch)) {
    fail(ErrorCode::InvalidArgument,
         "batch must be positive and finite, got " + format_double(batch));
  }
  double b;
  if (batch < 1.0) {
    b = std::ceil(batch * static_cast<double>(k));
  } else {
    b = std::floor(batch);
  }
  b = std::max(1.0, std::min(b, static_cast<double>(k)));
  return static_cast<std::uint32_t>(b);
}

BudgetedResult solve_budgeted(const ProblemInstance& inst,
                              const BudgetConfig& cfg) {
  if (!inst.has_alpha0()) {
    fail(ErrorCode::PreconditionUnmet,
         "budgeted solve requires an instance with alpha0");
  }
  if (cfg.k < 1 || cfg.k > inst.n()) {
    fail(ErrorCode::InvalidArgument,
         "budget k must lie in [1, n], got " + std::to_string(cfg.k));
  }
  const auto start = std::chrono::steady_clock::now();
  ThreadPool pool(cfg.threads);
  BudgetedResult result;
  switch (cfg.strategy) {
    case BudgetStrategy::MarginalGreedy:
      result = marginal_greedy(inst, cfg, pool);
      break;
    case BudgetStrategy::BatchGradientGreedy:
      result = batch_gradient_greedy(inst, cfg, pool);
      break;
    case BudgetStrategy::RandomBaseline:
      result = random_baseline(inst, cfg, pool);
      break;
  }
  const std::uint32_t n = inst.n();
  result.flipped.assign(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    result.flipped[i] = result.alpha[i] != inst.alpha0()[i];
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

void write_budgeted_result_file(const BudgetedResult& result, std::uint32_t k,
                                BudgetStrategy strategy,
                                const std::string& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.alpha.size(); ++i) {
    out << i << ' ' << format_double(result.alpha[i]) << ' '
        << int(result.flipped[i]) << ' ' << int(result.selected[i]) << '\n';
  }
  out << "objective " << format_double(result.objective) << " err "
      << format_double(result.objective_err) << " iters " << result.iterations
      << " mistakes " << result.mistakes << '\n';
  out << "k " << k << " strategy " << budget_strategy_name(strategy)
      << " stalled " << (result.stalled ? 1 : 0) << '\n';
  write_text_file(path, out.str());
}

void write_sweep_csv(const std::vector<SweepCsvBlock>& blocks,
                     const std::string& path) {
  std::ostringstream out;
  out << "ratio_selected,avg_equilibrium,strategy,seed\n";
  char buf[64];
  for (const SweepCsvBlock& block : blocks) {
    for (const SweepRow& row : block.rows) {
      std::snprintf(buf, sizeof buf, "%.9g", row.ratio_selected);
      out << buf << ',';
      out << format_double(row.avg_equilibrium) << ',' << block.strategy << ','
          << block.seed << '\n';
    }
  }
  write_text_file(path, out.str());
}

}  // namespace steer
