#include "unbudgeted.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "io_util.hpp"

namespace steer {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Conservative: return "conservative";
    case Strategy::Opportunistic: return "opportunistic";
    case Strategy::Optimistic: return "optimistic";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  if (name == "conservative") return Strategy::Conservative;
  if (name == "opportunistic") return Strategy::Opportunistic;
  if (name == "optimistic") return Strategy::Optimistic;
  return std::nullopt;
}

namespace {

// Sampling rule: every iteration while the global count is below 1e6, every
// 100th afterwards.
void record_trace(SolveTrace* trace, std::uint64_t iter, double ratio,
                  std::uint32_t phase) {
  if (!trace) return;
  if (iter >= 1000000 && iter % 100 != 0) return;
  trace->rows.push_back({iter, ratio, phase});
}

struct CertifiedScan {
  bool settled = false;
  std::uint64_t newly_certified = 0;
};

// One pass: does any coordinate still sit within err of its innate opinion,
// and which upper-bound coordinates became certified flippable? Certification
// is sticky — the sign of s_i - z_i(alpha) is permanent once resolved — so
// marks only ever turn on, which keeps the pass safe to parallelize and the
// traced ratio non-decreasing.
CertifiedScan scan_certified(const std::vector<double>& s,
                             const std::vector<double>& z, double err_guarded,
                             const std::vector<std::uint8_t>& at_upper,
                             std::vector<std::uint8_t>& certified,
                             ThreadPool& pool) {
  std::atomic<std::uint32_t> any_close{0};
  std::atomic<std::uint64_t> marked{0};
  pool.for_range(s.size(), [&](std::size_t begin, std::size_t end) {
    bool close = false;
    std::uint64_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double gap = s[i] - z[i];
      if (std::abs(gap) <= err_guarded) {
        close = true;
      } else if (gap > err_guarded && at_upper[i] && !certified[i]) {
        certified[i] = 1;
        ++local;
      }
    }
    if (close) any_close.store(1, std::memory_order_relaxed);
    if (local) marked.fetch_add(local, std::memory_order_relaxed);
  });
  return {any_close.load() == 0, marked.load()};
}

struct FlipScan {
  bool any_close = false;
  std::uint64_t to_lower = 0;
  std::uint64_t to_upper = 0;
};

// Optimistic pass: raw-comparison flip marking (no certificates) fused with
// the loop condition for the next round. action: 0 keep, 1 -> lower bound,
// 2 -> upper bound.
FlipScan scan_flips(const std::vector<double>& s, const std::vector<double>& z,
                    double err_guarded,
                    const std::vector<std::uint8_t>& at_upper,
                    std::vector<std::uint8_t>& action, ThreadPool& pool) {
  std::atomic<std::uint32_t> any_close{0};
  std::atomic<std::uint64_t> lower{0};
  std::atomic<std::uint64_t> upper{0};
  pool.for_range(s.size(), [&](std::size_t begin, std::size_t end) {
    bool close = false;
    std::uint64_t to_l = 0;
    std::uint64_t to_u = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double gap = s[i] - z[i];
      if (std::abs(gap) <= err_guarded) close = true;
      if (at_upper[i] && z[i] <= s[i]) {
        action[i] = 1;
        ++to_l;
      } else if (!at_upper[i] && z[i] > s[i]) {
        action[i] = 2;
        ++to_u;
      } else {
        action[i] = 0;
      }
    }
    if (close) any_close.store(1, std::memory_order_relaxed);
    if (to_l) lower.fetch_add(to_l, std::memory_order_relaxed);
    if (to_u) upper.fetch_add(to_u, std::memory_order_relaxed);
  });
  return {any_close.load() != 0, lower.load(), upper.load()};
}

SolveResult run_certified_strategy(const ProblemInstance& inst,
                                   const SolverConfig& cfg, ThreadPool& pool) {
  const std::uint32_t n = inst.n();
  const InteractionMatrix& m = inst.matrix();
  const std::vector<double> s =
      perturb_innate(inst.s(), cfg.perturb_magnitude, cfg.seed);

  ResistanceVector alpha = ResistanceVector::at_upper(inst);
  std::vector<std::uint8_t> at_upper(n, 1);
  std::vector<std::uint8_t> certified(n, 0);

  SolveResult result;
  result.flip_count.assign(n, 0);
  SolveTrace* trace = cfg.record_trace ? &result.trace : nullptr;

  EquilibriumEstimate est;
  est.start(n, 1.0, alpha.eps());

  std::uint64_t iters = 0;
  std::uint64_t certified_count = 0;
  std::uint64_t flipped_count = 0;
  std::uint32_t phase = 0;

  for (;;) {
    const std::uint64_t cap =
        cfg.iteration_cap ? cfg.iteration_cap : phase_iteration_cap(est.eps);
    const bool opportunistic_phase =
        cfg.strategy == Strategy::Opportunistic && phase >= 1 &&
        phase <= cfg.opportunistic_phase_limit;

    std::uint64_t window_prev = 0;  // |L| at the last window boundary
    double max_slope = 0.0;

    for (;;) {
      if (est.t >= cap) {
        fail(ErrorCode::IterationBudgetExceeded,
             "phase " + std::to_string(phase) + " exceeded iteration cap " +
                 std::to_string(cap) + " (eps_alpha = " + format_double(est.eps) +
                 ")");
      }
      est.step(m, alpha.values(), s, pool);
      ++iters;

      // While err(t) + guard >= 1 no gap can clear it and no mark can fire
      // (both s and z live in [0,1]); skip the scan until it can matter.
      const double err_guarded = est.err + kSettleGuard;
      CertifiedScan scan;
      if (err_guarded < 1.0) {
        scan = scan_certified(s, est.z, err_guarded, at_upper, certified, pool);
        certified_count += scan.newly_certified;
      }
      record_trace(trace, iters,
                   static_cast<double>(flipped_count + certified_count) / n,
                   phase);
      if (scan.settled) break;
      // Certificate floor: once err is below the settle guard no further gap
      // can ever resolve. Anything still open is a genuine tie at working
      // precision (an exactly balanced coordinate whose perturbed gap is
      // attenuated below the guard); it keeps its current bound, where either
      // choice moves the objective by less than the certified error.
      if (est.err <= kSettleGuard) break;
      if (opportunistic_phase && cfg.slope_window > 0 &&
          est.t % cfg.slope_window == 0) {
        const double slope =
            static_cast<double>(certified_count - window_prev) /
            static_cast<double>(cfg.slope_window);
        window_prev = certified_count;
        if (slope > max_slope) {
          max_slope = slope;
        } else if (certified_count > 0 &&
                   slope < cfg.slope_factor * max_slope) {
          break;  // certification rate collapsed; commit what is certified
        }
      }
    }

    if (certified_count == 0) break;  // nothing left to flip: minimum reached

    for (std::uint32_t i = 0; i < n; ++i) {
      if (certified[i]) {
        alpha.set(i, inst.lower()[i]);
        at_upper[i] = 0;
        certified[i] = 0;
        ++result.flip_count[i];
      }
    }
    flipped_count += certified_count;
    certified_count = 0;
    ++phase;
    est.reset_phase(alpha.eps());
  }

  result.alpha = alpha.values();
  result.flipped.assign(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) result.flipped[i] = !at_upper[i];
  double sum = 0.0;
  for (double v : est.z) sum += v;
  result.objective = sum;
  result.objective_err = static_cast<double>(n) * est.err;
  result.iterations = iters;
  result.phases = phase;
  return result;
}

SolveResult run_optimistic(const ProblemInstance& inst, const SolverConfig& cfg,
                           ThreadPool& pool) {
  const std::uint32_t n = inst.n();
  const InteractionMatrix& m = inst.matrix();
  const std::vector<double> s =
      perturb_innate(inst.s(), cfg.perturb_magnitude, cfg.seed);

  ResistanceVector alpha = ResistanceVector::at_upper(inst);
  std::vector<std::uint8_t> at_upper(n, 1);
  std::vector<std::uint8_t> action(n, 0);

  SolveResult result;
  result.flip_count.assign(n, 0);
  SolveTrace* trace = cfg.record_trace ? &result.trace : nullptr;

  EquilibriumEstimate est;
  est.start(n, 1.0, alpha.eps());

  std::uint64_t iters = 0;
  std::uint64_t at_lower_count = 0;
  std::uint32_t phase = 0;
  bool pending_close = true;  // err(0) = 1/eps > 1 bounds every gap

  while (pending_close) {
    const std::uint64_t cap =
        cfg.iteration_cap ? cfg.iteration_cap : phase_iteration_cap(est.eps);
    if (est.t >= cap) {
      fail(ErrorCode::IterationBudgetExceeded,
           "optimistic solve exceeded iteration cap " + std::to_string(cap) +
               " (eps_alpha = " + format_double(est.eps) + ")");
    }
    est.step(m, alpha.values(), s, pool);
    ++iters;

    const FlipScan scan =
        scan_flips(s, est.z, est.err + kSettleGuard, at_upper, action, pool);
    if (scan.to_lower + scan.to_upper > 0) {
      for (std::uint32_t i = 0; i < n; ++i) {
        if (action[i] == 1) {
          alpha.set(i, inst.lower()[i]);
          at_upper[i] = 0;
          ++result.flip_count[i];
        } else if (action[i] == 2) {
          alpha.set(i, inst.upper()[i]);
          at_upper[i] = 1;
          ++result.flip_count[i];
        }
      }
      at_lower_count += scan.to_lower;
      at_lower_count -= scan.to_upper;
      result.mistakes += scan.to_upper;
      ++phase;
      est.reset_phase(alpha.eps());
      pending_close = true;  // err was re-armed above 1
    } else {
      // Certificate floor (see run_certified_strategy): gaps still inside the
      // guard once err itself is below it are ties at working precision; the
      // raw comparison has already left them at their preferred bound.
      pending_close = scan.any_close && est.err > kSettleGuard;
    }
    record_trace(trace, iters, static_cast<double>(at_lower_count) / n, phase);
  }

  result.alpha = alpha.values();
  result.flipped.assign(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) result.flipped[i] = !at_upper[i];
  double sum = 0.0;
  for (double v : est.z) sum += v;
  result.objective = sum;
  result.objective_err = static_cast<double>(n) * est.err;
  result.iterations = iters;
  result.phases = phase;
  return result;
}

}  // namespace

SolveResult solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ThreadPool pool(cfg.threads);
  SolveResult result;
  switch (cfg.strategy) {
    case Strategy::Conservative:
    case Strategy::Opportunistic:
      result = run_certified_strategy(inst, cfg, pool);
      break;
    case Strategy::Optimistic:
      result = run_optimistic(inst, cfg, pool);
      break;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

OptimalityReport verify_local_optimality(const ProblemInstance& inst,
                                         const std::vector<double>& alpha,
                                         const std::vector<std::uint32_t>& coords,
                                         ThreadPool& pool,
                                         std::uint32_t dense_limit, double tol,
                                         double spot_coord_tol) {
  const std::uint32_t n = inst.n();
  if (alpha.size() != n) {
    fail(ErrorCode::DimensionMismatch, "alpha size does not match instance");
  }
  std::vector<std::uint32_t> all;
  if (coords.empty()) {
    all.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
  }
  const std::vector<std::uint32_t>& check = coords.empty() ? all : coords;

  for (std::uint32_t i : check) {
    if (i >= n) {
      fail(ErrorCode::InvalidArgument,
           "coordinate " + std::to_string(i) + " out of range");
    }
    if (alpha[i] != inst.lower()[i] && alpha[i] != inst.upper()[i]) {
      fail(ErrorCode::PreconditionUnmet,
           "coordinate " + std::to_string(i) +
               " is not at a bound; optimality audit is defined on corners");
    }
  }

  OptimalityReport report;
  const bool dense = n <= dense_limit;

  double base_value = 0.0;
  double base_err = 0.0;
  if (dense) {
    base_value = objective_exact(inst.matrix(), inst.s(), alpha, dense_limit);
  } else {
    const IterativeObjective base = objective_iterative(
        inst.matrix(), inst.s(), alpha, spot_coord_tol, pool);
    base_value = base.value;
    base_err = base.err;
  }
  report.base_objective = base_value;

  std::vector<double> flipped = alpha;
  for (std::uint32_t i : check) {
    const double original = flipped[i];
    flipped[i] =
        original == inst.lower()[i] ? inst.upper()[i] : inst.lower()[i];
    if (dense) {
      const double f_flip =
          objective_exact(inst.matrix(), inst.s(), flipped, dense_limit);
      if (f_flip < base_value - tol) report.violators.push_back(i);
    } else {
      const IterativeObjective f_flip = objective_iterative(
          inst.matrix(), inst.s(), flipped, spot_coord_tol, pool);
      const double improvement_lb =
          (base_value - base_err) - (f_flip.value + f_flip.err);
      const double improvement_ub =
          (base_value + base_err) - (f_flip.value - f_flip.err);
      if (improvement_lb > tol) {
        report.violators.push_back(i);
      } else if (improvement_ub > tol) {
        report.inconclusive.push_back(i);
      }
    }
    flipped[i] = original;
  }
  return report;
}

void write_result_file(const SolveResult& result, const std::string& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.alpha.size(); ++i) {
    out << i << ' ' << format_double(result.alpha[i]) << ' '
        << (result.flipped[i] ? 1 : 0) << '\n';
  }
  out << "objective " << format_double(result.objective) << " err "
      << format_double(result.objective_err) << " iters " << result.iterations
      << " mistakes " << result.mistakes << '\n';
  write_text_file(path, out.str());
}

ResultFile read_result_file(const std::string& path) {
  const std::string text = read_text_file(path);
  ResultFile out;
  bool saw_objective = false;
  bool saw_budget = false;
  std::uint64_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line =
        strip_cr(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields[0] == "objective") {
      if (fields.size() != 8 || fields[2] != "err" || fields[4] != "iters" ||
          fields[6] != "mistakes") {
        fail(ErrorCode::Parse, path + ": malformed objective footer (line " +
                                   std::to_string(line_no) + ")");
      }
      out.objective = parse_double(fields[1], path, line_no);
      out.objective_err = parse_double(fields[3], path, line_no);
      out.iterations = parse_u64(fields[5], path, line_no);
      out.mistakes = parse_u64(fields[7], path, line_no);
      saw_objective = true;
      continue;
    }
    if (fields[0] == "k") {
      if (fields.size() != 6 || fields[2] != "strategy" ||
          fields[4] != "stalled") {
        fail(ErrorCode::Parse, path + ": malformed budget footer (line " +
                                   std::to_string(line_no) + ")");
      }
      out.k = static_cast<std::uint32_t>(parse_u64(fields[1], path, line_no));
      out.strategy = std::string(fields[3]);
      out.stalled = parse_u64(fields[5], path, line_no) != 0;
      saw_budget = true;
      continue;
    }
    if (saw_objective) {
      fail(ErrorCode::Parse,
           path + ": agent line after footer (line " + std::to_string(line_no) +
               ")");
    }
    if (fields.size() != 3 && fields.size() != 4) {
      fail(ErrorCode::Parse, path + ": expected 'i alpha flipped [selected]' " +
                                 "(line " + std::to_string(line_no) + ")");
    }
    const std::uint64_t idx = parse_u64(fields[0], path, line_no);
    if (idx != out.alpha.size()) {
      fail(ErrorCode::Parse, path + ": agent index " + std::to_string(idx) +
                                 " out of order (line " +
                                 std::to_string(line_no) + ")");
    }
    out.alpha.push_back(parse_double(fields[1], path, line_no));
    out.flipped.push_back(parse_u64(fields[2], path, line_no) != 0);
    if (fields.size() == 4) {
      out.selected.push_back(parse_u64(fields[3], path, line_no) != 0);
    } else if (!out.selected.empty()) {
      fail(ErrorCode::Parse, path + ": inconsistent column count (line " +
                                 std::to_string(line_no) + ")");
    }
  }
  if (!saw_objective || out.alpha.empty()) {
    fail(ErrorCode::Parse, path + ": missing agent lines or objective footer");
  }
  if (!out.selected.empty() &&
      (out.selected.size() != out.alpha.size() || !saw_budget)) {
    fail(ErrorCode::Parse, path + ": budgeted file requires a selected column "
                               "for every agent and a budget footer");
  }
  if (saw_budget && out.selected.empty()) {
    fail(ErrorCode::Parse, path + ": budget footer without selected column");
  }
  return out;
}

void write_trace_csv(const SolveTrace& trace, const std::string& path) {
  std::ostringstream out;
  out << "iter,ratio_lower,phase\n";
  char buf[64];
  for (const TraceRow& row : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%.9g,%u\n",
                  static_cast<unsigned long long>(row.iter), row.ratio_lower,
                  row.phase);
    out << buf;
  }
  write_text_file(path, out.str());
}

}  // namespace steer
