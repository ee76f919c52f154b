#include "steer/steer.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "budgeted.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "graph_matrix.hpp"
#include "instance.hpp"
#include "io_util.hpp"
#include "oracle.hpp"
#include "unbudgeted.hpp"

// Exception boundary: the C++ core signals failures with steer::Error; this
// layer converts them to negative status codes and parks the message in a
// thread-local slot for steer_last_error().

namespace {

thread_local std::string g_last_error;

steer_status set_error(steer::ErrorCode code, const std::string& message) {
  g_last_error = message;
  return static_cast<steer_status>(-static_cast<int>(code));
}

template <typename Fn>
steer_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return STEER_OK;
  } catch (const steer::Error& e) {
    return set_error(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(steer::ErrorCode::Internal, "out of memory");
  } catch (const std::exception& e) {
    return set_error(steer::ErrorCode::Internal, e.what());
  } catch (...) {
    return set_error(steer::ErrorCode::Internal, "unknown failure");
  }
}

const char* require(const char* value, const char* what) {
  if (value == nullptr) {
    steer::fail(steer::ErrorCode::InvalidArgument,
                std::string(what) + " must not be NULL");
  }
  return value;
}

std::vector<double> alpha_from(const steer_instance* inst, const double* alpha);

}  // namespace

struct steer_instance {
  steer::ProblemInstance value;
};

struct steer_result {
  steer::SolveResult value;
};

struct steer_budget_result {
  steer::BudgetedResult value;
  std::uint32_t k = 0;
  steer::BudgetStrategy strategy = steer::BudgetStrategy::BatchGradientGreedy;
};

struct steer_verify_report {
  steer::OptimalityReport value;
};

struct steer_result_file {
  steer::ResultFile value;
};

namespace {

std::vector<double> alpha_from(const steer_instance* inst, const double* alpha) {
  if (inst == nullptr) {
    steer::fail(steer::ErrorCode::InvalidArgument, "instance must not be NULL");
  }
  if (alpha == nullptr) {
    steer::fail(steer::ErrorCode::InvalidArgument, "alpha must not be NULL");
  }
  return std::vector<double>(alpha, alpha + inst->value.n());
}

}  // namespace

extern "C" {

const char* steer_version(void) { return "1.0.0"; }

const char* steer_status_name(steer_status status) {
  return steer::error_code_name(static_cast<steer::ErrorCode>(-static_cast<int>(status)));
}

const char* steer_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------------ */

steer_status steer_instance_create(uint32_t n, const uint32_t* edge_u,
                                   const uint32_t* edge_v, const double* edge_w,
                                   size_t edge_count, int symmetrize,
                                   const double* s, const double* lower,
                                   const double* upper, const double* alpha0,
                                   uint64_t seed, steer_instance** out) {
  return guarded([&] {
    if (out == nullptr || s == nullptr || lower == nullptr || upper == nullptr ||
        (edge_count > 0 && (edge_u == nullptr || edge_v == nullptr ||
                            edge_w == nullptr))) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "steer_instance_create: required array is NULL");
    }
    steer::WeightedEdgeList list;
    list.node_count = n;
    list.edges.reserve(edge_count);
    for (size_t e = 0; e < edge_count; ++e) {
      list.edges.push_back({edge_u[e], edge_v[e], edge_w[e]});
    }
    auto matrix = std::make_shared<steer::InteractionMatrix>(
        steer::InteractionMatrix::from_edge_list(list, symmetrize != 0));
    std::optional<std::vector<double>> a0;
    if (alpha0 != nullptr) a0.emplace(alpha0, alpha0 + n);
    *out = new steer_instance{steer::ProblemInstance(
        std::move(matrix), std::vector<double>(s, s + n),
        std::vector<double>(lower, lower + n),
        std::vector<double>(upper, upper + n), std::move(a0), seed)};
  });
}

steer_status steer_instance_generate(const char* edge_list_path, int symmetrize,
                                     int randomize, uint64_t seed,
                                     const char* profile,
                                     const char* node_map_path,
                                     steer_instance** out) {
  return guarded([&] {
    if (out == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "out must not be NULL");
    }
    const auto parsed =
        steer::profile_from_name(require(profile, "profile"));
    if (!parsed) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  std::string("unknown profile '") + profile + "'");
    }
    steer::EdgeListFile file =
        steer::read_edge_list_file(require(edge_list_path, "edge_list_path"));
    if (randomize != 0) steer::randomize_weights(file.list, seed);
    if (node_map_path != nullptr) {
      std::string text;
      for (std::size_t dense = 0; dense < file.original_id.size(); ++dense) {
        text += std::to_string(dense);
        text += ' ';
        text += std::to_string(file.original_id[dense]);
        text += '\n';
      }
      steer::write_text_file(node_map_path, text);
    }
    auto matrix = std::make_shared<steer::InteractionMatrix>(
        steer::InteractionMatrix::from_edge_list(file.list, symmetrize != 0));
    *out = new steer_instance{
        steer::generate_instance(std::move(matrix), seed, *parsed)};
  });
}

steer_status steer_instance_read(const char* path, steer_instance** out) {
  return guarded([&] {
    if (out == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "out must not be NULL");
    }
    *out = new steer_instance{
        steer::read_instance_file(require(path, "path"))};
  });
}

steer_status steer_instance_write(const steer_instance* inst, const char* path) {
  return guarded([&] {
    if (inst == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "instance must not be NULL");
    }
    steer::write_instance_file(inst->value, require(path, "path"));
  });
}

uint32_t steer_instance_size(const steer_instance* inst) {
  return inst == nullptr ? 0 : inst->value.n();
}

uint64_t steer_instance_edge_entries(const steer_instance* inst) {
  return inst == nullptr ? 0 : inst->value.matrix().entry_count();
}

int steer_instance_has_alpha0(const steer_instance* inst) {
  return inst != nullptr && inst->value.has_alpha0() ? 1 : 0;
}

const double* steer_instance_innate(const steer_instance* inst) {
  return inst == nullptr ? nullptr : inst->value.s().data();
}

const double* steer_instance_lower(const steer_instance* inst) {
  return inst == nullptr ? nullptr : inst->value.lower().data();
}

const double* steer_instance_upper(const steer_instance* inst) {
  return inst == nullptr ? nullptr : inst->value.upper().data();
}

const double* steer_instance_alpha0(const steer_instance* inst) {
  if (inst == nullptr || !inst->value.has_alpha0()) return nullptr;
  return inst->value.alpha0().data();
}

void steer_instance_free(steer_instance* inst) { delete inst; }

/* ------------------------------------------------------------------ */

void steer_solve_config_init(steer_solve_config* cfg) {
  if (cfg == nullptr) return;
  const steer::SolverConfig defaults;
  cfg->strategy = steer::strategy_name(defaults.strategy);
  cfg->threads = defaults.threads;
  cfg->seed = defaults.seed;
  cfg->perturb_magnitude = defaults.perturb_magnitude;
  cfg->slope_window = defaults.slope_window;
  cfg->slope_factor = defaults.slope_factor;
  cfg->opportunistic_phase_limit = defaults.opportunistic_phase_limit;
  cfg->iteration_cap = defaults.iteration_cap;
  cfg->record_trace = defaults.record_trace ? 1 : 0;
}

steer_status steer_solve(const steer_instance* inst,
                         const steer_solve_config* cfg, steer_result** out) {
  return guarded([&] {
    if (inst == nullptr || cfg == nullptr || out == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "steer_solve: NULL argument");
    }
    const auto strategy =
        steer::strategy_from_name(require(cfg->strategy, "strategy"));
    if (!strategy) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  std::string("unknown strategy '") + cfg->strategy + "'");
    }
    steer::SolverConfig sc;
    sc.strategy = *strategy;
    sc.threads = cfg->threads;
    sc.seed = cfg->seed;
    sc.perturb_magnitude = cfg->perturb_magnitude;
    sc.slope_window = cfg->slope_window;
    sc.slope_factor = cfg->slope_factor;
    sc.opportunistic_phase_limit = cfg->opportunistic_phase_limit;
    sc.iteration_cap = cfg->iteration_cap;
    sc.record_trace = cfg->record_trace != 0;
    *out = new steer_result{steer::solve(inst->value, sc)};
  });
}

uint32_t steer_result_size(const steer_result* res) {
  return res == nullptr ? 0 : static_cast<uint32_t>(res->value.alpha.size());
}

const double* steer_result_alpha(const steer_result* res) {
  return res == nullptr ? nullptr : res->value.alpha.data();
}

const uint8_t* steer_result_flipped(const steer_result* res) {
  return res == nullptr ? nullptr : res->value.flipped.data();
}

double steer_result_objective(const steer_result* res) {
  return res == nullptr ? 0.0 : res->value.objective;
}

double steer_result_objective_err(const steer_result* res) {
  return res == nullptr ? 0.0 : res->value.objective_err;
}

uint64_t steer_result_iterations(const steer_result* res) {
  return res == nullptr ? 0 : res->value.iterations;
}

uint32_t steer_result_phases(const steer_result* res) {
  return res == nullptr ? 0 : res->value.phases;
}

uint64_t steer_result_mistakes(const steer_result* res) {
  return res == nullptr ? 0 : res->value.mistakes;
}

double steer_result_wall_seconds(const steer_result* res) {
  return res == nullptr ? 0.0 : res->value.wall_seconds;
}

size_t steer_result_trace_length(const steer_result* res) {
  return res == nullptr ? 0 : res->value.trace.rows.size();
}

steer_status steer_result_trace_row(const steer_result* res, size_t index,
                                    uint64_t* iter, double* ratio_lower,
                                    uint32_t* phase) {
  return guarded([&] {
    if (res == nullptr || index >= res->value.trace.rows.size()) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "trace row index out of range");
    }
    const steer::TraceRow& row = res->value.trace.rows[index];
    if (iter != nullptr) *iter = row.iter;
    if (ratio_lower != nullptr) *ratio_lower = row.ratio_lower;
    if (phase != nullptr) *phase = row.phase;
  });
}

steer_status steer_result_write(const steer_result* res, const char* path) {
  return guarded([&] {
    if (res == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "result must not be NULL");
    }
    steer::write_result_file(res->value, require(path, "path"));
  });
}

steer_status steer_result_trace_write(const steer_result* res,
                                      const char* path) {
  return guarded([&] {
    if (res == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "result must not be NULL");
    }
    steer::write_trace_csv(res->value.trace, require(path, "path"));
  });
}

void steer_result_free(steer_result* res) { delete res; }

/* ------------------------------------------------------------------ */

void steer_budget_config_init(steer_budget_config* cfg) {
  if (cfg == nullptr) return;
  const steer::BudgetConfig defaults;
  cfg->strategy = steer::budget_strategy_name(defaults.strategy);
  cfg->k = defaults.k;
  cfg->batch = defaults.batch;
  cfg->threads = defaults.threads;
  cfg->seed = defaults.seed;
  cfg->perturb_magnitude = defaults.perturb_magnitude;
  cfg->iteration_cap = defaults.iteration_cap;
  cfg->record_sweep = defaults.record_sweep ? 1 : 0;
}

steer_status steer_budget_solve(const steer_instance* inst,
                                const steer_budget_config* cfg,
                                steer_budget_result** out) {
  return guarded([&] {
    if (inst == nullptr || cfg == nullptr || out == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "steer_budget_solve: NULL argument");
    }
    const auto strategy =
        steer::budget_strategy_from_name(require(cfg->strategy, "strategy"));
    if (!strategy) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  std::string("unknown budget strategy '") + cfg->strategy + "'");
    }
    steer::BudgetConfig bc;
    bc.strategy = *strategy;
    bc.k = cfg->k;
    bc.batch = cfg->batch;
    bc.threads = cfg->threads;
    bc.seed = cfg->seed;
    bc.perturb_magnitude = cfg->perturb_magnitude;
    bc.iteration_cap = cfg->iteration_cap;
    bc.record_sweep = cfg->record_sweep != 0;
    auto* res = new steer_budget_result{steer::solve_budgeted(inst->value, bc),
                                        bc.k, bc.strategy};
    *out = res;
  });
}

uint32_t steer_budget_result_size(const steer_budget_result* res) {
  return res == nullptr ? 0 : static_cast<uint32_t>(res->value.alpha.size());
}

const double* steer_budget_result_alpha(const steer_budget_result* res) {
  return res == nullptr ? nullptr : res->value.alpha.data();
}

const uint8_t* steer_budget_result_selected(const steer_budget_result* res) {
  return res == nullptr ? nullptr : res->value.selected.data();
}

const uint8_t* steer_budget_result_flipped(const steer_budget_result* res) {
  return res == nullptr ? nullptr : res->value.flipped.data();
}

double steer_budget_result_objective(const steer_budget_result* res) {
  return res == nullptr ? 0.0 : res->value.objective;
}

double steer_budget_result_objective_err(const steer_budget_result* res) {
  return res == nullptr ? 0.0 : res->value.objective_err;
}

uint64_t steer_budget_result_iterations(const steer_budget_result* res) {
  return res == nullptr ? 0 : res->value.iterations;
}

uint64_t steer_budget_result_mistakes(const steer_budget_result* res) {
  return res == nullptr ? 0 : res->value.mistakes;
}

int steer_budget_result_stalled(const steer_budget_result* res) {
  return res != nullptr && res->value.stalled ? 1 : 0;
}

double steer_budget_result_wall_seconds(const steer_budget_result* res) {
  return res == nullptr ? 0.0 : res->value.wall_seconds;
}

size_t steer_budget_result_sweep_length(const steer_budget_result* res) {
  return res == nullptr ? 0 : res->value.sweep.size();
}

steer_status steer_budget_result_sweep_row(const steer_budget_result* res,
                                           size_t index, double* ratio_selected,
                                           double* avg_equilibrium) {
  return guarded([&] {
    if (res == nullptr || index >= res->value.sweep.size()) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "sweep row index out of range");
    }
    const steer::SweepRow& row = res->value.sweep[index];
    if (ratio_selected != nullptr) *ratio_selected = row.ratio_selected;
    if (avg_equilibrium != nullptr) *avg_equilibrium = row.avg_equilibrium;
  });
}

steer_status steer_budget_result_write(const steer_budget_result* res,
                                       const char* path) {
  return guarded([&] {
    if (res == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "result must not be NULL");
    }
    steer::write_budgeted_result_file(res->value, res->k, res->strategy,
                                      require(path, "path"));
  });
}

void steer_budget_result_free(steer_budget_result* res) { delete res; }

steer_status steer_sweep_csv_write(const steer_budget_result* const* results,
                                   const uint64_t* seeds, size_t count,
                                   const char* path) {
  return guarded([&] {
    if (results == nullptr || seeds == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "steer_sweep_csv_write: NULL argument");
    }
    std::vector<steer::SweepCsvBlock> blocks;
    blocks.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (results[i] == nullptr) {
        steer::fail(steer::ErrorCode::InvalidArgument,
                    "steer_sweep_csv_write: NULL result");
      }
      blocks.push_back({results[i]->value.sweep,
                        steer::budget_strategy_name(results[i]->strategy),
                        seeds[i]});
    }
    steer::write_sweep_csv(blocks, require(path, "path"));
  });
}

/* ------------------------------------------------------------------ */

steer_status steer_result_file_read(const char* path, steer_result_file** out) {
  return guarded([&] {
    if (out == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "out must not be NULL");
    }
    *out = new steer_result_file{steer::read_result_file(require(path, "path"))};
  });
}

uint32_t steer_result_file_size(const steer_result_file* file) {
  return file == nullptr ? 0 : static_cast<uint32_t>(file->value.alpha.size());
}

const double* steer_result_file_alpha(const steer_result_file* file) {
  return file == nullptr ? nullptr : file->value.alpha.data();
}

const uint8_t* steer_result_file_flipped(const steer_result_file* file) {
  return file == nullptr ? nullptr : file->value.flipped.data();
}

double steer_result_file_objective(const steer_result_file* file) {
  return file == nullptr ? 0.0 : file->value.objective;
}

double steer_result_file_objective_err(const steer_result_file* file) {
  return file == nullptr ? 0.0 : file->value.objective_err;
}

uint64_t steer_result_file_iterations(const steer_result_file* file) {
  return file == nullptr ? 0 : file->value.iterations;
}

uint64_t steer_result_file_mistakes(const steer_result_file* file) {
  return file == nullptr ? 0 : file->value.mistakes;
}

int steer_result_file_is_budgeted(const steer_result_file* file) {
  return file != nullptr && !file->value.selected.empty() ? 1 : 0;
}

const uint8_t* steer_result_file_selected(const steer_result_file* file) {
  if (file == nullptr || file->value.selected.empty()) return nullptr;
  return file->value.selected.data();
}

uint32_t steer_result_file_k(const steer_result_file* file) {
  return file == nullptr ? 0 : file->value.k;
}

const char* steer_result_file_strategy(const steer_result_file* file) {
  return file == nullptr ? "" : file->value.strategy.c_str();
}

int steer_result_file_stalled(const steer_result_file* file) {
  return file != nullptr && file->value.stalled ? 1 : 0;
}

void steer_result_file_free(steer_result_file* file) { delete file; }

/* ------------------------------------------------------------------ */

steer_status steer_objective_exact(const steer_instance* inst,
                                   const double* alpha, uint32_t dense_limit,
                                   double* value) {
  return guarded([&] {
    if (value == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "value must not be NULL");
    }
    const std::vector<double> a = alpha_from(inst, alpha);
    *value = steer::objective_exact(
        inst->value.matrix(), inst->value.s(), a,
        dense_limit == 0 ? steer::kDefaultDenseLimit : dense_limit);
  });
}

steer_status steer_objective_iterative(const steer_instance* inst,
                                       const double* alpha, double coord_tol,
                                       int threads, double* value, double* err,
                                       uint64_t* iterations) {
  return guarded([&] {
    if (value == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "value must not be NULL");
    }
    const std::vector<double> a = alpha_from(inst, alpha);
    steer::ThreadPool pool(threads);
    const steer::IterativeObjective res = steer::objective_iterative(
        inst->value.matrix(), inst->value.s(), a, coord_tol, pool);
    *value = res.value;
    if (err != nullptr) *err = res.err;
    if (iterations != nullptr) *iterations = res.iterations;
  });
}

/* ------------------------------------------------------------------ */

steer_status steer_verify(const steer_instance* inst, const double* alpha,
                          const uint32_t* coords, size_t coord_count,
                          int threads, uint32_t dense_limit, double tol,
                          double spot_coord_tol, steer_verify_report** out) {
  return guarded([&] {
    if (out == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument, "out must not be NULL");
    }
    if (coords == nullptr && coord_count > 0) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "coords is NULL but coord_count > 0");
    }
    const std::vector<double> a = alpha_from(inst, alpha);
    const std::vector<uint32_t> cs(coords, coords + coord_count);
    steer::ThreadPool pool(threads);
    *out = new steer_verify_report{steer::verify_local_optimality(
        inst->value, a, cs, pool,
        dense_limit == 0 ? steer::kDefaultDenseLimit : dense_limit,
        tol == 0.0 ? 1e-9 : tol,
        spot_coord_tol == 0.0 ? 1e-8 : spot_coord_tol)};
  });
}

int steer_verify_report_optimal(const steer_verify_report* rep) {
  return rep != nullptr && rep->value.optimal() ? 1 : 0;
}

double steer_verify_report_base_objective(const steer_verify_report* rep) {
  return rep == nullptr ? 0.0 : rep->value.base_objective;
}

size_t steer_verify_report_violator_count(const steer_verify_report* rep) {
  return rep == nullptr ? 0 : rep->value.violators.size();
}

const uint32_t* steer_verify_report_violators(const steer_verify_report* rep) {
  return rep == nullptr ? nullptr : rep->value.violators.data();
}

size_t steer_verify_report_inconclusive_count(const steer_verify_report* rep) {
  return rep == nullptr ? 0 : rep->value.inconclusive.size();
}

const uint32_t* steer_verify_report_inconclusive(
    const steer_verify_report* rep) {
  return rep == nullptr ? nullptr : rep->value.inconclusive.data();
}

void steer_verify_report_free(steer_verify_report* rep) { delete rep; }

/* ------------------------------------------------------------------ */

steer_status steer_brute_force(const steer_instance* inst, uint64_t* best_mask,
                               double* best_objective) {
  return guarded([&] {
    if (inst == nullptr || best_mask == nullptr || best_objective == nullptr) {
      steer::fail(steer::ErrorCode::InvalidArgument,
                  "steer_brute_force: NULL argument");
    }
    const steer::BruteForceOptimum opt =
        steer::brute_force_optimum(inst->value);
    *best_mask = opt.mask;
    *best_objective = opt.objective;
  });
}

}  // extern "C"
