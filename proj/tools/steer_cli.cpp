// Command-line front end. Links only the public C API; every run writes a
// manifest (<primary-output>.manifest.json) that the `replay` subcommand can
// re-execute to reproduce the outputs byte for byte (timing columns in bench
// CSVs excepted — wall clocks are not reproducible).
//
// Exit codes: 0 success / verified, 1 verification failure, 2 usage error,
// 3 runtime failure (I/O, parse, numerical, iteration cap).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "steer/steer.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct RuntimeFailure {
  std::string message;
};

void check(steer_status status, const char* what) {
  if (status == STEER_OK) return;
  throw RuntimeFailure{std::string(what) + ": " + steer_last_error() + " [" +
                       steer_status_name(status) + "]"};
}

// The default thread count: STEER_THREADS when set to a positive integer,
// otherwise 0, which the library resolves to the hardware concurrency.
int default_threads() {
  if (const char* env = std::getenv("STEER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1 << 16) {
      return static_cast<int>(v);
    }
    std::fprintf(stderr, "warning: ignoring invalid STEER_THREADS='%s'\n", env);
  }
  return 0;
}

struct InstanceHandle {
  steer_instance* ptr = nullptr;
  ~InstanceHandle() { steer_instance_free(ptr); }
};

struct ResultHandle {
  steer_result* ptr = nullptr;
  ~ResultHandle() { steer_result_free(ptr); }
};

struct BudgetResultHandle {
  steer_budget_result* ptr = nullptr;
  BudgetResultHandle() = default;
  BudgetResultHandle(BudgetResultHandle&& other) noexcept : ptr(other.ptr) {
    other.ptr = nullptr;
  }
  BudgetResultHandle& operator=(BudgetResultHandle&& other) noexcept {
    if (this != &other) {
      steer_budget_result_free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  BudgetResultHandle(const BudgetResultHandle&) = delete;
  BudgetResultHandle& operator=(const BudgetResultHandle&) = delete;
  ~BudgetResultHandle() { steer_budget_result_free(ptr); }
};

struct VerifyReportHandle {
  steer_verify_report* ptr = nullptr;
  ~VerifyReportHandle() { steer_verify_report_free(ptr); }
};

struct ResultFileHandle {
  steer_result_file* ptr = nullptr;
  ~ResultFileHandle() { steer_result_file_free(ptr); }
};

void write_manifest(const std::string& primary_output, const json& doc) {
  std::ofstream out(primary_output + ".manifest.json", std::ios::binary);
  if (!out) {
    throw RuntimeFailure{"cannot write manifest next to " + primary_output};
  }
  out << doc.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

/* ------------------------------------------------------------------ */
/* gen                                                                 */

struct GenOptions {
  std::string edges;
  std::string out;
  std::string profile = "uniform";
  std::uint64_t seed = 0;
  bool directed = false;
  bool randomize_weights = false;
};

int run_gen(const GenOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string nodemap = opt.out + ".nodemap";
  InstanceHandle inst;
  check(steer_instance_generate(opt.edges.c_str(), opt.directed ? 0 : 1,
                                opt.randomize_weights ? 1 : 0, opt.seed,
                                opt.profile.c_str(), nodemap.c_str(),
                                &inst.ptr),
        "gen");
  check(steer_instance_write(inst.ptr, opt.out.c_str()), "gen: write");

  json doc;
  doc["artifact_version"] = steer_version();
  doc["command"] = "gen";
  doc["config"] = {{"profile", opt.profile},
                   {"seed", opt.seed},
                   {"directed", opt.directed},
                   {"randomize_weights", opt.randomize_weights}};
  doc["inputs"] = {{"edges", opt.edges}};
  doc["outputs"] = {{"instance", opt.out}, {"nodemap", nodemap}};
  doc["threads"] = 1;
  doc["wall_seconds"] = seconds_since(t0);
  write_manifest(opt.out, doc);

  std::printf("generated %s: n=%u entries=%llu profile=%s seed=%llu\n",
              opt.out.c_str(), steer_instance_size(inst.ptr),
              static_cast<unsigned long long>(steer_instance_edge_entries(inst.ptr)),
              opt.profile.c_str(), static_cast<unsigned long long>(opt.seed));
  return kExitOk;
}

/* ------------------------------------------------------------------ */
/* solve                                                               */

struct SolveOptions {
  std::string instance;
  std::string out;
  std::string strategy = "conservative";
  std::string trace_out;
  int threads = 0;
  std::uint64_t seed = 0;
  double perturb = 1e-9;
  std::uint64_t slope_window = 1000;
  double slope_factor = 0.1;
  std::uint32_t phase_limit = 6;
  std::uint64_t iteration_cap = 0;
};

int run_solve(const SolveOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InstanceHandle inst;
  check(steer_instance_read(opt.instance.c_str(), &inst.ptr), "solve: read");

  steer_solve_config cfg;
  steer_solve_config_init(&cfg);
  cfg.strategy = opt.strategy.c_str();
  cfg.threads = opt.threads;
  cfg.seed = opt.seed;
  cfg.perturb_magnitude = opt.perturb;
  cfg.slope_window = opt.slope_window;
  cfg.slope_factor = opt.slope_factor;
  cfg.opportunistic_phase_limit = opt.phase_limit;
  cfg.iteration_cap = opt.iteration_cap;
  cfg.record_trace = opt.trace_out.empty() ? 0 : 1;

  ResultHandle res;
  check(steer_solve(inst.ptr, &cfg, &res.ptr), "solve");
  check(steer_result_write(res.ptr, opt.out.c_str()), "solve: write");
  if (!opt.trace_out.empty()) {
    check(steer_result_trace_write(res.ptr, opt.trace_out.c_str()),
          "solve: trace");
  }

  json doc;
  doc["artifact_version"] = steer_version();
  doc["command"] = "solve";
  doc["config"] = {{"strategy", opt.strategy},
                   {"seed", opt.seed},
                   {"perturb", opt.perturb},
                   {"slope_window", opt.slope_window},
                   {"slope_factor", opt.slope_factor},
                   {"phase_limit", opt.phase_limit},
                   {"iteration_cap", opt.iteration_cap}};
  doc["inputs"] = {{"instance", opt.instance}};
  doc["outputs"] = {{"result", opt.out}};
  if (!opt.trace_out.empty()) doc["outputs"]["trace"] = opt.trace_out;
  doc["threads"] = opt.threads;
  doc["wall_seconds"] = seconds_since(t0);
  write_manifest(opt.out, doc);

  std::printf("objective %.16e err %.16e iterations %llu phases %u mistakes "
              "%llu wall %.3fs\n",
              steer_result_objective(res.ptr),
              steer_result_objective_err(res.ptr),
              static_cast<unsigned long long>(steer_result_iterations(res.ptr)),
              steer_result_phases(res.ptr),
              static_cast<unsigned long long>(steer_result_mistakes(res.ptr)),
              steer_result_wall_seconds(res.ptr));
  return kExitOk;
}

/* ------------------------------------------------------------------ */
/* budget                                                              */

struct BudgetOptions {
  std::string instance;
  std::string out;
  std::string strategy = "bgg";
  std::string sweep_out;
  std::uint32_t k = 1;
  double batch = 1.0;
  int threads = 0;
  std::vector<std::uint64_t> seeds;
  double perturb = 1e-9;
  std::uint64_t iteration_cap = 0;
};

std::string seed_result_path(const BudgetOptions& opt, std::uint64_t seed) {
  if (opt.seeds.size() <= 1) return opt.out;
  return opt.out + ".seed" + std::to_string(seed);
}

int run_budget(const BudgetOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InstanceHandle inst;
  check(steer_instance_read(opt.instance.c_str(), &inst.ptr), "budget: read");

  std::vector<std::uint64_t> seeds = opt.seeds;
  if (seeds.empty()) seeds.push_back(0);

  std::vector<BudgetResultHandle> results;
  results.reserve(seeds.size());
  std::vector<std::string> result_paths;
  for (const std::uint64_t seed : seeds) {
    steer_budget_config cfg;
    steer_budget_config_init(&cfg);
    cfg.strategy = opt.strategy.c_str();
    cfg.k = opt.k;
    cfg.batch = opt.batch;
    cfg.threads = opt.threads;
    cfg.seed = seed;
    cfg.perturb_magnitude = opt.perturb;
    cfg.iteration_cap = opt.iteration_cap;
    cfg.record_sweep = 1;

    BudgetResultHandle res;
    check(steer_budget_solve(inst.ptr, &cfg, &res.ptr), "budget");
    const std::string path = seed_result_path(opt, seed);
    check(steer_budget_result_write(res.ptr, path.c_str()), "budget: write");
    result_paths.push_back(path);
    std::printf("seed %llu: objective %.16e err %.16e iterations %llu "
                "mistakes %llu stalled %d wall %.3fs\n",
                static_cast<unsigned long long>(seed),
                steer_budget_result_objective(res.ptr),
                steer_budget_result_objective_err(res.ptr),
                static_cast<unsigned long long>(
                    steer_budget_result_iterations(res.ptr)),
                static_cast<unsigned long long>(
                    steer_budget_result_mistakes(res.ptr)),
                steer_budget_result_stalled(res.ptr),
                steer_budget_result_wall_seconds(res.ptr));
    results.push_back(std::move(res));
  }

  if (!opt.sweep_out.empty()) {
    std::vector<const steer_budget_result*> ptrs;
    ptrs.reserve(results.size());
    for (const auto& r : results) ptrs.push_back(r.ptr);
    check(steer_sweep_csv_write(ptrs.data(), seeds.data(), ptrs.size(),
                                opt.sweep_out.c_str()),
          "budget: sweep");
  }

  json doc;
  doc["artifact_version"] = steer_version();
  doc["command"] = "budget";
  doc["config"] = {{"strategy", opt.strategy}, {"k", opt.k},
                   {"batch", opt.batch},       {"seeds", seeds},
                   {"perturb", opt.perturb},   {"iteration_cap", opt.iteration_cap}};
  doc["inputs"] = {{"instance", opt.instance}};
  doc["outputs"] = {{"results", result_paths}};
  if (!opt.sweep_out.empty()) doc["outputs"]["sweep"] = opt.sweep_out;
  doc["threads"] = opt.threads;
  doc["wall_seconds"] = seconds_since(t0);
  write_manifest(opt.out, doc);
  return kExitOk;
}

/* ------------------------------------------------------------------ */
/* verify                                                              */

struct VerifyOptions {
  std::string instance;
  std::string result;
  int threads = 0;
  std::uint32_t dense_limit = 0;  // 0 = library default
  double tol = 1e-9;
  double spot_tol = 1e-8;
  std::uint32_t sample = 64;
  std::uint64_t seed = 0;
};

// Deterministic sample of `count` distinct coordinates (sorted), via a
// partial Fisher-Yates on an implicit identity array. mt19937_64's sequence
// is pinned by the standard, so this is reproducible everywhere.
std::vector<std::uint32_t> sample_coordinates(std::uint32_t n,
                                              std::uint32_t count,
                                              std::uint64_t seed) {
  count = std::min(count, n);
  std::mt19937_64 eng(seed);
  std::unordered_map<std::uint32_t, std::uint32_t> moved;
  std::vector<std::uint32_t> picked;
  picked.reserve(count);
  for (std::uint32_t j = 0; j < count; ++j) {
    const std::uint64_t span = n - j;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
    std::uint64_t x;
    do {
      x = eng();
    } while (x >= limit);
    const std::uint32_t r = j + static_cast<std::uint32_t>(x % span);
    auto value_at = [&](std::uint32_t idx) {
      const auto it = moved.find(idx);
      return it == moved.end() ? idx : it->second;
    };
    const std::uint32_t v = value_at(r);
    moved[r] = value_at(j);
    picked.push_back(v);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

int run_verify(const VerifyOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InstanceHandle inst;
  check(steer_instance_read(opt.instance.c_str(), &inst.ptr), "verify: read");
  ResultFileHandle file;
  check(steer_result_file_read(opt.result.c_str(), &file.ptr),
        "verify: result");

  const std::uint32_t n = steer_instance_size(inst.ptr);
  if (steer_result_file_size(file.ptr) != n) {
    std::fprintf(stderr,
                 "verify: result has %u agents but instance has %u\n",
                 steer_result_file_size(file.ptr), n);
    return kExitVerifyFailed;
  }
  if (steer_result_file_is_budgeted(file.ptr)) {
    std::fprintf(stderr,
                 "verify: budgeted results are heuristic; only unbudgeted "
                 "results carry an optimality claim\n");
    return kExitUsage;
  }
  const double* alpha = steer_result_file_alpha(file.ptr);
  const double stored = steer_result_file_objective(file.ptr);
  const double stored_err = steer_result_file_objective_err(file.ptr);

  int exit_code = kExitOk;

  // Stored objective must sit inside its own certificate of the recomputed
  // value; catches corrupted footers and stale alpha columns alike.
  const bool oracle_scale = n <= 20;
  if (oracle_scale) {
    double exact = 0.0;
    check(steer_objective_exact(inst.ptr, alpha, opt.dense_limit, &exact),
          "verify: objective");
    if (std::abs(stored - exact) > stored_err + opt.tol) {
      std::printf("stored objective %.16e is outside certificate of exact "
                  "%.16e (err %.16e)\n", stored, exact, stored_err);
      exit_code = kExitVerifyFailed;
    }
    std::uint64_t best_mask = 0;
    double best = 0.0;
    check(steer_brute_force(inst.ptr, &best_mask, &best), "verify: oracle");
    if (exact > best + opt.tol) {
      std::printf("objective %.16e exceeds exhaustive optimum %.16e\n", exact,
                  best);
      exit_code = kExitVerifyFailed;
    }
  } else {
    double value = 0.0, err = 0.0;
    check(steer_objective_iterative(inst.ptr, alpha, opt.spot_tol, opt.threads,
                                    &value, &err, nullptr),
          "verify: objective");
    if (std::abs(stored - value) > stored_err + err) {
      std::printf("stored objective %.16e is outside certificate of "
                  "recomputed %.16e (errs %.16e + %.16e)\n",
                  stored, value, stored_err, err);
      exit_code = kExitVerifyFailed;
    }
  }

  std::vector<std::uint32_t> coords;
  if (!oracle_scale && n > opt.sample) {
    coords = sample_coordinates(n, opt.sample, opt.seed);
    std::printf("spot-check mode: sampling %zu of %u coordinates\n",
                coords.size(), n);
    std::printf("sampled:");
    for (const std::uint32_t c : coords) std::printf(" %u", c);
    std::printf("\n");
  }

  VerifyReportHandle report;
  const steer_status st =
      steer_verify(inst.ptr, alpha, coords.empty() ? nullptr : coords.data(),
                   coords.size(), opt.threads, opt.dense_limit, opt.tol,
                   opt.spot_tol, &report.ptr);
  if (st == STEER_ERR_PRECONDITION_UNMET) {
    std::printf("verification failed: %s\n", steer_last_error());
    return kExitVerifyFailed;
  }
  check(st, "verify");

  const size_t violators = steer_verify_report_violator_count(report.ptr);
  for (size_t i = 0; i < violators; ++i) {
    std::printf("violator: coordinate %u improves when flipped\n",
                steer_verify_report_violators(report.ptr)[i]);
  }
  const size_t inconclusive =
      steer_verify_report_inconclusive_count(report.ptr);
  for (size_t i = 0; i < inconclusive; ++i) {
    std::printf("inconclusive: coordinate %u (certificates too loose)\n",
                steer_verify_report_inconclusive(report.ptr)[i]);
  }
  if (violators > 0) exit_code = kExitVerifyFailed;

  json doc;
  doc["artifact_version"] = steer_version();
  doc["command"] = "verify";
  doc["config"] = {{"dense_limit", opt.dense_limit}, {"tol", opt.tol},
                   {"spot_tol", opt.spot_tol},       {"sample", opt.sample},
                   {"seed", opt.seed}};
  doc["inputs"] = {{"instance", opt.instance}, {"result", opt.result}};
  doc["outputs"] = json::object();
  doc["threads"] = opt.threads;
  doc["wall_seconds"] = seconds_since(t0);
  write_manifest(opt.result + ".verify", doc);

  std::printf("%s\n", exit_code == kExitOk ? "verified" : "NOT verified");
  return exit_code;
}

/* ------------------------------------------------------------------ */
/* bench                                                               */

struct BenchOptions {
  std::string instance;
  std::string out;
  std::string mode = "objective";  // "threads" | "objective"
  std::string strategy = "optimistic";
  std::vector<int> thread_list = {1, 2, 4, 8};
  std::uint64_t seed = 0;
  double perturb = 1e-9;
  std::uint64_t iteration_cap = 0;
};

int run_bench(const BenchOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InstanceHandle inst;
  check(steer_instance_read(opt.instance.c_str(), &inst.ptr), "bench: read");

  std::ostringstream csv;
  if (opt.mode == "threads") {
    csv << "threads,iterations,objective,wall_seconds\n";
    for (const int threads : opt.thread_list) {
      steer_solve_config cfg;
      steer_solve_config_init(&cfg);
      cfg.strategy = opt.strategy.c_str();
      cfg.threads = threads;
      cfg.seed = opt.seed;
      cfg.perturb_magnitude = opt.perturb;
      cfg.iteration_cap = opt.iteration_cap;
      cfg.record_trace = 0;
      ResultHandle res;
      check(steer_solve(inst.ptr, &cfg, &res.ptr), "bench: solve");
      char line[160];
      std::snprintf(line, sizeof line, "%d,%llu,%.16e,%.6f\n", threads,
                    static_cast<unsigned long long>(
                        steer_result_iterations(res.ptr)),
                    steer_result_objective(res.ptr),
                    steer_result_wall_seconds(res.ptr));
      csv << line;
    }
  } else {
    csv << "strategy,iterations,objective,objective_err,mistakes,"
           "wall_seconds\n";
    for (const char* strategy : {"conservative", "opportunistic",
                                 "optimistic"}) {
      steer_solve_config cfg;
      steer_solve_config_init(&cfg);
      cfg.strategy = strategy;
      cfg.threads = opt.thread_list.empty() ? 0 : opt.thread_list.front();
      cfg.seed = opt.seed;
      cfg.perturb_magnitude = opt.perturb;
      cfg.iteration_cap = opt.iteration_cap;
      cfg.record_trace = 0;
      ResultHandle res;
      check(steer_solve(inst.ptr, &cfg, &res.ptr), "bench: solve");
      char line[200];
      std::snprintf(line, sizeof line, "%s,%llu,%.16e,%.16e,%llu,%.6f\n",
                    strategy,
                    static_cast<unsigned long long>(
                        steer_result_iterations(res.ptr)),
                    steer_result_objective(res.ptr),
                    steer_result_objective_err(res.ptr),
                    static_cast<unsigned long long>(
                        steer_result_mistakes(res.ptr)),
                    steer_result_wall_seconds(res.ptr));
      csv << line;
    }
  }

  std::ofstream out(opt.out, std::ios::binary);
  if (!out) throw RuntimeFailure{"cannot write " + opt.out};
  out << csv.str();
  out.close();

  json doc;
  doc["artifact_version"] = steer_version();
  doc["command"] = "bench";
  doc["config"] = {{"mode", opt.mode},
                   {"strategy", opt.strategy},
                   {"thread_list", opt.thread_list},
                   {"seed", opt.seed},
                   {"perturb", opt.perturb},
                   {"iteration_cap", opt.iteration_cap}};
  doc["inputs"] = {{"instance", opt.instance}};
  doc["outputs"] = {{"csv", opt.out}};
  doc["threads"] = opt.thread_list.empty() ? 0 : opt.thread_list.front();
  doc["wall_seconds"] = seconds_since(t0);
  write_manifest(opt.out, doc);

  std::printf("bench %s written to %s\n", opt.mode.c_str(), opt.out.c_str());
  return kExitOk;
}

/* ------------------------------------------------------------------ */
/* replay                                                              */

int dispatch_manifest(const json& doc);

int run_replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw RuntimeFailure{"cannot read manifest " + manifest_path};
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw RuntimeFailure{std::string("manifest parse: ") + e.what()};
  }
  return dispatch_manifest(doc);
}

int dispatch_manifest(const json& doc) {
  const std::string command = doc.at("command").get<std::string>();
  const json& cfg = doc.at("config");
  const json& inputs = doc.at("inputs");
  const json& outputs = doc.at("outputs");
  if (command == "gen") {
    GenOptions opt;
    opt.edges = inputs.at("edges").get<std::string>();
    opt.out = outputs.at("instance").get<std::string>();
    opt.profile = cfg.at("profile").get<std::string>();
    opt.seed = cfg.at("seed").get<std::uint64_t>();
    opt.directed = cfg.at("directed").get<bool>();
    opt.randomize_weights = cfg.at("randomize_weights").get<bool>();
    return run_gen(opt);
  }
  if (command == "solve") {
    SolveOptions opt;
    opt.instance = inputs.at("instance").get<std::string>();
    opt.out = outputs.at("result").get<std::string>();
    if (outputs.contains("trace")) {
      opt.trace_out = outputs.at("trace").get<std::string>();
    }
    opt.strategy = cfg.at("strategy").get<std::string>();
    opt.threads = doc.at("threads").get<int>();
    opt.seed = cfg.at("seed").get<std::uint64_t>();
    opt.perturb = cfg.at("perturb").get<double>();
    opt.slope_window = cfg.at("slope_window").get<std::uint64_t>();
    opt.slope_factor = cfg.at("slope_factor").get<double>();
    opt.phase_limit = cfg.at("phase_limit").get<std::uint32_t>();
    opt.iteration_cap = cfg.at("iteration_cap").get<std::uint64_t>();
    return run_solve(opt);
  }
  if (command == "budget") {
    BudgetOptions opt;
    opt.instance = inputs.at("instance").get<std::string>();
    const auto paths = outputs.at("results").get<std::vector<std::string>>();
    if (paths.empty()) throw RuntimeFailure{"manifest lists no results"};
    opt.seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
    // Recover the base path: single-seed runs store it verbatim; multi-seed
    // runs append ".seed<S>".
    if (opt.seeds.size() <= 1) {
      opt.out = paths.front();
    } else {
      const std::string suffix = ".seed" + std::to_string(opt.seeds.front());
      const std::string& first = paths.front();
      if (first.size() <= suffix.size() ||
          first.compare(first.size() - suffix.size(), suffix.size(), suffix) !=
              0) {
        throw RuntimeFailure{"manifest result paths do not match seeds"};
      }
      opt.out = first.substr(0, first.size() - suffix.size());
    }
    if (outputs.contains("sweep")) {
      opt.sweep_out = outputs.at("sweep").get<std::string>();
    }
    opt.strategy = cfg.at("strategy").get<std::string>();
    opt.k = cfg.at("k").get<std::uint32_t>();
    opt.batch = cfg.at("batch").get<double>();
    opt.threads = doc.at("threads").get<int>();
    opt.perturb = cfg.at("perturb").get<double>();
    opt.iteration_cap = cfg.at("iteration_cap").get<std::uint64_t>();
    return run_budget(opt);
  }
  if (command == "verify") {
    VerifyOptions opt;
    opt.instance = inputs.at("instance").get<std::string>();
    opt.result = inputs.at("result").get<std::string>();
    opt.threads = doc.at("threads").get<int>();
    opt.dense_limit = cfg.at("dense_limit").get<std::uint32_t>();
    opt.tol = cfg.at("tol").get<double>();
    opt.spot_tol = cfg.at("spot_tol").get<double>();
    opt.sample = cfg.at("sample").get<std::uint32_t>();
    opt.seed = cfg.at("seed").get<std::uint64_t>();
    return run_verify(opt);
  }
  if (command == "bench") {
    BenchOptions opt;
    opt.instance = inputs.at("instance").get<std::string>();
    opt.out = outputs.at("csv").get<std::string>();
    opt.mode = cfg.at("mode").get<std::string>();
    opt.strategy = cfg.at("strategy").get<std::string>();
    opt.thread_list = cfg.at("thread_list").get<std::vector<int>>();
    opt.seed = cfg.at("seed").get<std::uint64_t>();
    opt.perturb = cfg.at("perturb").get<double>();
    opt.iteration_cap = cfg.at("iteration_cap").get<std::uint64_t>();
    return run_bench(opt);
  }
  throw RuntimeFailure{"manifest has unknown command '" + command + "'"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified opinion-steering solver"};
  app.require_subcommand(1);
  const int threads_default = default_threads();

  GenOptions gen;
  auto* cmd_gen = app.add_subcommand(
      "gen", "Generate an instance from an edge-list file");
  cmd_gen->add_option("--edges", gen.edges, "Edge-list file (u v [w])")
      ->required();
  cmd_gen->add_option("--out", gen.out, "Instance file to write")->required();
  cmd_gen->add_option("--profile", gen.profile,
                      "Initial-resistance profile: none|uniform|plow|phigh")
      ->check(CLI::IsMember({"none", "uniform", "plow", "phigh"}));
  cmd_gen->add_option("--seed", gen.seed, "Base seed for all substreams");
  cmd_gen->add_flag("--directed", gen.directed,
                    "Keep edges one-directional (default symmetrizes)");
  cmd_gen->add_flag("--randomize-weights", gen.randomize_weights,
                    "Replace weights with U(0,1] draws");

  SolveOptions solve;
  auto* cmd_solve =
      app.add_subcommand("solve", "Solve the unbudgeted problem to optimality");
  cmd_solve->add_option("--instance", solve.instance, "Instance file")
      ->required();
  cmd_solve->add_option("--out", solve.out, "Result file to write")->required();
  cmd_solve
      ->add_option("--strategy", solve.strategy,
                   "conservative|opportunistic|optimistic")
      ->check(CLI::IsMember({"conservative", "opportunistic", "optimistic"}));
  cmd_solve->add_option("--threads", solve.threads,
                        "Worker threads (0 = hardware)")
      ->default_val(threads_default);
  cmd_solve->add_option("--seed", solve.seed, "Perturbation substream seed");
  cmd_solve->add_option("--perturb", solve.perturb,
                        "Tie-breaking noise magnitude (< 1e-6; 0 disables)");
  cmd_solve->add_option("--trace-out", solve.trace_out,
                        "Write per-iteration progress CSV here");
  cmd_solve->add_option("--slope-window", solve.slope_window,
                        "Opportunistic progress window (iterations)");
  cmd_solve->add_option("--slope-factor", solve.slope_factor,
                        "Opportunistic early-phase-end threshold");
  cmd_solve->add_option("--phase-limit", solve.phase_limit,
                        "Last phase that may end early");
  cmd_solve->add_option("--iteration-cap", solve.iteration_cap,
                        "Per-phase iteration cap (0 = derived)");

  BudgetOptions budget;
  auto* cmd_budget =
      app.add_subcommand("budget", "Choose k agents under a budget");
  cmd_budget->add_option("--instance", budget.instance, "Instance file")
      ->required();
  cmd_budget->add_option("--out", budget.out, "Result file to write")
      ->required();
  cmd_budget->add_option("--k", budget.k, "Budget (number of agents)")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_budget
      ->add_option("--strategy", budget.strategy, "marginal|bgg|random")
      ->check(CLI::IsMember({"marginal", "bgg", "random"}));
  cmd_budget->add_option("--batch", budget.batch,
                         "Batch size: >=1 absolute, <1 fraction of k");
  cmd_budget->add_option("--threads", budget.threads,
                         "Worker threads (0 = hardware)")
      ->default_val(threads_default);
  cmd_budget
      ->add_option("--seed", budget.seeds,
                   "Seed(s); repeat for a multi-seed sweep")
      ->expected(-1);
  cmd_budget->add_option("--perturb", budget.perturb,
                         "Tie-breaking noise magnitude");
  cmd_budget->add_option("--iteration-cap", budget.iteration_cap,
                         "Per-phase iteration cap (0 = derived)");
  cmd_budget->add_option("--sweep-out", budget.sweep_out,
                         "Write selection-sweep CSV here");

  VerifyOptions verify;
  auto* cmd_verify = app.add_subcommand(
      "verify", "Audit a result file against the instance");
  cmd_verify->add_option("--instance", verify.instance, "Instance file")
      ->required();
  cmd_verify->add_option("--result", verify.result, "Result file")->required();
  cmd_verify->add_option("--threads", verify.threads,
                         "Worker threads (0 = hardware)")
      ->default_val(threads_default);
  cmd_verify->add_option("--dense-limit", verify.dense_limit,
                         "Dense-solve size cap (0 = default)");
  cmd_verify->add_option("--tol", verify.tol, "Objective tolerance");
  cmd_verify->add_option("--spot-tol", verify.spot_tol,
                         "Per-coordinate tolerance for iterative checks");
  cmd_verify->add_option("--sample", verify.sample,
                         "Coordinates to spot-check on large instances");
  cmd_verify->add_option("--seed", verify.seed, "Spot-check sampling seed");

  BenchOptions bench;
  auto* cmd_bench =
      app.add_subcommand("bench", "Timing/iteration reports as CSV");
  cmd_bench->add_option("--instance", bench.instance, "Instance file")
      ->required();
  cmd_bench->add_option("--out", bench.out, "CSV file to write")->required();
  cmd_bench->add_option("--mode", bench.mode, "threads|objective")
      ->check(CLI::IsMember({"threads", "objective"}));
  cmd_bench->add_option("--strategy", bench.strategy,
                        "Strategy for threads mode")
      ->check(CLI::IsMember({"conservative", "opportunistic", "optimistic"}));
  cmd_bench->add_option("--threads-list", bench.thread_list,
                        "Thread counts to sweep (threads mode)")
      ->expected(-1);
  cmd_bench->add_option("--seed", bench.seed, "Perturbation substream seed");
  cmd_bench->add_option("--perturb", bench.perturb,
                        "Tie-breaking noise magnitude");
  cmd_bench->add_option("--iteration-cap", bench.iteration_cap,
                        "Per-phase iteration cap (0 = derived)");

  std::string manifest_path;
  auto* cmd_replay = app.add_subcommand(
      "replay", "Re-execute a recorded run manifest byte-identically");
  cmd_replay->add_option("--manifest", manifest_path, "Manifest JSON path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message/help
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_solve->parsed()) return run_solve(solve);
    if (cmd_budget->parsed()) {
      if (budget.batch >= 1.0 &&
          budget.batch > static_cast<double>(budget.k)) {
        std::fprintf(stderr, "budget: --batch %g exceeds --k %u\n",
                     budget.batch, budget.k);
        return kExitUsage;
      }
      return run_budget(budget);
    }
    if (cmd_verify->parsed()) return run_verify(verify);
    if (cmd_bench->parsed()) return run_bench(bench);
    if (cmd_replay->parsed()) return run_replay(manifest_path);
  } catch (const RuntimeFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
