#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "utr/report.hpp"

namespace utr {

// One named solver configuration. `kind` is one of utr, autr, classic_tr,
// reg_newton, accel; `params` holds kind-specific overrides.
struct SolverSpec {
  std::string name;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
};

struct ExperimentConfig {
  std::vector<SolverSpec> solvers;
  std::vector<std::string> problems;  // names, "libsvm:<path>" or "builtin"
  double eps = 1e-5;
  double time_limit = 60.0;
  int iter_limit = 10000;
  double failure_sentinel = 20000.0;
  std::string output_dir = "utr_out";
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// UTR, aUTR, ClassicTR, RegNewton with their default parameters.
std::vector<SolverSpec> default_solvers();
// Parses "kind" or "name=kind".
SolverSpec solver_from_flag(const std::string& flag);

// Per-run data the summary is computed from.
struct RunOutcome {
  std::string method;
  std::string problem;
  bool success = false;
  double wall_time = 0.0;
  int iterations = 0;
  EvalCounters counters;
};

struct SummaryRow {
  std::string method;
  int K = 0;         // successes
  int problems = 0;  // runs aggregated
  double t_G = 0.0;
  double k_G = 0.0;
  double kf_G = 0.0;
  double kg_G = 0.0;  // gradient plus Hessian-vector evaluations
};

inline constexpr double kTimeShift = 1.0;
inline constexpr double kIterShift = 50.0;

// (prod (v_i + shift))^{1/n} - shift, computed in log space.
double shifted_geomean(const std::vector<double>& values, double shift);

std::vector<SummaryRow> summarize(const std::vector<RunOutcome>& runs,
                                  double failure_sentinel);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunReport> reports;  // sorted by method, then problem
  std::vector<RunOutcome> outcomes;
  std::vector<SummaryRow> table;

  int failures() const;
};

// Runs one solver on one freshly built instance. Solver errors become a
// Failure report; configuration errors propagate.
RunReport run_solver(const SolverSpec& spec, const std::string& problem,
                     const ExperimentConfig& cfg);

// Resolves every name first (ConfigError before any run), then executes the
// grid on cfg.workers threads.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const RunReport& r, double eps);

// reports/<method>__<problem>.json, traces/<method>__<problem>.csv,
// plots/<method>__<problem>.csv, summary.csv, config.json.
void write_experiment(const ExperimentResult& res, const std::string& dir);

// Recomputes the summary from the report JSON files under dir/reports.
std::vector<SummaryRow> summarize_directory(const std::string& dir,
                                            double failure_sentinel);

struct OracleCheck {
  std::string problem;
  double grad_err = 0.0;
  double hess_err = 0.0;
  bool pass = false;
};

// Finite-difference suite: `points` seeded random points around each start.
std::vector<OracleCheck> check_oracles(const std::vector<std::string>& problems,
                                       std::uint64_t seed, int points = 10,
                                       double h = 1e-5);

}  // namespace utr
