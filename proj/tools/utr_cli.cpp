// Command-line front end. Talks to the solver library only through utr_c.h.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "utr/utr_c.h"

using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

// Status codes that mean "the request itself was wrong".
bool is_config_status(utr_status s) {
  return s == UTR_ERR_CONFIG || s == UTR_ERR_PARSE || s == UTR_ERR_INVALID_ARGUMENT;
}

int report_error(const char* what, utr_status s) {
  std::cerr << "error: " << what << ": " << utr_last_error() << "\n";
  return is_config_status(s) ? kExitConfig : kExitFailure;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  utr_string_free(s);
  return out;
}

struct RunArgs {
  std::string config;
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  double eps = 0.0;
  int max_iter = 0;
  double time_limit = 0.0;
  int workers = 0;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_run(const RunArgs& a, CLI::App& sub) {
  json cfg = json::object();
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) {
      std::cerr << "error: cannot open config file " << a.config << "\n";
      return kExitConfig;
    }
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      std::cerr << "error: config file " << a.config << ": " << e.what() << "\n";
      return kExitConfig;
    }
    if (!cfg.is_object()) {
      std::cerr << "error: config file must hold a JSON object\n";
      return kExitConfig;
    }
  }
  if (!a.solvers.empty()) cfg["solvers"] = a.solvers;
  if (!a.problems.empty()) cfg["problems"] = a.problems;
  if (sub.count("--eps")) cfg["eps"] = a.eps;
  if (sub.count("--max-iter")) cfg["iter_limit"] = a.max_iter;
  if (sub.count("--time-limit")) cfg["time_limit"] = a.time_limit;
  if (sub.count("--workers")) cfg["workers"] = a.workers;
  if (sub.count("--out")) cfg["output_dir"] = a.out;
  if (sub.count("--seed")) cfg["seed"] = a.seed;

  utr_experiment* e = nullptr;
  utr_status s = utr_experiment_create(cfg.dump().c_str(), &e);
  if (s != UTR_OK) return report_error("configuration", s);
  int failures = 0;
  s = utr_experiment_run(e, &failures);
  if (s != UTR_OK) {
    utr_experiment_destroy(e);
    return report_error("run", s);
  }
  s = utr_experiment_write(e, nullptr);
  if (s != UTR_OK) {
    utr_experiment_destroy(e);
    return report_error("writing results", s);
  }
  char* csv = nullptr;
  s = utr_experiment_summary_csv(e, &csv);
  utr_experiment_destroy(e);
  if (s != UTR_OK) return report_error("summary", s);
  std::cout << take(csv);
  if (failures > 0) {
    std::cerr << failures << " run(s) did not reach the gradient tolerance\n";
    return kExitFailure;
  }
  return 0;
}

int cmd_summarize(const std::string& dir, double sentinel) {
  char* csv = nullptr;
  const utr_status s = utr_summarize_dir(dir.c_str(), sentinel, &csv);
  if (s != UTR_OK) return report_error("summarize", s);
  std::cout << take(csv);
  return 0;
}

int cmd_check(const std::vector<std::string>& problems, std::uint64_t seed) {
  const json names = problems.empty() ? json::array({"builtin"}) : json(problems);
  char* out = nullptr;
  int failures = 0;
  const utr_status s =
      utr_check_oracles(names.dump().c_str(), seed, &out, &failures);
  if (s != UTR_OK) return report_error("check", s);
  const json rows = json::parse(take(out));
  std::printf("%-24s %12s %12s  %s\n", "problem", "grad_err", "hess_err", "result");
  for (const auto& r : rows) {
    std::printf("%-24s %12.3e %12.3e  %s\n", r.at("problem").get<std::string>().c_str(),
                r.at("grad_err").get<double>(), r.at("hess_err").get<double>(),
                r.at("pass").get<bool>() ? "ok" : "FAIL");
  }
  return failures > 0 ? kExitFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal trust-region solvers and benchmark harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(utr_version()));

  RunArgs ra;
  CLI::App* run = app.add_subcommand("run", "run a solver x problem grid");
  run->add_option("--config", ra.config, "JSON config file");
  run->add_option("--solver", ra.solvers, "solver kind or name=kind (repeatable)");
  run->add_option("--problem", ra.problems,
                  "problem name, libsvm:<path> or builtin (repeatable)");
  run->add_option("--eps", ra.eps, "gradient tolerance");
  run->add_option("--max-iter", ra.max_iter, "iteration limit per run");
  run->add_option("--time-limit", ra.time_limit, "seconds per run");
  run->add_option("--workers", ra.workers, "parallel runs");
  run->add_option("--out", ra.out, "output directory");
  run->add_option("--seed", ra.seed, "seed recorded with the experiment");

  std::string dir;
  double sentinel = 20000.0;
  CLI::App* summarize =
      app.add_subcommand("summarize", "recompute the summary from stored reports");
  summarize->add_option("dir", dir, "output directory of an earlier run")->required();
  summarize->add_option("--sentinel", sentinel, "value charged to failed runs");

  std::vector<std::string> check_problems;
  std::uint64_t check_seed = 1;
  CLI::App* check =
      app.add_subcommand("check", "finite-difference check of the problem oracles");
  check->add_option("--problem", check_problems, "problem to check (repeatable)");
  check->add_option("--seed", check_seed, "seed for the sample points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (run->parsed()) return cmd_run(ra, *run);
  if (summarize->parsed()) return cmd_summarize(dir, sentinel);
  return cmd_check(check_problems, check_seed);
}
