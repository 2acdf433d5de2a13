#include "utr/utr_c.h"

#include <cstring>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "utr/harness.hpp"
#include "utr/suite.hpp"

using nlohmann::json;

struct utr_problem {
  utr::ProblemInstance inst;
};

struct utr_report {
  utr::RunReport rep;
  double eps = 0.0;
};

struct utr_experiment {
  utr::ExperimentConfig cfg;
  std::optional<utr::ExperimentResult> result;
};

namespace {

thread_local std::string g_last_error;

utr_status code_for(utr::ErrorKind k) {
  switch (k) {
    case utr::ErrorKind::Configuration: return UTR_ERR_CONFIG;
    case utr::ErrorKind::Parse: return UTR_ERR_PARSE;
    case utr::ErrorKind::Data: return UTR_ERR_DATA;
    case utr::ErrorKind::Numerical: return UTR_ERR_NUMERICAL;
    case utr::ErrorKind::Contract: return UTR_ERR_CONTRACT;
    case utr::ErrorKind::Invariant: return UTR_ERR_INVARIANT;
    case utr::ErrorKind::Io: return UTR_ERR_IO;
  }
  return UTR_ERR_INTERNAL;
}

template <class F>
utr_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return UTR_OK;
  } catch (const utr::Error& e) {
    g_last_error = e.what();
    return code_for(e.kind());
  } catch (const json::parse_error& e) {
    g_last_error = std::string("JSON parse error: ") + e.what();
    return UTR_ERR_PARSE;
  } catch (const json::exception& e) {
    g_last_error = std::string("JSON error: ") + e.what();
    return UTR_ERR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UTR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown internal error";
    return UTR_ERR_INTERNAL;
  }
}

utr_status invalid(const char* what) {
  g_last_error = what;
  return UTR_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void check_dim(const utr_problem* p, int n) {
  if (n != p->inst.oracle->dimension()) {
    throw utr::ContractError("buffer length " + std::to_string(n) +
                             " does not match problem dimension " +
                             std::to_string(p->inst.oracle->dimension()));
  }
}

}  // namespace

extern "C" {

const char* utr_version(void) { return "0.1.0"; }

const char* utr_last_error(void) { return g_last_error.c_str(); }

void utr_string_free(char* s) { delete[] s; }

utr_status utr_builtin_problems(char** json_out) {
  if (!json_out) return invalid("json_out is NULL");
  return guarded([&] { *json_out = dup_string(json(utr::builtin_names()).dump()); });
}

utr_status utr_problem_create(const char* name, utr_problem** out) {
  if (!name || !out) return invalid("NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new utr_problem{utr::make_problem(name)}; });
}

void utr_problem_destroy(utr_problem* p) { delete p; }

utr_status utr_problem_dimension(const utr_problem* p, int* n) {
  if (!p || !n) return invalid("NULL argument");
  *n = p->inst.oracle->dimension();
  return UTR_OK;
}

utr_status utr_problem_start(const utr_problem* p, double* x, int n) {
  if (!p || !x) return invalid("NULL argument");
  return guarded([&] {
    check_dim(p, n);
    for (int i = 0; i < n; ++i) x[i] = p->inst.start[i];
  });
}

utr_status utr_problem_evaluate(utr_problem* p, const double* x, int n,
                                double* f, double* grad) {
  if (!p || !x || !f) return invalid("NULL argument");
  return guarded([&] {
    check_dim(p, n);
    const utr::Vector v = Eigen::Map<const utr::Vector>(x, n);
    *f = p->inst.oracle->value(v);
    if (grad) {
      const utr::Vector g = p->inst.oracle->gradient(v);
      for (int i = 0; i < n; ++i) grad[i] = g[i];
    }
  });
}

utr_status utr_problem_fd_check(utr_problem* p, const double* x, int n,
                                double h, double* grad_err, double* hess_err) {
  if (!p || !x || !grad_err || !hess_err) return invalid("NULL argument");
  return guarded([&] {
    check_dim(p, n);
    const utr::FdCheck c = utr::finite_difference_check(
        *p->inst.oracle, Eigen::Map<const utr::Vector>(x, n), h);
    *grad_err = c.grad_err;
    *hess_err = c.hess_err;
  });
}

utr_status utr_solve(const char* problem, const char* solver_json,
                     utr_report** out) {
  if (!problem || !solver_json || !out) return invalid("NULL argument");
  *out = nullptr;
  return guarded([&] {
    const json j = json::parse(solver_json);
    if (!j.is_object()) throw utr::ConfigError("solver description must be an object");
    utr::SolverSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    spec.name = j.value("name", spec.kind);
    if (j.contains("params")) spec.params = j.at("params");
    utr::ExperimentConfig cfg;
    cfg.eps = j.value("eps", cfg.eps);
    cfg.iter_limit = j.value("max_iter", cfg.iter_limit);
    cfg.time_limit = j.value("time_limit", cfg.time_limit);
    cfg.solvers = {spec};
    cfg.problems = {problem};
    cfg.validate();
    auto r = std::make_unique<utr_report>();
    r->rep = utr::run_solver(spec, problem, cfg);
    r->eps = cfg.eps;
    *out = r.release();
  });
}

void utr_report_destroy(utr_report* r) { delete r; }

utr_status utr_report_status(const utr_report* r, utr_run_status* s) {
  if (!r || !s) return invalid("NULL argument");
  switch (r->rep.status) {
    case utr::Status::FOSP: *s = UTR_RUN_FOSP; break;
    case utr::Status::SOSP: *s = UTR_RUN_SOSP; break;
    case utr::Status::MaxIter: *s = UTR_RUN_MAX_ITER; break;
    case utr::Status::Failure: *s = UTR_RUN_FAILURE; break;
  }
  return UTR_OK;
}

utr_status utr_report_values(const utr_report* r, double* f, double* grad_norm,
                             int* iterations) {
  if (!r) return invalid("NULL report");
  if (f) *f = r->rep.f;
  if (grad_norm) *grad_norm = r->rep.grad_norm;
  if (iterations) *iterations = r->rep.iteration_count;
  return UTR_OK;
}

utr_status utr_report_to_json(const utr_report* r, char** json_out) {
  if (!r || !json_out) return invalid("NULL argument");
  return guarded([&] { *json_out = dup_string(utr::report_to_json(r->rep, r->eps).dump(2)); });
}

utr_status utr_report_trace_csv(const utr_report* r, char** csv_out) {
  if (!r || !csv_out) return invalid("NULL argument");
  return guarded([&] {
    std::ostringstream os;
    if (r->rep.outer.empty()) {
      utr::write_trace_csv(os, r->rep);
    } else {
      utr::write_accel_trace_csv(os, r->rep);
    }
    *csv_out = dup_string(os.str());
  });
}

utr_status utr_experiment_create(const char* config_json, utr_experiment** out) {
  if (!config_json || !out) return invalid("NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto e = std::make_unique<utr_experiment>();
    e->cfg = utr::ExperimentConfig::from_json(json::parse(config_json));
    if (e->cfg.solvers.empty()) e->cfg.solvers = utr::default_solvers();
    if (e->cfg.problems.empty()) e->cfg.problems = {"builtin"};
    e->cfg.validate();
    // fail here rather than at run time on unknown names
    for (const auto& name : e->cfg.problems) {
      if (name != "builtin") utr::make_problem(name);
    }
    *out = e.release();
  });
}

void utr_experiment_destroy(utr_experiment* e) { delete e; }

utr_status utr_experiment_run(utr_experiment* e, int* failures) {
  if (!e) return invalid("NULL experiment");
  return guarded([&] {
    e->result = utr::run_experiment(e->cfg);
    if (failures) *failures = e->result->failures();
  });
}

utr_status utr_experiment_write(const utr_experiment* e, const char* out_dir) {
  if (!e) return invalid("NULL experiment");
  if (!e->result) return invalid("experiment has not been run");
  return guarded([&] {
    utr::write_experiment(*e->result, out_dir ? out_dir : e->cfg.output_dir);
  });
}

utr_status utr_experiment_summary_csv(const utr_experiment* e, char** csv_out) {
  if (!e || !csv_out) return invalid("NULL argument");
  if (!e->result) return invalid("experiment has not been run");
  return guarded([&] {
    std::ostringstream os;
    utr::write_summary_csv(os, e->result->table);
    *csv_out = dup_string(os.str());
  });
}

utr_status utr_summarize_dir(const char* dir, double failure_sentinel,
                             char** csv_out) {
  if (!dir || !csv_out) return invalid("NULL argument");
  return guarded([&] {
    std::ostringstream os;
    utr::write_summary_csv(os, utr::summarize_directory(dir, failure_sentinel));
    *csv_out = dup_string(os.str());
  });
}

utr_status utr_check_oracles(const char* problems_json, unsigned long long seed,
                             char** json_out, int* failures) {
  if (!problems_json || !json_out) return invalid("NULL argument");
  return guarded([&] {
    const auto names = json::parse(problems_json).get<std::vector<std::string>>();
    json arr = json::array();
    int bad = 0;
    for (const auto& c : utr::check_oracles(names, seed)) {
      arr.push_back({{"problem", c.problem},
                     {"grad_err", c.grad_err},
                     {"hess_err", c.hess_err},
                     {"pass", c.pass}});
      bad += c.pass ? 0 : 1;
    }
    *json_out = dup_string(arr.dump(2));
    if (failures) *failures = bad;
  });
}

}  // extern "C"
