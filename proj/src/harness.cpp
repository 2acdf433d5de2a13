#include "utr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rng.hpp"
#include "utr/accel.hpp"
#include "utr/adaptive.hpp"
#include "utr/baselines.hpp"
#include "utr/suite.hpp"
#include "utr/utr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace utr {

namespace {

const std::vector<std::string> kKinds = {"utr", "autr", "classic_tr",
                                         "reg_newton", "accel"};

std::vector<std::string> expand_problems(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& p : in) {
    if (p == "builtin") {
      for (const auto& n : builtin_names()) out.push_back(n);
    } else {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <class T>
T param(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("solver parameter '") + key + "' has the wrong type");
  }
}

Subsolver subsolver_param(const json& p) {
  return subsolver_from_string(param<std::string>(p, "subsolver", "direct"));
}

// "M": number, or "hint" (instance Lipschitz hint, 1 when absent).
double lipschitz_param(const json& p, const ProblemInstance& inst) {
  if (p.contains("M") && p.at("M").is_number()) {
    const double M = p.at("M").get<double>();
    if (!(M > 0.0)) throw ConfigError("solver parameter M must be positive");
    return M;
  }
  const std::string mode = param<std::string>(p, "M", "hint");
  if (mode != "hint") throw ConfigError("solver parameter M must be a number or \"hint\"");
  return inst.lipschitz_hint.value_or(1.0);
}

void check_params(const SolverSpec& s) {
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"utr", {"M", "subsolver", "convex_mode", "max_doublings"}},
      {"autr",
       {"eta", "xi", "rho0", "rho_min", "gamma1", "gamma2", "max_inner",
        "subsolver", "convex_mode"}},
      {"classic_tr",
       {"delta0", "eta_accept", "shrink", "grow", "delta_max", "subsolver"}},
      {"reg_newton", {"lam", "power", "max_halvings"}},
      {"accel", {"M", "subsolver", "max_inner_iter", "f_star"}},
  };
  if (std::find(kKinds.begin(), kKinds.end(), s.kind) == kKinds.end()) {
    throw ConfigError("unknown solver kind '" + s.kind + "'");
  }
  if (!s.params.is_object()) throw ConfigError("solver params must be an object");
  const auto& keys = allowed.at(s.kind);
  for (auto it = s.params.begin(); it != s.params.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      throw ConfigError("solver '" + s.name + "': unknown parameter '" + it.key() + "'");
    }
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (solvers.empty()) throw ConfigError("no solvers configured");
  if (problems.empty()) throw ConfigError("no problems configured");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(time_limit >= 0.0)) throw ConfigError("time_limit must be >= 0");
  if (iter_limit < 0) throw ConfigError("iter_limit must be >= 0");
  if (!(failure_sentinel > 0.0)) throw ConfigError("failure_sentinel must be positive");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  std::vector<std::string> names;
  for (const auto& s : solvers) {
    if (s.name.empty()) throw ConfigError("solver name is empty");
    check_params(s);
    names.push_back(s.name);
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw ConfigError("duplicate solver names");
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> keys = {
      "solvers", "problems", "eps",  "time_limit", "iter_limit",
      "failure_sentinel", "output_dir", "seed", "workers"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      throw ConfigError("unknown config key '" + it.key() + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.eps = j.value("eps", c.eps);
    c.time_limit = j.value("time_limit", c.time_limit);
    c.iter_limit = j.value("iter_limit", c.iter_limit);
    c.failure_sentinel = j.value("failure_sentinel", c.failure_sentinel);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (j.contains("problems")) {
      const auto& p = j.at("problems");
      if (p.is_string()) {
        c.problems.push_back(p.get<std::string>());
      } else {
        c.problems = p.get<std::vector<std::string>>();
      }
    }
    if (j.contains("solvers")) {
      for (const auto& s : j.at("solvers")) {
        if (s.is_string()) {
          c.solvers.push_back(solver_from_flag(s.get<std::string>()));
          continue;
        }
        SolverSpec spec;
        spec.kind = s.at("kind").get<std::string>();
        spec.name = s.value("name", spec.kind);
        if (s.contains("params")) spec.params = s.at("params");
        c.solvers.push_back(std::move(spec));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json s = json::array();
  for (const auto& sp : solvers) {
    s.push_back({{"name", sp.name}, {"kind", sp.kind}, {"params", sp.params}});
  }
  return {{"solvers", s},
          {"problems", problems},
          {"eps", eps},
          {"time_limit", time_limit},
          {"iter_limit", iter_limit},
          {"failure_sentinel", failure_sentinel},
          {"output_dir", output_dir},
          {"seed", seed},
          {"workers", workers}};
}

std::vector<SolverSpec> default_solvers() {
  return {
      {"UTR", "utr", json::object()},
      {"aUTR", "autr", json::object()},
      {"ClassicTR", "classic_tr", json::object()},
      {"RegNewton", "reg_newton", json{{"lam", 1e-3}}},
  };
}

SolverSpec solver_from_flag(const std::string& flag) {
  SolverSpec s;
  const auto eq = flag.find('=');
  if (eq == std::string::npos) {
    s.kind = flag;
    s.name = flag;
  } else {
    s.name = flag.substr(0, eq);
    s.kind = flag.substr(eq + 1);
  }
  if (std::find(kKinds.begin(), kKinds.end(), s.kind) == kKinds.end()) {
    throw ConfigError("unknown solver kind '" + s.kind + "'");
  }
  return s;
}

double shifted_geomean(const std::vector<double>& values, double shift) {
  if (values.empty()) throw ConfigError("shifted geometric mean of an empty list");
  if (!(shift > 0.0)) throw ConfigError("shift must be positive");
  double acc = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw ContractError("shifted geometric mean needs values >= 0");
    acc += std::log(v + shift);
  }
  return std::exp(acc / static_cast<double>(values.size())) - shift;
}

std::vector<SummaryRow> summarize(const std::vector<RunOutcome>& runs,
                                  double failure_sentinel) {
  std::map<std::string, std::vector<const RunOutcome*>> by_method;
  for (const auto& r : runs) by_method[r.method].push_back(&r);
  std::vector<SummaryRow> rows;
  for (const auto& [method, list] : by_method) {
    SummaryRow row;
    row.method = method;
    row.problems = static_cast<int>(list.size());
    std::vector<double> t, k, kf, kg;
    for (const RunOutcome* r : list) {
      if (r->success) {
        ++row.K;
        t.push_back(r->wall_time);
        k.push_back(r->iterations);
        kf.push_back(static_cast<double>(r->counters.f));
        kg.push_back(static_cast<double>(r->counters.g + r->counters.hv));
      } else {
        t.push_back(failure_sentinel);
        k.push_back(failure_sentinel);
        kf.push_back(failure_sentinel);
        kg.push_back(failure_sentinel);
      }
    }
    row.t_G = shifted_geomean(t, kTimeShift);
    row.k_G = shifted_geomean(k, kIterShift);
    row.kf_G = shifted_geomean(kf, kIterShift);
    row.kg_G = shifted_geomean(kg, kIterShift);
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,K,N,t_G,k_G,kf_G,kg_G\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.K << ',' << r.problems << ',' << fmt(r.t_G) << ','
        << fmt(r.k_G) << ',' << fmt(r.kf_G) << ',' << fmt(r.kg_G) << '\n';
  }
}

int ExperimentResult::failures() const {
  int n = 0;
  for (const auto& o : outcomes) n += o.success ? 0 : 1;
  return n;
}

RunReport run_solver(const SolverSpec& spec, const std::string& problem,
                     const ExperimentConfig& cfg) {
  check_params(spec);
  ProblemInstance inst = make_problem(problem);
  const json& p = spec.params;
  RunReport rep;
  try {
    if (spec.kind == "utr") {
      UtrOptions o;
      o.M = lipschitz_param(p, inst);
      o.eps = cfg.eps;
      o.max_iter = cfg.iter_limit;
      o.time_limit = cfg.time_limit;
      o.subsolver = subsolver_param(p);
      o.convex_mode = param<bool>(p, "convex_mode", false);
      o.max_doublings = param<int>(p, "max_doublings", o.max_doublings);
      rep = utr_minimize(inst, o);
    } else if (spec.kind == "autr") {
      AdaptiveConfig a;
      a.eta = param<double>(p, "eta", a.eta);
      a.xi = param<double>(p, "xi", a.xi);
      a.rho0 = param<double>(p, "rho0", a.rho0);
      a.rho_min = param<double>(p, "rho_min", a.rho_min);
      a.gamma1 = param<double>(p, "gamma1", a.gamma1);
      a.gamma2 = param<double>(p, "gamma2", a.gamma2);
      a.max_inner = param<int>(p, "max_inner", a.max_inner);
      a.convex_mode = param<bool>(p, "convex_mode", false);
      a.subsolver = subsolver_param(p);
      a.eps = cfg.eps;
      a.max_outer = cfg.iter_limit;
      a.time_limit = cfg.time_limit;
      rep = autr_minimize(inst, a);
    } else if (spec.kind == "classic_tr") {
      ClassicTrConfig c;
      c.delta0 = param<double>(p, "delta0", c.delta0);
      c.eta_accept = param<double>(p, "eta_accept", c.eta_accept);
      c.shrink = param<double>(p, "shrink", c.shrink);
      c.grow = param<double>(p, "grow", c.grow);
      c.delta_max = param<double>(p, "delta_max", c.delta_max);
      c.subsolver = subsolver_param(p);
      c.time_limit = cfg.time_limit;
      rep = classic_tr_minimize(inst, c, cfg.eps, cfg.iter_limit);
    } else if (spec.kind == "reg_newton") {
      RegNewtonOptions r;
      r.lam = param<double>(p, "lam", r.lam);
      r.power = param<double>(p, "power", r.power);
      r.max_halvings = param<int>(p, "max_halvings", r.max_halvings);
      r.eps = cfg.eps;
      r.max_iter = cfg.iter_limit;
      r.time_limit = cfg.time_limit;
      rep = reg_newton_minimize(inst, r);
    } else {
      AccelOptions a;
      a.M = lipschitz_param(p, inst);
      a.eps = cfg.eps;
      a.max_outer = cfg.iter_limit;
      a.max_inner_iter = param<int>(p, "max_inner_iter", a.max_inner_iter);
      if (p.contains("f_star")) a.f_star = param<double>(p, "f_star", 0.0);
      a.subsolver = subsolver_param(p);
      a.time_limit = cfg.time_limit;
      rep = accel_minimize(inst, a);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    rep = RunReport{};
    rep.status = Status::Failure;
    rep.message = e.what();
    rep.x = inst.start;
    rep.counters = inst.oracle->counters();
  }
  rep.solver = spec.name;
  rep.problem = inst.name;
  return rep;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  cfg.problems = expand_problems(cfg.problems);
  // Resolve every problem before running anything.
  for (const auto& name : cfg.problems) make_problem(name);

  struct Job {
    std::size_t solver, problem;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
    for (std::size_t p = 0; p < cfg.problems.size(); ++p) jobs.push_back({s, p});
  }
  std::vector<RunReport> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        reports[i] = run_solver(cfg.solvers[jobs[i].solver],
                                cfg.problems[jobs[i].problem], cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int nw = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::sort(reports.begin(), reports.end(), [](const RunReport& a, const RunReport& b) {
    return std::tie(a.solver, a.problem) < std::tie(b.solver, b.problem);
  });
  ExperimentResult res;
  res.config = cfg;
  for (const auto& r : reports) {
    res.outcomes.push_back({r.solver, r.problem, r.success(cfg.eps), r.wall_time,
                            r.iteration_count, r.counters});
  }
  res.reports = std::move(reports);
  res.table = summarize(res.outcomes, cfg.failure_sentinel);
  return res;
}

json report_to_json(const RunReport& r, double eps) {
  json j;
  j["method"] = r.solver;
  j["problem"] = r.problem;
  j["status"] = std::string(to_string(r.status));
  j["success"] = r.success(eps);
  j["eps"] = eps;
  j["f"] = r.f;
  j["grad_norm"] = r.grad_norm;
  j["iterations"] = r.iteration_count;
  j["wall_time"] = r.wall_time;
  j["counters"] = {{"f", r.counters.f},
                   {"g", r.counters.g},
                   {"hess", r.counters.hess},
                   {"hv", r.counters.hv}};
  j["message"] = r.message;
  j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
  // fixed key set for every solver; absent values are null
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["final_lambda_min"] = opt(r.final_lambda_min);
  j["final_rho"] = opt(r.final_rho);
  j["final_M"] = r.final_M > 0.0 ? json(r.final_M) : json(nullptr);
  j["condition_violations"] = r.condition_violations;
  if (r.outer.empty()) {
    j["inner_iterations"] = nullptr;
  } else {
    long inner = 0;
    for (const auto& o : r.outer) inner += o.inner_iters;
    j["inner_iterations"] = inner;
  }
  return j;
}

namespace {

std::string file_stem(const RunReport& r) { return r.solver + "__" + r.problem; }

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

}  // namespace

void write_experiment(const ExperimentResult& res, const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  for (const char* sub : {"reports", "traces", "plots"}) {
    fs::create_directories(root / sub, ec);
    if (ec) throw IoError("cannot create " + (root / sub).string() + ": " + ec.message());
  }
  for (const auto& r : res.reports) {
    const std::string stem = file_stem(r);
    open_out(root / "reports" / (stem + ".json"))
        << report_to_json(r, res.config.eps).dump(2) << '\n';
    auto trace = open_out(root / "traces" / (stem + ".csv"));
    if (r.outer.empty()) {
      write_trace_csv(trace, r);
    } else {
      write_accel_trace_csv(trace, r);
    }
    auto plot = open_out(root / "plots" / (stem + ".csv"));
    write_plot_csv(plot, r);
  }
  auto summary = open_out(root / "summary.csv");
  write_summary_csv(summary, res.table);
  open_out(root / "config.json") << res.config.to_json().dump(2) << '\n';
}

std::vector<SummaryRow> summarize_directory(const std::string& dir,
                                            double failure_sentinel) {
  const fs::path reports = fs::path(dir) / "reports";
  if (!fs::is_directory(reports)) throw IoError("no reports directory under " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(reports)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  if (files.empty()) throw DataError("no report files under " + reports.string());
  std::sort(files.begin(), files.end());
  std::vector<RunOutcome> runs;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw IoError("cannot read " + f.string());
    try {
      const json j = json::parse(in);
      RunOutcome o;
      o.method = j.at("method").get<std::string>();
      o.problem = j.at("problem").get<std::string>();
      o.success = j.at("success").get<bool>();
      o.wall_time = j.at("wall_time").get<double>();
      o.iterations = j.at("iterations").get<int>();
      const auto& c = j.at("counters");
      o.counters = {c.at("f").get<std::uint64_t>(), c.at("g").get<std::uint64_t>(),
                    c.at("hess").get<std::uint64_t>(), c.at("hv").get<std::uint64_t>()};
      runs.push_back(std::move(o));
    } catch (const json::exception& e) {
      throw ParseError(0, f.string() + ": " + e.what());
    }
  }
  return summarize(runs, failure_sentinel);
}

std::vector<OracleCheck> check_oracles(const std::vector<std::string>& problems,
                                       std::uint64_t seed, int points, double h) {
  std::vector<OracleCheck> out;
  for (const auto& name : expand_problems(problems)) {
    ProblemInstance p = make_problem(name);
    detail::NormalStream rng(seed);
    OracleCheck c;
    c.problem = p.name;
    const int n = p.oracle->dimension();
    for (int k = 0; k < points; ++k) {
      Vector x = p.start;
      for (int i = 0; i < n; ++i) x[i] += 2.0 * rng.uniform() - 1.0;
      const FdCheck fd = finite_difference_check(*p.oracle, x, h);
      c.grad_err = std::max(c.grad_err, fd.grad_err);
      c.hess_err = std::max(c.hess_err, fd.hess_err);
    }
    c.pass = c.grad_err <= 1e-6 && c.hess_err <= 1e-5;
    out.push_back(c);
  }
  return out;
}

}  // namespace utr
