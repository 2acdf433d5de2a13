#include "utr/baselines.hpp"

#include <cmath>
#include <limits>

#include "run_util.hpp"

namespace utr {

void ClassicTrConfig::validate() const {
  if (!(delta0 > 0.0)) throw ConfigError("delta0 must be positive");
  if (!(eta_accept > 0.0 && eta_accept < 1.0)) throw ConfigError("eta_accept must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("shrink must lie in (0, 1)");
  if (!(grow > 1.0)) throw ConfigError("grow must exceed 1");
  if (!(delta_max >= delta0)) throw ConfigError("delta_max must be >= delta0");
}

double reduction_ratio(double f0, double f1, double model_decrease) {
  if (model_decrease <= 0.0) {
    return f1 < f0 ? 1.0 : -std::numeric_limits<double>::infinity();
  }
  return (f0 - f1) / model_decrease;
}

RunReport classic_tr_minimize(const ProblemInstance& p,
                              const ClassicTrConfig& cfg, double eps,
                              int max_iter) {
  cfg.validate();
  p.validate();
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  const Objective& f = *p.oracle;
  detail::Stopwatch clock;
  const EvalCounters base = f.counters();
  RunReport rep;
  rep.solver = "classic_tr";
  rep.problem = p.name;

  Vector x = p.start;
  double fx = f.value(x);
  Vector g = f.gradient(x);
  double delta = cfg.delta0;
  int retries = 0;
  int total = 0;
  bool fresh = true;  // Hessian needs recomputing
  SymmetricOperator h(Matrix::Zero(1, 1));

  if (!std::isfinite(fx) || !g.allFinite()) {
    rep.status = Status::Failure;
    rep.message = "non-finite objective at the start point";
  }
  while (rep.message.empty()) {
    const double gn = g.norm();
    if (gn <= eps) {
      rep.status = Status::FOSP;
      rep.message = "gradient tolerance met";
      break;
    }
    if (total >= max_iter) {
      rep.status = Status::MaxIter;
      rep.message = "iteration budget exhausted";
      break;
    }
    if (detail::out_of_time(clock, cfg.time_limit)) {
      rep.status = Status::MaxIter;
      rep.message = "time limit reached";
      break;
    }
    ++total;
    if (fresh) {
      h = detail::hessian_operator(f, x, cfg.subsolver);
      fresh = false;
    }
    const TrsProblem trs{h, g, 0.0, delta};
    TrsSolution sol;
    try {
      sol = detail::solve_trs(trs, cfg.subsolver, cfg.trs);
    } catch (const NumericalError& e) {
      rep.status = Status::Failure;
      rep.message = std::string("subproblem: ") + e.what();
      break;
    }
    const Vector xn = x + sol.step;
    const double fn = f.value(xn);
    const double ratio =
        std::isfinite(fn) ? reduction_ratio(fx, fn, sol.model_decrease)
                          : -std::numeric_limits<double>::infinity();
    const double radius_used = delta;
    if (ratio < 0.25) {
      delta *= cfg.shrink;
    } else if (ratio > 0.75 && sol.on_boundary) {
      delta = std::min(cfg.grow * delta, cfg.delta_max);
    }
    if (ratio >= cfg.eta_accept) {
      const Vector gnew = f.gradient(xn);
      IterationRecord rec;
      rec.k = static_cast<int>(rep.iterations.size());
      rec.f_before = fx;
      rec.f_after = fn;
      rec.grad_norm_before = gn;
      rec.grad_norm_after = gnew.norm();
      rec.lambda = sol.multiplier;
      rec.step_norm = sol.step.norm();
      rec.radius = radius_used;
      rec.params.sigma = 0.0;
      rec.params.r = radius_used / std::sqrt(gn);
      rec.retries = retries;
      rec.conditions.monotone = fn <= fx;
      rec.conditions.f_decrease = true;
      rec.classification = StepClass::F;
      rec.wall_time = clock.seconds();
      rep.iterations.push_back(rec);
      x = xn;
      fx = fn;
      g = gnew;
      retries = 0;
      fresh = true;
    } else {
      ++retries;
      if (delta < 1e-300) {
        rep.status = Status::Failure;
        rep.message = "trust radius collapsed";
        break;
      }
    }
  }

  rep.x = x;
  rep.f = fx;
  rep.grad_norm = g.norm();
  rep.iteration_count = static_cast<int>(rep.iterations.size());
  rep.counters = f.counters() - base;
  rep.wall_time = clock.seconds();
  return rep;
}

RunReport reg_newton_minimize(const ProblemInstance& p,
                              const RegNewtonOptions& opt) {
  p.validate();
  if (!(opt.lam > 0.0)) throw ConfigError("RegNewton lam must be positive");
  if (!(opt.eps > 0.0)) throw ConfigError("eps must be positive");
  if (opt.max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
  const Objective& f = *p.oracle;
  detail::Stopwatch clock;
  const EvalCounters base = f.counters();
  RunReport rep;
  rep.solver = "reg_newton";
  rep.problem = p.name;

  Vector x = p.start;
  double fx = f.value(x);
  Vector g = f.gradient(x);
  if (!std::isfinite(fx) || !g.allFinite()) {
    rep.status = Status::Failure;
    rep.message = "non-finite objective at the start point";
  }
  for (int k = 0; rep.message.empty(); ++k) {
    const double gn = g.norm();
    if (gn <= opt.eps) {
      rep.status = Status::FOSP;
      rep.message = "gradient tolerance met";
      break;
    }
    if (k >= opt.max_iter) {
      rep.status = Status::MaxIter;
      rep.message = "iteration budget exhausted";
      break;
    }
    if (detail::out_of_time(clock, opt.time_limit)) {
      rep.status = Status::MaxIter;
      rep.message = "time limit reached";
      break;
    }
    const double reg = opt.lam * std::pow(gn, opt.power);
    Matrix h = f.hessian(x);
    h.diagonal().array() += reg;
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success) {
      rep.status = Status::Failure;
      rep.message = "regularized Hessian is not positive definite";
      break;
    }
    const Vector d = -llt.solve(g);
    double t = 1.0;
    int halvings = 0;
    Vector xn = x + d;
    double fn = f.value(xn);
    while (!(fn <= fx) && halvings < opt.max_halvings) {
      t *= 0.5;
      ++halvings;
      xn = x + t * d;
      fn = f.value(xn);
    }
    if (!(fn <= fx)) {
      rep.status = Status::Failure;
      rep.message = "no decrease after the maximum number of step halvings";
      break;
    }
    const Vector gnew = f.gradient(xn);
    IterationRecord rec;
    rec.k = k;
    rec.f_before = fx;
    rec.f_after = fn;
    rec.grad_norm_before = gn;
    rec.grad_norm_after = gnew.norm();
    rec.lambda = reg;
    rec.step_norm = t * d.norm();
    rec.radius = rec.step_norm;
    rec.params.sigma = opt.lam;
    rec.params.r = 1.0;
    rec.retries = halvings;
    rec.conditions.monotone = true;
    rec.conditions.f_decrease = fn < fx;
    rec.classification = rec.conditions.f_decrease ? StepClass::F : StepClass::G;
    rec.wall_time = clock.seconds();
    rep.iterations.push_back(rec);
    x = xn;
    fx = fn;
    g = gnew;
  }

  rep.x = x;
  rep.f = fx;
  rep.grad_norm = g.norm();
  rep.iteration_count = static_cast<int>(rep.iterations.size());
  rep.counters = f.counters() - base;
  rep.wall_time = clock.seconds();
  return rep;
}

}  // namespace utr
