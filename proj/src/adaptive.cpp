#include "utr/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "run_util.hpp"

namespace utr {

void AdaptiveConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0 / 32.0)) throw ConfigError("eta must lie in (0, 1/32)");
  if (!(xi > 0.25 && xi < 1.0)) throw ConfigError("xi must lie in (1/4, 1)");
  if (!(rho0 > 0.0)) throw ConfigError("rho0 must be positive");
  if (!(rho_min > 0.0)) throw ConfigError("rho_min must be positive");
  if (rho0 < rho_min) throw ConfigError("rho0 must be >= rho_min");
  if (!(gamma1 > 1.0)) throw ConfigError("gamma1 must exceed 1");
  if (!(gamma2 > 1.0)) throw ConfigError("gamma2 must exceed 1");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (max_outer < 0) throw ConfigError("max_outer must be >= 0");
  if (max_inner < 1) throw ConfigError("max_inner must be >= 1");
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::NegativeCurvature: return "neg_curv";
    case Branch::PositiveCurvature: return "pos_curv";
    case Branch::Regularized: return "regularized";
    case Branch::Certified: return "certified";
    case Branch::SmallGradientEigen: return "small_grad_eigen";
  }
  return "certified";
}

ParamDecision select_params(double lambda_min, double gnorm, double rho,
                            double eps) {
  ParamDecision d;
  if (gnorm >= eps) {
    const double s = std::sqrt(gnorm);
    if (lambda_min <= -rho * s) {
      d.branch = Branch::NegativeCurvature;
      d.radius = s / (2.0 * rho);
    } else if (lambda_min >= rho * s) {
      d.branch = Branch::PositiveCurvature;
      d.radius = s / (2.0 * rho);
    } else {
      d.branch = Branch::Regularized;
      d.sigma = rho;
      d.radius = s / (4.0 * rho);
    }
    return d;
  }
  if (lambda_min > -rho * std::sqrt(eps)) {
    d.branch = Branch::Certified;
    return d;
  }
  d.branch = Branch::SmallGradientEigen;
  d.radius = std::sqrt(eps) / (2.0 * rho);
  return d;
}

bool check_modified_decrease(double f0, double f1, double g0norm,
                             double g1norm, double rho,
                             const AdaptiveConfig& cfg) {
  if (f1 > f0) return false;
  if (g0norm >= cfg.eps) {
    return f1 <= f0 - (cfg.eta / rho) * std::pow(g0norm, 1.5) ||
           g1norm <= cfg.xi * g0norm;
  }
  return f1 <= f0 - (cfg.eta / rho) * std::pow(cfg.eps, 1.5);
}

double rho_max_bound(double M, const AdaptiveConfig& cfg) {
  cfg.validate();
  if (!(M > 0.0)) throw ConfigError("M must be positive");
  const double t1 = std::sqrt(M / (12.0 * (1.0 - 32.0 * cfg.eta)));
  const double t2 = std::sqrt(M / (6.0 * (1.0 - 8.0 * cfg.eta)));
  const double t3 = std::sqrt(M / (32.0 * cfg.xi - 8.0));
  const double t4 = std::sqrt(M / (8.0 * cfg.xi));
  return cfg.gamma1 * std::max({t1, t2, t3, t4});
}

bool sosp_certificate(double gnorm, double lambda_min, double rho, double eps) {
  return gnorm <= eps && lambda_min > -rho * std::sqrt(eps);
}

RunReport autr_minimize(const ProblemInstance& p, const AdaptiveConfig& cfg) {
  cfg.validate();
  p.validate();
  const Objective& f = *p.oracle;
  detail::Stopwatch clock;
  const EvalCounters base = f.counters();
  RunReport rep;
  rep.solver = "autr";
  rep.problem = p.name;

  Vector x = p.start;
  double fx = f.value(x);
  Vector g = f.gradient(x);
  double rho = cfg.rho0;
  auto done = [&](Status s, std::string msg) {
    rep.status = s;
    rep.message = std::move(msg);
  };

  if (!std::isfinite(fx) || !g.allFinite()) {
    done(Status::Failure, "non-finite objective at the start point");
  } else {
    for (int k = 0;; ++k) {
      const double gn = g.norm();
      if (k >= cfg.max_outer) {
        done(Status::MaxIter, "outer budget exhausted");
        break;
      }
      if (detail::out_of_time(clock, cfg.time_limit)) {
        done(Status::MaxIter, "time limit reached");
        break;
      }
      const SymmetricOperator h = detail::hessian_operator(f, x, cfg.subsolver);
      EigPair eig;
      try {
        eig = smallest_eigpair(h, 1e-6);
      } catch (const NumericalError& e) {
        done(Status::Failure, std::string("eigensolve: ") + e.what());
        break;
      }
      rep.final_lambda_min = eig.value;

      int retries = 0;
      bool accepted = false;
      bool stop = false;
      IterationRecord rec;
      while (!accepted) {
        const ParamDecision dec = select_params(eig.value, gn, rho, cfg.eps);
        if (dec.terminate()) {
          done(Status::SOSP, "second-order certificate");
          stop = true;
          break;
        }
        const TrsProblem trs{h, g, dec.sigma, dec.radius};
        TrsSolution sol;
        try {
          sol = detail::solve_trs(trs, cfg.subsolver, cfg.trs);
        } catch (const NumericalError& e) {
          done(Status::Failure, std::string("subproblem: ") + e.what());
          stop = true;
          break;
        }
        if (cfg.subsolver == Subsolver::Krylov && eig.value < 0.0) {
          // A Krylov space built from g can miss the leftmost eigenvector;
          // fall back to the eigenpoint when it models lower.
          Vector e = dec.radius * eig.vector;
          if (g.dot(e) > 0.0) e = -e;
          if (model_value(trs, e) < model_value(trs, sol.step)) {
            sol.step = e;
            sol.multiplier = -eig.value - trs.shift();
            sol.model_decrease = -model_value(trs, e);
          }
        }
        const Vector xn = x + sol.step;
        const double fn = f.value(xn);
        if (!std::isfinite(fn)) {
          done(Status::Failure, "non-finite objective at a trial point");
          stop = true;
          break;
        }
        const Vector gnew = f.gradient(xn);
        const double g1 = gnew.norm();
        if (check_modified_decrease(fx, fn, gn, g1, rho, cfg)) {
          rec.k = k;
          rec.f_before = fx;
          rec.f_after = fn;
          rec.grad_norm_before = gn;
          rec.grad_norm_after = g1;
          rec.lambda = sol.multiplier;
          rec.step_norm = sol.step.norm();
          rec.radius = dec.radius;
          rec.params.sigma = dec.sigma;
          rec.params.r = gn > 0.0 ? dec.radius / std::sqrt(gn) : dec.radius;
          rec.params.rho = rho;
          rec.retries = retries;
          rec.lambda_min = eig.value;
          rec.branch = std::string(to_string(dec.branch));
          const double scale = std::max(gn, cfg.eps);
          rec.conditions.monotone = fn <= fx;
          rec.conditions.f_decrease =
              fn <= fx - (cfg.eta / rho) * std::pow(scale, 1.5);
          rec.conditions.g_contract = g1 <= cfg.xi * gn;
          rec.conditions.growth_bounded = g1 <= gn / cfg.xi;
          rec.classification =
              rec.conditions.f_decrease ? StepClass::F : StepClass::G;
          if (cfg.convex_mode && !rec.conditions.growth_bounded) {
            ++rep.condition_violations;
          }
          x = xn;
          fx = fn;
          g = gnew;
          rho = std::max(cfg.rho_min, rho / cfg.gamma2);
          accepted = true;
        } else {
          if (++retries > cfg.max_inner) {
            done(Status::Failure, "inner loop exceeded max_inner penalty increases");
            stop = true;
            break;
          }
          rho *= cfg.gamma1;
        }
      }
      if (stop) break;
      rec.wall_time = clock.seconds();
      rep.iterations.push_back(std::move(rec));
    }
  }

  rep.x = x;
  rep.f = fx;
  rep.grad_norm = g.norm();
  rep.iteration_count = static_cast<int>(rep.iterations.size());
  rep.final_rho = rho;
  rep.counters = f.counters() - base;
  rep.wall_time = clock.seconds();
  return rep;
}

}  // namespace utr
