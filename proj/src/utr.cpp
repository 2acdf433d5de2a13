#include "utr/utr.hpp"

#include <cmath>

#include "run_util.hpp"

namespace utr {

StepParams simple_strategy(double M) {
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw ConfigError("Lipschitz constant M must be positive and finite");
  }
  const double s = std::sqrt(M);
  return {s / 3.0, 1.0 / (3.0 * s), std::nullopt};
}

std::string_view to_string(ConditionOutcome c) {
  switch (c) {
    case ConditionOutcome::MonotoneOnly: return "MonotoneOnly";
    case ConditionOutcome::FDecrease: return "FDecrease";
    case ConditionOutcome::GContract: return "GContract";
    case ConditionOutcome::Reject: return "Reject";
  }
  return "Reject";
}

namespace {

bool decrease_branch(double f0, double f1, double g0, const SimpleConstants& c) {
  return f1 <= f0 - (c.kappa / std::sqrt(c.M)) * std::pow(g0, 1.5);
}

}  // namespace

ConditionOutcome check_conditions(double f0, double f1, double g0norm,
                                  double g1norm, const SimpleConstants& c,
                                  bool convex_mode) {
  if (f1 > f0) return ConditionOutcome::Reject;
  if (convex_mode && g1norm > g0norm / c.xi) return ConditionOutcome::Reject;
  if (decrease_branch(f0, f1, g0norm, c)) return ConditionOutcome::FDecrease;
  if (g1norm <= c.xi * g0norm) return ConditionOutcome::GContract;
  return ConditionOutcome::MonotoneOnly;
}

StepClass classify_iteration(const IterationRecord& rec,
                             const SimpleConstants& c) {
  if (decrease_branch(rec.f_before, rec.f_after, rec.grad_norm_before, c)) {
    return StepClass::F;
  }
  if (rec.grad_norm_after <= c.xi * rec.grad_norm_before) return StepClass::G;
  throw InvariantError("accepted iteration " + std::to_string(rec.k) +
                       " met neither the decrease nor the contraction test");
}

RunReport utr_minimize(const Objective& f, const Vector& x0,
                       const UtrOptions& opt) {
  if (!(opt.M > 0.0)) throw ConfigError("UTR needs M > 0");
  if (!(opt.eps > 0.0)) throw ConfigError("UTR needs eps > 0");
  if (opt.max_iter < 0) throw ConfigError("max_iter must be >= 0");
  if (x0.size() != f.dimension()) throw ContractError("start point has wrong dimension");

  detail::Stopwatch clock;
  const EvalCounters base = f.counters();
  RunReport rep;
  rep.solver = "utr";
  SimpleConstants c;
  c.M = opt.M;

  Vector x = x0;
  double fx = f.value(x);
  Vector g = f.gradient(x);
  auto done = [&](Status s, std::string msg) {
    rep.status = s;
    rep.message = std::move(msg);
  };

  if (!std::isfinite(fx) || !g.allFinite()) {
    done(Status::Failure, "non-finite objective at the start point");
  } else {
    for (int k = 0;; ++k) {
      const double gn = g.norm();
      if (gn <= opt.eps) {
        done(Status::FOSP, gn == 0.0 ? "exact stationary point" : "gradient tolerance met");
        break;
      }
      if (k >= opt.max_iter) {
        done(Status::MaxIter, "iteration budget exhausted");
        break;
      }
      if (detail::out_of_time(clock, opt.time_limit)) {
        done(Status::MaxIter, "time limit reached");
        break;
      }

      const SymmetricOperator h = detail::hessian_operator(f, x, opt.subsolver);
      int retries = 0;
      bool accepted = false;
      bool failed = false;
      IterationRecord rec;
      while (!accepted) {
        const StepParams sp = simple_strategy(c.M);
        const TrsProblem trs{h, g, sp.sigma, realized_radius(g, sp.r)};
        TrsSolution sol;
        try {
          sol = detail::solve_trs(trs, opt.subsolver, opt.trs);
        } catch (const NumericalError& e) {
          done(Status::Failure, std::string("subproblem: ") + e.what());
          failed = true;
          break;
        }
        const Vector xn = x + sol.step;
        const double fn = f.value(xn);
        if (!std::isfinite(fn)) {
          done(Status::Failure, "non-finite objective at a trial point");
          failed = true;
          break;
        }
        const Vector gnew = f.gradient(xn);
        const double g1 = gnew.norm();
        const double slack = opt.monotone_slack * std::max(1.0, std::abs(fx));
        ConditionOutcome out = ConditionOutcome::Reject;
        if (fn <= fx + slack) {
          out = check_conditions(fx, std::min(fn, fx), gn, g1, c, opt.convex_mode);
        }
        if (out == ConditionOutcome::FDecrease || out == ConditionOutcome::GContract) {
          rec.k = k;
          rec.f_before = fx;
          rec.f_after = fn;
          rec.grad_norm_before = gn;
          rec.grad_norm_after = g1;
          rec.lambda = sol.multiplier;
          rec.step_norm = sol.step.norm();
          rec.radius = trs.radius;
          rec.params = sp;
          rec.retries = retries;
          rec.conditions.monotone = fn <= fx;
          rec.conditions.f_decrease = out == ConditionOutcome::FDecrease;
          rec.conditions.g_contract = g1 <= c.xi * gn;
          rec.conditions.growth_bounded = g1 <= gn / c.xi;
          if (out == ConditionOutcome::FDecrease) {
            rec.classification = StepClass::F;
          } else {
            rec.classification = StepClass::G;
          }
          if (!rec.conditions.growth_bounded) ++rep.condition_violations;
          x = xn;
          fx = fn;
          g = gnew;
          accepted = true;
        } else {
          if (++retries > opt.max_doublings) {
            done(Status::Failure, "step rejected after the maximum number of M doublings");
            failed = true;
            break;
          }
          c.M *= 2.0;
        }
      }
      if (failed) break;
      rec.wall_time = clock.seconds();
      rep.iterations.push_back(std::move(rec));
    }
  }

  rep.x = x;
  rep.f = fx;
  rep.grad_norm = g.norm();
  rep.iteration_count = static_cast<int>(rep.iterations.size());
  rep.final_M = c.M;
  rep.counters = f.counters() - base;
  rep.wall_time = clock.seconds();
  return rep;
}

RunReport utr_minimize(const ProblemInstance& p, const UtrOptions& opt) {
  p.validate();
  RunReport rep = utr_minimize(*p.oracle, p.start, opt);
  rep.problem = p.name;
  return rep;
}

}  // namespace utr
