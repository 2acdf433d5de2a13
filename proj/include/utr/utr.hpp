#pragma once

#include "utr/problem.hpp"
#include "utr/report.hpp"
#include "utr/trs.hpp"

namespace utr {

// Acceptance constants of the fixed strategy: a step either drops f by
// kappa/sqrt(M) ||g||^{3/2} or contracts ||g|| by xi.
struct SimpleConstants {
  double M = 1.0;
  double kappa = 1.0 / 81.0;
  double xi = 1.0 / 6.0;
};

// (sigma, r) = (sqrt(M)/3, 1/(3 sqrt(M))). With this pair
// M/2 r^2 + sigma r = 1/6 exactly.
StepParams simple_strategy(double M);

enum class ConditionOutcome { MonotoneOnly, FDecrease, GContract, Reject };

std::string_view to_string(ConditionOutcome c);

// Reject when f increases, or (convex_mode) when ||g1|| > ||g0|| / xi.
// Otherwise FDecrease beats GContract on ties.
ConditionOutcome check_conditions(double f0, double f1, double g0norm,
                                  double g1norm, const SimpleConstants& c,
                                  bool convex_mode = false);

// F-set when the decrease branch held (ties go to F), G-set when only the
// contraction held. Throws InvariantError when neither held.
StepClass classify_iteration(const IterationRecord& rec,
                             const SimpleConstants& c);

struct UtrOptions {
  double M = 1.0;  // Lipschitz constant, or an initial guess
  double eps = 1e-5;
  int max_iter = 10000;
  bool convex_mode = false;
  Subsolver subsolver = Subsolver::Direct;
  int max_doublings = 50;  // per iteration
  double time_limit = 0.0;  // seconds, 0 = none
  // Roundoff allowance in the monotonicity test; 0 means exact.
  double monotone_slack = 0.0;
  TrsConfig trs;
};

RunReport utr_minimize(const ProblemInstance& p, const UtrOptions& opt);

// Run on a bare objective (used by the accelerated method on its auxiliary
// functions).
RunReport utr_minimize(const Objective& f, const Vector& x0,
                       const UtrOptions& opt);

}  // namespace utr
