#pragma once

#include "utr/problem.hpp"
#include "utr/report.hpp"
#include "utr/trs.hpp"

namespace utr {

struct ClassicTrConfig {
  double delta0 = 1.0;
  double eta_accept = 0.1;
  double shrink = 0.25;
  double grow = 2.0;
  double delta_max = 1e6;
  Subsolver subsolver = Subsolver::Direct;
  double time_limit = 0.0;
  TrsConfig trs;

  void validate() const;
};

// Actual over predicted reduction.
double reduction_ratio(double f0, double f1, double model_decrease);

RunReport classic_tr_minimize(const ProblemInstance& p,
                              const ClassicTrConfig& cfg, double eps,
                              int max_iter);

struct RegNewtonOptions {
  double lam = 1e-3;
  double power = 0.5;
  double eps = 1e-5;
  int max_iter = 10000;
  int max_halvings = 30;
  double time_limit = 0.0;
};

// x+ = x - (H + lam ||g||^power I)^{-1} g, halving on increase.
RunReport reg_newton_minimize(const ProblemInstance& p,
                              const RegNewtonOptions& opt);

}  // namespace utr
