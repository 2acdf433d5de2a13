#pragma once

#include <string_view>

#include "utr/problem.hpp"
#include "utr/report.hpp"
#include "utr/trs.hpp"

namespace utr {

struct AdaptiveConfig {
  double eta = 1e-2;      // 0 < eta < 1/32
  double xi = 0.3;        // 1/4 < xi < 1
  double rho0 = 1.0;
  double rho_min = 1e-3;
  double gamma1 = 2.0;    // penalty increase
  double gamma2 = 1.2;    // penalty relaxation
  double eps = 1e-5;
  int max_outer = 10000;
  int max_inner = 60;
  bool convex_mode = false;
  Subsolver subsolver = Subsolver::Direct;
  double time_limit = 0.0;
  TrsConfig trs;

  // Throws ConfigError outside the admissible ranges.
  void validate() const;
};

// Rows of the adaptive parameter table.
enum class Branch {
  NegativeCurvature,  // ||g|| >= eps, lambda_min <= -rho ||g||^{1/2}
  PositiveCurvature,  // ||g|| >= eps, lambda_min >=  rho ||g||^{1/2}
  Regularized,        // ||g|| >= eps, in between: sigma = rho
  Certified,          // ||g|| < eps, lambda_min > -rho eps^{1/2}
  SmallGradientEigen  // ||g|| < eps, lambda_min <= -rho eps^{1/2}
};

std::string_view to_string(Branch b);

struct ParamDecision {
  Branch branch = Branch::Certified;
  double sigma = 0.0;
  double radius = 0.0;  // realized radius r ||g||^{1/2}; > 0 for steps

  bool terminate() const { return branch == Branch::Certified; }
};

ParamDecision select_params(double lambda_min, double gnorm, double rho,
                            double eps);

// Modified sufficient-decrease test, combined with monotonicity.
bool check_modified_decrease(double f0, double f1, double g0norm,
                             double g1norm, double rho,
                             const AdaptiveConfig& cfg);

// gamma1 * max{ sqrt(M/(12(1-32 eta))), sqrt(M/(6(1-8 eta))),
//               sqrt(M/(32 xi - 8)), sqrt(M/(8 xi)) }
double rho_max_bound(double M, const AdaptiveConfig& cfg);

bool sosp_certificate(double gnorm, double lambda_min, double rho, double eps);

RunReport autr_minimize(const ProblemInstance& p, const AdaptiveConfig& cfg);

}  // namespace utr
