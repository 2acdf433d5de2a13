#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "utr/problem.hpp"

namespace utr {

enum class Status { FOSP, SOSP, MaxIter, Failure };

std::string_view to_string(Status s);
Status status_from_string(std::string_view s);

// F-set: sufficient function decrease; G-set: gradient-norm contraction.
enum class StepClass { F, G };

std::string_view to_string(StepClass c);

enum class Subsolver { Direct, Krylov };

std::string_view to_string(Subsolver s);
Subsolver subsolver_from_string(std::string_view s);

struct StepParams {
  double sigma = 0.0;
  double r = 1.0;
  std::optional<double> rho;
};

struct ConditionFlags {
  bool monotone = false;       // f1 <= f0
  bool f_decrease = false;     // decrease branch of the acceptance test
  bool g_contract = false;     // gradient contraction branch
  bool growth_bounded = true;  // ||g1|| <= ||g0|| / xi
};

// One accepted iteration.
struct IterationRecord {
  int k = 0;
  double f_before = 0.0;
  double f_after = 0.0;
  double grad_norm_before = 0.0;
  double grad_norm_after = 0.0;
  double lambda = 0.0;
  double step_norm = 0.0;
  double radius = 0.0;
  StepClass classification = StepClass::F;
  ConditionFlags conditions;
  StepParams params;
  int retries = 0;
  double wall_time = 0.0;  // seconds since the run started

  // Adaptive method only.
  std::optional<double> lambda_min;
  std::string branch;
};

// One outer iteration of the accelerated method.
struct AccelRecord {
  int k = 0;
  double a = 0.0;
  double A = 0.0;
  int inner_iters = 0;
  double grad_h_norm = 0.0;
  double delta = 0.0;
  double f_x = 0.0;
  double grad_f_norm = 0.0;  // ||grad f(x_k)||
  double wall_time = 0.0;
};

struct RunReport {
  std::string solver;
  std::string problem;
  Status status = Status::Failure;
  Vector x;
  double f = 0.0;
  double grad_norm = 0.0;
  std::vector<IterationRecord> iterations;
  std::vector<AccelRecord> outer;  // accelerated method only
  int iteration_count = 0;
  EvalCounters counters;
  double wall_time = 0.0;
  std::string message;

  std::optional<double> final_lambda_min;
  std::optional<double> final_rho;
  double final_M = 0.0;  // Lipschitz estimate in use at the end (UTR)
  int condition_violations = 0;  // convex-mode growth-bound violations

  bool success(double eps) const;
};

// Fixed-schema trace CSV: k,f,gnorm,lambda,stepnorm,class,retries. Reports
// from the adaptive method append rho,lambda_min,branch,inner_retries.
void write_trace_csv(std::ostream& out, const RunReport& r);
// Outer trace of the accelerated method: k,a,A,inner_iters,grad_h,f_x.
void write_accel_trace_csv(std::ostream& out, const RunReport& r);
// Plot data: k,f,gnorm,wall_time at each accepted iterate.
void write_plot_csv(std::ostream& out, const RunReport& r);

}  // namespace utr
