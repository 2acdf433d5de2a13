#pragma once

#include <string>
#include <vector>

#include "utr/data.hpp"
#include "utr/problem.hpp"

namespace utr {

// Desk-scale problem suite. Every call builds fresh oracles, so instances
// from separate calls never share counters.
std::vector<ProblemInstance> builtin_suite();
std::vector<std::string> builtin_names();

// Look up a built-in instance by name, or load "libsvm:<path>" as a
// logistic-regression instance. Throws ConfigError for unknown names.
ProblemInstance make_problem(const std::string& name);

ProblemInstance logistic_problem(const std::string& name, Dataset data,
                                 double gamma);

struct FdCheck {
  double grad_err = 0.0;
  double hess_err = 0.0;
};

// Max relative error of the analytic gradient against central differences
// of the value, and of analytic Hessian-vector products against central
// differences of the gradient, over the canonical directions.
FdCheck finite_difference_check(const Objective& oracle, const Vector& x,
                                double h);

}  // namespace utr
