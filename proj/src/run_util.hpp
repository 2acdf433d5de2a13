#pragma once

#include <chrono>

#include "utr/problem.hpp"
#include "utr/report.hpp"
#include "utr/trs.hpp"

namespace utr {

inline EvalCounters operator-(const EvalCounters& a, const EvalCounters& b) {
  return {a.f - b.f, a.g - b.g, a.hess - b.hess, a.hv - b.hv};
}

}  // namespace utr

namespace utr::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline bool out_of_time(const Stopwatch& w, double limit) {
  return limit > 0.0 && w.seconds() > limit;
}

// Dense Hessian for the direct solver, Hessian-vector callback for Krylov.
inline SymmetricOperator hessian_operator(const Objective& f, const Vector& x,
                                          Subsolver s) {
  if (s == Subsolver::Direct) {
    Matrix h = f.hessian(x);
    return SymmetricOperator(Matrix(0.5 * (h + h.transpose())));
  }
  return SymmetricOperator(f.dimension(), [&f, x](const Vector& v) {
    return f.hessian_vector(x, v);
  });
}

inline TrsSolution solve_trs(const TrsProblem& p, Subsolver s,
                             const TrsConfig& cfg) {
  return s == Subsolver::Direct ? solve_trs_direct(p, cfg)
                                : solve_trs_krylov(p, cfg);
}

}  // namespace utr::detail
