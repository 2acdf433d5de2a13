#pragma once

#include <memory>

#include "utr/problem.hpp"
#include "utr/report.hpp"
#include "utr/utr.hpp"

namespace utr {

// d(x) = 1/3 ||x - anchor||^3
class CubicBregman {
 public:
  explicit CubicBregman(Vector anchor);

  const Vector& anchor() const { return anchor_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  // ||r|| I + r r'/||r|| with r = x - anchor; zero at the anchor.
  Matrix hessian(const Vector& x) const;

 private:
  Vector anchor_;
};

// d(y) - d(x) - grad d(x)'(y - x), evaluated in the cancellation-free form
// (p - q)^2 (2p + q)/6 + q ||y - x||^2/2 with p = ||y - c||, q = ||x - c||.
double bregman_divergence(const CubicBregman& b, const Vector& x,
                          const Vector& y);

// h(x) = A_next f((a x + A_k x_k)/A_next) + beta_d(v_k; x)
class ContractedObjective final : public Objective {
 public:
  ContractedObjective(const Objective& f, double a, double A_next, Vector x_k,
                      CubicBregman b, Vector v_k);

  int dimension() const override { return f_.dimension(); }
  EvalCounters counters() const override { return f_.counters(); }

  // z = (a x + A_k x_k)/A_next
  Vector contracted_point(const Vector& x) const;

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;
  Vector evaluate_hessian_vector(const Vector& x,
                                 const Vector& v) const override;

 private:
  const Objective& f_;
  double a_;
  double A_next_;
  double A_k_;
  Vector x_k_;
  CubicBregman bregman_;
  Vector v_k_;
  Vector grad_d_vk_;
};

std::shared_ptr<ContractedObjective> contracted_oracle(
    const Objective& f, double a, double A_next, const Vector& x_k,
    const CubicBregman& b, const Vector& v_k);

struct AccelOptions {
  double M = 1.0;
  double eps = 1e-6;
  int max_outer = 5000;
  int max_inner_iter = 100000;
  // f* for the f(x_k) - f* <= eps stop; falls back to the instance's known
  // optimum, then to ||grad f(x_k)|| <= eps.
  std::optional<double> f_star;
  double time_limit = 0.0;
  Subsolver subsolver = Subsolver::Direct;
};

// Outer step a_{k+1} = (k+1)^2/(9M).
double accel_step_weight(int k, double M);
// Inner accuracy delta_k = min(1, eps^{2/3})/(k+1).
double accel_inner_tolerance(int k, double eps);
// Lipschitz constant used for the inner UTR on h_{k+1}.
double accel_inner_lipschitz(double a, double A_next, double M);

RunReport accel_minimize(const ProblemInstance& p, const AccelOptions& opt);

}  // namespace utr
