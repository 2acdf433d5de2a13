#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "utr/problem.hpp"

namespace utr {

// Symmetric linear operator: either a dense matrix or a matrix-vector
// callback.
class SymmetricOperator {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  explicit SymmetricOperator(Matrix dense);
  SymmetricOperator(int dim, Apply apply);

  int dim() const { return dim_; }
  bool is_dense() const { return dense_.has_value(); }
  const Matrix& dense() const;  // ContractError when operator-only
  Vector apply(const Vector& v) const;

 private:
  int dim_;
  std::optional<Matrix> dense_;
  Apply apply_;
};

// Gradient-regularized trust-region subproblem
//   min g'd + 1/2 d'(H + sigma ||g||^{1/2} I) d   s.t. ||d|| <= radius.
struct TrsProblem {
  SymmetricOperator hessian;
  Vector gradient;
  double sigma = 0.0;
  double radius = 1.0;

  double shift() const { return sigma * std::sqrt(gradient.norm()); }
  void validate() const;
};

struct TrsSolution {
  Vector step;
  double multiplier = 0.0;
  double model_decrease = 0.0;  // m(0) - m(d)
  bool on_boundary = false;
  bool hard_case = false;
  int inner_iterations = 0;
  // Krylov only: Lanczos broke down or hit the dimension cap before the
  // inexactness rule was met.
  bool truncated = false;
};

enum class KrylovRule {
  // Stop when the stationarity residual is <= min(0.1, ||g||^{1/2}) ||g||.
  Inexact,
  // Stop when the residual is <= kkt_tol * max(1, ||g||) or the space is
  // exhausted.
  Tight,
};

struct TrsConfig {
  double kkt_tol = 1e-8;
  int max_root_iters = 100;
  int krylov_dim_cap = 0;  // 0 means the full dimension
  KrylovRule krylov_rule = KrylovRule::Inexact;
};

// r * ||g||^{1/2}; zero when g = 0.
double realized_radius(const Vector& g, double r);

// Model value m(d) = g'd + 1/2 d'(H + shift I)d.
double model_value(const TrsProblem& p, const Vector& d);

TrsSolution solve_trs_direct(const TrsProblem& p, const TrsConfig& cfg = {});
TrsSolution solve_trs_krylov(const TrsProblem& p, const TrsConfig& cfg = {});

struct KktResidual {
  double feas = 0.0;   // max(0, ||d|| - radius)
  double slack = 0.0;  // |lambda (||d|| - radius)|
  double stat = 0.0;   // ||(H~ + lambda I)d + g||
  double curv = 0.0;   // max(0, -lambda_min(H~ + lambda I))

  double max() const;
};

KktResidual kkt_residual(const TrsProblem& p, const TrsSolution& s);

struct EigPair {
  double value = 0.0;
  Vector vector;
};

// Leftmost eigenpair. Dense operators use a full symmetric eigensolve;
// callback operators use Lanczos with full reorthogonalization and throw
// NumericalError (carrying the best estimate) on non-convergence.
EigPair smallest_eigpair(const SymmetricOperator& h, double tol);

}  // namespace utr
