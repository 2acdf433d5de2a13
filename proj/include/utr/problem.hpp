#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "utr/errors.hpp"

namespace utr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct EvalCounters {
  std::uint64_t f = 0;
  std::uint64_t g = 0;
  std::uint64_t hess = 0;
  std::uint64_t hv = 0;
};

// Objective oracle. Public entry points count evaluations and enforce the
// finiteness and Hessian-symmetry contracts; subclasses implement the
// protected evaluate_* hooks.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dimension() const = 0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  Vector hessian_vector(const Vector& x, const Vector& v) const;

  // Counters of the underlying oracle. Wrappers that forward to another
  // objective report that objective's counters.
  virtual EvalCounters counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

 protected:
  virtual double evaluate_value(const Vector& x) const = 0;
  virtual Vector evaluate_gradient(const Vector& x) const = 0;
  virtual Matrix evaluate_hessian(const Vector& x) const = 0;
  // Default: dense Hessian times v.
  virtual Vector evaluate_hessian_vector(const Vector& x,
                                         const Vector& v) const;

 private:
  void check_point(const Vector& x) const;

  mutable EvalCounters counters_;
};

struct KnownOptimum {
  Vector point;
  double value = 0.0;
};

struct ProblemInstance {
  std::string name;
  std::shared_ptr<Objective> oracle;
  Vector start;
  // Hessian Lipschitz constant valid on the sublevel set of `start`.
  std::optional<double> lipschitz_hint;
  std::optional<KnownOptimum> known_optimum;
  bool convex = false;

  // Throws ContractError when start/hint violate the instance invariants.
  void validate() const;
};

bool all_finite(const Vector& x);

// ---------------------------------------------------------------------------
// Concrete objectives used by the suite and by tests.

// f(x) = 1/2 x'Ax - b'x + c
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Matrix a, Vector b, double c = 0.0);
  int dimension() const override { return static_cast<int>(b_.size()); }
  const Matrix& matrix() const { return a_; }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;
  Vector evaluate_hessian_vector(const Vector& x,
                                 const Vector& v) const override;

 private:
  Matrix a_;
  Vector b_;
  double c_;
};

// f(x) = c'x + c0
class LinearObjective final : public Objective {
 public:
  explicit LinearObjective(Vector c, double c0 = 0.0);
  int dimension() const override { return static_cast<int>(c_.size()); }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;

 private:
  Vector c_;
  double c0_;
};

// Chained Rosenbrock: sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
class RosenbrockObjective final : public Objective {
 public:
  explicit RosenbrockObjective(int n);
  int dimension() const override { return n_; }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;
  Vector evaluate_hessian_vector(const Vector& x,
                                 const Vector& v) const override;

 private:
  int n_;
};

// f(x) = x1^4/4 - x1^2/2 + 1/2 sum_{i>=2} x_i^2. Saddle at the origin,
// minimizers at x1 = +-1 with value -1/4.
class QuarticSaddleObjective final : public Objective {
 public:
  explicit QuarticSaddleObjective(int n);
  int dimension() const override { return n_; }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;

 private:
  int n_;
};

// Separable sum of quartics:
//   f(x) = sum_i x_i^4/4 + curvature_i x_i^2/2 + linear_i x_i.
// Negative curvature entries make the sum nonconvex.
class SeparableQuarticObjective final : public Objective {
 public:
  SeparableQuarticObjective(Vector curvature, Vector linear);
  int dimension() const override { return static_cast<int>(linear_.size()); }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;
  Vector evaluate_hessian_vector(const Vector& x,
                                 const Vector& v) const override;

 private:
  Vector curvature_;
  Vector linear_;
};

// Strongly convex f(x) = 1/2 x'Ax + 1/4 sum x_i^4 - b'x with A positive
// definite.
class QuadraticQuarticObjective final : public Objective {
 public:
  QuadraticQuarticObjective(Matrix a, Vector b);
  int dimension() const override { return static_cast<int>(b_.size()); }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;

 private:
  Matrix a_;
  Vector b_;
};

// Himmelblau: (x^2 + y - 11)^2 + (x + y^2 - 7)^2.
class HimmelblauObjective final : public Objective {
 public:
  int dimension() const override { return 2; }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;
};

// Powell singular function (n = 4): convex, singular Hessian at x* = 0.
class PowellSingularObjective final : public Objective {
 public:
  int dimension() const override { return 4; }

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;
};

}  // namespace utr
