#include "utr/problem.hpp"

#include <cmath>
#include <sstream>

namespace utr {

bool all_finite(const Vector& x) { return x.allFinite(); }

void Objective::check_point(const Vector& x) const {
  if (x.size() != dimension()) {
    std::ostringstream os;
    os << "point has dimension " << x.size() << ", oracle expects "
       << dimension();
    throw ContractError(os.str());
  }
  if (!all_finite(x)) throw ContractError("point has non-finite coordinates");
}

double Objective::value(const Vector& x) const {
  check_point(x);
  ++counters_.f;
  return evaluate_value(x);
}

Vector Objective::gradient(const Vector& x) const {
  check_point(x);
  ++counters_.g;
  return evaluate_gradient(x);
}

Matrix Objective::hessian(const Vector& x) const {
  check_point(x);
  ++counters_.hess;
  Matrix h = evaluate_hessian(x);
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) {
    throw ContractError("Hessian is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
  }
  return h;
}

Vector Objective::hessian_vector(const Vector& x, const Vector& v) const {
  check_point(x);
  if (v.size() != dimension()) {
    throw ContractError("Hessian-vector direction has wrong dimension");
  }
  ++counters_.hv;
  return evaluate_hessian_vector(x, v);
}

Vector Objective::evaluate_hessian_vector(const Vector& x,
                                          const Vector& v) const {
  return evaluate_hessian(x) * v;
}

void ProblemInstance::validate() const {
  if (!oracle) throw ContractError(name + ": missing oracle");
  if (start.size() != oracle->dimension()) {
    throw ContractError(name + ": start point has the wrong dimension");
  }
  if (!all_finite(start)) throw ContractError(name + ": non-finite start");
  if (lipschitz_hint && !(*lipschitz_hint > 0.0)) {
    throw ContractError(name + ": lipschitz_hint must be positive");
  }
  if (known_optimum && known_optimum->point.size() != start.size()) {
    throw ContractError(name + ": known optimum has the wrong dimension");
  }
}

// --- quadratic --------------------------------------------------------------

QuadraticObjective::QuadraticObjective(Matrix a, Vector b, double c)
    : a_(std::move(a)), b_(std::move(b)), c_(c) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw ContractError("quadratic: dimension mismatch");
  }
}

double QuadraticObjective::evaluate_value(const Vector& x) const {
  return 0.5 * x.dot(a_ * x) - b_.dot(x) + c_;
}

Vector QuadraticObjective::evaluate_gradient(const Vector& x) const {
  return a_ * x - b_;
}

Matrix QuadraticObjective::evaluate_hessian(const Vector&) const { return a_; }

Vector QuadraticObjective::evaluate_hessian_vector(const Vector&,
                                                   const Vector& v) const {
  return a_ * v;
}

// --- linear -----------------------------------------------------------------

LinearObjective::LinearObjective(Vector c, double c0)
    : c_(std::move(c)), c0_(c0) {}

double LinearObjective::evaluate_value(const Vector& x) const {
  return c_.dot(x) + c0_;
}

Vector LinearObjective::evaluate_gradient(const Vector&) const { return c_; }

Matrix LinearObjective::evaluate_hessian(const Vector&) const {
  return Matrix::Zero(c_.size(), c_.size());
}

// --- Rosenbrock -------------------------------------------------------------

RosenbrockObjective::RosenbrockObjective(int n) : n_(n) {
  if (n < 2) throw ConfigError("rosenbrock needs n >= 2");
}

double RosenbrockObjective::evaluate_value(const Vector& x) const {
  double f = 0.0;
  for (int i = 0; i + 1 < n_; ++i) {
    const double t = x[i + 1] - x[i] * x[i];
    const double s = 1.0 - x[i];
    f += 100.0 * t * t + s * s;
  }
  return f;
}

Vector RosenbrockObjective::evaluate_gradient(const Vector& x) const {
  Vector g = Vector::Zero(n_);
  for (int i = 0; i + 1 < n_; ++i) {
    const double t = x[i + 1] - x[i] * x[i];
    g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
    g[i + 1] += 200.0 * t;
  }
  return g;
}

Matrix RosenbrockObjective::evaluate_hessian(const Vector& x) const {
  Matrix h = Matrix::Zero(n_, n_);
  for (int i = 0; i + 1 < n_; ++i) {
    h(i, i) += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
    h(i, i + 1) += -400.0 * x[i];
    h(i + 1, i) += -400.0 * x[i];
    h(i + 1, i + 1) += 200.0;
  }
  return h;
}

Vector RosenbrockObjective::evaluate_hessian_vector(const Vector& x,
                                                    const Vector& v) const {
  Vector hv = Vector::Zero(n_);
  for (int i = 0; i + 1 < n_; ++i) {
    const double hii = 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
    const double hij = -400.0 * x[i];
    hv[i] += hii * v[i] + hij * v[i + 1];
    hv[i + 1] += hij * v[i] + 200.0 * v[i + 1];
  }
  return hv;
}

// --- quartic saddle ---------------------------------------------------------

QuarticSaddleObjective::QuarticSaddleObjective(int n) : n_(n) {
  if (n < 1) throw ConfigError("quartic saddle needs n >= 1");
}

double QuarticSaddleObjective::evaluate_value(const Vector& x) const {
  const double x1 = x[0];
  return 0.25 * x1 * x1 * x1 * x1 - 0.5 * x1 * x1 +
         0.5 * x.tail(n_ - 1).squaredNorm();
}

Vector QuarticSaddleObjective::evaluate_gradient(const Vector& x) const {
  Vector g = x;
  g[0] = x[0] * x[0] * x[0] - x[0];
  return g;
}

Matrix QuarticSaddleObjective::evaluate_hessian(const Vector& x) const {
  Matrix h = Matrix::Identity(n_, n_);
  h(0, 0) = 3.0 * x[0] * x[0] - 1.0;
  return h;
}

// --- separable quartic ------------------------------------------------------

SeparableQuarticObjective::SeparableQuarticObjective(Vector curvature,
                                                     Vector linear)
    : curvature_(std::move(curvature)), linear_(std::move(linear)) {
  if (curvature_.size() != linear_.size()) {
    throw ContractError("separable quartic: dimension mismatch");
  }
}

double SeparableQuarticObjective::evaluate_value(const Vector& x) const {
  double f = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    f += 0.25 * xi * xi * xi * xi + 0.5 * curvature_[i] * xi * xi +
         linear_[i] * xi;
  }
  return f;
}

Vector SeparableQuarticObjective::evaluate_gradient(const Vector& x) const {
  return x.array().cube().matrix() + curvature_.cwiseProduct(x) + linear_;
}

Matrix SeparableQuarticObjective::evaluate_hessian(const Vector& x) const {
  return (3.0 * x.array().square().matrix() + curvature_).asDiagonal();
}

Vector SeparableQuarticObjective::evaluate_hessian_vector(
    const Vector& x, const Vector& v) const {
  return (3.0 * x.array().square().matrix() + curvature_).cwiseProduct(v);
}

// --- quadratic plus quartic -------------------------------------------------

QuadraticQuarticObjective::QuadraticQuarticObjective(Matrix a, Vector b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw ContractError("quadratic-quartic: dimension mismatch");
  }
}

double QuadraticQuarticObjective::evaluate_value(const Vector& x) const {
  return 0.5 * x.dot(a_ * x) + 0.25 * x.array().pow(4).sum() - b_.dot(x);
}

Vector QuadraticQuarticObjective::evaluate_gradient(const Vector& x) const {
  return a_ * x + x.array().cube().matrix() - b_;
}

Matrix QuadraticQuarticObjective::evaluate_hessian(const Vector& x) const {
  Matrix h = a_;
  h.diagonal() += 3.0 * x.array().square().matrix();
  return h;
}

// --- Himmelblau -------------------------------------------------------------

double HimmelblauObjective::evaluate_value(const Vector& v) const {
  const double x = v[0], y = v[1];
  const double p = x * x + y - 11.0;
  const double q = x + y * y - 7.0;
  return p * p + q * q;
}

Vector HimmelblauObjective::evaluate_gradient(const Vector& v) const {
  const double x = v[0], y = v[1];
  const double p = x * x + y - 11.0;
  const double q = x + y * y - 7.0;
  Vector g(2);
  g << 4.0 * x * p + 2.0 * q, 2.0 * p + 4.0 * y * q;
  return g;
}

Matrix HimmelblauObjective::evaluate_hessian(const Vector& v) const {
  const double x = v[0], y = v[1];
  Matrix h(2, 2);
  h(0, 0) = 12.0 * x * x + 4.0 * y - 42.0;
  h(0, 1) = h(1, 0) = 4.0 * (x + y);
  h(1, 1) = 12.0 * y * y + 4.0 * x - 26.0;
  return h;
}

// --- Powell singular --------------------------------------------------------

double PowellSingularObjective::evaluate_value(const Vector& x) const {
  const double a = x[0] + 10.0 * x[1];
  const double b = x[2] - x[3];
  const double c = x[1] - 2.0 * x[2];
  const double d = x[0] - x[3];
  return a * a + 5.0 * b * b + c * c * c * c + 10.0 * d * d * d * d;
}

Vector PowellSingularObjective::evaluate_gradient(const Vector& x) const {
  const double a = x[0] + 10.0 * x[1];
  const double b = x[2] - x[3];
  const double c = x[1] - 2.0 * x[2];
  const double d = x[0] - x[3];
  const double c3 = 4.0 * c * c * c;
  const double d3 = 40.0 * d * d * d;
  Vector g(4);
  g << 2.0 * a + d3, 20.0 * a + c3, 10.0 * b - 2.0 * c3, -10.0 * b - d3;
  return g;
}

Matrix PowellSingularObjective::evaluate_hessian(const Vector& x) const {
  const double c = x[1] - 2.0 * x[2];
  const double d = x[0] - x[3];
  const double c2 = 12.0 * c * c;
  const double d2 = 120.0 * d * d;
  Matrix h = Matrix::Zero(4, 4);
  // (x1 + 10 x2)^2
  h(0, 0) += 2.0;
  h(0, 1) += 20.0;
  h(1, 0) += 20.0;
  h(1, 1) += 200.0;
  // 5 (x3 - x4)^2
  h(2, 2) += 10.0;
  h(2, 3) -= 10.0;
  h(3, 2) -= 10.0;
  h(3, 3) += 10.0;
  // (x2 - 2 x3)^4
  h(1, 1) += c2;
  h(1, 2) -= 2.0 * c2;
  h(2, 1) -= 2.0 * c2;
  h(2, 2) += 4.0 * c2;
  // 10 (x1 - x4)^4
  h(0, 0) += d2;
  h(0, 3) -= d2;
  h(3, 0) -= d2;
  h(3, 3) += d2;
  return h;
}

}  // namespace utr
