#include "utr/suite.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

#include "rng.hpp"

namespace utr {

namespace {

// Damped Newton with backtracking, used to pin reference optima of the convex
// instances. Stops when the gradient stalls at roundoff.
Vector newton_reference(const Objective& f, Vector x) {
  double fx = f.value(x);
  for (int it = 0; it < 500; ++it) {
    const Vector g = f.gradient(x);
    if (g.norm() <= 1e-14) break;
    Matrix h = f.hessian(x);
    const Vector d = -h.ldlt().solve(g);
    double t = 1.0;
    Vector xn = x + d;
    double fn = f.value(xn);
    while (fn > fx && t > 1e-12) {
      t *= 0.5;
      xn = x + t * d;
      fn = f.value(xn);
    }
    if (fn > fx) break;
    if ((xn - x).norm() <= 1e-16 * std::max(1.0, x.norm())) {
      x = xn;
      break;
    }
    x = xn;
    fx = fn;
  }
  return x;
}

Matrix random_orthogonal(int n, detail::NormalStream& rng) {
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng();
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(n, n);
}

// Rosenbrock: third derivatives involve x_i (i < n) only. On {f <= f0},
// (1 - x_i)^2 <= f0, so |x_i| <= 1 + sqrt(f0); one unit of padding covers the
// trial steps. Each 2x2 block satisfies ||dH|| <= (2400 R + 1000) ||dx||; in
// the chained sum every coordinate sits in at most two blocks.
double rosenbrock_hint(int n, double f0) {
  const double R = 2.0 + std::sqrt(f0);
  const double block = 2400.0 * R + 1000.0;
  return n == 2 ? block : 2.0 * block;
}

ProblemInstance rosenbrock(int n) {
  ProblemInstance p;
  p.name = "rosenbrock" + std::to_string(n);
  p.oracle = std::make_shared<RosenbrockObjective>(n);
  p.start = Vector::Ones(n);
  p.start[0] = -1.2;
  p.lipschitz_hint = rosenbrock_hint(n, p.oracle->value(p.start));
  p.known_optimum = KnownOptimum{Vector::Ones(n), 0.0};
  p.oracle->reset_counters();
  return p;
}

ProblemInstance quadratic_diag() {
  ProblemInstance p;
  p.name = "quadratic2";
  Vector d(2);
  d << 1.0, 10.0;
  p.oracle = std::make_shared<QuadraticObjective>(Matrix(d.asDiagonal()),
                                                  Vector::Zero(2));
  p.start = Vector::Ones(2);
  p.lipschitz_hint = 1e-6;  // Hessian is constant; any M > 0 is valid
  p.known_optimum = KnownOptimum{Vector::Zero(2), 0.0};
  p.convex = true;
  return p;
}

// A = Q diag(cond^{i/(n-1)}) Q'
ProblemInstance quadratic_conditioned(int n, double cond, std::uint64_t seed) {
  detail::NormalStream rng(seed);
  const Matrix q = random_orthogonal(n, rng);
  Vector eig(n);
  for (int i = 0; i < n; ++i) {
    eig[i] = std::pow(cond, static_cast<double>(i) / (n - 1));
  }
  Matrix a = q * eig.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = rng();

  ProblemInstance p;
  p.name = "quadratic" + std::to_string(n);
  auto oracle = std::make_shared<QuadraticObjective>(a, b);
  const Vector xs = a.ldlt().solve(b);
  p.known_optimum = KnownOptimum{xs, oracle->value(xs)};
  oracle->reset_counters();
  p.oracle = oracle;
  p.start = Vector::Zero(n);
  p.lipschitz_hint = 1e-6;
  p.convex = true;
  return p;
}

// On {f <= f0 ~ 0}: x1^4/4 - x1^2/2 <= 0 gives |x1| <= sqrt 2, so
// |H11' | = 6|x1| <= 6 * 1.5.
ProblemInstance quartic_saddle(int n) {
  ProblemInstance p;
  p.name = "quartic_saddle" + std::to_string(n);
  p.oracle = std::make_shared<QuarticSaddleObjective>(n);
  p.start = Vector::Zero(n);
  p.start[0] = 1e-3;
  if (n > 1) p.start[1] = 1e-3;
  p.lipschitz_hint = 9.0;
  Vector xs = Vector::Zero(n);
  xs[0] = 1.0;
  p.known_optimum = KnownOptimum{xs, -0.25};
  return p;
}

// Upper bound on |t| over {q(t) <= budget}, q(t) = t^4/4 + c t^2/2 + l t.
// Uses the lower envelope t^4/4 - |c| t^2/2 - |l| t, bisected on the branch
// where it is increasing.
double quartic_reach(double c, double l, double budget) {
  const double ac = std::abs(c), al = std::abs(l);
  auto lb = [&](double t) { return 0.25 * t * t * t * t - 0.5 * ac * t * t - al * t; };
  double t0 = 1.0;  // t^3 - |c| t - |l| >= 0 beyond t0
  while (t0 * t0 * t0 - ac * t0 - al < 0.0) t0 *= 2.0;
  double hi = t0;
  while (lb(hi) <= budget) hi *= 2.0;
  double lo = t0;
  if (lb(lo) > budget) return t0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lb(mid) <= budget ? lo : hi) = mid;
  }
  return hi;
}

double quartic_min(double c, double l) {
  // Minimum over a fine bracket; the quartic is coercive.
  double best = 0.0;
  for (double t = -4.0; t <= 4.0; t += 1e-3) {
    best = std::min(best, 0.25 * t * t * t * t + 0.5 * c * t * t + l * t);
  }
  return best - 1e-6;
}

ProblemInstance separable_quartic(int n) {
  Vector c(n), l(n);
  for (int i = 0; i < n; ++i) {
    c[i] = (i % 2 == 0) ? -1.0 : 0.5;
    l[i] = 0.1 * ((i % 3) - 1.0) + 0.05;
  }
  ProblemInstance p;
  p.name = "separable_quartic" + std::to_string(n);
  p.oracle = std::make_shared<SeparableQuarticObjective>(c, l);
  p.start = Vector::Constant(n, 0.5);
  for (int i = 0; i < n; i += 3) p.start[i] = -1.5;
  const double f0 = p.oracle->value(p.start);
  p.oracle->reset_counters();
  // Each coordinate's term is bounded by f0 minus the other terms' minima.
  double min_sum = 0.0;
  Vector mins(n);
  for (int i = 0; i < n; ++i) {
    mins[i] = quartic_min(c[i], l[i]);
    min_sum += mins[i];
  }
  double R = 0.0;
  for (int i = 0; i < n; ++i) {
    R = std::max(R, quartic_reach(c[i], l[i], f0 - (min_sum - mins[i])));
  }
  p.lipschitz_hint = 6.0 * (R + 1.0);  // H = diag(3 x^2 + c)
  return p;
}

ProblemInstance quad_quartic(int n, std::uint64_t seed) {
  detail::NormalStream rng(seed);
  const Matrix q = random_orthogonal(n, rng);
  Vector eig(n);
  for (int i = 0; i < n; ++i) eig[i] = 1.0 + 9.0 * i / (n - 1);
  Matrix a = q * eig.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose());
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = 2.0 * rng();

  ProblemInstance p;
  p.name = "quad_quartic" + std::to_string(n);
  auto oracle = std::make_shared<QuadraticQuarticObjective>(a, b);
  p.start = Vector::Constant(n, 2.0);
  const double f0 = oracle->value(p.start);
  // f >= lmin/2 ||x||^2 - ||b|| ||x||, hence on {f <= f0}
  // ||x|| <= (||b|| + sqrt(||b||^2 + 2 lmin f0)) / lmin.
  const double lmin = eig.minCoeff();
  const double bn = b.norm();
  const double R = (bn + std::sqrt(bn * bn + 2.0 * lmin * std::max(f0, 0.0))) / lmin;
  p.lipschitz_hint = 6.0 * (R + 1.0);
  const Vector xs = newton_reference(*oracle, p.start);
  p.known_optimum = KnownOptimum{xs, oracle->value(xs)};
  oracle->reset_counters();
  p.oracle = oracle;
  p.convex = true;
  return p;
}

// Sublevel set of (0,0) (f0 = 170) lies in |x| <= 5.26, |y| <= 4.91 (grid
// scan); padding gives R = 6. dH11 = (24x, 4), dH12 = (4, 4), dH22 = (4, 24y).
ProblemInstance himmelblau() {
  ProblemInstance p;
  p.name = "himmelblau";
  p.oracle = std::make_shared<HimmelblauObjective>();
  p.start = Vector::Zero(2);
  const double R = 6.0;
  p.lipschitz_hint = 2.0 * (24.0 * R + 8.0);
  return p;
}

// With c = x2 - 2 x3, d = x1 - x4: c^4 <= f0 and 10 d^4 <= f0 on the sublevel
// set. The c-block varies as 12 c^2 [1 -2; -2 4], the d-block as
// 120 d^2 [1 -1; -1 1].
ProblemInstance powell() {
  ProblemInstance p;
  p.name = "powell_singular";
  p.oracle = std::make_shared<PowellSingularObjective>();
  p.start = Vector(4);
  p.start << 3.0, -1.0, 0.0, 1.0;
  const double f0 = p.oracle->value(p.start);
  p.oracle->reset_counters();
  const double C = std::pow(f0, 0.25) + 1.0;
  const double D = std::pow(f0 / 10.0, 0.25) + 1.0;
  p.lipschitz_hint = 5.0 * 24.0 * C * std::sqrt(5.0) + 2.0 * 240.0 * D * std::sqrt(2.0);
  p.known_optimum = KnownOptimum{Vector::Zero(4), 0.0};
  p.convex = true;
  return p;
}

ProblemInstance logistic_synth() {
  Dataset data = synthetic_classification(200, 20, 20240607, 1.0);
  return logistic_problem("logistic_synth", std::move(data),
                          kDefaultLogisticGamma);
}

// Small instance with flipped labels: not separable, so the optimum is
// well inside the unit-scale region.
ProblemInstance logistic_noisy() {
  Dataset data = synthetic_classification(50, 5, 7, 0.0);
  for (std::size_t i = 0; i < data.size(); i += 6) data.labels[i] = -data.labels[i];
  return logistic_problem("logistic_noisy", std::move(data),
                          kDefaultLogisticGamma);
}

using Factory = std::function<ProblemInstance()>;

const std::vector<std::pair<std::string, Factory>>& registry() {
  static const std::vector<std::pair<std::string, Factory>> table = {
      {"rosenbrock2", [] { return rosenbrock(2); }},
      {"rosenbrock100", [] { return rosenbrock(100); }},
      {"quadratic2", quadratic_diag},
      {"quadratic50", [] { return quadratic_conditioned(50, 1e4, 11); }},
      {"quartic_saddle5", [] { return quartic_saddle(5); }},
      {"separable_quartic10", [] { return separable_quartic(10); }},
      {"quad_quartic10", [] { return quad_quartic(10, 3); }},
      {"logistic_synth", logistic_synth},
      {"logistic_noisy", logistic_noisy},
      {"himmelblau", himmelblau},
      {"powell_singular", powell},
  };
  return table;
}

}  // namespace

ProblemInstance logistic_problem(const std::string& name, Dataset data,
                                 double gamma) {
  auto oracle = std::make_shared<LogisticObjective>(std::move(data), gamma);
  ProblemInstance p;
  p.name = name;
  p.start = Vector::Zero(oracle->dimension());
  p.lipschitz_hint = oracle->lipschitz_bound();
  const Vector xs = newton_reference(*oracle, p.start);
  p.known_optimum = KnownOptimum{xs, oracle->value(xs)};
  oracle->reset_counters();
  p.oracle = oracle;
  p.convex = true;
  return p;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

std::vector<ProblemInstance> builtin_suite() {
  std::vector<ProblemInstance> out;
  for (const auto& [_, make] : registry()) out.push_back(make());
  return out;
}

ProblemInstance make_problem(const std::string& name) {
  for (const auto& [key, make] : registry()) {
    if (key == name) return make();
  }
  const std::string prefix = "libsvm:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string path = name.substr(prefix.size());
    const std::string stem = std::filesystem::path(path).stem().string();
    return logistic_problem(stem.empty() ? path : stem, load_libsvm(path),
                            kDefaultLogisticGamma);
  }
  throw ConfigError("unknown problem '" + name + "'");
}

FdCheck finite_difference_check(const Objective& oracle, const Vector& x,
                                double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  const int n = oracle.dimension();
  const Vector g = oracle.gradient(x);
  FdCheck out;
  const double gscale = std::max(1.0, g.cwiseAbs().maxCoeff());
  Matrix hv(n, n), fd(n, n);
  for (int i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double dfi = (oracle.value(xp) - oracle.value(xm)) / (2.0 * h);
    out.grad_err = std::max(out.grad_err, std::abs(dfi - g[i]) / gscale);

    fd.col(i) = (oracle.gradient(xp) - oracle.gradient(xm)) / (2.0 * h);
    hv.col(i) = oracle.hessian_vector(x, Vector::Unit(n, i));
  }
  const double hscale = std::max(1.0, hv.cwiseAbs().maxCoeff());
  out.hess_err = (hv - fd).cwiseAbs().maxCoeff() / hscale;
  return out;
}

}  // namespace utr
