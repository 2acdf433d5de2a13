#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "utr/accel.hpp"
#include "utr/data.hpp"
#include "utr/errors.hpp"
#include "utr/suite.hpp"

using namespace utr;

namespace {

// d(y) - d(x) - grad d(x)'(y - x) with d(z) = ||z - c||^3 / 3, long double.
long double naive_bregman(const Vector& c, const Vector& x, const Vector& y) {
  long double nx = 0, ny = 0, lin = 0;
  for (int i = 0; i < x.size(); ++i) {
    nx += (long double)(x[i] - c[i]) * (x[i] - c[i]);
    ny += (long double)(y[i] - c[i]) * (y[i] - c[i]);
  }
  nx = std::sqrt(nx);
  ny = std::sqrt(ny);
  for (int i = 0; i < x.size(); ++i) lin += nx * (long double)(x[i] - c[i]) * (y[i] - x[i]);
  return ny * ny * ny / 3 - nx * nx * nx / 3 - lin;
}

}  // namespace

TEST_CASE("cubic Bregman divergence") {
  const CubicBregman b(Vector::Zero(3));
  Vector y = Vector::Zero(3);
  y[1] = 1.0;
  CHECK(bregman_divergence(b, Vector::Zero(3), y) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Vector e1 = Vector::Unit(3, 0);
  CHECK(bregman_divergence(b, e1, 2.0 * e1) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(bregman_divergence(b, e1, e1) == 0.0);
  CHECK_THROWS_AS(bregman_divergence(b, Vector::Zero(2), y), ContractError);
}

TEST_CASE("property: Bregman divergence is nonnegative") {
  oracle::Rng rng(1000);
  for (int t = 0; t < 1000; ++t) {
    const int n = rng.integer(1, 8);
    const CubicBregman b(rng.normal_vec(n));
    const double s = std::pow(10.0, rng.uniform(-3, 2));
    const Vector x = b.anchor() + s * rng.normal_vec(n);
    const Vector y = b.anchor() + s * rng.normal_vec(n);
    const double beta = bregman_divergence(b, x, y);
    CHECK(beta > 0.0);
    const long double ref = naive_bregman(b.anchor(), x, y);
    CHECK(std::abs(beta - (double)ref) <= 1e-10 * std::max(1.0L, std::abs(ref)));
  }
}

TEST_CASE("generator derivatives") {
  oracle::Rng rng(3);
  const CubicBregman b(rng.normal_vec(4));
  const Vector x = rng.normal_vec(4);
  const double h = 1e-6;
  Vector fd(4);
  for (int i = 0; i < 4; ++i) {
    const Vector e = Vector::Unit(4, i) * h;
    fd[i] = (b.value(x + e) - b.value(x - e)) / (2 * h);
  }
  CHECK((fd - b.gradient(x)).norm() <= 1e-8);
  CHECK(b.hessian(b.anchor()).norm() == 0.0);
}

TEST_CASE("step weights and schedules") {
  CHECK(accel_step_weight(0, 1.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(accel_inner_tolerance(0, 1e-6) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(accel_inner_tolerance(4, 1e-6) == doctest::Approx(2e-5).epsilon(1e-12));
  CHECK_THROWS_AS(accel_step_weight(0, 0.0), ConfigError);
  for (double M : {0.5, 1.0, 7.0, 1234.5}) {
    double A = 0.0;
    for (int k = 1; k <= 200; ++k) {
      A += accel_step_weight(k - 1, M);
      const double closed = k * (k + 1.0) * (2.0 * k + 1.0) / (54.0 * M);
      CHECK(std::abs(A - closed) <= 1e-12 * closed);
    }
  }
}

TEST_CASE("contracted objective") {
  SUBCASE("zero gradient at the anchor of a stationary contraction") {
    oracle::Rng rng(5);
    const Vector mv = rng.normal_vec(9);
    const Matrix m = Eigen::Map<const Matrix>(mv.data(), 3, 3);
    const Vector xs = rng.normal_vec(3);
    const Matrix a = m * m.transpose() + Matrix::Identity(3, 3);
    const QuadraticObjective f(a, a * xs);  // minimizer xs
    const CubicBregman b(rng.normal_vec(3));
    const auto h = contracted_oracle(f, 0.4, 1.1, xs, b, xs);
    CHECK(h->gradient(xs).norm() <= 1e-12);
  }
  SUBCASE("finite differences on the logistic oracle") {
    const LogisticObjective f(synthetic_classification(80, 6, 17));
    oracle::Rng rng(6);
    for (int t = 0; t < 10; ++t) {
      const CubicBregman b(rng.normal_vec(6));
      const double a = rng.uniform(0.01, 5.0);
      const double A_next = a + rng.uniform(0.0, 10.0);
      const auto h = contracted_oracle(f, a, A_next, rng.normal_vec(6), b, rng.normal_vec(6));
      const auto c = finite_difference_check(*h, rng.normal_vec(6), 1e-5);
      CHECK(c.grad_err <= 1e-6);
      CHECK(c.hess_err <= 1e-6);
    }
  }
  SUBCASE("value matches the definition") {
    const auto p = make_problem("quad_quartic10");
    oracle::Rng rng(7);
    const CubicBregman b(p.start);
    const Vector xk = rng.normal_vec(10), vk = rng.normal_vec(10), x = rng.normal_vec(10);
    const double a = 0.3, A_next = 0.8;
    const auto h = contracted_oracle(*p.oracle, a, A_next, xk, b, vk);
    const Vector z = (a * x + (A_next - a) * xk) / A_next;
    const double expect = A_next * p.oracle->value(z) + naive_bregman(p.start, vk, x);
    CHECK(h->value(x) == doctest::Approx(expect).epsilon(1e-12));
    CHECK((h->contracted_point(x) - z).norm() <= 1e-14 * z.norm());
  }
}

TEST_CASE("accelerated run on the logistic instance") {
  const auto p = make_problem("logistic_synth");
  AccelOptions o;
  o.M = *p.lipschitz_hint;
  o.eps = 1e-4;
  const auto r = accel_minimize(p, o);
  CHECK(r.status == Status::FOSP);
  REQUIRE_FALSE(r.outer.empty());
  const double f0 = p.oracle->value(p.start);
  double A = 0.0;
  for (const auto& rec : r.outer) {
    INFO("outer " << rec.k);
    CHECK(rec.grad_h_norm <= rec.delta);
    CHECK(rec.f_x <= f0 + 1.0);
    A += rec.a;
    CHECK(rec.A == doctest::Approx(A).epsilon(1e-12));
  }
  CHECK(r.f - p.known_optimum->value <= 1e-4);
  CHECK(r.iteration_count == static_cast<int>(r.outer.size()));
}

TEST_CASE("accelerated run on a quadratic with a given optimum value") {
  const auto p = make_problem("quadratic50");
  AccelOptions o;
  o.M = 1.0;
  o.eps = 1e-6;
  o.f_star = p.known_optimum->value;
  const auto r = accel_minimize(p, o);
  CHECK(r.status == Status::FOSP);
  CHECK(r.f - p.known_optimum->value <= 1e-6);
}
