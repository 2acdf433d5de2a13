#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "utr/data.hpp"
#include "utr/errors.hpp"
#include "utr/harness.hpp"
#include "utr/suite.hpp"

using namespace utr;

namespace {

Dataset one_sample(double a, int b) {
  Dataset d;
  d.n = 1;
  d.features = {{{1, a}}};
  d.labels = {b};
  return d;
}

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST_CASE("logistic value at zero is log 2") {
  const Dataset d = synthetic_classification(40, 6, 5);
  const LogisticObjective f(d, 0.0);
  CHECK(f.value(Vector::Zero(6)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("logistic value without overflow at large margins") {
  const LogisticObjective f(one_sample(1.0, 1), 0.0);
  for (double x : {1e3, -1e3, 30.0, -30.0, 0.5}) {
    const long double ref = oracle::log1pexp_neg_ld(static_cast<long double>(x));
    CHECK(std::abs(f.value(scalar(x)) - static_cast<double>(ref)) <= 1e-10 * std::max(1.0L, ref));
  }
  CHECK(std::isfinite(f.gradient(scalar(-1e3))[0]));
  CHECK(std::isfinite(f.hessian(scalar(1e3))(0, 0)));
}

TEST_CASE("logistic gradient and Hessian against long double sums") {
  const Dataset d = synthetic_classification(30, 4, 9);
  const double gamma = 1e-3;
  const LogisticObjective f(d, gamma);
  oracle::Rng rng(4);
  const Vector x = rng.normal_vec(4);
  long double val = 0;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> g = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Zero(4);
  for (std::size_t i = 0; i < d.size(); ++i) {
    long double t = 0;
    for (const auto& e : d.features[i]) t += e.value * x[e.index - 1];
    t *= d.labels[i];
    val += oracle::log1pexp_neg_ld(t);
    const long double s = -1.0L / (1.0L + std::exp(t));
    for (const auto& e : d.features[i]) g[e.index - 1] += s * d.labels[i] * e.value;
  }
  const long double N = static_cast<long double>(d.size());
  val = val / N + 0.5L * gamma * x.squaredNorm();
  CHECK(std::abs(f.value(x) - static_cast<double>(val)) <= 1e-13);
  const Vector gf = f.gradient(x);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(gf[j] - static_cast<double>(g[j] / N + gamma * x[j])) <= 1e-13);
  }
}

TEST_CASE("LIBSVM parsing") {
  SUBCASE("single line") {
    std::istringstream in("+1 1:0.5 3:2.0\n");
    const Dataset d = parse_libsvm(in);
    REQUIRE(d.size() == 1);
    CHECK(d.labels[0] == 1);
    REQUIRE(d.features[0].size() == 2);
    CHECK(d.features[0][0].index == 1);
    CHECK(d.features[0][0].value == 0.5);
    CHECK(d.features[0][1].index == 3);
    CHECK(d.features[0][1].value == 2.0);
  }
  SUBCASE("empty input is an error") {
    std::istringstream in("");
    CHECK_THROWS_AS(parse_libsvm(in), DataError);
  }
  SUBCASE("dimension is the largest index") {
    std::istringstream in("-1 2:1 4:-3\n+1 1:1\n");
    const Dataset d = parse_libsvm(in);
    CHECK(d.n == 4);
    CHECK(d.size() == 2);
    CHECK(d.labels[0] == -1);
  }
  SUBCASE("0/1 labels map to -1/+1") {
    std::istringstream in("0 1:1\n1 1:2\n");
    const Dataset d = parse_libsvm(in);
    CHECK(d.labels[0] == -1);
    CHECK(d.labels[1] == 1);
  }
  SUBCASE("malformed lines report the line number") {
    std::istringstream in("+1 1:1\n+1 2-1\n");
    try {
      parse_libsvm(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::istringstream dec("+1 3:1 2:1\n");
    CHECK_THROWS_AS(parse_libsvm(dec), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_libsvm("/nonexistent/data.svm"), IoError);
  }
}

TEST_CASE("property: LIBSVM round trip") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset d = synthetic_classification(25, 7, seed);
    std::stringstream buf;
    write_libsvm(buf, d);
    const Dataset back = parse_libsvm(buf, d.n);
    REQUIRE(back.size() == d.size());
    CHECK(back.n == d.n);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(back.labels[i] == d.labels[i]);
      REQUIRE(back.features[i].size() == d.features[i].size());
      for (std::size_t k = 0; k < d.features[i].size(); ++k) {
        CHECK(back.features[i][k].index == d.features[i][k].index);
        CHECK(back.features[i][k].value == d.features[i][k].value);
      }
    }
  }
}

TEST_CASE("libsvm: problem names load from disk") {
  const auto path = std::filesystem::temp_directory_path() / "utr_tiny.svm";
  {
    std::ofstream out(path);
    out << "+1 1:1 2:0.5\n-1 1:-1 2:0.25\n+1 2:1\n";
  }
  const ProblemInstance p = make_problem("libsvm:" + path.string());
  CHECK(p.name == "utr_tiny");
  CHECK(p.oracle->dimension() == 2);
  CHECK(p.convex);
  std::filesystem::remove(path);
}

TEST_CASE("finite differences on exact cases") {
  oracle::Rng rng(12);
  const LinearObjective lin(rng.normal_vec(5), 0.3);
  CHECK(finite_difference_check(lin, rng.normal_vec(5), 1e-5).grad_err <= 1e-10);

  const Matrix a = rng.normal_vec(16).reshaped(4, 4);
  const QuadraticObjective quad(a * a.transpose(), rng.normal_vec(4), 1.0);
  CHECK(finite_difference_check(quad, rng.normal_vec(4), 1e-4).hess_err <= 1e-8);

  const LogisticObjective logi(synthetic_classification(60, 5, 21));
  const auto c = finite_difference_check(logi, rng.normal_vec(5), 1e-5);
  CHECK(c.grad_err <= 1e-6);
  CHECK(c.hess_err <= 1e-6);
}

TEST_CASE("property: builtin oracles") {
  const auto checks = check_oracles({"builtin"}, 2024, 10, 1e-5);
  CHECK(checks.size() == builtin_names().size());
  for (const auto& c : checks) {
    INFO(c.problem);
    CHECK(c.grad_err <= 1e-6);
    CHECK(c.hess_err <= 1e-5);
  }

  oracle::Rng rng(99);
  for (const auto& p : builtin_suite()) {
    INFO(p.name);
    CHECK_NOTHROW(p.validate());
    if (p.known_optimum) {
      CHECK(p.oracle->gradient(p.known_optimum->point).norm() <= 1e-8);
      CHECK(p.oracle->value(p.known_optimum->point) ==
            doctest::Approx(p.known_optimum->value).epsilon(1e-12));
    }
    for (int k = 0; k < 5; ++k) {
      const Vector x = p.start + rng.normal_vec(static_cast<int>(p.start.size())) * 0.5;
      const Matrix h = p.oracle->hessian(x);
      CHECK((h - h.transpose()).norm() <= 1e-12 * std::max(1.0, h.norm()));
      const Vector v = rng.normal_vec(static_cast<int>(x.size()));
      CHECK((p.oracle->hessian_vector(x, v) - h * v).norm() <= 1e-10 * std::max(1.0, h.norm() * v.norm()));
    }
  }
}

TEST_CASE("suite registry") {
  const auto names = builtin_names();
  CHECK(names.size() == 11);
  CHECK(make_problem("rosenbrock2").start.size() == 2);
  CHECK_THROWS_AS(make_problem("no_such_problem"), ConfigError);
  const auto saddle = make_problem("quartic_saddle5");
  CHECK(saddle.known_optimum->value == -0.25);
}

TEST_CASE("oracle contracts and counters") {
  const auto p = make_problem("rosenbrock2");
  auto& f = *p.oracle;
  f.reset_counters();
  f.value(p.start);
  f.gradient(p.start);
  f.gradient(p.start);
  f.hessian_vector(p.start, p.start);
  CHECK(f.counters().f == 1);
  CHECK(f.counters().g == 2);
  CHECK(f.counters().hv == 1);
  CHECK_THROWS_AS(f.value(Vector::Zero(3)), ContractError);
  Vector bad = p.start;
  bad[0] = std::nan("");
  CHECK_THROWS_AS(f.gradient(bad), ContractError);
}
