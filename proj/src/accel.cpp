#include "utr/accel.hpp"

#include <algorithm>
#include <cmath>

#include "run_util.hpp"

namespace utr {

CubicBregman::CubicBregman(Vector anchor) : anchor_(std::move(anchor)) {}

double CubicBregman::value(const Vector& x) const {
  const double r = (x - anchor_).norm();
  return r * r * r / 3.0;
}

Vector CubicBregman::gradient(const Vector& x) const {
  const Vector r = x - anchor_;
  return r.norm() * r;
}

Matrix CubicBregman::hessian(const Vector& x) const {
  const Vector r = x - anchor_;
  const double nr = r.norm();
  const int n = static_cast<int>(x.size());
  if (nr == 0.0) return Matrix::Zero(n, n);
  Matrix h = (r * r.transpose()) / nr;
  h.diagonal().array() += nr;
  return h;
}

double bregman_divergence(const CubicBregman& b, const Vector& x,
                          const Vector& y) {
  if (x.size() != y.size() || x.size() != b.anchor().size()) {
    throw ContractError("Bregman divergence: dimension mismatch");
  }
  const Vector u = x - b.anchor();
  const Vector w = y - b.anchor();
  const double q = u.norm();
  const double p = w.norm();
  const Vector s = y - x;
  // p - q without cancellation: (p^2 - q^2)/(p + q) = (w - u)'(w + u)/(p + q)
  const double pq = p + q;
  const double diff = pq > 0.0 ? s.dot(w + u) / pq : 0.0;
  return diff * diff * (2.0 * p + q) / 6.0 + 0.5 * q * s.squaredNorm();
}

ContractedObjective::ContractedObjective(const Objective& f, double a,
                                         double A_next, Vector x_k,
                                         CubicBregman b, Vector v_k)
    : f_(f),
      a_(a),
      A_next_(A_next),
      A_k_(A_next - a),
      x_k_(std::move(x_k)),
      bregman_(std::move(b)),
      v_k_(std::move(v_k)) {
  if (!(a > 0.0) || !(A_next > 0.0) || A_k_ < 0.0) {
    throw ContractError("contracted oracle needs a > 0 and A_next >= a");
  }
  if (x_k_.size() != f.dimension() || v_k_.size() != f.dimension()) {
    throw ContractError("contracted oracle: dimension mismatch");
  }
  grad_d_vk_ = bregman_.gradient(v_k_);
}

Vector ContractedObjective::contracted_point(const Vector& x) const {
  if (A_k_ == 0.0) return x;
  return (a_ * x + A_k_ * x_k_) / A_next_;
}

double ContractedObjective::evaluate_value(const Vector& x) const {
  return A_next_ * f_.value(contracted_point(x)) +
         bregman_divergence(bregman_, v_k_, x);
}

Vector ContractedObjective::evaluate_gradient(const Vector& x) const {
  return a_ * f_.gradient(contracted_point(x)) + bregman_.gradient(x) - grad_d_vk_;
}

Matrix ContractedObjective::evaluate_hessian(const Vector& x) const {
  Matrix h = (a_ * a_ / A_next_) * f_.hessian(contracted_point(x));
  h += bregman_.hessian(x);
  return 0.5 * (h + h.transpose());
}

Vector ContractedObjective::evaluate_hessian_vector(const Vector& x,
                                                    const Vector& v) const {
  Vector out = (a_ * a_ / A_next_) * f_.hessian_vector(contracted_point(x), v);
  const Vector r = x - bregman_.anchor();
  const double nr = r.norm();
  if (nr > 0.0) out += nr * v + r * (r.dot(v) / nr);
  return out;
}

std::shared_ptr<ContractedObjective> contracted_oracle(
    const Objective& f, double a, double A_next, const Vector& x_k,
    const CubicBregman& b, const Vector& v_k) {
  return std::make_shared<ContractedObjective>(f, a, A_next, x_k, b, v_k);
}

double accel_step_weight(int k, double M) {
  if (!(M > 0.0)) throw ConfigError("M must be positive");
  const double kp = k + 1.0;
  return kp * kp / (9.0 * M);
}

double accel_inner_tolerance(int k, double eps) {
  return std::min(1.0, std::pow(eps, 2.0 / 3.0)) / (k + 1.0);
}

double accel_inner_lipschitz(double a, double A_next, double M) {
  return a * a * a / (A_next * A_next) * M + 2.0;
}

RunReport accel_minimize(const ProblemInstance& p, const AccelOptions& opt) {
  p.validate();
  if (!(opt.M > 0.0)) throw ConfigError("accelerated UTR needs M > 0");
  if (!(opt.eps > 0.0)) throw ConfigError("accelerated UTR needs eps > 0");
  if (opt.max_outer < 0) throw ConfigError("max_outer must be >= 0");

  const Objective& f = *p.oracle;
  detail::Stopwatch clock;
  const EvalCounters base = f.counters();
  RunReport rep;
  rep.solver = "accel";
  rep.problem = p.name;

  std::optional<double> f_star = opt.f_star;
  if (!f_star && p.known_optimum) f_star = p.known_optimum->value;

  const CubicBregman breg(p.start);
  Vector x = p.start;
  Vector v = p.start;
  double A = 0.0;
  double fx = f.value(x);
  Vector gx = f.gradient(x);
  long total_inner = 0;

  auto converged = [&] {
    return f_star ? fx - *f_star <= opt.eps : gx.norm() <= opt.eps;
  };

  for (int k = 0;; ++k) {
    if (converged()) {
      rep.status = Status::FOSP;
      rep.message = f_star ? "optimality gap met" : "gradient tolerance met";
      break;
    }
    if (k >= opt.max_outer) {
      rep.status = Status::MaxIter;
      rep.message = "outer budget exhausted";
      break;
    }
    if (detail::out_of_time(clock, opt.time_limit)) {
      rep.status = Status::MaxIter;
      rep.message = "time limit reached";
      break;
    }
    const double a = accel_step_weight(k, opt.M);
    const double A_next = A + a;
    const ContractedObjective h(f, a, A_next, x, breg, v);

    UtrOptions in;
    in.M = accel_inner_lipschitz(a, A_next, opt.M);
    in.eps = accel_inner_tolerance(k, opt.eps);
    in.max_iter = opt.max_inner_iter;
    in.convex_mode = true;
    in.subsolver = opt.subsolver;
    in.monotone_slack = 1e-14;
    if (opt.time_limit > 0.0) {
      in.time_limit = std::max(1e-3, opt.time_limit - clock.seconds());
    }
    const RunReport inner = utr_minimize(h, v, in);
    total_inner += inner.iteration_count;
    if (inner.status != Status::FOSP) {
      rep.status = inner.status == Status::MaxIter ? Status::MaxIter : Status::Failure;
      rep.message = "inner solve at outer step " + std::to_string(k) +
                    " stopped: " + inner.message;
      break;
    }
    v = inner.x;
    x = (a * v + A * x) / A_next;
    A = A_next;
    fx = f.value(x);
    gx = f.gradient(x);

    AccelRecord r;
    r.k = k + 1;
    r.a = a;
    r.A = A;
    r.inner_iters = inner.iteration_count;
    r.grad_h_norm = inner.grad_norm;
    r.delta = in.eps;
    r.f_x = fx;
    r.grad_f_norm = gx.norm();
    r.wall_time = clock.seconds();
    rep.outer.push_back(r);
  }

  rep.x = x;
  rep.f = fx;
  rep.grad_norm = gx.norm();
  rep.iteration_count = static_cast<int>(rep.outer.size());
  rep.final_M = opt.M;
  rep.counters = f.counters() - base;
  rep.wall_time = clock.seconds();
  if (rep.message.empty() || rep.status == Status::FOSP) {
    rep.message += " (" + std::to_string(total_inner) + " inner iterations)";
  }
  return rep;
}

}  // namespace utr
