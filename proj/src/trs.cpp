#include "utr/trs.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rng.hpp"

namespace utr {

SymmetricOperator::SymmetricOperator(Matrix dense)
    : dim_(static_cast<int>(dense.rows())) {
  if (dense.rows() != dense.cols()) {
    throw ContractError("operator matrix must be square");
  }
  if (!dense.allFinite()) throw ContractError("operator matrix is not finite");
  const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
  if ((dense - dense.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractError("operator matrix is not symmetric");
  }
  dense_ = std::move(dense);
}

SymmetricOperator::SymmetricOperator(int dim, Apply apply)
    : dim_(dim), apply_(std::move(apply)) {
  if (dim < 1) throw ContractError("operator dimension must be positive");
  if (!apply_) throw ContractError("operator callback is empty");
}

const Matrix& SymmetricOperator::dense() const {
  if (!dense_) throw ContractError("dense matrix not available for this operator");
  return *dense_;
}

Vector SymmetricOperator::apply(const Vector& v) const {
  if (dense_) return *dense_ * v;
  Vector out = apply_(v);
  if (out.size() != dim_) throw ContractError("operator callback returned wrong size");
  return out;
}

void TrsProblem::validate() const {
  if (gradient.size() != hessian.dim()) {
    throw ContractError("TRS gradient and Hessian dimensions differ");
  }
  if (!all_finite(gradient)) throw ContractError("TRS gradient is not finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ContractError("TRS sigma must be finite and >= 0");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ContractError("TRS radius must be finite and > 0");
  }
}

double realized_radius(const Vector& g, double r) {
  if (!(r > 0.0)) throw ContractError("radius factor r must be positive");
  return r * std::sqrt(g.norm());
}

double model_value(const TrsProblem& p, const Vector& d) {
  return p.gradient.dot(d) + 0.5 * d.dot(p.hessian.apply(d)) +
         0.5 * p.shift() * d.squaredNorm();
}

double KktResidual::max() const {
  return std::max(std::max(feas, slack), std::max(stat, curv));
}

namespace {

// Infinity norm; bounds the spectral norm of a symmetric matrix.
double norm_bound(const Matrix& a) {
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

TrsSolution finish(const TrsProblem& p, Vector d, double lambda, bool hard,
                   int iters) {
  TrsSolution s;
  s.step = std::move(d);
  s.multiplier = lambda;
  s.hard_case = hard;
  s.inner_iterations = iters;
  s.model_decrease = -model_value(p, s.step);
  s.on_boundary =
      lambda > 0.0 || std::abs(s.step.norm() - p.radius) <= 1e-10 * p.radius;
  return s;
}

// Boundary completion d + tau v with ||d + tau v|| = radius; of the two roots
// take the one with the lower model value.
Vector complete_to_boundary(const TrsProblem& p, const Vector& d,
                            const Vector& v, double radius) {
  const double b = d.dot(v);
  const double c = d.squaredNorm() - radius * radius;  // <= 0
  const double disc = std::sqrt(std::max(0.0, b * b - c));
  const double t1 = -b + disc;
  const double t2 = -b - disc;
  const Vector d1 = d + t1 * v;
  const Vector d2 = d + t2 * v;
  return model_value(p, d1) <= model_value(p, d2) ? d1 : d2;
}

}  // namespace

TrsSolution solve_trs_direct(const TrsProblem& p, const TrsConfig& cfg) {
  p.validate();
  const int n = p.hessian.dim();
  const double shift = p.shift();
  Matrix ht = p.hessian.dense();
  ht.diagonal().array() += shift;
  const Vector& g = p.gradient;
  const double gnorm = g.norm();
  const double delta = p.radius;
  const double hnorm = norm_bound(ht);

  if (gnorm == 0.0) {
    const EigPair e = smallest_eigpair(SymmetricOperator(ht), 1e-12);
    if (e.value >= 0.0) return finish(p, Vector::Zero(n), 0.0, false, 0);
    return finish(p, delta * e.vector, -e.value, true, 0);
  }

  // Interior Newton step when H~ is positive definite.
  Eigen::LLT<Matrix> llt(ht);
  if (llt.info() == Eigen::Success) {
    Vector d = -llt.solve(g);
    if (d.allFinite() && d.norm() <= delta) return finish(p, std::move(d), 0.0, false, 0);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(ht);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed in TRS solve");
  }
  const double lmin = es.eigenvalues()(0);
  const Vector vmin = es.eigenvectors().col(0);

  double lo = std::max(0.0, -lmin);
  double hi = gnorm / delta + hnorm;
  const Matrix eye = Matrix::Identity(n, n);

  // Hard-case probe just right of -lambda_min.
  double lam = lo;
  if (lmin <= 0.0) {
    double bump = 1e-12 * std::max(1.0, hnorm);
    Eigen::LLT<Matrix> f;
    for (int tries = 0; tries < 8; ++tries) {
      lam = lo + bump;
      f.compute(ht + lam * eye);
      if (f.info() == Eigen::Success) break;
      bump *= 10.0;
    }
    if (f.info() != Eigen::Success) {
      throw NumericalError("cannot factor shifted Hessian near -lambda_min", lam);
    }
    const Vector d = -f.solve(g);
    if (d.allFinite() && d.norm() < delta) {
      return finish(p, complete_to_boundary(p, d, vmin, delta), lo, true, 1);
    }
    lo = lam;  // ||d(lam)|| > radius here
  }

  // Safeguarded Newton on phi(lam) = 1/||d(lam)|| - 1/radius. Started at the
  // left end, where phi < 0; phi is concave and increasing there.
  Vector best;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_lam = lam;
  for (int it = 1; it <= cfg.max_root_iters; ++it) {
    Eigen::LLT<Matrix> f(ht + lam * eye);
    if (f.info() != Eigen::Success) {
      lo = lam;
      lam = 0.5 * (lo + hi);
      continue;
    }
    Vector d = -f.solve(g);
    const double nd = d.norm();
    const double gap = std::abs(nd - delta);
    if (gap < best_gap) {
      best_gap = gap;
      best = d;
      best_lam = lam;
    }
    if (gap <= 1e-13 * delta || hi - lo <= 1e-15 * std::max(1.0, hi)) {
      if (nd > delta) d *= delta / nd;
      return finish(p, std::move(d), lam, false, it);
    }
    if (nd > delta) {
      lo = lam;
    } else {
      hi = lam;
    }
    const Vector w = f.matrixL().solve(d);
    double next = lam + (nd / delta - 1.0) * (nd * nd) / w.squaredNorm();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lam = next;
  }
  if (best.size() == n && best_gap <= cfg.kkt_tol * delta) {
    const double nb = best.norm();
    if (nb > delta) best *= delta / nb;
    return finish(p, std::move(best), best_lam, false, cfg.max_root_iters);
  }
  throw NumericalError("TRS dual search did not converge", best_lam);
}

TrsSolution solve_trs_krylov(const TrsProblem& p, const TrsConfig& cfg) {
  p.validate();
  const int n = p.hessian.dim();
  const double shift = p.shift();
  const Vector& g = p.gradient;
  const double gnorm = g.norm();
  const double delta = p.radius;
  auto apply = [&](const Vector& v) { return Vector(p.hessian.apply(v) + shift * v); };

  if (gnorm == 0.0) {
    const EigPair e = smallest_eigpair(
        SymmetricOperator(n, [&](const Vector& v) { return apply(v); }), 1e-10);
    if (e.value >= 0.0) return finish(p, Vector::Zero(n), 0.0, false, 0);
    return finish(p, delta * e.vector, -e.value, true, 0);
  }

  const int cap = cfg.krylov_dim_cap > 0 ? std::min(cfg.krylov_dim_cap, n) : n;
  const double target = cfg.krylov_rule == KrylovRule::Inexact
                            ? std::min(0.1, std::sqrt(gnorm)) * gnorm
                            : cfg.kkt_tol * std::max(1.0, gnorm);

  // Orthonormal basis Q (Lanczos vectors, plus eigenvector directions when the
  // hard case needs them) and the projection T = Q' H~ Q, grown one column at
  // a time.
  Matrix q(n, cap), hq(n, cap);
  Matrix t = Matrix::Zero(cap, cap);
  q.col(0) = g / gnorm;
  Vector h;
  double lam = 0.0;
  bool hard = false;
  bool met = false;
  int m = 0;

  auto orthogonalize = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(m) * (q.leftCols(m).transpose() * v);
    return v;
  };
  // Curvature of H~ + lam I off the current subspace. Returns the direction
  // to add, or an empty vector when the subspace solution is global.
  auto missing_curvature = [&]() -> Vector {
    const EigPair e = smallest_eigpair(
        SymmetricOperator(n, [&](const Vector& v) { return apply(v); }), 1e-10);
    if (e.value + lam >= -cfg.kkt_tol * std::max(1.0, t.topLeftCorner(m, m).norm())) return {};
    Vector v = orthogonalize(e.vector);
    if (v.norm() <= 1e-8) return {};
    return v / v.norm();
  };

  for (m = 1; m <= cap; ++m) {
    hq.col(m - 1) = apply(q.col(m - 1));
    const Vector col = q.leftCols(m).transpose() * hq.col(m - 1);
    t.block(0, m - 1, m, 1) = col;
    t.block(m - 1, 0, 1, m) = col.transpose();

    TrsProblem sub{SymmetricOperator(Matrix(t.topLeftCorner(m, m))),
                   Vector::Unit(m, 0) * gnorm, 0.0, delta};
    const TrsSolution s = solve_trs_direct(sub, cfg);
    h = s.step;
    lam = s.multiplier;
    hard = s.hard_case;

    const Vector d = q.leftCols(m) * h;
    const double resid = (hq.leftCols(m) * h + lam * d + g).norm();
    if (m == cap) {
      met = resid <= target;
      break;
    }
    Vector next;
    if (resid <= target) {
      if (cfg.krylov_rule == KrylovRule::Inexact) {
        met = true;
        break;
      }
      next = missing_curvature();
      if (next.size() == 0) {
        met = true;
        break;
      }
    } else {
      Vector w = orthogonalize(hq.col(m - 1));
      const double b = w.norm();
      if (b <= 1e-14 * std::max(1.0, t.topLeftCorner(m, m).norm())) {
        // invariant subspace reached without meeting the target
        next = missing_curvature();
        if (next.size() == 0) {
          met = true;
          break;
        }
      } else {
        next = w / b;
      }
    }
    q.col(m) = next;
  }
  m = std::min(m, cap);
  TrsSolution out = finish(p, q.leftCols(m) * h, lam, hard, m);
  out.truncated = !met;
  return out;
}

KktResidual kkt_residual(const TrsProblem& p, const TrsSolution& s) {
  KktResidual r;
  const double nd = s.step.norm();
  const double shift = p.shift();
  r.feas = std::max(0.0, nd - p.radius);
  r.slack = std::abs(s.multiplier * (nd - p.radius));
  r.stat = (p.hessian.apply(s.step) + (shift + s.multiplier) * s.step + p.gradient).norm();
  const EigPair e = smallest_eigpair(p.hessian, p.hessian.is_dense() ? 1e-12 : 1e-9);
  r.curv = std::max(0.0, -(e.value + shift + s.multiplier));
  return r;
}

EigPair smallest_eigpair(const SymmetricOperator& h, double tol) {
  if (!(tol > 0.0)) throw ContractError("eigen tolerance must be positive");
  const int n = h.dim();
  if (h.is_dense()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.dense());
    if (es.info() != Eigen::Success) {
      throw NumericalError("symmetric eigendecomposition failed");
    }
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
  }

  // Lanczos with full reorthogonalization. A breakdown restarts from a fresh
  // vector orthogonal to the basis so the whole space can be reached.
  detail::NormalStream rng(0x5eedULL + static_cast<std::uint64_t>(n));
  Matrix q(n, n);
  std::vector<double> alpha, beta;
  auto fresh = [&](int m) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v[i] = rng();
      for (int pass = 0; pass < 2; ++pass) {
        if (m > 0) v -= q.leftCols(m) * (q.leftCols(m).transpose() * v);
      }
      const double nv = v.norm();
      if (nv > 1e-8) return Vector(v / nv);
    }
    throw NumericalError("Lanczos restart failed");
  };
  q.col(0) = fresh(0);
  double hnorm = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  Vector best_vec = q.col(0);
  for (int m = 1; m <= n; ++m) {
    Vector w = h.apply(q.col(m - 1));
    const double a = q.col(m - 1).dot(w);
    for (int pass = 0; pass < 2; ++pass) {
      w -= q.leftCols(m) * (q.leftCols(m).transpose() * w);
    }
    alpha.push_back(a);
    const double b = w.norm();
    hnorm = std::max(hnorm, std::abs(a) + b + (m > 1 ? beta.back() : 0.0));

    Matrix t = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    const double theta = es.eigenvalues()(0);
    const Vector y = es.eigenvectors().col(0);
    Vector x = q.leftCols(m) * y;
    x.normalize();
    best_val = theta;
    best_vec = x;
    const double scale = tol * std::max(1.0, hnorm);
    if (m == n) {
      if ((h.apply(x) - theta * x).norm() <= scale) return {theta, x};
      break;
    }
    if (b * std::abs(y[m - 1]) <= 0.1 * scale) {
      // Ritz residual is small; confirm on the true operator.
      if ((h.apply(x) - theta * x).norm() <= scale) return {theta, x};
    }
    if (b <= 1e-12 * std::max(1.0, hnorm)) {
      beta.push_back(0.0);
      q.col(m) = fresh(m);
    } else {
      beta.push_back(b);
      q.col(m) = w / b;
    }
  }
  throw NumericalError("Lanczos eigensolver did not converge", best_val);
}

}  // namespace utr
