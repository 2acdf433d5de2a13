#include "utr/report.hpp"

#include <iomanip>
#include <ostream>

namespace utr {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::FOSP: return "FOSP";
    case Status::SOSP: return "SOSP";
    case Status::MaxIter: return "MaxIter";
    case Status::Failure: return "Failure";
  }
  return "Failure";
}

Status status_from_string(std::string_view s) {
  if (s == "FOSP") return Status::FOSP;
  if (s == "SOSP") return Status::SOSP;
  if (s == "MaxIter") return Status::MaxIter;
  if (s == "Failure") return Status::Failure;
  throw ParseError(0, "unknown status '" + std::string(s) + "'");
}

std::string_view to_string(StepClass c) { return c == StepClass::F ? "F" : "G"; }

std::string_view to_string(Subsolver s) {
  return s == Subsolver::Direct ? "direct" : "krylov";
}

Subsolver subsolver_from_string(std::string_view s) {
  if (s == "direct") return Subsolver::Direct;
  if (s == "krylov") return Subsolver::Krylov;
  throw ConfigError("unknown subsolver '" + std::string(s) + "'");
}

bool RunReport::success(double eps) const {
  return (status == Status::FOSP || status == Status::SOSP) && grad_norm <= eps;
}

namespace {

bool adaptive_trace(const RunReport& r) {
  for (const auto& it : r.iterations) {
    if (it.params.rho) return true;
  }
  return false;
}

}  // namespace

void write_trace_csv(std::ostream& out, const RunReport& r) {
  const bool adaptive = adaptive_trace(r);
  out << "k,f,gnorm,lambda,stepnorm,class,retries";
  if (adaptive) out << ",rho,lambda_min,branch,inner_retries";
  out << '\n' << std::setprecision(17);
  for (const auto& it : r.iterations) {
    out << it.k << ',' << it.f_before << ',' << it.grad_norm_before << ','
        << it.lambda << ',' << it.step_norm << ','
        << to_string(it.classification) << ',' << it.retries;
    if (adaptive) {
      out << ',' << it.params.rho.value_or(0.0) << ','
          << it.lambda_min.value_or(0.0) << ',' << it.branch << ','
          << it.retries;
    }
    out << '\n';
  }
}

void write_accel_trace_csv(std::ostream& out, const RunReport& r) {
  out << "k,a,A,inner_iters,grad_h,f_x\n" << std::setprecision(17);
  for (const auto& o : r.outer) {
    out << o.k << ',' << o.a << ',' << o.A << ',' << o.inner_iters << ','
        << o.grad_h_norm << ',' << o.f_x << '\n';
  }
}

void write_plot_csv(std::ostream& out, const RunReport& r) {
  out << "k,f,gnorm,wall_time\n" << std::setprecision(17);
  if (!r.outer.empty()) {
    for (const auto& o : r.outer) {
      out << o.k << ',' << o.f_x << ',' << o.grad_f_norm << ',' << o.wall_time
          << '\n';
    }
    return;
  }
  for (const auto& it : r.iterations) {
    out << it.k << ',' << it.f_after << ',' << it.grad_norm_after << ','
        << it.wall_time << '\n';
  }
}

}  // namespace utr
