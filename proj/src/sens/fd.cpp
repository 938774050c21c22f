#include "stocsens/sens/fd.hpp"

#include <algorithm>
#include <cmath>

#include "stocsens/core/error.hpp"

namespace stocsens::sens {

const Contribution* SensitivityReport::find(const std::string& label) const {
  for (const Contribution& c : breakdown) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

SensitivityReport make_report(std::vector<Contribution> parts) {
  SensitivityReport r;
  r.breakdown = std::move(parts);
  double var = 0.0;
  bool mc = false;
  for (const Contribution& c : r.breakdown) {
    r.adjoint_value += c.value;
    if (c.std_error) {
      mc = true;
      var += *c.std_error * *c.std_error;
    }
  }
  // Blocks share paths, so this is only a fallback; MC callers overwrite it
  // with the standard error of the per-path total.
  if (mc) r.mc_stderr = std::sqrt(var);
  return r;
}

FDResult fd_check(const RayValue& v, double tau) {
  require(tau > 0.0 && std::isfinite(tau), "fd_check: step must be positive and finite");
  auto central = [&](double h) { return (v(h) - v(-h)) / (2.0 * h); };
  FDResult out;
  out.step = tau;
  out.central = central(tau);
  out.richardson = (4.0 * central(0.5 * tau) - out.central) / 3.0;
  return out;
}

double forward_quotient(const RayValue& v, double tau) {
  require(tau > 0.0 && std::isfinite(tau), "forward_quotient: step must be positive and finite");
  return (v(tau) - v(0.0)) / tau;
}

double default_fd_step(double ray_scale) { return 1e-4 * std::max(1.0, std::abs(ray_scale)); }

void attach_fd(SensitivityReport& report, double fd_value, double step) {
  report.fd_value = fd_value;
  report.fd_step = step;
  report.abs_gap = std::abs(report.adjoint_value - fd_value);
  report.rel_gap = report.abs_gap / std::max(std::abs(report.adjoint_value), 1e-12);
}

bool linearity_check(double combined, double d1, double d2, double alpha, double beta,
                     double tol) {
  const double expected = alpha * d1 + beta * d2;
  const double scale =
      std::max({1.0, std::abs(combined), std::abs(alpha * d1), std::abs(beta * d2)});
  return std::abs(combined - expected) <= tol * scale;
}

}  // namespace stocsens::sens
