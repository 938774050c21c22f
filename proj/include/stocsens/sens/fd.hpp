#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stocsens::sens {

/// One labeled term of a directional derivative.
struct Contribution {
  std::string label;
  double value = 0.0;
  std::optional<double> std_error;  ///< MC quadrature only
};

struct SensitivityReport {
  double adjoint_value = 0.0;  ///< sum of the breakdown, in breakdown order
  std::vector<Contribution> breakdown;
  std::optional<double> mc_stderr;  ///< of adjoint_value, MC quadrature only
  double fd_value = 0.0;
  double fd_step = 0.0;
  double abs_gap = 0.0;
  double rel_gap = 0.0;

  const Contribution* find(const std::string& label) const;
};

/// Builds a report whose adjoint value is the ordered sum of `parts`.
SensitivityReport make_report(std::vector<Contribution> parts);

/// Value along a parameter ray: s -> v(P + s dP).
using RayValue = std::function<double(double)>;

struct FDResult {
  double central = 0.0;     ///< [v(tau) - v(-tau)] / (2 tau)
  double richardson = 0.0;  ///< (4 D(tau/2) - D(tau)) / 3
  double step = 0.0;
};

/// Central difference with one Richardson extrapolation. The evaluator must be
/// deterministic (exact values, or MC with common random numbers).
FDResult fd_check(const RayValue& v, double tau);

/// One-sided quotient [v(tau) - v(0)] / tau.
double forward_quotient(const RayValue& v, double tau);

/// Default step 1e-4 * max(1, scale) where scale measures the size of the ray.
double default_fd_step(double ray_scale);

/// Records the FD estimate in the report and fills the gap columns;
/// rel_gap = abs_gap / max(|adjoint_value|, 1e-12).
void attach_fd(SensitivityReport& report, double fd_value, double step);

/// Dv(alpha dP1 + beta dP2) == alpha Dv(dP1) + beta Dv(dP2) to `tol`, relative
/// to the magnitude of the terms (absolute below 1).
bool linearity_check(double combined, double d1, double d2, double alpha, double beta,
                     double tol = 1e-12);

}  // namespace stocsens::sens
