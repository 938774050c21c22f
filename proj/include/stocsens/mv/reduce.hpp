#pragma once

#include <cmath>

#include "stocsens/mv/spec.hpp"

namespace stocsens::mv {

/// Change of variables to the zero-rate, zero-target problem
///   P' = (x - A e^{-R(T)}, 0, 0, mu - r 1, sigma),  R(t) = int_0^t r,
/// with v(P) = e^{2R(T)} v(P'). Solutions map back through
///   X = e^{R(t)} (X' + A e^{-R(T)}),  pi = e^{R(t)} pi',
///   (p, q) = e^{2R(T) - R(t)} (p', q'),  lambda_E = e^{R(T)} lambda_E'.
struct Reduction {
  MVSpec reduced;
  double scale = 1.0;  ///< e^{2R(T)}
  CumulativeIntegral R;

  double wealth_factor(std::size_t k, Stage s) const { return std::exp(R.at(k, s)); }
  double adjoint_factor(std::size_t k, Stage s) const {
    return std::exp(2.0 * R.total() - R.at(k, s));
  }
  double multiplier_factor() const { return std::exp(R.total()); }
  /// A e^{-R(T)}: the reduced-wealth offset.
  double target_discounted(double A) const { return A * std::exp(-R.total()); }
};

/// Throws the validation errors of `validate`, except that a failed
/// qualification is reported as kDegenerateProblem.
Reduction reduce(const MVSpec& spec, const TimeGrid& grid);

}  // namespace stocsens::mv
