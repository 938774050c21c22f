#pragma once

#include "stocsens/mv/solution.hpp"

namespace stocsens::mv {

/// One-asset closed form. Sigma = (mu - r)/sigma on each step (left
/// stage, piecewise constant) and the left-point sum of Sigma^2.
struct MVClosedForm {
  std::vector<double> Sigma;
  std::vector<double> S_nodes;  ///< int_0^{t_k} Sigma^2, k = 0..K
  double integrated_Sigma2 = 0.0;
};

/// Requires d = 1 (kUnsupported otherwise), sigma uniformly positive
/// (kEllipticity) and a nonzero excess-drift integral (kQualification).
MVClosedForm closed_form_data(const MVSpec& spec, const TimeGrid& grid);

/// e^{2R(T)} (x - A e^{-R(T)})^2 / (e^{int Sigma^2} - 1).
double closed_form_value(const MVSpec& spec, const TimeGrid& grid);

struct SolveOptions {
  bool store_paths = true;
  Exec exec = Exec::kParallel;
};

/// Explicit optimal tuple of the one-asset problem. A nonzero rate is handled
/// by reducing first and unwinding afterwards.
MVSolution solve_closed_form(const MVSpec& spec, const TimeGrid& grid, const BrownianEnsemble& w,
                             const SolveOptions& opts = {});

/// The four explicit sensitivities of the one-asset, zero-rate problem for
/// deterministic perturbations, with left-point integrals.
struct ExplicitSensitivities {
  double dx = 0.0;
  double dA = 0.0;
  double dmu = 0.0;
  double dsigma = 0.0;
};

ExplicitSensitivities closed_form_sensitivities(const MVSpec& spec, const TimeGrid& grid,
                                                double dx, double dA, const TimeFunction& dmu,
                                                const TimeFunction& dsigma);

}  // namespace stocsens::mv
