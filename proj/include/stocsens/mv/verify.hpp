#pragma once

#include "stocsens/mv/solution.hpp"

namespace stocsens::mv {

struct VerificationRecord {
  std::size_t n_paths = 0;
  Estimate mean_gap;      ///< E[X(T)] - A
  Estimate variance_gap;  ///< E[(X(T) - A)^2] - value
  /// sup over grid and paths of |p (mu - r 1) + sigma q'|.
  double adjoint_relation_residual = 0.0;
  /// max_k |E[e^{R(t_k)} p(t_k)] - p(0)| and the largest ratio of that gap
  /// to its standard error (e^{R} p is a martingale).
  double martingale_drift = 0.0;
  double martingale_drift_ratio = 0.0;
};

/// Re-simulates the wealth SDE by Euler-Maruyama under the optimal feedback
/// portfolio on `w` (typically a fresh, streamed ensemble) and reports the
/// diagnostics above. Results do not depend on the thread count.
VerificationRecord mc_verify(const MVSpec& spec, const MVSolution& sol, const BrownianEnsemble& w,
                             Exec exec = Exec::kParallel);

}  // namespace stocsens::mv
