#pragma once

#include "stocsens/mv/closed_form.hpp"

namespace stocsens::mv {

/// kReduced solves the zero-rate reduced problem and unwinds; kDirect poses
/// the working LQ problem in original coordinates (nonzero rate kept).
enum class DualRoute { kReduced, kDirect };

struct DualOptions {
  double tol = 1e-10;  ///< on |E[X(T)] - A| in working coordinates
  DualRoute route = DualRoute::kReduced;
  std::size_t max_bisections = 200;
  bool store_paths = true;
  Exec exec = Exec::kParallel;
};

/// Inner problem of the dual search at multiplier lambda (working
/// coordinates of the chosen route).
struct InnerSolve {
  double lambda = 0.0;
  double value = 0.0;          ///< min E[(X(T) - A)^2] + lambda (E[X(T)] - A)
  double terminal_gap = 0.0;   ///< E[X(T)] - A under the inner optimum
};

InnerSolve inner_dual(const MVSpec& spec, const TimeGrid& grid, double lambda,
                      DualRoute route = DualRoute::kReduced);

/// Dual search over the multiplier of E[X(T)] = A. Each inner problem is
/// the working LQ problem; its terminal mean is affine in lambda, so a secant
/// step from two evaluations locates the root and bisection only cleans up
/// rounding. Throws kDegenerateProblem when the constraint cannot be
/// bracketed.
MVSolution solve_dual(const MVSpec& spec, const TimeGrid& grid, const BrownianEnsemble& w,
                      const DualOptions& opts = {});

}  // namespace stocsens::mv
