#pragma once

#include "stocsens/lq/solve.hpp"

namespace stocsens::lq {

struct PicardOptions {
  double theta = 0.5;  ///< damping of the control update
  std::size_t max_iters = 200;
  double tol = 1e-8;  ///< on the MC L2 norm of successive control iterates
  Exec exec = Exec::kParallel;
};

struct PicardResult {
  /// `solution.model->riccati` holds the policy-evaluation pair (Pi, pi) of
  /// the final iterate, not a Riccati solve; `solution.value` is the cost
  /// of the final control computed from its moments.
  LQSolution solution;
  std::size_t iterations = 0;
  double last_change = 0.0;
};

/// Fixed-point iteration on the optimality system that never touches the
/// Riccati equation. Each iterate is an affine feedback u = -G x - g stored
/// at the grid nodes. Given the iterate, the adjoint of
///   dp = -[A'p + sum_j C_j'q_j + Q x] dt + q dW,  p(T) = M x(T)
/// is p = Pi x + pi with
///   -dPi/dt = Pi Abar + A'Pi + sum_j C_j'Pi Cbar_j + Q,      Pi(T) = M
///   -dpi/dt = A'pi + Pi ebar + sum_j C_j'Pi fbar_j,         pi(T) = 0
/// and the feedback law u = -N^{-1}[B'p + sum_j D_j'q_j] with
/// q_j = Pi (C_j x + D_j u + f_j) gives the next gains, applied with damping.
/// Throws kConvergenceFailure after max_iters.
PicardResult fbsde_picard_oracle(const LQSpec& spec, const TimeGrid& grid,
                                 const BrownianEnsemble& w, const PicardOptions& opts = {});

/// sqrt(E int |u_a - u_b|^2 dt), each control driven by its own closed loop
/// on the same ensemble (left-point sums).
double control_distance(const ClosedLoop& a, const ClosedLoop& b, const Eigen::VectorXd& x0,
                        const BrownianEnsemble& w, Exec exec = Exec::kParallel);

}  // namespace stocsens::lq
