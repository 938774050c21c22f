#pragma once

#include <memory>

#include "stocsens/core/exec.hpp"
#include "stocsens/core/path_field.hpp"
#include "stocsens/lq/closed_loop.hpp"
#include "stocsens/lq/riccati.hpp"
#include "stocsens/stochastic/brownian.hpp"

namespace stocsens::lq {

/// Everything about an LQ instance that does not depend on the ensemble.
struct LQModel {
  LQSpec spec;
  TimeGrid grid;
  CoefficientTable coef;
  RiccatiSolution riccati;
  ClosedLoop loop;
  double value = 0.0;  ///< 1/2 x0'P(0)x0 + phi(0)'x0 + c(0)
};

std::shared_ptr<const LQModel> build_lq_model(const LQSpec& spec, const TimeGrid& grid,
                                              const RiccatiOptions& opts = {});

/// Optimal closed-loop paths on an ensemble.
/// x_bar, p_bar: n_paths x (K+1) blocks n x 1; u_bar: n_paths x K blocks
/// m x 1; q_bar: n_paths x K blocks n x d (column j is q^j).
struct LQSolution {
  std::shared_ptr<const LQModel> model;
  PathField x_bar, u_bar, p_bar, q_bar;
  double value = 0.0;
};

/// Materializes the closed-loop paths of `model` on `w`.
LQSolution simulate(std::shared_ptr<const LQModel> model, const BrownianEnsemble& w,
                    Exec exec = Exec::kParallel);

LQSolution solve_lq(const LQSpec& spec, const TimeGrid& grid, const BrownianEnsemble& w,
                    const RiccatiOptions& opts = {}, Exec exec = Exec::kParallel);

/// E[x(T)'Mx(T) + int (x'Qx + u'Nu) dt] - p(0)'x0 - E int [p'e + sum_j q_j'f_j] dt
/// on the stored paths (no factor 1/2 on the cost: the identity is stated for
/// the plain quadratic functional, which is twice the value).
Estimate value_duality_residual(const LQSpec& spec, const LQSolution& sol,
                                const BrownianEnsemble& w);

/// Same residual, streaming over paths without storing them.
Estimate duality_residual(const LQModel& model, const BrownianEnsemble& w,
                          Exec exec = Exec::kParallel);

/// Exact expectation of the streaming residual estimator: Euler moments of
/// the discrete closed loop, no sampling. Isolates the O(dt) part.
double expected_duality_residual(const LQModel& model);

/// 1/2 E[x(T)'Mx(T) + int (x'Qx + u'Nu) dt] of an arbitrary affine feedback
/// loop, by RK4 on its moments.
double policy_cost(const LQModel& model, const ClosedLoop& loop);

/// Same cost by Monte Carlo (left-point sums) on an ensemble.
Estimate policy_cost_mc(const LQModel& model, const ClosedLoop& loop, const BrownianEnsemble& w,
                        Exec exec = Exec::kParallel);

/// Optimal loop with the open-loop control perturbation u -> u + eps * v(t).
ClosedLoop perturb_control(const LQModel& model, const TimeFunction& v, double eps);

/// Checks the feedback and adjoint consistency identities of `sol` at
/// every grid point; returns the largest violation.
double consistency_violation(const LQSolution& sol);

}  // namespace stocsens::lq
