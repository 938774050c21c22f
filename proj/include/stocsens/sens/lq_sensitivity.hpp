#pragma once

#include "stocsens/lq/solve.hpp"
#include "stocsens/sens/fd.hpp"

namespace stocsens::sens {

/// Direction dP in the parameters of an LQ problem. Shapes follow LQSpec.
struct LQPerturbation {
  Eigen::VectorXd dx0;
  TimeFunction dA, dB, de;
  std::vector<TimeFunction> dC, dD, df;

  /// Zero direction shaped for `spec`.
  static LQPerturbation zeros(const lq::LQSpec& spec);
};

/// Throws kInvalidArgument when shapes do not match `spec`.
void check_shapes(const lq::LQSpec& spec, const LQPerturbation& pert);

/// alpha a + beta b.
LQPerturbation combine(double alpha, const LQPerturbation& a, double beta,
                       const LQPerturbation& b);

/// spec + s * pert.
lq::LQSpec perturbed(const lq::LQSpec& spec, const LQPerturbation& pert, double s);

/// Labels of the seven blocks, in breakdown order.
inline constexpr const char* kLQBlocks[] = {"dx0", "dA", "dB", "dC", "dD", "de", "df"};

/// Directional derivative
///   Dv = p(0)'dx0 + E int p'(dA x + dB u + de) dt + E int sum_j q_j'(dC_j x + dD_j u + df_j) dt
/// with the expectations integrated from the closed-loop moments (no
/// sampling noise, RK4 accuracy in time).
SensitivityReport dv_lq(const lq::LQModel& model, const LQPerturbation& pert);

/// Same display by Monte Carlo: left-point sums over the stored optimal paths.
/// Each block carries its standard error; mc_stderr is that of the total.
SensitivityReport dv_lq(const lq::LQSolution& sol, const LQPerturbation& pert);

/// Additive perturbation x0 + dx0, drift + df_add, diffusion + dsigma_add
/// (column j of the n x d matrix loads W_j):
///   Dv = p(0)'dx0 + E int p'df_add dt + E int tr[q' dsigma_add] dt.
/// Labels "dx0", "drift", "diffusion". Evaluated by the same code path as
/// dv_lq with only (dx0, de, df) nonzero.
SensitivityReport dv_additive(const lq::LQModel& model, const Eigen::VectorXd& dx0,
                              const TimeFunction& df_add, const TimeFunction& dsigma_add);

/// The LQ direction equivalent to an additive perturbation.
LQPerturbation additive_perturbation(const lq::LQSpec& spec, const Eigen::VectorXd& dx0,
                                     const TimeFunction& df_add,
                                     const TimeFunction& dsigma_add);

/// s -> Riccati value of spec + s * pert on `grid`.
RayValue lq_value_ray(const lq::LQSpec& spec, const LQPerturbation& pert, const TimeGrid& grid,
                      const lq::RiccatiOptions& opts = {});

/// Rough size of a direction (max abs entry over x0 and left-stage samples),
/// for choosing FD steps.
double ray_scale(const LQPerturbation& pert, const TimeGrid& grid);

}  // namespace stocsens::sens
