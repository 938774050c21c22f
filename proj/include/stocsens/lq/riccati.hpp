#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stocsens/lq/spec.hpp"

namespace stocsens::lq {

/// Backward solution of the Riccati system behind the adjoint ansatz
/// p(t) = P(t) x(t) + phi(t). With K = N + sum_j D_j'P D_j, L = B'P + sum_j D_j'P C_j
/// and h = B'phi + sum_j D_j'P f_j:
///
///   -dP/dt   = A'P + PA + sum_j C_j'P C_j + Q - L'K^{-1}L,                  P(T) = M
///   -dphi/dt = A'phi + Pe + sum_j C_j'P f_j - L'K^{-1}h,                    phi(T) = 0
///   -dc/dt   = e'phi + 1/2 sum_j f_j'P f_j - 1/2 h'K^{-1}h,                 c(T) = 0
///
/// and the optimal value is 1/2 x0'P(0)x0 + phi(0)'x0 + c(0).
struct RiccatiSolution {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> P;    ///< nodes 0..K
  std::vector<Eigen::VectorXd> phi;  ///< nodes 0..K
  std::vector<double> c;             ///< nodes 0..K
  /// Cubic-Hermite midpoint values of each step (fourth-order accurate),
  /// used by forward integrators that need the solution inside a step.
  std::vector<Eigen::MatrixXd> P_mid;
  std::vector<Eigen::VectorXd> phi_mid;

  double value(const Eigen::VectorXd& x0) const {
    return 0.5 * x0.dot(P.front() * x0) + phi.front().dot(x0) + c.front();
  }

  const Eigen::MatrixXd& P_at(std::size_t k, Stage s) const {
    return s == Stage::kMid ? P_mid[k] : P[s == Stage::kLeft ? k : k + 1];
  }
  const Eigen::VectorXd& phi_at(std::size_t k, Stage s) const {
    return s == Stage::kMid ? phi_mid[k] : phi[s == Stage::kLeft ? k : k + 1];
  }
};

struct RiccatiOptions {
  ValidationOptions validation;
  /// Max-abs entry of P, phi or c beyond which integration is abandoned.
  double blowup_threshold = 1e12;
};

/// Classical RK4 backward on the spec's grid. Throws kSingularRiccati if
/// K(t) fails its Cholesky factorization, kIntegrationFailure on blow-up.
RiccatiSolution riccati_integrate(const LQSpec& spec, const TimeGrid& grid,
                                  const RiccatiOptions& opts = {});

/// Feedback u = -G x - g implied by (P, phi) at one stage.
struct FeedbackGains {
  Eigen::MatrixXd G;  ///< m x n
  Eigen::VectorXd g;  ///< m
};

FeedbackGains feedback_gains(const StageCoefficients& c, const Eigen::MatrixXd& P,
                             const Eigen::VectorXd& phi);

}  // namespace stocsens::lq
