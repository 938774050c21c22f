#pragma once

#include <Eigen/Dense>

#include "stocsens/core/exec.hpp"
#include "stocsens/core/path_field.hpp"
#include "stocsens/stochastic/brownian.hpp"

namespace stocsens {

/// Discretized Ito process x = x0 + int drift dt + int diffusion dW.
/// drift: n_paths x K blocks of n x 1; diffusion: n_paths x K blocks of n x d
/// (column j loads W^j). Immutable after construction; non-finite entries
/// are rejected.
class ItoTriple {
 public:
  ItoTriple(Eigen::VectorXd x0, PathField drift, PathField diffusion);

  /// Triple with constant drift and diffusion on every path and step.
  static ItoTriple constant(const Eigen::VectorXd& x0, const Eigen::VectorXd& drift,
                            const Eigen::MatrixXd& diffusion, std::size_t n_paths,
                            std::size_t steps);

  Eigen::Index dim() const { return x0_.size(); }
  Eigen::Index noise_dim() const { return diffusion_.cols(); }
  std::size_t n_paths() const { return drift_.n_paths(); }
  std::size_t steps() const { return drift_.n_times(); }

  const Eigen::VectorXd& x0() const { return x0_; }
  const PathField& drift() const { return drift_; }
  const PathField& diffusion() const { return diffusion_; }

  /// alpha * this + other (same ensemble shape).
  ItoTriple axpy(double alpha, const ItoTriple& other) const;

 private:
  Eigen::VectorXd x0_;
  PathField drift_;
  PathField diffusion_;
};

/// Left-point Euler evaluation: n_paths x (K+1) blocks of n x 1.
PathField ito_evaluate(const ItoTriple& triple, const BrownianEnsemble& w,
                       Exec exec = Exec::kParallel);

/// <a, b>_I = a0.b0 + E int a1.b1 dt + E int tr(a2^T b2) dt (left-point sums).
double inner_product_I(const ItoTriple& a, const ItoTriple& b, const BrownianEnsemble& w,
                       Exec exec = Exec::kParallel);

/// E[x(T).y(T)] - x0.y0 - E int [x.y1 + y.x1 + sum_j x2^j.y2^j] dt on the
/// ensemble, with the Monte-Carlo standard error of the per-path residuals.
Estimate integration_by_parts_residual(const ItoTriple& a, const ItoTriple& b,
                                       const BrownianEnsemble& w, Exec exec = Exec::kParallel);

}  // namespace stocsens
