#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stocsens/core/time_function.hpp"
#include "stocsens/stochastic/time_grid.hpp"

namespace stocsens::lq {

/// Deterministic-coefficient stochastic LQ problem
///
///   minimize  1/2 E[ int (x'Qx + u'Nu) dt + x(T)'M x(T) ]
///   s.t.      dx = (Ax + Bu + e) dt + sum_j (C_j x + D_j u + f_j) dW_j,  x(0) = x0.
///
/// Every coefficient is a deterministic function of time; shapes are
/// A, C_j, Q: n x n; B, D_j: n x m; e, f_j: n x 1; N: m x m; M: n x n.
struct LQSpec {
  Eigen::Index n = 1;
  Eigen::Index m = 1;
  Eigen::Index d = 1;
  Eigen::VectorXd x0;
  TimeFunction A;
  TimeFunction B;
  std::vector<TimeFunction> C;
  std::vector<TimeFunction> D;
  TimeFunction e;
  std::vector<TimeFunction> f;
  TimeFunction Q;
  TimeFunction N;
  Eigen::MatrixXd M;
  /// Required lower bound on the eigenvalues of N(t).
  double delta = 1e-8;

  /// All-zero problem of the given dimensions with N = I.
  static LQSpec zeros(Eigen::Index n, Eigen::Index m, Eigen::Index d);
};

struct ValidationOptions {
  /// Enforce N(t) >= delta I. Sub-problems whose control cost enters only
  /// through the diffusion (mean-variance) switch this off and rely on the
  /// Riccati gain matrix being positive definite instead.
  bool require_positive_control_weight = true;
  double symmetry_tol = 1e-10;
  double psd_tol = 1e-12;
};

/// Throws kInvalidArgument naming the offending field.
void validate(const LQSpec& spec, const TimeGrid& grid, const ValidationOptions& opts = {});

/// Coefficients of one grid step at one stage.
struct StageCoefficients {
  Eigen::MatrixXd A, B, Q, N;
  std::vector<Eigen::MatrixXd> C, D;
  Eigen::VectorXd e;
  std::vector<Eigen::VectorXd> f;
};

StageCoefficients evaluate(const LQSpec& spec, const TimeGrid& grid, std::size_t k, Stage s);

/// Left, mid and right stage coefficients for every step.
class CoefficientTable {
 public:
  CoefficientTable(const LQSpec& spec, const TimeGrid& grid);

  const StageCoefficients& at(std::size_t k, Stage s) const {
    return table_[3 * k + static_cast<std::size_t>(s)];
  }

 private:
  std::vector<StageCoefficients> table_;
};

}  // namespace stocsens::lq
