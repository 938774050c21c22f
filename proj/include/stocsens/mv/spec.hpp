#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stocsens/core/time_function.hpp"
#include "stocsens/stochastic/time_grid.hpp"

namespace stocsens::mv {

/// Mean-variance problem: minimize Var[X(T)] subject to E[X(T)] = A, for
/// the self-financing wealth
///   dX = [r X + pi'(mu - r 1)] dt + pi' sigma dW,  X(0) = x,
/// with d risky assets and deterministic r (1x1), mu (d x 1), sigma (d x d).
struct MVSpec {
  Eigen::Index d = 1;
  double x = 0.0;
  TimeFunction r = TimeFunction(1, 1);
  double A = 0.0;
  TimeFunction mu = TimeFunction(1, 1);
  TimeFunction sigma = TimeFunction(1, 1);
  double delta = 1e-8;  ///< ellipticity bound: sigma sigma' >= delta I
};

/// Shape and finiteness checks (kInvalidArgument), ellipticity on every
/// stage (kEllipticity) and the qualification sum_i |int (mu_i - r)| > 0
/// (kQualification).
void validate(const MVSpec& spec, const TimeGrid& grid);

/// Excess drift mu - r 1 as a time function.
TimeFunction excess_drift(const MVSpec& spec);

/// Cumulative integral of a scalar time function on the grid: per-step
/// Simpson at the nodes, Hermite at the midpoints (exact for piecewise
/// constant data).
struct CumulativeIntegral {
  std::vector<double> nodes;  ///< 0..K
  std::vector<double> mids;   ///< 0..K-1

  double at(std::size_t k, Stage s) const {
    return s == Stage::kMid ? mids[k] : nodes[s == Stage::kLeft ? k : k + 1];
  }
  double total() const { return nodes.back(); }
};

CumulativeIntegral cumulative_integral(const TimeFunction& f, const TimeGrid& grid);

}  // namespace stocsens::mv
