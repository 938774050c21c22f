#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "stocsens/stochastic/time_grid.hpp"

namespace stocsens {

/// Deterministic matrix-valued function of time. Vectors are n x 1 and
/// scalars 1 x 1.
///
/// A function is a constant, a callable t -> value, piecewise-constant
/// samples (one per grid step, or a single sample), or a linear combination
/// a + w * b of two functions. Step-wise integrators evaluate it through
/// `at(grid, k, stage)`, so sampled data stays constant across a whole step
/// even at the right node.
class TimeFunction {
 public:
  using Value = Eigen::MatrixXd;
  using Callable = std::function<Value(double)>;

  /// Zero function of the given shape.
  TimeFunction(Eigen::Index rows = 0, Eigen::Index cols = 0);

  static TimeFunction constant(Value value);
  static TimeFunction scalar(double value);
  static TimeFunction callable(Eigen::Index rows, Eigen::Index cols, Callable fn);
  /// Piecewise-constant on grid steps. A single sample means constant.
  static TimeFunction samples(std::vector<Value> values);
  /// a + weight * b.
  static TimeFunction combine(const TimeFunction& a, double weight, const TimeFunction& b);
  /// Pointwise fn(values of sources), evaluated stage by stage so sampled
  /// sources keep their step-wise semantics. Folds to a constant when every
  /// source is constant.
  using Mapping = std::function<Value(const std::vector<Value>&)>;
  static TimeFunction map(Eigen::Index rows, Eigen::Index cols, std::vector<TimeFunction> sources,
                          Mapping fn);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  /// Evaluate inside grid step k (0 <= k < K) at the given stage.
  Value at(const TimeGrid& grid, std::size_t k, Stage stage) const;
  /// Left-point value of step k; for k == K the right node of the last step.
  Value node(const TimeGrid& grid, std::size_t k) const;

  /// True when the function is the zero constant (cheap structural test).
  bool is_zero() const;
  bool is_constant() const;
  /// Throws if sample counts are incompatible with the grid or any value
  /// evaluated on the grid is not finite.
  void check_on_grid(const TimeGrid& grid, const char* name) const;

  /// Present when the function is built from samples (length K or 1).
  const std::vector<Value>* sample_values() const;

 private:
  enum class Kind { kConstant, kCallable, kSamples, kCombine, kMap };
  struct Combination;
  struct Derived;

  Kind kind_ = Kind::kConstant;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  Value constant_;
  Callable callable_;
  std::vector<Value> samples_;
  std::shared_ptr<const Combination> combination_;
  std::shared_ptr<const Derived> derived_;
};

struct TimeFunction::Combination {
  TimeFunction a;
  double weight;
  TimeFunction b;
};

struct TimeFunction::Derived {
  std::vector<TimeFunction> sources;
  Mapping fn;
};

}  // namespace stocsens
