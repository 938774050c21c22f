#include "stocsens/core/time_function.hpp"

#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens {

TimeFunction::TimeFunction(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), constant_(Value::Zero(rows, cols)) {}

TimeFunction TimeFunction::constant(Value value) {
  TimeFunction f(value.rows(), value.cols());
  f.constant_ = std::move(value);
  return f;
}

TimeFunction TimeFunction::scalar(double value) {
  return constant(Value::Constant(1, 1, value));
}

TimeFunction TimeFunction::callable(Eigen::Index rows, Eigen::Index cols, Callable fn) {
  require(static_cast<bool>(fn), "time function: empty callable");
  TimeFunction f(rows, cols);
  f.kind_ = Kind::kCallable;
  f.callable_ = std::move(fn);
  return f;
}

TimeFunction TimeFunction::samples(std::vector<Value> values) {
  require(!values.empty(), "time function: empty sample list");
  TimeFunction f(values.front().rows(), values.front().cols());
  for (const auto& v : values) {
    require(v.rows() == f.rows_ && v.cols() == f.cols_,
            "time function: samples must share one shape");
  }
  if (values.size() == 1) {
    f.constant_ = values.front();
    return f;
  }
  f.kind_ = Kind::kSamples;
  f.samples_ = std::move(values);
  return f;
}

TimeFunction TimeFunction::combine(const TimeFunction& a, double weight,
                                   const TimeFunction& b) {
  require(a.rows_ == b.rows_ && a.cols_ == b.cols_,
          "time function: shape mismatch in combination");
  if (weight == 0.0 || b.is_zero()) return a;
  if (a.kind_ == Kind::kConstant && b.kind_ == Kind::kConstant) {
    return constant(a.constant_ + weight * b.constant_);
  }
  TimeFunction f(a.rows_, a.cols_);
  f.kind_ = Kind::kCombine;
  f.combination_ = std::make_shared<const Combination>(Combination{a, weight, b});
  return f;
}

TimeFunction TimeFunction::map(Eigen::Index rows, Eigen::Index cols,
                               std::vector<TimeFunction> sources, Mapping fn) {
  require(static_cast<bool>(fn), "time function: empty mapping");
  bool all_constant = true;
  for (const auto& src : sources) all_constant = all_constant && src.is_constant();
  if (all_constant) {
    std::vector<Value> values;
    values.reserve(sources.size());
    for (const auto& src : sources) values.push_back(src.constant_);
    Value v = fn(values);
    require(v.rows() == rows && v.cols() == cols, "time function: mapping returned wrong shape");
    return constant(std::move(v));
  }
  TimeFunction f(rows, cols);
  f.kind_ = Kind::kMap;
  f.derived_ = std::make_shared<const Derived>(Derived{std::move(sources), std::move(fn)});
  return f;
}

TimeFunction::Value TimeFunction::at(const TimeGrid& grid, std::size_t k, Stage stage) const {
  switch (kind_) {
    case Kind::kConstant:
      return constant_;
    case Kind::kCallable: {
      const double t = grid.time(k) + stage_fraction(stage) * grid.dt();
      Value v = callable_(t);
      if (v.rows() != rows_ || v.cols() != cols_) {
        fail(ErrorKind::kInvalidArgument, "time function: callable returned wrong shape");
      }
      return v;
    }
    case Kind::kSamples:
      if (samples_.size() != grid.steps()) {
        fail(ErrorKind::kInvalidArgument,
             "time function: " + std::to_string(samples_.size()) +
                 " samples do not match " + std::to_string(grid.steps()) + " grid steps");
      }
      return samples_[k < samples_.size() ? k : samples_.size() - 1];
    case Kind::kCombine:
      return combination_->a.at(grid, k, stage) +
             combination_->weight * combination_->b.at(grid, k, stage);
    case Kind::kMap: {
      std::vector<Value> values;
      values.reserve(derived_->sources.size());
      for (const auto& src : derived_->sources) values.push_back(src.at(grid, k, stage));
      Value v = derived_->fn(values);
      if (v.rows() != rows_ || v.cols() != cols_) {
        fail(ErrorKind::kInvalidArgument, "time function: mapping returned wrong shape");
      }
      return v;
    }
  }
  return constant_;
}

TimeFunction::Value TimeFunction::node(const TimeGrid& grid, std::size_t k) const {
  if (k >= grid.steps()) return at(grid, grid.steps() - 1, Stage::kRight);
  return at(grid, k, Stage::kLeft);
}

bool TimeFunction::is_zero() const {
  return kind_ == Kind::kConstant && (constant_.size() == 0 || constant_.isZero(0.0));
}

bool TimeFunction::is_constant() const { return kind_ == Kind::kConstant; }

const std::vector<TimeFunction::Value>* TimeFunction::sample_values() const {
  return kind_ == Kind::kSamples ? &samples_ : nullptr;
}

void TimeFunction::check_on_grid(const TimeGrid& grid, const char* name) const {
  if (kind_ == Kind::kConstant) {
    if (!constant_.allFinite()) {
      fail(ErrorKind::kInvalidArgument, std::string(name) + ": non-finite value");
    }
    return;
  }
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      if (!at(grid, k, s).allFinite()) {
        fail(ErrorKind::kInvalidArgument,
             std::string(name) + ": non-finite value in step " + std::to_string(k));
      }
    }
  }
}

}  // namespace stocsens
