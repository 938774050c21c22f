#pragma once

#include <cstddef>

namespace stocsens {

/// Uniform grid t_k = k * dt on [0, horizon], k = 0..steps.
class TimeGrid {
 public:
  TimeGrid() = default;

  double horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  double dt() const { return dt_; }

  /// Grid point t_k; t_K is exactly the horizon.
  double time(std::size_t k) const {
    return k == steps_ ? horizon_ : static_cast<double>(k) * dt_;
  }

  friend TimeGrid build_grid(double horizon, std::size_t steps);

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_ = 1.0;
  std::size_t steps_ = 1;
  double dt_ = 1.0;
};

/// Throws kInvalidArgument for a non-positive (or non-finite) horizon or
/// zero steps.
TimeGrid build_grid(double horizon, std::size_t steps);

/// Position inside one grid step used by the step-wise integrators:
/// left node, midpoint, right node.
enum class Stage { kLeft = 0, kMid = 1, kRight = 2 };

inline double stage_fraction(Stage s) { return 0.5 * static_cast<int>(s); }

}  // namespace stocsens
