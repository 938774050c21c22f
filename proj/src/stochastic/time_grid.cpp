#include "stocsens/stochastic/time_grid.hpp"

#include <cmath>
#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens {

TimeGrid build_grid(double horizon, std::size_t steps) {
  require(std::isfinite(horizon) && horizon > 0.0,
          "time grid: horizon must be positive, got " + format_number(horizon));
  require(steps >= 1, "time grid: steps must be at least 1");
  TimeGrid grid;
  grid.horizon_ = horizon;
  grid.steps_ = steps;
  grid.dt_ = horizon / static_cast<double>(steps);
  return grid;
}

}  // namespace stocsens
