#include "stocsens/mv/reduce.hpp"

#include "stocsens/core/error.hpp"

namespace stocsens::mv {

Reduction reduce(const MVSpec& spec, const TimeGrid& grid) {
  try {
    validate(spec, grid);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kQualification) throw;
    fail(ErrorKind::kDegenerateProblem, std::string("reduce: ") + e.what());
  }
  Reduction red;
  red.R = cumulative_integral(spec.r, grid);
  red.scale = std::exp(2.0 * red.R.total());
  red.reduced = spec;
  red.reduced.x = spec.x - red.target_discounted(spec.A);
  red.reduced.r = TimeFunction(1, 1);
  red.reduced.A = 0.0;
  red.reduced.mu = excess_drift(spec);
  return red;
}

}  // namespace stocsens::mv
