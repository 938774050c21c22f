#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stocsens/core/exec.hpp"
#include "stocsens/stochastic/time_grid.hpp"

namespace stocsens {

/// d-dimensional Brownian increments on a grid for a set of paths.
///
/// Increment (p, k, j) is a pure function of (seed, p, k, j): a Philox
/// counter keyed by the seed with (path, step, block) as the counter. Path p
/// is therefore identical for every ensemble size that contains it, and for
/// every thread count.
///
/// A materialized ensemble stores the n_paths x K x d tensor; a streamed one
/// regenerates increments on demand (same values) so large verification runs
/// do not need the tensor in memory.
class BrownianEnsemble {
 public:
  BrownianEnsemble() = default;

  const TimeGrid& grid() const { return grid_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t steps() const { return grid_.steps(); }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  bool materialized() const { return !increments_.empty(); }

  /// Increments of path p at step k (size dim). Materialized only.
  std::span<const double> dW(std::size_t p, std::size_t k) const {
    return {increments_.data() + (p * steps() + k) * dim_, dim_};
  }

  /// Writes the K*d increments of path p (step-major) into `out`.
  void path_increments(std::size_t p, std::span<double> out) const;

  /// W(T) component j of path p.
  double terminal(std::size_t p, std::size_t j = 0) const;

  std::span<const double> increments() const { return increments_; }

  friend BrownianEnsemble sample_brownian(const TimeGrid&, std::size_t, std::size_t,
                                          std::uint64_t, Exec);
  friend BrownianEnsemble stream_brownian(const TimeGrid&, std::size_t, std::size_t,
                                          std::uint64_t);
  friend BrownianEnsemble coarsen(const BrownianEnsemble&, std::size_t);

 private:
  TimeGrid grid_;
  std::size_t n_paths_ = 0;
  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> increments_;
};

/// Materialized ensemble; increments ~ Normal(0, dt), i.i.d.
BrownianEnsemble sample_brownian(const TimeGrid& grid, std::size_t n_paths, std::size_t dim,
                                 std::uint64_t seed, Exec exec = Exec::kParallel);

/// Streamed ensemble with the same increments as `sample_brownian`.
BrownianEnsemble stream_brownian(const TimeGrid& grid, std::size_t n_paths, std::size_t dim,
                                 std::uint64_t seed);

/// Writes the K*d increments of one path for the given stream parameters.
void generate_path_increments(const TimeGrid& grid, std::size_t dim, std::uint64_t seed,
                              std::size_t path, std::span<double> out);

/// Ensemble on a grid with K/factor steps whose increments are the sums of
/// `factor` consecutive fine increments (common random numbers across grid
/// resolutions). Materialized only.
BrownianEnsemble coarsen(const BrownianEnsemble& fine, std::size_t factor);

}  // namespace stocsens
