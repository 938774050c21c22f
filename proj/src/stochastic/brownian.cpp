#include "stocsens/stochastic/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stocsens/core/error.hpp"
#include "stocsens/stochastic/philox.hpp"

namespace stocsens {

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t path, std::uint32_t step,
                                  std::uint32_t block) {
  const Philox4x32::Counter ctr{step, block, static_cast<std::uint32_t>(path),
                                static_cast<std::uint32_t>(path >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  const auto r = Philox4x32::generate(ctr, key);
  const std::uint64_t a = (std::uint64_t{r[0]} << 32) | r[1];
  const std::uint64_t b = (std::uint64_t{r[2]} << 32) | r[3];
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

void generate_path_increments(const TimeGrid& grid, std::size_t dim, std::uint64_t seed,
                              std::size_t path, std::span<double> out) {
  const std::size_t steps = grid.steps();
  const double scale = std::sqrt(grid.dt());
  const std::size_t blocks = (dim + 1) / 2;
  for (std::size_t k = 0; k < steps; ++k) {
    double* row = out.data() + k * dim;
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto z = normal_pair(seed, path, static_cast<std::uint32_t>(k),
                                 static_cast<std::uint32_t>(b));
      row[2 * b] = scale * z[0];
      if (2 * b + 1 < dim) row[2 * b + 1] = scale * z[1];
    }
  }
}

namespace {

void check_args(std::size_t n_paths, std::size_t dim) {
  require(n_paths >= 1, "brownian ensemble: n_paths must be at least 1");
  require(dim >= 1, "brownian ensemble: dim must be at least 1");
}

}  // namespace

BrownianEnsemble sample_brownian(const TimeGrid& grid, std::size_t n_paths, std::size_t dim,
                                 std::uint64_t seed, Exec exec) {
  check_args(n_paths, dim);
  BrownianEnsemble w;
  w.grid_ = grid;
  w.n_paths_ = n_paths;
  w.dim_ = dim;
  w.seed_ = seed;
  const std::size_t per_path = grid.steps() * dim;
  w.increments_.resize(n_paths * per_path);
  for_each_path(exec, n_paths, [&](std::size_t p) {
    generate_path_increments(grid, dim, seed, p,
                             std::span<double>(w.increments_.data() + p * per_path, per_path));
  });
  return w;
}

BrownianEnsemble stream_brownian(const TimeGrid& grid, std::size_t n_paths, std::size_t dim,
                                 std::uint64_t seed) {
  check_args(n_paths, dim);
  BrownianEnsemble w;
  w.grid_ = grid;
  w.n_paths_ = n_paths;
  w.dim_ = dim;
  w.seed_ = seed;
  return w;
}

void BrownianEnsemble::path_increments(std::size_t p, std::span<double> out) const {
  const std::size_t per_path = steps() * dim_;
  require(out.size() >= per_path, "brownian ensemble: output buffer too small");
  if (materialized()) {
    std::copy_n(increments_.data() + p * per_path, per_path, out.data());
  } else {
    generate_path_increments(grid_, dim_, seed_, p, out);
  }
}

double BrownianEnsemble::terminal(std::size_t p, std::size_t j) const {
  double w = 0.0;
  if (materialized()) {
    for (std::size_t k = 0; k < steps(); ++k) w += dW(p, k)[j];
    return w;
  }
  std::vector<double> buf(steps() * dim_);
  path_increments(p, buf);
  for (std::size_t k = 0; k < steps(); ++k) w += buf[k * dim_ + j];
  return w;
}

BrownianEnsemble coarsen(const BrownianEnsemble& fine, std::size_t factor) {
  require(factor >= 1 && fine.steps() % factor == 0,
          "coarsen: factor must divide the number of steps");
  require(fine.materialized(), "coarsen: ensemble must be materialized");
  BrownianEnsemble w;
  w.grid_ = build_grid(fine.grid().horizon(), fine.steps() / factor);
  w.n_paths_ = fine.n_paths();
  w.dim_ = fine.dim();
  w.seed_ = fine.seed();
  const std::size_t steps = w.grid_.steps();
  w.increments_.assign(w.n_paths_ * steps * w.dim_, 0.0);
  for (std::size_t p = 0; p < w.n_paths_; ++p) {
    for (std::size_t k = 0; k < fine.steps(); ++k) {
      const auto dw = fine.dW(p, k);
      double* out = w.increments_.data() + (p * steps + k / factor) * w.dim_;
      for (std::size_t j = 0; j < w.dim_; ++j) out[j] += dw[j];
    }
  }
  return w;
}

}  // namespace stocsens
