#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace stocsens {

/// Execution policy for path-sliced kernels. Serial is the reference
/// implementation; Parallel distributes whole paths over OpenMP threads.
/// Both produce bitwise-identical results: every reduction is performed in
/// path order after the per-path work is done.
enum class Exec { kSerial, kParallel };

template <class Fn>
void for_each_path(Exec exec, std::size_t n_paths, Fn&& fn) {
  if (exec == Exec::kParallel) {
    const auto n = static_cast<long long>(n_paths);
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < n; ++p) fn(static_cast<std::size_t>(p));
  } else {
    for (std::size_t p = 0; p < n_paths; ++p) fn(p);
  }
}

/// Sample mean with its Monte-Carlo standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Ordered two-pass mean / standard error of per-path samples.
inline Estimate estimate_mean(std::span<const double> samples) {
  Estimate est;
  const std::size_t n = samples.size();
  if (n == 0) return est;
  double sum = 0.0;
  for (double v : samples) sum += v;
  est.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return est;
}

}  // namespace stocsens
