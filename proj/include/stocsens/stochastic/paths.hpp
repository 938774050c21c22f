#pragma once

#include <span>
#include <vector>

#include "stocsens/core/exec.hpp"
#include "stocsens/stochastic/brownian.hpp"

namespace stocsens {

/// Runs `fn(p, dW)` for every path of the ensemble, where dW is the path's
/// K*d increments (step-major), and collects one double per path in path
/// order. Streamed ensembles regenerate each path on the fly.
template <class Fn>
std::vector<double> map_paths(const BrownianEnsemble& w, Exec exec, Fn&& fn) {
  const std::size_t len = w.steps() * w.dim();
  std::vector<double> out(w.n_paths());
  for_each_path(exec, w.n_paths(), [&](std::size_t p) {
    if (w.materialized()) {
      out[p] = fn(p, w.increments().subspan(p * len, len));
    } else {
      std::vector<double> buf(len);
      w.path_increments(p, buf);
      out[p] = fn(p, std::span<const double>(buf));
    }
  });
  return out;
}

}  // namespace stocsens
