#include "stocsens/mv/spec.hpp"

#include <cmath>
#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens::mv {

TimeFunction excess_drift(const MVSpec& spec) {
  return TimeFunction::map(spec.d, 1, {spec.mu, spec.r}, [](const auto& v) {
    return Eigen::MatrixXd(v[0].array() - v[1](0, 0));
  });
}

CumulativeIntegral cumulative_integral(const TimeFunction& f, const TimeGrid& grid) {
  require(f.rows() == 1 && f.cols() == 1, "cumulative_integral: scalar function expected");
  const std::size_t K = grid.steps();
  const double h = grid.dt();
  CumulativeIntegral out;
  out.nodes.resize(K + 1);
  out.mids.resize(K);
  out.nodes[0] = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double l = f.at(grid, k, Stage::kLeft)(0, 0);
    const double m = f.at(grid, k, Stage::kMid)(0, 0);
    const double r = f.at(grid, k, Stage::kRight)(0, 0);
    out.nodes[k + 1] = out.nodes[k] + h * (l + 4.0 * m + r) / 6.0;
    out.mids[k] = 0.5 * (out.nodes[k] + out.nodes[k + 1]) + h * (l - r) / 8.0;
  }
  return out;
}

void validate(const MVSpec& spec, const TimeGrid& grid) {
  const Eigen::Index d = spec.d;
  require(d >= 1, "mv spec: d must be positive");
  require(std::isfinite(spec.x), "x: non-finite initial wealth");
  require(std::isfinite(spec.A), "A: non-finite target");
  require(spec.r.rows() == 1 && spec.r.cols() == 1, "r: expected a scalar function");
  require(spec.mu.rows() == d && spec.mu.cols() == 1,
          "mu: expected " + std::to_string(d) + " entries");
  require(spec.sigma.rows() == d && spec.sigma.cols() == d,
          "sigma: expected shape " + std::to_string(d) + "x" + std::to_string(d));
  require(spec.delta > 0.0 && std::isfinite(spec.delta), "delta: must be positive");
  spec.r.check_on_grid(grid, "r");
  spec.mu.check_on_grid(grid, "mu");
  spec.sigma.check_on_grid(grid, "sigma");

  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      const Eigen::MatrixXd sg = spec.sigma.at(grid, k, s);
      const Eigen::MatrixXd cov = sg * sg.transpose();
      const double lo =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
      if (!(lo >= spec.delta)) {
        fail(ErrorKind::kEllipticity,
             "sigma: sigma sigma' must satisfy sigma sigma' >= delta I, smallest eigenvalue " +
                 format_number(lo) + " < delta = " + format_number(spec.delta) + " (step " +
                 std::to_string(k) + ")");
      }
    }
    if (spec.sigma.is_constant()) break;
  }

  const TimeFunction excess = excess_drift(spec);
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const TimeFunction comp = TimeFunction::map(1, 1, {excess}, [i](const auto& v) {
      return Eigen::MatrixXd::Constant(1, 1, v[0](i, 0));
    });
    total += std::abs(cumulative_integral(comp, grid).total());
  }
  if (!(total > 0.0)) {
    fail(ErrorKind::kQualification,
         "mu: qualification fails, int (mu_i - r) dt vanishes for every asset");
  }
}

}  // namespace stocsens::mv
