#include "stocsens/mv/solution.hpp"

#include "stocsens/core/error.hpp"
#include "stocsens/stochastic/paths.hpp"

namespace stocsens::mv {

void materialize(MVSolution& sol, const BrownianEnsemble& w, Exec exec) {
  require(w.grid() == sol.grid, "mv: ensemble grid does not match the solution grid");
  require(w.dim() == static_cast<std::size_t>(sol.spec.d),
          "mv: ensemble dimension does not match the number of assets");
  const std::size_t n = w.n_paths();
  const std::size_t K = sol.grid.steps();
  sol.X_bar = PathField(n, K + 1, 1);
  sol.p_bar = PathField(n, K + 1, 1);
  sol.pi_bar = PathField(n, K, sol.spec.d);
  sol.q_bar = PathField(n, K, 1, sol.spec.d);
  map_paths(w, exec, [&](std::size_t p, std::span<const double> dW) {
    walk_mv(sol, dW, [&](const MVPoint& pt) {
      sol.X_bar(p, pt.k) = pt.X;
      sol.p_bar(p, pt.k) = pt.p;
      if (pt.k < K) {
        sol.pi_bar.at(p, pt.k) = pt.pi;
        sol.q_bar.at(p, pt.k) = pt.q;
      }
    });
    return 0.0;
  });
  if (!sol.X_bar.all_finite() || !sol.pi_bar.all_finite()) {
    fail(ErrorKind::kIntegrationFailure, "mv: optimal paths contain non-finite values");
  }
}

lq::LQSpec working_spec(const MVSpec& spec, double lambda) {
  const Eigen::Index d = spec.d;
  lq::LQSpec w = lq::LQSpec::zeros(1, d, d);
  w.x0 = Eigen::VectorXd::Constant(1, spec.x - spec.A + 0.5 * lambda);
  w.A = spec.r;
  w.B = TimeFunction::map(1, d, {excess_drift(spec)},
                          [](const auto& v) { return Eigen::MatrixXd(v[0].transpose()); });
  for (Eigen::Index j = 0; j < d; ++j) {
    w.D[static_cast<std::size_t>(j)] =
        TimeFunction::map(1, d, {spec.sigma}, [j](const auto& v) {
          return Eigen::MatrixXd(v[0].col(j).transpose());
        });
  }
  const double shift = spec.A - 0.5 * lambda;
  w.e = TimeFunction::map(1, 1, {spec.r}, [shift](const auto& v) {
    return Eigen::MatrixXd(v[0] * shift);
  });
  w.N = TimeFunction(d, d);
  w.M = Eigen::MatrixXd::Constant(1, 1, 2.0);
  return w;
}

std::vector<UnwindStage> reduced_unwind(const Reduction& red, const TimeGrid& grid, double A,
                                        double lambda_work) {
  std::vector<UnwindStage> out;
  out.reserve(3 * grid.steps());
  const double offset = red.target_discounted(A) - 0.5 * lambda_work;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      UnwindStage u;
      u.discount = red.wealth_factor(k, s);
      u.x_scale = u.discount;
      u.x_shift = u.discount * offset;
      u.pi_scale = u.discount;
      u.adj_scale = red.adjoint_factor(k, s);
      out.push_back(u);
    }
  }
  return out;
}

std::vector<UnwindStage> direct_unwind(const CumulativeIntegral& R, const TimeGrid& grid,
                                       double A, double lambda) {
  std::vector<UnwindStage> out;
  out.reserve(3 * grid.steps());
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      UnwindStage u;
      u.x_shift = A - 0.5 * lambda;
      u.discount = std::exp(R.at(k, s));
      out.push_back(u);
    }
  }
  return out;
}

lq::RiccatiOptions working_riccati_options() {
  lq::RiccatiOptions opts;
  opts.validation.require_positive_control_weight = false;
  return opts;
}

}  // namespace stocsens::mv
