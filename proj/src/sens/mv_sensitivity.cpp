#include "stocsens/sens/mv_sensitivity.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens::sens {

namespace {

TimeFunction add(const TimeFunction& base, double s, const TimeFunction& dir) {
  if (dir.is_zero() || s == 0.0) return base;
  return TimeFunction::combine(base, s, dir);
}

void check_fn(const TimeFunction& f, Eigen::Index rows, Eigen::Index cols,
              const std::string& name) {
  if (f.rows() != rows || f.cols() != cols) {
    fail(ErrorKind::kInvalidArgument, "perturbation " + name + ": expected " +
                                          std::to_string(rows) + "x" + std::to_string(cols));
  }
}

double initial_adjoint(const mv::MVSolution& sol) {
  const lq::LQModel& w = *sol.work;
  const double y0 = w.spec.x0(0);
  return sol.unwind_node(0).adj_scale * (w.riccati.P.front()(0, 0) * y0 + w.riccati.phi.front()(0));
}

}  // namespace

MVPerturbation MVPerturbation::zeros(const mv::MVSpec& spec) {
  MVPerturbation p;
  p.dmu = TimeFunction(spec.d, 1);
  p.dsigma = TimeFunction(spec.d, spec.d);
  return p;
}

void check_shapes(const mv::MVSpec& spec, const MVPerturbation& pert) {
  check_fn(pert.dr, 1, 1, "dr");
  check_fn(pert.dmu, spec.d, 1, "dmu");
  check_fn(pert.dsigma, spec.d, spec.d, "dsigma");
}

mv::MVSpec perturbed(const mv::MVSpec& spec, const MVPerturbation& pert, double s) {
  check_shapes(spec, pert);
  mv::MVSpec out = spec;
  out.x = spec.x + s * pert.dx;
  out.A = spec.A + s * pert.dA;
  out.r = add(spec.r, s, pert.dr);
  out.mu = add(spec.mu, s, pert.dmu);
  out.sigma = add(spec.sigma, s, pert.dsigma);
  return out;
}

SensitivityReport dv_mv(const mv::MVSolution& sol, const MVPerturbation& pert) {
  check_shapes(sol.spec, pert);
  const TimeGrid& grid = sol.grid;
  const lq::LQModel& work = *sol.work;
  const lq::MomentPath mo = lq::integrate_moments(work.loop, work.spec.x0);
  const auto d = static_cast<std::size_t>(sol.spec.d);
  // Closed-form solutions hold mu and sigma at their left-stage values over
  // each step; directions in mu and sigma are sampled the same way.
  const bool frozen = sol.method == mv::MVMethod::kClosedForm;

  std::array<double, 5> v{};
  v[0] = initial_adjoint(sol) * pert.dx;
  v[2] = -sol.lambda_E * pert.dA;
  if (!pert.dr.is_zero() || !pert.dmu.is_zero() || !pert.dsigma.is_zero()) {
    std::vector<double> fr, fm, fs;
    fr.reserve(3 * grid.steps());
    fm.reserve(3 * grid.steps());
    fs.reserve(3 * grid.steps());
    for (std::size_t k = 0; k < grid.steps(); ++k) {
      for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
        const lq::StageExpectations e = lq::expectations(work.loop.at(k, s), mo.at(k, s));
        const mv::UnwindStage& uw = sol.unwind_at(k, s);
        const double a = uw.adj_scale;
        const double ap = a * uw.pi_scale;
        double r_term = 0.0, mu_term = 0.0, sigma_term = 0.0;
        if (!pert.dr.is_zero()) {
          const double pX = a * (uw.x_scale * e.xp(0, 0) + uw.x_shift * e.p(0));
          const double ppi = ap * e.up.sum();
          r_term = (pX - ppi) * pert.dr.at(grid, k, s)(0, 0);
        }
        const Stage ds_stage = frozen ? Stage::kLeft : s;
        if (!pert.dmu.is_zero()) {
          mu_term = ap * pert.dmu.at(grid, k, ds_stage).col(0).dot(e.up.col(0));
        }
        if (!pert.dsigma.is_zero()) {
          const Eigen::MatrixXd ds = pert.dsigma.at(grid, k, ds_stage);
          for (std::size_t j = 0; j < d; ++j) {
            sigma_term += ds.col(static_cast<Eigen::Index>(j)).dot(e.uq[j].col(0));
          }
          sigma_term *= ap;
        }
        fr.push_back(r_term);
        fm.push_back(mu_term);
        fs.push_back(sigma_term);
      }
    }
    auto integrate = [&](const std::vector<double>& f) {
      return lq::stage_quadrature(grid, [&](std::size_t k, Stage s) {
        return f[3 * k + static_cast<std::size_t>(s)];
      });
    };
    v[1] = integrate(fr);
    v[3] = integrate(fm);
    v[4] = integrate(fs);
  }
  std::vector<Contribution> parts;
  for (std::size_t i = 0; i < 5; ++i) parts.push_back({kMVBlocks[i], v[i], std::nullopt});
  return make_report(std::move(parts));
}

SensitivityReport dv_mv_mc(const mv::MVSolution& sol, const MVPerturbation& pert) {
  check_shapes(sol.spec, pert);
  require(sol.has_paths(), "dv_mv_mc: the solution has no stored paths");
  const TimeGrid& grid = sol.grid;
  const std::size_t K = grid.steps();
  const double dt = grid.dt();
  const std::size_t n = sol.X_bar.n_paths();

  std::vector<double> dr(K, 0.0);
  std::vector<Eigen::VectorXd> dmu(K);
  std::vector<Eigen::MatrixXd> dsig(K);
  for (std::size_t k = 0; k < K; ++k) {
    dr[k] = pert.dr.at(grid, k, Stage::kLeft)(0, 0);
    dmu[k] = pert.dmu.at(grid, k, Stage::kLeft).col(0);
    dsig[k] = pert.dsigma.at(grid, k, Stage::kLeft);
  }
  std::vector<std::array<double, 3>> per_path(n);
  for_each_path(Exec::kParallel, n, [&](std::size_t p) {
    std::array<double, 3> acc{};
    for (std::size_t k = 0; k < K; ++k) {
      const double pk = sol.p_bar(p, k);
      const auto pi = sol.pi_bar.at(p, k).col(0);
      const auto q = sol.q_bar.at(p, k).row(0);
      acc[0] += pk * (sol.X_bar(p, k) - pi.sum()) * dr[k];
      acc[1] += pk * pi.dot(dmu[k]);
      acc[2] += pi.dot(dsig[k] * q.transpose());
    }
    for (double& a : acc) a *= dt;
    per_path[p] = acc;
  });

  std::vector<double> samples(n), total(n, 0.0);
  Estimate est[3];
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t p = 0; p < n; ++p) {
      samples[p] = per_path[p][b];
      total[p] += samples[p];
    }
    est[b] = estimate_mean(samples);
  }
  std::vector<Contribution> parts;
  parts.push_back({kMVBlocks[0], sol.p_bar(0, 0) * pert.dx, 0.0});
  parts.push_back({kMVBlocks[1], est[0].mean, est[0].std_error});
  parts.push_back({kMVBlocks[2], -sol.lambda_E * pert.dA, 0.0});
  parts.push_back({kMVBlocks[3], est[1].mean, est[1].std_error});
  parts.push_back({kMVBlocks[4], est[2].mean, est[2].std_error});
  SensitivityReport rep = make_report(std::move(parts));
  rep.mc_stderr = estimate_mean(total).std_error;
  return rep;
}

RayValue mv_value_ray(const mv::MVSpec& spec, const MVPerturbation& pert, const TimeGrid& grid,
                      MVValueMethod method, const mv::DualOptions& dual) {
  check_shapes(spec, pert);
  if (method == MVValueMethod::kClosedForm) {
    return [spec, pert, grid](double s) {
      return mv::closed_form_value(perturbed(spec, pert, s), grid);
    };
  }
  mv::DualOptions opts = dual;
  opts.store_paths = false;
  return [spec, pert, grid, opts](double s) {
    return mv::solve_dual(perturbed(spec, pert, s), grid, BrownianEnsemble{}, opts).value;
  };
}

double ray_scale(const MVPerturbation& pert, const TimeGrid& grid) {
  double scale = std::max(std::abs(pert.dx), std::abs(pert.dA));
  auto visit = [&](const TimeFunction& f) {
    if (f.is_zero()) return;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
      scale = std::max(scale, f.at(grid, k, Stage::kLeft).cwiseAbs().maxCoeff());
    }
  };
  visit(pert.dr);
  visit(pert.dmu);
  visit(pert.dsigma);
  return scale;
}

}  // namespace stocsens::sens
