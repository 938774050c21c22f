#include "stocsens/lq/solve.hpp"

#include <algorithm>

#include "stocsens/core/error.hpp"
#include "stocsens/stochastic/paths.hpp"

namespace stocsens::lq {

std::shared_ptr<const LQModel> build_lq_model(const LQSpec& spec, const TimeGrid& grid,
                                              const RiccatiOptions& opts) {
  RiccatiSolution ric = riccati_integrate(spec, grid, opts);
  CoefficientTable coef(spec, grid);
  ClosedLoop loop = make_closed_loop(coef, grid, spec.n, spec.m, spec.d,
                                     [&](std::size_t k, Stage s) {
                                       StageFeedback fb;
                                       fb.P = ric.P_at(k, s);
                                       fb.phi = ric.phi_at(k, s);
                                       FeedbackGains gains = feedback_gains(coef.at(k, s), fb.P, fb.phi);
                                       fb.G = std::move(gains.G);
                                       fb.g = std::move(gains.g);
                                       return fb;
                                     });
  const double value = ric.value(spec.x0);
  return std::make_shared<const LQModel>(LQModel{spec, grid, std::move(coef), std::move(ric),
                                                 std::move(loop), value});
}

namespace {

void check_ensemble(const LQModel& model, const BrownianEnsemble& w) {
  require(w.grid() == model.grid, "ensemble grid does not match the problem grid");
  require(w.dim() == static_cast<std::size_t>(model.spec.d),
          "ensemble dimension does not match the number of Brownian components d");
}

}  // namespace

LQSolution simulate(std::shared_ptr<const LQModel> model, const BrownianEnsemble& w, Exec exec) {
  check_ensemble(*model, w);
  const std::size_t n_paths = w.n_paths();
  const std::size_t K = model->grid.steps();
  const LQSpec& spec = model->spec;
  LQSolution sol;
  sol.x_bar = PathField(n_paths, K + 1, spec.n);
  sol.p_bar = PathField(n_paths, K + 1, spec.n);
  sol.u_bar = PathField(n_paths, K, spec.m);
  sol.q_bar = PathField(n_paths, K, spec.n, spec.d);
  map_paths(w, exec, [&](std::size_t p, std::span<const double> dW) {
    walk_path(model->loop, spec.x0, dW, [&](const PathPoint& pt) {
      sol.x_bar.at(p, pt.k) = pt.x;
      sol.p_bar.at(p, pt.k) = pt.p;
      if (pt.k < K) {
        sol.u_bar.at(p, pt.k) = pt.u;
        sol.q_bar.at(p, pt.k) = pt.q;
      }
    });
    return 0.0;
  });
  if (!sol.x_bar.all_finite() || !sol.u_bar.all_finite()) {
    fail(ErrorKind::kIntegrationFailure, "closed-loop simulation produced non-finite values");
  }
  sol.value = model->value;
  sol.model = std::move(model);
  return sol;
}

LQSolution solve_lq(const LQSpec& spec, const TimeGrid& grid, const BrownianEnsemble& w,
                    const RiccatiOptions& opts, Exec exec) {
  return simulate(build_lq_model(spec, grid, opts), w, exec);
}

Estimate value_duality_residual(const LQSpec& spec, const LQSolution& sol,
                                const BrownianEnsemble& w) {
  const LQModel& model = *sol.model;
  check_ensemble(model, w);
  require(sol.x_bar.n_paths() == w.n_paths(), "solution and ensemble differ in path count");
  const std::size_t K = model.grid.steps();
  const double dt = model.grid.dt();
  const CoefficientTable& coef = model.coef;
  std::vector<double> r(w.n_paths());
  for (std::size_t p = 0; p < w.n_paths(); ++p) {
    const Eigen::VectorXd xT = sol.x_bar.at(p, K);
    double acc = xT.dot(spec.M * xT) - sol.p_bar.at(p, 0).col(0).dot(spec.x0);
    for (std::size_t k = 0; k < K; ++k) {
      const StageCoefficients& c = coef.at(k, Stage::kLeft);
      const auto x = sol.x_bar.at(p, k).col(0);
      const auto u = sol.u_bar.at(p, k).col(0);
      const auto pk = sol.p_bar.at(p, k).col(0);
      const auto q = sol.q_bar.at(p, k);
      double integrand = x.dot(c.Q * x) + u.dot(c.N * u) - pk.dot(c.e);
      for (std::size_t j = 0; j < c.f.size(); ++j) {
        integrand -= q.col(static_cast<Eigen::Index>(j)).dot(c.f[j]);
      }
      acc += dt * integrand;
    }
    r[p] = acc;
  }
  return estimate_mean(r);
}

Estimate duality_residual(const LQModel& model, const BrownianEnsemble& w, Exec exec) {
  check_ensemble(model, w);
  const std::size_t K = model.grid.steps();
  const double dt = model.grid.dt();
  const auto r = map_paths(w, exec, [&](std::size_t, std::span<const double> dW) {
    double acc = 0.0;
    walk_path(model.loop, model.spec.x0, dW, [&](const PathPoint& pt) {
      if (pt.k == 0) acc -= pt.p.dot(model.spec.x0);
      if (pt.k == K) {
        acc += pt.x.dot(model.spec.M * pt.x);
        return;
      }
      const StageCoefficients& c = model.coef.at(pt.k, Stage::kLeft);
      double integrand = pt.x.dot(c.Q * pt.x) + pt.u.dot(c.N * pt.u) - pt.p.dot(c.e);
      for (std::size_t j = 0; j < c.f.size(); ++j) {
        integrand -= pt.q.col(static_cast<Eigen::Index>(j)).dot(c.f[j]);
      }
      acc += dt * integrand;
    });
    return acc;
  });
  return estimate_mean(r);
}

double expected_duality_residual(const LQModel& model) {
  const std::size_t K = model.grid.steps();
  const double dt = model.grid.dt();
  const Eigen::VectorXd& x0 = model.spec.x0;
  MomentStage y{x0, x0 * x0.transpose()};
  const ClosedLoopStage& first = model.loop.node(0);
  double acc = -(first.fb.P * x0 + first.fb.phi).dot(x0);
  for (std::size_t k = 0; k < K; ++k) {
    const ClosedLoopStage& st = model.loop.at(k, Stage::kLeft);
    const StageCoefficients& c = model.coef.at(k, Stage::kLeft);
    const StageExpectations e = expectations(st, y);
    double integrand = (c.Q * e.xx).trace() + (c.N * e.uu).trace() - e.p.dot(c.e);
    for (std::size_t j = 0; j < c.f.size(); ++j) integrand -= e.q[j].dot(c.f[j]);
    acc += dt * integrand;

    // Euler moments: x' = F x + dt ebar + sum_j (Cbar_j x + fbar_j) dW_j.
    const Eigen::MatrixXd F =
        Eigen::MatrixXd::Identity(st.Abar.rows(), st.Abar.cols()) + dt * st.Abar;
    MomentStage next;
    next.m = F * y.m + dt * st.ebar;
    const Eigen::VectorXd Fm = F * y.m;
    next.S = F * y.S * F.transpose() + dt * (Fm * st.ebar.transpose()) +
             dt * (st.ebar * Fm.transpose()) + dt * dt * (st.ebar * st.ebar.transpose());
    for (std::size_t j = 0; j < st.Cbar.size(); ++j) {
      const Eigen::MatrixXd Cmf = (st.Cbar[j] * y.m) * st.fbar[j].transpose();
      next.S += dt * (st.Cbar[j] * y.S * st.Cbar[j].transpose() + Cmf + Cmf.transpose() +
                      st.fbar[j] * st.fbar[j].transpose());
    }
    y = std::move(next);
  }
  acc += (model.spec.M * y.S).trace();
  return acc;
}

double policy_cost(const LQModel& model, const ClosedLoop& loop) {
  const MomentPath mo = integrate_moments(loop, model.spec.x0);
  const double running = stage_quadrature(model.grid, [&](std::size_t k, Stage s) {
    const StageExpectations e = expectations(loop.at(k, s), mo.at(k, s));
    const StageCoefficients& c = model.coef.at(k, s);
    return (c.Q * e.xx).trace() + (c.N * e.uu).trace();
  });
  return 0.5 * ((model.spec.M * mo.nodes.back().S).trace() + running);
}

Estimate policy_cost_mc(const LQModel& model, const ClosedLoop& loop, const BrownianEnsemble& w,
                        Exec exec) {
  check_ensemble(model, w);
  const std::size_t K = model.grid.steps();
  const double dt = model.grid.dt();
  const auto cost = map_paths(w, exec, [&](std::size_t, std::span<const double> dW) {
    double acc = 0.0;
    walk_path(loop, model.spec.x0, dW, [&](const PathPoint& pt) {
      if (pt.k == K) {
        acc += pt.x.dot(model.spec.M * pt.x);
        return;
      }
      const StageCoefficients& c = model.coef.at(pt.k, Stage::kLeft);
      acc += dt * (pt.x.dot(c.Q * pt.x) + pt.u.dot(c.N * pt.u));
    });
    return 0.5 * acc;
  });
  return estimate_mean(cost);
}

ClosedLoop perturb_control(const LQModel& model, const TimeFunction& v, double eps) {
  require(v.rows() == model.spec.m && v.cols() == 1, "control perturbation must be m x 1");
  return make_closed_loop(model.coef, model.grid, model.spec.n, model.spec.m, model.spec.d,
                          [&](std::size_t k, Stage s) {
                            StageFeedback fb = model.loop.at(k, s).fb;
                            fb.g -= eps * v.at(model.grid, k, s);
                            return fb;
                          });
}

double consistency_violation(const LQSolution& sol) {
  const LQModel& model = *sol.model;
  const std::size_t K = model.grid.steps();
  double worst = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    const Eigen::MatrixXd& P = model.riccati.P[k];
    const Eigen::VectorXd& phi = model.riccati.phi[k];
    const StageCoefficients* c = k < K ? &model.coef.at(k, Stage::kLeft) : nullptr;
    FeedbackGains gains;
    if (c) gains = feedback_gains(*c, P, phi);
    for (std::size_t p = 0; p < sol.x_bar.n_paths(); ++p) {
      const Eigen::VectorXd x = sol.x_bar.at(p, k);
      worst = std::max(worst, (sol.p_bar.at(p, k).col(0) - (P * x + phi)).cwiseAbs().maxCoeff());
      if (!c) continue;
      const Eigen::VectorXd u = sol.u_bar.at(p, k);
      worst = std::max(worst, (u + gains.G * x + gains.g).cwiseAbs().maxCoeff());
      for (std::size_t j = 0; j < c->C.size(); ++j) {
        const Eigen::VectorXd q = P * (c->C[j] * x + c->D[j] * u + c->f[j]);
        worst = std::max(
            worst,
            (sol.q_bar.at(p, k).col(static_cast<Eigen::Index>(j)) - q).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

}  // namespace stocsens::lq
