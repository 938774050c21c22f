#include "stocsens/lq/picard.hpp"

#include <cmath>
#include <string>

#include "stocsens/core/error.hpp"
#include "stocsens/stochastic/paths.hpp"

namespace stocsens::lq {

namespace {

struct Gains {
  std::vector<Eigen::MatrixXd> G;  // nodes 0..K
  std::vector<Eigen::VectorXd> g;
};

struct Adjoint {
  Eigen::MatrixXd Pi;
  Eigen::VectorXd pi;
};

Eigen::MatrixXd gain_at(const std::vector<Eigen::MatrixXd>& v, std::size_t k, Stage s) {
  switch (s) {
    case Stage::kLeft: return v[k];
    case Stage::kRight: return v[k + 1];
    default: return 0.5 * (v[k] + v[k + 1]);
  }
}

Eigen::VectorXd gain_at(const std::vector<Eigen::VectorXd>& v, std::size_t k, Stage s) {
  switch (s) {
    case Stage::kLeft: return v[k];
    case Stage::kRight: return v[k + 1];
    default: return 0.5 * (v[k] + v[k + 1]);
  }
}

// Backward-time derivative of (Pi, pi) under the feedback (G, g).
Adjoint adjoint_rhs(const StageCoefficients& c, const Eigen::MatrixXd& G,
                    const Eigen::VectorXd& g, const Adjoint& y) {
  const Eigen::MatrixXd Abar = c.A - c.B * G;
  const Eigen::VectorXd ebar = c.e - c.B * g;
  Adjoint out;
  out.Pi = y.Pi * Abar + c.A.transpose() * y.Pi + c.Q;
  out.pi = c.A.transpose() * y.pi + y.Pi * ebar;
  for (std::size_t j = 0; j < c.C.size(); ++j) {
    const Eigen::MatrixXd CtPi = c.C[j].transpose() * y.Pi;
    out.Pi += CtPi * (c.C[j] - c.D[j] * G);
    out.pi += CtPi * (c.f[j] - c.D[j] * g);
  }
  return out;
}

Adjoint advance(const Adjoint& y, double h, const Adjoint& k) {
  return {y.Pi + h * k.Pi, y.pi + h * k.pi};
}

struct Evaluation {
  std::vector<Adjoint> nodes;  // 0..K
  std::vector<Adjoint> mids;   // 0..K-1
};

Evaluation evaluate_policy(const LQSpec& spec, const TimeGrid& grid, const CoefficientTable& coef,
                           const Gains& gains) {
  const std::size_t K = grid.steps();
  const double h = grid.dt();
  Evaluation ev;
  ev.nodes.resize(K + 1);
  ev.mids.resize(K);
  Adjoint y{spec.M, Eigen::VectorXd::Zero(spec.n)};
  ev.nodes[K] = y;
  for (std::size_t k = K; k-- > 0;) {
    auto rhs = [&](Stage s, const Adjoint& a) {
      return adjoint_rhs(coef.at(k, s), gain_at(gains.G, k, s), gain_at(gains.g, k, s), a);
    };
    const Adjoint k1 = rhs(Stage::kRight, y);
    const Adjoint k2 = rhs(Stage::kMid, advance(y, 0.5 * h, k1));
    const Adjoint k3 = rhs(Stage::kMid, advance(y, 0.5 * h, k2));
    const Adjoint k4 = rhs(Stage::kLeft, advance(y, h, k3));
    Adjoint next{y.Pi + (h / 6.0) * (k1.Pi + 2.0 * k2.Pi + 2.0 * k3.Pi + k4.Pi),
                 y.pi + (h / 6.0) * (k1.pi + 2.0 * k2.pi + 2.0 * k3.pi + k4.pi)};
    if (!next.Pi.allFinite() || !next.pi.allFinite()) {
      fail(ErrorKind::kIntegrationFailure, "picard: adjoint ODE produced non-finite values");
    }
    const Adjoint left_rate = rhs(Stage::kLeft, next);
    ev.mids[k] = {0.5 * (next.Pi + y.Pi) + (h / 8.0) * (k1.Pi - left_rate.Pi),
                  0.5 * (next.pi + y.pi) + (h / 8.0) * (k1.pi - left_rate.pi)};
    y = std::move(next);
    ev.nodes[k] = y;
  }
  return ev;
}

Gains improve(const TimeGrid& grid, const CoefficientTable& coef,
              const Gains& gains, const Evaluation& ev) {
  const std::size_t K = grid.steps();
  Gains out;
  out.G.resize(K + 1);
  out.g.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    const StageCoefficients& c = k < K ? coef.at(k, Stage::kLeft) : coef.at(K - 1, Stage::kRight);
    const Eigen::MatrixXd& Pi = ev.nodes[k].Pi;
    Eigen::MatrixXd L = c.B.transpose() * Pi;
    Eigen::VectorXd h = c.B.transpose() * ev.nodes[k].pi;
    for (std::size_t j = 0; j < c.C.size(); ++j) {
      const Eigen::MatrixXd DtPi = c.D[j].transpose() * Pi;
      L += DtPi * (c.C[j] - c.D[j] * gains.G[k]);
      h += DtPi * (c.f[j] - c.D[j] * gains.g[k]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c.N);
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::kSingularRiccati, "picard: control weight N is not positive definite");
    }
    out.G[k] = llt.solve(L);
    out.g[k] = llt.solve(h);
  }
  return out;
}

ClosedLoop loop_of(const LQSpec& spec, const TimeGrid& grid, const CoefficientTable& coef,
                   const Gains& gains, const Evaluation* ev) {
  return make_closed_loop(coef, grid, spec.n, spec.m, spec.d, [&](std::size_t k, Stage s) {
    StageFeedback fb;
    fb.G = gain_at(gains.G, k, s);
    fb.g = gain_at(gains.g, k, s);
    if (ev) {
      const Adjoint& a =
          s == Stage::kMid ? ev->mids[k] : ev->nodes[s == Stage::kLeft ? k : k + 1];
      fb.P = a.Pi;
      fb.phi = a.pi;
    } else {
      fb.P = Eigen::MatrixXd::Zero(spec.n, spec.n);
      fb.phi = Eigen::VectorXd::Zero(spec.n);
    }
    return fb;
  });
}

}  // namespace

double control_distance(const ClosedLoop& a, const ClosedLoop& b, const Eigen::VectorXd& x0,
                        const BrownianEnsemble& w, Exec exec) {
  require(a.grid() == b.grid() && a.m() == b.m(), "control_distance: loops are not comparable");
  const std::size_t K = a.grid().steps();
  const double dt = a.grid().dt();
  const auto sq = map_paths(w, exec, [&](std::size_t, std::span<const double> dW) {
    Eigen::MatrixXd ua(a.m(), static_cast<Eigen::Index>(K));
    walk_path(a, x0, dW, [&](const PathPoint& pt) {
      if (pt.k < K) ua.col(static_cast<Eigen::Index>(pt.k)) = pt.u;
    });
    double acc = 0.0;
    walk_path(b, x0, dW, [&](const PathPoint& pt) {
      if (pt.k < K) acc += dt * (pt.u - ua.col(static_cast<Eigen::Index>(pt.k))).squaredNorm();
    });
    return acc;
  });
  return std::sqrt(estimate_mean(sq).mean);
}

PicardResult fbsde_picard_oracle(const LQSpec& spec, const TimeGrid& grid,
                                 const BrownianEnsemble& w, const PicardOptions& opts) {
  validate(spec, grid);
  require(opts.theta > 0.0 && opts.theta <= 1.0, "picard: damping must lie in (0, 1]");
  require(opts.max_iters >= 1, "picard: max_iters must be positive");
  require(w.grid() == grid && w.dim() == static_cast<std::size_t>(spec.d),
          "picard: ensemble does not match the problem");
  const std::size_t K = grid.steps();
  CoefficientTable coef(spec, grid);

  Gains gains;
  gains.G.assign(K + 1, Eigen::MatrixXd::Zero(spec.m, spec.n));
  gains.g.assign(K + 1, Eigen::VectorXd::Zero(spec.m));

  PicardResult res;
  bool converged = false;
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const Evaluation ev = evaluate_policy(spec, grid, coef, gains);
    const Gains target = improve(grid, coef, gains, ev);
    Gains next = gains;
    for (std::size_t k = 0; k <= K; ++k) {
      next.G[k] = (1.0 - opts.theta) * gains.G[k] + opts.theta * target.G[k];
      next.g[k] = (1.0 - opts.theta) * gains.g[k] + opts.theta * target.g[k];
    }
    res.last_change = control_distance(loop_of(spec, grid, coef, gains, nullptr),
                                       loop_of(spec, grid, coef, next, nullptr), spec.x0, w,
                                       opts.exec);
    gains = std::move(next);
    res.iterations = it;
    if (!std::isfinite(res.last_change)) break;
    if (res.last_change < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    fail(ErrorKind::kConvergenceFailure,
         "picard: no convergence after " + std::to_string(res.iterations) +
             " iterations, last control change " + std::to_string(res.last_change));
  }

  const Evaluation ev = evaluate_policy(spec, grid, coef, gains);
  ClosedLoop loop = loop_of(spec, grid, coef, gains, &ev);
  RiccatiSolution adj;
  adj.grid = grid;
  for (const Adjoint& a : ev.nodes) {
    adj.P.push_back(a.Pi);
    adj.phi.push_back(a.pi);
    adj.c.push_back(0.0);
  }
  for (const Adjoint& a : ev.mids) {
    adj.P_mid.push_back(a.Pi);
    adj.phi_mid.push_back(a.pi);
  }
  auto model = std::make_shared<LQModel>(
      LQModel{spec, grid, std::move(coef), std::move(adj), std::move(loop), 0.0});
  model->value = policy_cost(*model, model->loop);
  res.solution = simulate(std::move(model), w, opts.exec);
  return res;
}

}  // namespace stocsens::lq
