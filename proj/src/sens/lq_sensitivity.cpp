#include "stocsens/sens/lq_sensitivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens::sens {

namespace {

void check_fn(const TimeFunction& f, Eigen::Index rows, Eigen::Index cols,
              const std::string& name) {
  if (f.rows() != rows || f.cols() != cols) {
    fail(ErrorKind::kInvalidArgument,
         "perturbation " + name + ": expected " + std::to_string(rows) + "x" +
             std::to_string(cols) + ", got " + std::to_string(f.rows()) + "x" +
             std::to_string(f.cols()));
  }
}

TimeFunction add(const TimeFunction& base, double s, const TimeFunction& dir) {
  if (dir.is_zero() || s == 0.0) return base;
  return TimeFunction::combine(base, s, dir);
}

TimeFunction lin(double alpha, const TimeFunction& a, double beta, const TimeFunction& b) {
  const TimeFunction zero(a.rows(), a.cols());
  const TimeFunction left = alpha == 0.0 || a.is_zero() ? zero : TimeFunction::combine(zero, alpha, a);
  return add(left, beta, b);
}

// sum_ij a_ij b_ji
double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

// Left-stage values of a direction on every step (empty when zero).
std::vector<Eigen::MatrixXd> left_samples(const TimeFunction& f, const TimeGrid& grid) {
  std::vector<Eigen::MatrixXd> out;
  if (f.is_zero()) return out;
  out.reserve(grid.steps());
  for (std::size_t k = 0; k < grid.steps(); ++k) out.push_back(f.at(grid, k, Stage::kLeft));
  return out;
}

}  // namespace

LQPerturbation LQPerturbation::zeros(const lq::LQSpec& spec) {
  LQPerturbation p;
  const auto d = static_cast<std::size_t>(spec.d);
  p.dx0 = Eigen::VectorXd::Zero(spec.n);
  p.dA = TimeFunction(spec.n, spec.n);
  p.dB = TimeFunction(spec.n, spec.m);
  p.de = TimeFunction(spec.n, 1);
  p.dC.assign(d, TimeFunction(spec.n, spec.n));
  p.dD.assign(d, TimeFunction(spec.n, spec.m));
  p.df.assign(d, TimeFunction(spec.n, 1));
  return p;
}

void check_shapes(const lq::LQSpec& spec, const LQPerturbation& pert) {
  const auto d = static_cast<std::size_t>(spec.d);
  require(pert.dx0.size() == spec.n, "perturbation dx0: expected length " + std::to_string(spec.n));
  check_fn(pert.dA, spec.n, spec.n, "dA");
  check_fn(pert.dB, spec.n, spec.m, "dB");
  check_fn(pert.de, spec.n, 1, "de");
  require(pert.dC.size() == d && pert.dD.size() == d && pert.df.size() == d,
          "perturbation: dC, dD and df need one entry per Brownian component");
  for (std::size_t j = 0; j < d; ++j) {
    check_fn(pert.dC[j], spec.n, spec.n, "dC[" + std::to_string(j) + "]");
    check_fn(pert.dD[j], spec.n, spec.m, "dD[" + std::to_string(j) + "]");
    check_fn(pert.df[j], spec.n, 1, "df[" + std::to_string(j) + "]");
  }
}

LQPerturbation combine(double alpha, const LQPerturbation& a, double beta,
                       const LQPerturbation& b) {
  require(a.dx0.size() == b.dx0.size() && a.dC.size() == b.dC.size(),
          "combine: perturbations have different shapes");
  LQPerturbation out;
  out.dx0 = alpha * a.dx0 + beta * b.dx0;
  out.dA = lin(alpha, a.dA, beta, b.dA);
  out.dB = lin(alpha, a.dB, beta, b.dB);
  out.de = lin(alpha, a.de, beta, b.de);
  for (std::size_t j = 0; j < a.dC.size(); ++j) {
    out.dC.push_back(lin(alpha, a.dC[j], beta, b.dC[j]));
    out.dD.push_back(lin(alpha, a.dD[j], beta, b.dD[j]));
    out.df.push_back(lin(alpha, a.df[j], beta, b.df[j]));
  }
  return out;
}

lq::LQSpec perturbed(const lq::LQSpec& spec, const LQPerturbation& pert, double s) {
  check_shapes(spec, pert);
  lq::LQSpec out = spec;
  out.x0 = spec.x0 + s * pert.dx0;
  out.A = add(spec.A, s, pert.dA);
  out.B = add(spec.B, s, pert.dB);
  out.e = add(spec.e, s, pert.de);
  for (std::size_t j = 0; j < spec.C.size(); ++j) {
    out.C[j] = add(spec.C[j], s, pert.dC[j]);
    out.D[j] = add(spec.D[j], s, pert.dD[j]);
    out.f[j] = add(spec.f[j], s, pert.df[j]);
  }
  return out;
}

SensitivityReport dv_lq(const lq::LQModel& model, const LQPerturbation& pert) {
  const lq::LQSpec& spec = model.spec;
  check_shapes(spec, pert);
  const TimeGrid& grid = model.grid;
  const std::size_t K = grid.steps();
  const std::size_t d = spec.C.size();
  const lq::MomentPath mo = lq::integrate_moments(model.loop, spec.x0);
  std::vector<lq::StageExpectations> ex;
  ex.reserve(3 * K);
  for (std::size_t k = 0; k < K; ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      ex.push_back(lq::expectations(model.loop.at(k, s), mo.at(k, s)));
    }
  }
  auto E = [&](std::size_t k, Stage s) -> const lq::StageExpectations& {
    return ex[3 * k + static_cast<std::size_t>(s)];
  };
  auto block = [&](const TimeFunction& f, auto&& term) {
    if (f.is_zero()) return 0.0;
    return lq::stage_quadrature(grid, [&](std::size_t k, Stage s) {
      return term(f.at(grid, k, s), E(k, s));
    });
  };
  auto summed = [&](const std::vector<TimeFunction>& fs, auto&& term) {
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      total += block(fs[j], [&](const Eigen::MatrixXd& v, const lq::StageExpectations& e) {
        return term(v, e, j);
      });
    }
    return total;
  };

  const Eigen::VectorXd p0 = model.riccati.P.front() * spec.x0 + model.riccati.phi.front();
  using Ex = lq::StageExpectations;
  using M = Eigen::MatrixXd;
  std::vector<Contribution> parts(7);
  for (std::size_t i = 0; i < 7; ++i) parts[i].label = kLQBlocks[i];
  parts[0].value = p0.dot(pert.dx0);
  parts[1].value = block(pert.dA, [](const M& v, const Ex& e) { return trace_product(v, e.xp); });
  parts[2].value = block(pert.dB, [](const M& v, const Ex& e) { return trace_product(v, e.up); });
  parts[3].value = summed(pert.dC, [](const M& v, const Ex& e, std::size_t j) {
    return trace_product(v, e.xq[j]);
  });
  parts[4].value = summed(pert.dD, [](const M& v, const Ex& e, std::size_t j) {
    return trace_product(v, e.uq[j]);
  });
  parts[5].value = block(pert.de, [](const M& v, const Ex& e) { return e.p.dot(v.col(0)); });
  parts[6].value = summed(pert.df, [](const M& v, const Ex& e, std::size_t j) {
    return e.q[j].dot(v.col(0));
  });
  return make_report(std::move(parts));
}

SensitivityReport dv_lq(const lq::LQSolution& sol, const LQPerturbation& pert) {
  const lq::LQModel& model = *sol.model;
  const lq::LQSpec& spec = model.spec;
  check_shapes(spec, pert);
  require(sol.x_bar.n_paths() > 0, "dv_lq: the solution has no stored paths");
  const TimeGrid& grid = model.grid;
  const std::size_t K = grid.steps();
  const std::size_t d = spec.C.size();
  const double dt = grid.dt();
  const std::size_t n = sol.x_bar.n_paths();

  const auto dA = left_samples(pert.dA, grid);
  const auto dB = left_samples(pert.dB, grid);
  const auto de = left_samples(pert.de, grid);
  std::vector<std::vector<Eigen::MatrixXd>> dC(d), dD(d), df(d);
  for (std::size_t j = 0; j < d; ++j) {
    dC[j] = left_samples(pert.dC[j], grid);
    dD[j] = left_samples(pert.dD[j], grid);
    df[j] = left_samples(pert.df[j], grid);
  }

  // Per-path integrals of the six running blocks, then the total.
  std::vector<std::array<double, 7>> per_path(n);
  for_each_path(Exec::kParallel, n, [&](std::size_t p) {
    std::array<double, 7> acc{};
    for (std::size_t k = 0; k < K; ++k) {
      const auto x = sol.x_bar.at(p, k);
      const auto u = sol.u_bar.at(p, k);
      const auto pp = sol.p_bar.at(p, k);
      const auto q = sol.q_bar.at(p, k);
      if (!dA.empty()) acc[1] += pp.col(0).dot(dA[k] * x.col(0));
      if (!dB.empty()) acc[2] += pp.col(0).dot(dB[k] * u.col(0));
      if (!de.empty()) acc[5] += pp.col(0).dot(de[k].col(0));
      for (std::size_t j = 0; j < d; ++j) {
        const auto qj = q.col(static_cast<Eigen::Index>(j));
        if (!dC[j].empty()) acc[3] += qj.dot(dC[j][k] * x.col(0));
        if (!dD[j].empty()) acc[4] += qj.dot(dD[j][k] * u.col(0));
        if (!df[j].empty()) acc[6] += qj.dot(df[j][k].col(0));
      }
    }
    for (std::size_t b = 1; b < 7; ++b) acc[b] *= dt;
    per_path[p] = acc;
  });

  Eigen::VectorXd p0 = sol.p_bar.at(0, 0).col(0);
  std::vector<Contribution> parts(7);
  std::vector<double> samples(n), total(n, 0.0);
  parts[0].label = kLQBlocks[0];
  parts[0].value = p0.dot(pert.dx0);
  parts[0].std_error = 0.0;
  for (std::size_t b = 1; b < 7; ++b) {
    for (std::size_t p = 0; p < n; ++p) {
      samples[p] = per_path[p][b];
      total[p] += samples[p];
    }
    const Estimate est = estimate_mean(samples);
    parts[b].label = kLQBlocks[b];
    parts[b].value = est.mean;
    parts[b].std_error = est.std_error;
  }
  SensitivityReport rep = make_report(std::move(parts));
  rep.mc_stderr = estimate_mean(total).std_error;
  return rep;
}

LQPerturbation additive_perturbation(const lq::LQSpec& spec, const Eigen::VectorXd& dx0,
                                     const TimeFunction& df_add,
                                     const TimeFunction& dsigma_add) {
  check_fn(df_add, spec.n, 1, "drift");
  check_fn(dsigma_add, spec.n, spec.d, "diffusion");
  LQPerturbation p = LQPerturbation::zeros(spec);
  require(dx0.size() == spec.n, "perturbation dx0: expected length " + std::to_string(spec.n));
  p.dx0 = dx0;
  p.de = df_add;
  if (!dsigma_add.is_zero()) {
    for (Eigen::Index j = 0; j < spec.d; ++j) {
      p.df[static_cast<std::size_t>(j)] = TimeFunction::map(
          spec.n, 1, {dsigma_add},
          [j](const std::vector<Eigen::MatrixXd>& v) { return Eigen::MatrixXd(v[0].col(j)); });
    }
  }
  return p;
}

SensitivityReport dv_additive(const lq::LQModel& model, const Eigen::VectorXd& dx0,
                              const TimeFunction& df_add, const TimeFunction& dsigma_add) {
  const SensitivityReport full =
      dv_lq(model, additive_perturbation(model.spec, dx0, df_add, dsigma_add));
  std::vector<Contribution> parts(3);
  parts[0] = {"dx0", full.find("dx0")->value, std::nullopt};
  parts[1] = {"drift", full.find("de")->value, std::nullopt};
  parts[2] = {"diffusion", full.find("df")->value, std::nullopt};
  return make_report(std::move(parts));
}

RayValue lq_value_ray(const lq::LQSpec& spec, const LQPerturbation& pert, const TimeGrid& grid,
                      const lq::RiccatiOptions& opts) {
  check_shapes(spec, pert);
  return [spec, pert, grid, opts](double s) {
    const lq::LQSpec ps = perturbed(spec, pert, s);
    return lq::riccati_integrate(ps, grid, opts).value(ps.x0);
  };
}

double ray_scale(const LQPerturbation& pert, const TimeGrid& grid) {
  double scale = pert.dx0.size() > 0 ? pert.dx0.cwiseAbs().maxCoeff() : 0.0;
  auto visit = [&](const TimeFunction& f) {
    if (f.is_zero()) return;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
      const Eigen::MatrixXd v = f.at(grid, k, Stage::kLeft);
      if (v.size() > 0) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    }
  };
  visit(pert.dA);
  visit(pert.dB);
  visit(pert.de);
  for (std::size_t j = 0; j < pert.dC.size(); ++j) {
    visit(pert.dC[j]);
    visit(pert.dD[j]);
    visit(pert.df[j]);
  }
  return scale;
}

}  // namespace stocsens::sens
