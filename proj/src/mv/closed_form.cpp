#include "stocsens/mv/closed_form.hpp"

#include <cmath>
#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens::mv {

MVClosedForm closed_form_data(const MVSpec& spec, const TimeGrid& grid) {
  if (spec.d != 1) {
    fail(ErrorKind::kUnsupported, "closed form: only a single risky asset (d = 1) is supported");
  }
  const std::size_t K = grid.steps();
  const double dt = grid.dt();
  const TimeFunction excess = excess_drift(spec);
  MVClosedForm cf;
  cf.Sigma.resize(K);
  cf.S_nodes.assign(K + 1, 0.0);
  double drift_integral = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      const double sg = spec.sigma.at(grid, k, s)(0, 0);
      if (!(sg > 0.0) || !(sg * sg >= spec.delta)) {
        fail(ErrorKind::kEllipticity,
             "closed form: sigma must be uniformly positive, got " + format_number(sg) +
                 " in step " + std::to_string(k));
      }
    }
    const double m = excess.at(grid, k, Stage::kLeft)(0, 0);
    cf.Sigma[k] = m / spec.sigma.at(grid, k, Stage::kLeft)(0, 0);
    cf.S_nodes[k + 1] = cf.S_nodes[k] + cf.Sigma[k] * cf.Sigma[k] * dt;
    drift_integral += m * dt;
  }
  cf.integrated_Sigma2 = cf.S_nodes[K];
  if (drift_integral == 0.0 || !(cf.integrated_Sigma2 > 0.0)) {
    fail(ErrorKind::kQualification, "closed form: int (mu - r) dt must be nonzero");
  }
  return cf;
}

double closed_form_value(const MVSpec& spec, const TimeGrid& grid) {
  const Reduction red = reduce(spec, grid);
  const MVClosedForm cf = closed_form_data(red.reduced, grid);
  const double x = red.reduced.x;
  return red.scale * x * x / std::expm1(cf.integrated_Sigma2);
}

MVSolution solve_closed_form(const MVSpec& spec, const TimeGrid& grid, const BrownianEnsemble& w,
                             const SolveOptions& opts) {
  const Reduction red = reduce(spec, grid);
  const MVClosedForm cf = closed_form_data(red.reduced, grid);
  const std::size_t K = grid.steps();
  const double dt = grid.dt();
  const double S = cf.integrated_Sigma2;
  const double x = red.reduced.x;
  const double lambda = 2.0 * x / std::expm1(S);

  // Working problem with the left-stage coefficients held over each step,
  // matching the left-point sums in the explicit formulas.
  MVSpec frozen = red.reduced;
  std::vector<Eigen::MatrixXd> mu_s(K), sigma_s(K);
  std::vector<double> sigma_left(K);
  for (std::size_t k = 0; k < K; ++k) {
    mu_s[k] = red.reduced.mu.at(grid, k, Stage::kLeft);
    sigma_s[k] = red.reduced.sigma.at(grid, k, Stage::kLeft);
    sigma_left[k] = sigma_s[k](0, 0);
  }
  frozen.mu = TimeFunction::samples(std::move(mu_s));
  frozen.sigma = TimeFunction::samples(std::move(sigma_s));
  lq::LQSpec ws = working_spec(frozen, lambda);

  lq::RiccatiSolution ric;
  ric.grid = grid;
  for (std::size_t k = 0; k <= K; ++k) {
    ric.P.push_back(Eigen::MatrixXd::Constant(1, 1, 2.0 * std::exp(-(S - cf.S_nodes[k]))));
    ric.phi.push_back(Eigen::VectorXd::Zero(1));
    ric.c.push_back(0.0);
  }
  for (std::size_t k = 0; k < K; ++k) {
    const double half = 0.5 * cf.Sigma[k] * cf.Sigma[k] * dt;
    ric.P_mid.push_back(Eigen::MatrixXd::Constant(1, 1, 2.0 * std::exp(-(S - cf.S_nodes[k] - half))));
    ric.phi_mid.push_back(Eigen::VectorXd::Zero(1));
  }
  lq::CoefficientTable coef(ws, grid);
  lq::ClosedLoop loop = lq::make_closed_loop(coef, grid, 1, 1, 1, [&](std::size_t k, Stage s) {
    lq::StageFeedback fb;
    fb.G = Eigen::MatrixXd::Constant(1, 1, cf.Sigma[k] / sigma_left[k]);
    fb.g = Eigen::VectorXd::Zero(1);
    fb.P = ric.P_at(k, s);
    fb.phi = ric.phi_at(k, s);
    return fb;
  });
  const double y0 = ws.x0(0);
  const double lq_value = 0.5 * ric.P.front()(0, 0) * y0 * y0;

  MVSolution sol;
  sol.spec = spec;
  sol.grid = grid;
  sol.method = MVMethod::kClosedForm;
  sol.work = std::make_shared<const lq::LQModel>(
      lq::LQModel{ws, grid, std::move(coef), std::move(ric), std::move(loop), lq_value});
  sol.unwind = reduced_unwind(red, grid, spec.A, lambda);
  sol.lambda_work = lambda;
  sol.lambda_E = red.multiplier_factor() * lambda;
  sol.value = red.scale * x * x / std::expm1(S);
  sol.Sigma = cf.Sigma;
  sol.S_nodes = cf.S_nodes;
  if (opts.store_paths) materialize(sol, w, opts.exec);
  return sol;
}

ExplicitSensitivities closed_form_sensitivities(const MVSpec& spec, const TimeGrid& grid,
                                                double dx, double dA, const TimeFunction& dmu,
                                                const TimeFunction& dsigma) {
  if (!(spec.r.is_zero())) {
    fail(ErrorKind::kUnsupported, "explicit sensitivities: the rate must be identically zero");
  }
  const MVClosedForm cf = closed_form_data(spec, grid);
  const double dt = grid.dt();
  const double eS = std::exp(cf.integrated_Sigma2);
  const double em1 = std::expm1(cf.integrated_Sigma2);
  const double gap = spec.x - spec.A;
  double int_mu = 0.0, int_sigma = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double mu = spec.mu.at(grid, k, Stage::kLeft)(0, 0);
    const double sg = spec.sigma.at(grid, k, Stage::kLeft)(0, 0);
    int_mu += mu * dmu.at(grid, k, Stage::kLeft)(0, 0) / (sg * sg) * dt;
    int_sigma += mu * mu * dsigma.at(grid, k, Stage::kLeft)(0, 0) / (sg * sg * sg) * dt;
  }
  const double curvature = 2.0 * gap * gap * eS / (em1 * em1);
  ExplicitSensitivities out;
  out.dx = 2.0 * gap * dx / em1;
  out.dA = -2.0 * gap * dA / em1;
  out.dmu = -curvature * int_mu;
  out.dsigma = curvature * int_sigma;
  return out;
}

}  // namespace stocsens::mv
