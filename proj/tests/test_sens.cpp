#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "stocsens/core/error.hpp"
#include "stocsens/mv/dual.hpp"
#include "stocsens/sens/lq_sensitivity.hpp"
#include "stocsens/sens/mv_sensitivity.hpp"

using namespace stocsens;
using namespace stocsens::sens;
using stocsens::testing::one_asset_mv;
using stocsens::testing::RandomLQ;
using stocsens::testing::scalar_lq;

namespace {

double richardson(const RayValue& v, double scale) {
  return fd_check(v, default_fd_step(scale)).richardson;
}

LQPerturbation random_direction(RandomLQ& gen, const lq::LQSpec& s) {
  LQPerturbation p = LQPerturbation::zeros(s);
  p.dx0 = gen.matrix(s.n, 1, 1.0);
  p.dA = gen.smooth(gen.matrix(s.n, s.n, 1.0), gen.matrix(s.n, s.n, 0.3), 1.5);
  p.dB = TimeFunction::constant(gen.matrix(s.n, s.m, 1.0));
  p.de = gen.smooth(gen.matrix(s.n, 1, 1.0), gen.matrix(s.n, 1, 0.3), 2.5);
  for (std::size_t j = 0; j < p.dC.size(); ++j) {
    p.dC[j] = TimeFunction::constant(gen.matrix(s.n, s.n, 1.0));
    p.dD[j] = TimeFunction::constant(gen.matrix(s.n, s.m, 1.0));
    p.df[j] = TimeFunction::constant(gen.matrix(s.n, 1, 1.0));
  }
  return p;
}

}  // namespace

TEST_CASE("scalar LQ sensitivities") {
  const TimeGrid grid = build_grid(1.0, 1000);
  const auto model = lq::build_lq_model(scalar_lq(), grid);
  LQPerturbation p = LQPerturbation::zeros(model->spec);
  p.dx0 = Eigen::VectorXd::Ones(1);
  p.dA = TimeFunction::scalar(1.0);
  p.de = TimeFunction::scalar(1.0);
  const SensitivityReport r = dv_lq(*model, p);
  CHECK(r.find("dx0")->value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.find("dA")->value == doctest::Approx(0.375).epsilon(1e-10));
  CHECK(r.find("de")->value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.find("dC")->value == 0.0);
  CHECK(r.breakdown.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) CHECK(r.breakdown[i].label == kLQBlocks[i]);
  const double fd = richardson(lq_value_ray(model->spec, p, grid), 1.0);
  CHECK(fd == doctest::Approx(1.375).epsilon(1e-9));
  CHECK(r.adjoint_value == doctest::Approx(1.375).epsilon(1e-10));
}

TEST_CASE("adjoint derivative matches finite differences on random instances") {
  RandomLQ gen(2024);
  const TimeGrid grid = build_grid(1.0, 200);
  for (int i = 0; i < 5; ++i) {
    const lq::LQSpec s = gen.instance();
    const auto model = lq::build_lq_model(s, grid);
    const LQPerturbation p = random_direction(gen, s);
    const SensitivityReport r = dv_lq(*model, p);
    const double fd = richardson(lq_value_ray(s, p, grid), ray_scale(p, grid));
    CHECK(std::abs(r.adjoint_value - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    double sum = 0.0;
    for (const auto& c : r.breakdown) sum += c.value;
    CHECK(sum == r.adjoint_value);
  }
}

TEST_CASE("linearity in the direction") {
  RandomLQ gen(7);
  const TimeGrid grid = build_grid(1.0, 100);
  const lq::LQSpec s = gen.instance();
  const auto model = lq::build_lq_model(s, grid);
  const LQPerturbation a = random_direction(gen, s);
  const LQPerturbation b = random_direction(gen, s);
  const double da = dv_lq(*model, a).adjoint_value;
  const double db = dv_lq(*model, b).adjoint_value;
  const double dc = dv_lq(*model, combine(0.7, a, -1.3, b)).adjoint_value;
  CHECK(linearity_check(dc, da, db, 0.7, -1.3));
  CHECK_FALSE(linearity_check(dc + 1e-6, da, db, 0.7, -1.3));
}

TEST_CASE("additive perturbations reuse the general formula") {
  RandomLQ gen(11);
  const TimeGrid grid = build_grid(1.0, 100);
  const lq::LQSpec s = gen.instance();
  const auto model = lq::build_lq_model(s, grid);
  const Eigen::VectorXd dx0 = gen.matrix(s.n, 1, 1.0);
  const TimeFunction drift = TimeFunction::constant(gen.matrix(s.n, 1, 1.0));
  const TimeFunction diff = TimeFunction::constant(gen.matrix(s.n, s.d, 1.0));
  const SensitivityReport add = dv_additive(*model, dx0, drift, diff);
  const SensitivityReport gen_r = dv_lq(*model, additive_perturbation(s, dx0, drift, diff));
  CHECK(std::abs(add.adjoint_value - gen_r.adjoint_value) <= 1e-14 * std::max(1.0, std::abs(gen_r.adjoint_value)));
  CHECK(add.find("dx0")->value == gen_r.find("dx0")->value);
  CHECK(add.find("drift")->value == gen_r.find("de")->value);
  CHECK(add.find("diffusion")->value == gen_r.find("df")->value);
}

TEST_CASE("zero noise: diffusion directions have zero first-order effect") {
  const TimeGrid grid = build_grid(1.0, 200);
  const lq::LQSpec s = scalar_lq();
  const auto model = lq::build_lq_model(s, grid);
  const TimeFunction diff = TimeFunction::scalar(1.0);
  const LQPerturbation p = additive_perturbation(s, Eigen::VectorXd::Zero(1), TimeFunction::scalar(0.0), diff);
  CHECK(dv_lq(*model, p).adjoint_value == 0.0);
  // The value is quadratic in the diffusion shift: the one-sided quotient is O(tau).
  const RayValue ray = lq_value_ray(s, p, grid);
  const double q1 = forward_quotient(ray, 1e-3);
  const double q2 = forward_quotient(ray, 5e-4);
  CHECK(std::abs(q1) <= 1e-2);
  CHECK(q1 / q2 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("Monte Carlo quadrature agrees with moments") {
  RandomLQ gen(3);
  const TimeGrid grid = build_grid(1.0, 100);
  const lq::LQSpec s = gen.instance();
  const BrownianEnsemble w = sample_brownian(grid, 20000, static_cast<std::size_t>(s.d), 9);
  const lq::LQSolution sol = lq::solve_lq(s, grid, w);
  const LQPerturbation p = random_direction(gen, s);
  const SensitivityReport mc = dv_lq(sol, p);
  const SensitivityReport exact = dv_lq(*sol.model, p);
  REQUIRE(mc.mc_stderr.has_value());
  // Left-point sums carry an O(dt) bias in addition to the sampling error.
  CHECK(std::abs(mc.adjoint_value - exact.adjoint_value) <= 4.0 * *mc.mc_stderr + 0.05 * std::abs(exact.adjoint_value));
}

TEST_CASE("finite-difference helpers") {
  const RayValue sq = [](double s) { return (1.0 + s) * (1.0 + s); };
  const FDResult r = fd_check(sq, 1e-2);
  CHECK(r.central == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.richardson == doctest::Approx(2.0).epsilon(1e-12));
  const RayValue cube = [](double s) { return s * s * s + s; };
  CHECK(fd_check(cube, 1e-2).richardson == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(forward_quotient(sq, 1e-3) == doctest::Approx(2.001).epsilon(1e-10));
  CHECK(default_fd_step(0.5) == 1e-4);
  CHECK(default_fd_step(10.0) == doctest::Approx(1e-3));
  SensitivityReport rep = make_report({{"a", 1.0, {}}, {"b", 2.0, {}}});
  attach_fd(rep, 3.5, 1e-4);
  CHECK(rep.adjoint_value == 3.0);
  CHECK(rep.abs_gap == 0.5);
  CHECK(rep.rel_gap == doctest::Approx(0.5 / 3.0));
  CHECK(rep.find("c") == nullptr);
}

TEST_CASE("mean-variance sensitivities: explicit one-asset values") {
  const TimeGrid grid = build_grid(1.0, 1000);
  const mv::MVSpec s = one_asset_mv();
  const mv::MVClosedForm cf = mv::closed_form_data(s, grid);
  const double em1 = std::expm1(0.25);
  const double curv = 2.0 * std::exp(0.25) / (em1 * em1);
  const mv::ExplicitSensitivities ex = mv::closed_form_sensitivities(
      s, grid, 1.0, 1.0, TimeFunction::scalar(1.0), TimeFunction::scalar(1.0));
  CHECK(cf.integrated_Sigma2 == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ex.dx == doctest::Approx(-2.0 / em1).epsilon(1e-12));
  CHECK(ex.dA == doctest::Approx(2.0 / em1).epsilon(1e-12));
  CHECK(ex.dmu == doctest::Approx(-curv * 0.1 / 0.04).epsilon(1e-12));
  CHECK(ex.dsigma == doctest::Approx(curv * 0.01 / 0.008).epsilon(1e-12));

  const BrownianEnsemble w = sample_brownian(grid, 10, 1, 1);
  for (mv::MVMethod method : {mv::MVMethod::kClosedForm, mv::MVMethod::kDual}) {
    const mv::MVSolution sol = method == mv::MVMethod::kClosedForm ? mv::solve_closed_form(s, grid, w)
                                                                   : mv::solve_dual(s, grid, w);
    MVPerturbation p = MVPerturbation::zeros(s);
    p.dx = 1.0;
    p.dA = 1.0;
    p.dmu = TimeFunction::scalar(1.0);
    p.dsigma = TimeFunction::scalar(1.0);
    const SensitivityReport r = dv_mv(sol, p);
    CHECK(r.find("D_x")->value == doctest::Approx(ex.dx).epsilon(1e-9));
    CHECK(r.find("D_A")->value == doctest::Approx(ex.dA).epsilon(1e-9));
    CHECK(r.find("D_A")->value == doctest::Approx(-sol.lambda_E).epsilon(1e-9));
    CHECK(r.find("D_mu")->value == doctest::Approx(ex.dmu).epsilon(1e-9));
    CHECK(r.find("D_sigma")->value == doctest::Approx(ex.dsigma).epsilon(1e-9));
  }
}

TEST_CASE("mean-variance sensitivities against finite differences with a rate") {
  const TimeGrid grid = build_grid(1.0, 400);
  mv::MVSpec s;
  s.d = 2;
  s.x = 1.0;
  s.A = 1.3;
  s.r = TimeFunction::scalar(0.03);
  Eigen::VectorXd mu(2);
  mu << 0.07, 0.1;
  Eigen::MatrixXd sg(2, 2);
  sg << 0.2, 0.02, 0.0, 0.25;
  s.mu = TimeFunction::constant(mu);
  s.sigma = TimeFunction::constant(sg);
  mv::DualOptions o;
  o.route = mv::DualRoute::kDirect;
  const mv::MVSolution sol = mv::solve_dual(s, grid, sample_brownian(grid, 10, 2, 2), o);
  MVPerturbation p = MVPerturbation::zeros(s);
  p.dx = 0.5;
  p.dr = TimeFunction::scalar(0.1);
  p.dA = -0.2;
  p.dmu = TimeFunction::constant(Eigen::Vector2d(0.3, -0.1));
  Eigen::MatrixXd ds(2, 2);
  ds << 0.1, -0.2, 0.05, 0.3;
  p.dsigma = TimeFunction::constant(ds);
  const SensitivityReport r = dv_mv(sol, p);
  const double fd = richardson(mv_value_ray(s, p, grid, MVValueMethod::kDual, o), ray_scale(p, grid));
  CHECK(std::abs(r.adjoint_value - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
}

TEST_CASE("shape errors") {
  const lq::LQSpec s = scalar_lq();
  LQPerturbation p = LQPerturbation::zeros(s);
  p.dx0 = Eigen::VectorXd::Ones(2);
  try {
    check_shapes(s, p);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
}
