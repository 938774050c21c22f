#include <doctest.h>

#include <cmath>

#include "instances.hpp"
#include "stocsens/core/error.hpp"
#include "stocsens/mv/dual.hpp"
#include "stocsens/mv/verify.hpp"

using namespace stocsens;
using namespace stocsens::mv;
using stocsens::testing::one_asset_mv;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::kUnsupported;
}

const double kOneAssetValue = 1.0 / std::expm1(0.25);

MVSpec two_asset(double r) {
  MVSpec s;
  s.d = 2;
  s.x = 1.0;
  s.A = 1.4;
  s.r = TimeFunction::scalar(r);
  Eigen::VectorXd mu(2);
  mu << 0.08, 0.12;
  Eigen::MatrixXd sg(2, 2);
  sg << 0.2, 0.0, 0.05, 0.3;
  s.mu = TimeFunction::constant(mu);
  s.sigma = TimeFunction::constant(sg);
  return s;
}

/// Constant-coefficient value: e^{2rT}(x - A e^{-rT})^2 / (e^{|theta|^2 T} - 1).
double market_value(const MVSpec& s, double r, double T) {
  const TimeGrid g = build_grid(T, 1);
  const Eigen::VectorXd excess = s.mu.at(g, 0, Stage::kLeft) - Eigen::VectorXd::Constant(s.d, r);
  const Eigen::VectorXd theta = s.sigma.at(g, 0, Stage::kLeft).lu().solve(excess);
  const double gap = s.x - s.A * std::exp(-r * T);
  return std::exp(2.0 * r * T) * gap * gap / std::expm1(theta.squaredNorm() * T);
}

}  // namespace

TEST_CASE("reduction of a constant-rate problem") {
  MVSpec s = one_asset_mv();
  s.x = 1.0;
  s.A = 2.0;
  s.r = TimeFunction::scalar(0.05);
  s.mu = TimeFunction::scalar(0.15);
  const TimeGrid grid = build_grid(2.0, 100);
  const Reduction red = reduce(s, grid);
  CHECK(red.R.total() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(red.scale == doctest::Approx(std::exp(0.2)).epsilon(1e-14));
  CHECK(red.reduced.x == doctest::Approx(1.0 - 2.0 * std::exp(-0.1)).epsilon(1e-14));
  CHECK(red.reduced.A == 0.0);
  CHECK(red.reduced.r.is_zero());
  CHECK(red.reduced.mu.at(grid, 3, Stage::kMid)(0, 0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(red.wealth_factor(50, Stage::kLeft) == doctest::Approx(std::exp(0.05)).epsilon(1e-14));
  CHECK(red.R.at(10, Stage::kMid) == doctest::Approx(0.05 * 0.21).epsilon(1e-14));
}

TEST_CASE("cumulative integral of a smooth rate") {
  const TimeFunction f = TimeFunction::callable(1, 1, [](double t) {
    return Eigen::MatrixXd::Constant(1, 1, std::cos(t));
  });
  const TimeGrid grid = build_grid(1.0, 200);
  const CumulativeIntegral c = cumulative_integral(f, grid);
  for (std::size_t k = 0; k < 200; k += 20) {
    CHECK(c.nodes[k] == doctest::Approx(std::sin(grid.time(k))).epsilon(1e-10));
    CHECK(c.mids[k] == doctest::Approx(std::sin(grid.time(k) + 0.5 * grid.dt())).epsilon(1e-9));
  }
}

TEST_CASE("closed form: one asset") {
  const TimeGrid grid = build_grid(1.0, 1000);
  CHECK(closed_form_value(one_asset_mv(), grid) == doctest::Approx(kOneAssetValue).epsilon(1e-12));
  const BrownianEnsemble w = sample_brownian(grid, 100, 1, 1);
  const MVSolution sol = solve_closed_form(one_asset_mv(), grid, w);
  CHECK(sol.value == doctest::Approx(kOneAssetValue).epsilon(1e-12));
  CHECK(sol.lambda_E == doctest::Approx(-2.0 * kOneAssetValue).epsilon(1e-10));
  CHECK(sol.has_paths());
  CHECK(sol.X_bar(0, 0) == 0.0);

  MVSpec at_target = one_asset_mv();
  at_target.x = at_target.A;
  const MVSolution z = solve_closed_form(at_target, grid, w);
  CHECK(z.value == 0.0);
  for (double v : z.pi_bar.data()) CHECK(v == 0.0);
}

TEST_CASE("dual search matches the closed form") {
  const TimeGrid grid = build_grid(1.0, 500);
  const BrownianEnsemble w = sample_brownian(grid, 10, 1, 2);
  for (double r : {0.0, 0.05}) {
    MVSpec s = one_asset_mv();
    s.x = 1.0;
    s.A = 2.0;
    s.r = TimeFunction::scalar(r);
    const MVSolution cf = solve_closed_form(s, grid, w);
    for (DualRoute route : {DualRoute::kReduced, DualRoute::kDirect}) {
      DualOptions o;
      o.route = route;
      const MVSolution du = solve_dual(s, grid, w, o);
      CHECK(du.value == doctest::Approx(cf.value).epsilon(1e-9));
      CHECK(du.lambda_E == doctest::Approx(cf.lambda_E).epsilon(1e-9));
    }
  }
}

TEST_CASE("two assets against the market-price-of-risk formula") {
  const TimeGrid grid = build_grid(1.0, 400);
  const BrownianEnsemble w = sample_brownian(grid, 10, 2, 3);
  for (double r : {0.0, 0.02}) {
    const MVSpec s = two_asset(r);
    for (DualRoute route : {DualRoute::kReduced, DualRoute::kDirect}) {
      DualOptions o;
      o.route = route;
      const MVSolution du = solve_dual(s, grid, w, o);
      CHECK(du.value == doctest::Approx(market_value(s, r, 1.0)).epsilon(1e-7));
    }
  }
  CHECK(kind_of([&] { closed_form_data(two_asset(0.0), grid); }) == ErrorKind::kUnsupported);
}

TEST_CASE("Monte Carlo verification of the optimum") {
  const TimeGrid grid = build_grid(1.0, 200);
  const MVSpec s = two_asset(0.02);
  const MVSolution sol = solve_dual(s, grid, sample_brownian(grid, 10, 2, 4));
  const BrownianEnsemble fresh = stream_brownian(grid, 20000, 2, 5);
  const VerificationRecord rec = mc_verify(s, sol, fresh);
  CHECK(std::abs(rec.mean_gap.mean) <= 4.0 * rec.mean_gap.std_error + 1e-3);
  CHECK(std::abs(rec.variance_gap.mean) <= 4.0 * rec.variance_gap.std_error + 0.01 * sol.value);
  CHECK(rec.adjoint_relation_residual <= 1e-8);
  CHECK(rec.martingale_drift_ratio <= 5.0);
  const VerificationRecord serial = mc_verify(s, sol, fresh, Exec::kSerial);
  CHECK(serial.mean_gap.mean == rec.mean_gap.mean);
  CHECK(serial.variance_gap.mean == rec.variance_gap.mean);
}

TEST_CASE("inner dual function is concave in the multiplier") {
  const TimeGrid grid = build_grid(1.0, 200);
  const MVSpec s = two_asset(0.0);
  const double h = 0.5;
  for (double lam : {-3.0, -1.0, 0.0, 2.0}) {
    const double c = inner_dual(s, grid, lam).value;
    const double l = inner_dual(s, grid, lam - h).value;
    const double r = inner_dual(s, grid, lam + h).value;
    CHECK(l + r - 2.0 * c <= 1e-10);
  }
}

TEST_CASE("value scales quadratically in (x, A)") {
  const TimeGrid grid = build_grid(1.0, 200);
  const BrownianEnsemble w = sample_brownian(grid, 4, 2, 6);
  MVSpec s = two_asset(0.02);
  const double v = solve_dual(s, grid, w).value;
  s.x *= 3.0;
  s.A *= 3.0;
  CHECK(solve_dual(s, grid, w).value == doctest::Approx(9.0 * v).epsilon(1e-9));
}

TEST_CASE("ellipticity and qualification failures") {
  const TimeGrid grid = build_grid(1.0, 50);
  const BrownianEnsemble w = sample_brownian(grid, 4, 1, 7);
  MVSpec flat = one_asset_mv();
  flat.sigma = TimeFunction::scalar(0.0);
  CHECK(kind_of([&] { validate(flat, grid); }) == ErrorKind::kEllipticity);
  CHECK(kind_of([&] { solve_dual(flat, grid, w); }) == ErrorKind::kEllipticity);
  MVSpec no_premium = one_asset_mv();
  no_premium.mu = TimeFunction::scalar(0.0);
  CHECK(kind_of([&] { validate(no_premium, grid); }) == ErrorKind::kQualification);
  CHECK(kind_of([&] { closed_form_data(no_premium, grid); }) == ErrorKind::kQualification);
  CHECK(kind_of([&] { reduce(no_premium, grid); }) == ErrorKind::kDegenerateProblem);
  MVSpec bad = one_asset_mv();
  bad.x = std::nan("");
  CHECK(kind_of([&] { validate(bad, grid); }) == ErrorKind::kInvalidArgument);
}
