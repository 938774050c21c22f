#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "instances.hpp"
#include "stocsens/core/error.hpp"
#include "stocsens/lq/picard.hpp"
#include "stocsens/lq/solve.hpp"

using namespace stocsens;
using namespace stocsens::lq;
using stocsens::testing::RandomLQ;
using stocsens::testing::scalar_lq;

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

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("scalar Riccati against P(t) = 1/(2 - t)") {
  const TimeGrid grid = build_grid(1.0, 1000);
  const RiccatiSolution r = riccati_integrate(scalar_lq(), grid);
  CHECK(r.P.front()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t k = 0; k <= 1000; k += 100) {
    CHECK(r.P[k](0, 0) == doctest::Approx(1.0 / (2.0 - grid.time(k))).epsilon(1e-12));
  }
  CHECK(r.P.back()(0, 0) == 1.0);
  CHECK(r.phi.back()(0) == 0.0);
  CHECK(r.c.back() == 0.0);
  // Step halving changes nothing at this accuracy.
  const RiccatiSolution r2 = riccati_integrate(scalar_lq(), build_grid(1.0, 2000));
  CHECK(r2.P.front()(0, 0) == doctest::Approx(r.P.front()(0, 0)).epsilon(1e-12));
}

TEST_CASE("zero terminal data gives a zero solution") {
  LQSpec s = scalar_lq();
  s.M = Eigen::MatrixXd::Zero(1, 1);
  const RiccatiSolution r = riccati_integrate(s, build_grid(1.0, 50));
  for (std::size_t k = 0; k <= 50; ++k) {
    CHECK(r.P[k](0, 0) == 0.0);
    CHECK(r.phi[k](0) == 0.0);
    CHECK(r.c[k] == 0.0);
  }
}

TEST_CASE("uncontrolled problem solves the Lyapunov equation") {
  RandomLQ gen(17);
  const Eigen::Index n = 2;
  LQSpec s = LQSpec::zeros(n, 1, 1);
  s.x0 = Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd A = gen.matrix(n, n, 0.7), C = gen.matrix(n, n, 0.4), Q = gen.psd(n, 1.0);
  s.A = TimeFunction::constant(A);
  s.C[0] = TimeFunction::constant(C);
  s.Q = TimeFunction::constant(Q);
  s.M = gen.psd(n, 1.0);
  const double T = 1.5;
  const RiccatiSolution r = riccati_integrate(s, build_grid(T, 600));

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd L = kron(I, A.transpose()) + kron(A.transpose(), I) + kron(C.transpose(), C.transpose());
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n * n + 1, n * n + 1);
  aug.topLeftCorner(n * n, n * n) = L;
  aug.topRightCorner(n * n, 1) = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::VectorXd start(n * n + 1);
  start << Eigen::Map<const Eigen::VectorXd>(s.M.data(), n * n), 1.0;
  const Eigen::VectorXd end = (T * aug).exp() * start;
  const Eigen::MatrixXd P0 = Eigen::Map<const Eigen::MatrixXd>(end.data(), n, n);
  CHECK((r.P.front() - P0).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, P0.norm()));
}

TEST_CASE("Riccati symmetry, PSD and fourth-order convergence") {
  RandomLQ gen(5);
  for (int i = 0; i < 8; ++i) {
    const LQSpec s = gen.instance();
    const RiccatiSolution r = riccati_integrate(s, build_grid(1.0, 100));
    for (const auto& P : r.P) {
      CHECK((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P).eigenvalues().minCoeff() >= -1e-10);
    }
  }
  RandomLQ g2(99);
  const LQSpec s = g2.instance();
  const double v1 = riccati_integrate(s, build_grid(1.0, 10)).value(s.x0);
  const double v2 = riccati_integrate(s, build_grid(1.0, 20)).value(s.x0);
  const double v4 = riccati_integrate(s, build_grid(1.0, 40)).value(s.x0);
  const double ratio = (v1 - v2) / (v2 - v4);
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("Riccati errors") {
  LQSpec s = scalar_lq();
  s.N = TimeFunction::scalar(0.0);
  CHECK(kind_of([&] { riccati_integrate(s, build_grid(1.0, 10)); }) == ErrorKind::kInvalidArgument);
  // N = 0 allowed by options, K = N + D'PD still singular without noise.
  RiccatiOptions lax;
  lax.validation.require_positive_control_weight = false;
  CHECK(kind_of([&] { riccati_integrate(s, build_grid(1.0, 10), lax); }) == ErrorKind::kSingularRiccati);
  LQSpec blow = LQSpec::zeros(1, 1, 1);
  blow.x0 = Eigen::VectorXd::Ones(1);
  blow.A = TimeFunction::scalar(20.0);
  blow.M = Eigen::MatrixXd::Ones(1, 1);
  CHECK(kind_of([&] { riccati_integrate(blow, build_grid(2.0, 200)); }) == ErrorKind::kIntegrationFailure);
  LQSpec bad = scalar_lq();
  bad.M = -Eigen::MatrixXd::Ones(1, 1);
  CHECK(kind_of([&] { riccati_integrate(bad, build_grid(1.0, 10)); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("solve_lq scalar examples") {
  const TimeGrid grid = build_grid(1.0, 1000);
  const BrownianEnsemble w = sample_brownian(grid, 200, 1, 1);
  const LQSolution sol = solve_lq(scalar_lq(), grid, w);
  CHECK(sol.value == doctest::Approx(0.25).epsilon(1e-12));
  for (std::size_t k = 0; k <= 1000; k += 50) {
    const double t = grid.time(k);
    CHECK(sol.x_bar(3, k) == doctest::Approx((2.0 - t) / 2.0).epsilon(1e-3));
    CHECK(sol.p_bar(3, k) == doctest::Approx(0.5).epsilon(1e-3));
  }
  CHECK(consistency_violation(sol) <= 1e-10);

  LQSpec zero = scalar_lq();
  zero.x0.setZero();
  const LQSolution z = solve_lq(zero, grid, w);
  CHECK(z.value == 0.0);
  for (double v : z.x_bar.data()) CHECK(v == 0.0);
  for (double v : z.u_bar.data()) CHECK(v == 0.0);
  for (double v : z.p_bar.data()) CHECK(v == 0.0);
  for (double v : z.q_bar.data()) CHECK(v == 0.0);
  const Estimate r = value_duality_residual(zero, z, w);
  CHECK(r.mean == 0.0);
}

TEST_CASE("feedback and adjoint consistency on noisy instances") {
  RandomLQ gen(23);
  for (int i = 0; i < 4; ++i) {
    const LQSpec s = gen.instance();
    const TimeGrid grid = build_grid(1.0, 100);
    const BrownianEnsemble w = sample_brownian(grid, 50, static_cast<std::size_t>(s.d), 3);
    const LQSolution sol = solve_lq(s, grid, w);
    CHECK(consistency_violation(sol) <= 1e-10);
    const LQSolution serial = simulate(sol.model, w, Exec::kSerial);
    CHECK(std::equal(sol.x_bar.data().begin(), sol.x_bar.data().end(), serial.x_bar.data().begin()));
  }
}

TEST_CASE("duality residual: deterministic and noisy") {
  const TimeGrid grid = build_grid(1.0, 1000);
  const auto model = build_lq_model(scalar_lq(), grid);
  const BrownianEnsemble w = stream_brownian(grid, 2000, 1, 4);
  const Estimate r = duality_residual(*model, w);
  CHECK(std::abs(r.mean) <= 1e-10);

  RandomLQ gen(31);
  const LQSpec s = gen.instance();
  const TimeGrid g = build_grid(1.0, 200);
  const auto m = build_lq_model(s, g);
  const BrownianEnsemble ws = sample_brownian(g, 4000, static_cast<std::size_t>(s.d), 8);
  const Estimate streamed = duality_residual(*m, ws);
  const Estimate stored = value_duality_residual(s, simulate(m, ws), ws);
  CHECK(streamed.mean == doctest::Approx(stored.mean).epsilon(1e-10));
  CHECK(std::abs(streamed.mean) <= 4.0 * streamed.std_error + 2.0 * std::abs(expected_duality_residual(*m)));
  CHECK(duality_residual(*m, ws, Exec::kSerial).mean == streamed.mean);
}

TEST_CASE("policy cost and the first-order condition") {
  RandomLQ gen(41);
  const LQSpec s = gen.instance();
  const TimeGrid grid = build_grid(1.0, 200);
  const auto model = build_lq_model(s, grid);
  CHECK(policy_cost(*model, model->loop) == doctest::Approx(model->value).epsilon(1e-9));
  const TimeFunction v = TimeFunction::constant(Eigen::MatrixXd::Ones(s.m, 1));
  for (double eps : {1e-2, 1e-3}) {
    const double j = policy_cost(*model, perturb_control(*model, v, eps));
    const double jm = policy_cost(*model, perturb_control(*model, v, -eps));
    const double norm2 = static_cast<double>(s.m);
    CHECK((j - model->value) / eps >= -10.0 * eps * norm2);
    CHECK((jm - model->value) / eps >= -10.0 * eps * norm2);
  }
  const BrownianEnsemble w = sample_brownian(grid, 4000, static_cast<std::size_t>(s.d), 2);
  const Estimate mc = policy_cost_mc(*model, model->loop, w);
  CHECK(std::abs(mc.mean - model->value) <= 4.0 * mc.std_error + 0.02 * std::abs(model->value));
}

TEST_CASE("Picard oracle") {
  const TimeGrid grid = build_grid(1.0, 1000);
  const BrownianEnsemble w = sample_brownian(grid, 200, 1, 6);
  const PicardResult pr = fbsde_picard_oracle(scalar_lq(), grid, w);
  CHECK(pr.solution.value == doctest::Approx(0.25).epsilon(1e-4));

  LQSpec zero = scalar_lq();
  zero.M.setZero();
  const PicardResult pz = fbsde_picard_oracle(zero, grid, w);
  CHECK(pz.iterations <= 1);
  for (double u : pz.solution.u_bar.data()) CHECK(u == 0.0);

  PicardOptions few;
  few.max_iters = 2;
  few.tol = 1e-14;
  CHECK(kind_of([&] { fbsde_picard_oracle(scalar_lq(), grid, w, few); }) == ErrorKind::kConvergenceFailure);
}
