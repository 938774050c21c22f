#include <doctest.h>

#include <cmath>

#include "stocsens/core/error.hpp"
#include "stocsens/core/time_function.hpp"
#include "stocsens/stochastic/brownian.hpp"
#include "stocsens/stochastic/ito.hpp"
#include "stocsens/stochastic/philox.hpp"

using namespace stocsens;

TEST_CASE("build_grid") {
  const TimeGrid g1 = build_grid(1.0, 1);
  CHECK(g1.dt() == 1.0);
  CHECK(g1.time(0) == 0.0);
  CHECK(g1.time(1) == 1.0);
  CHECK(build_grid(1.0, 1000).dt() == doctest::Approx(0.001).epsilon(1e-15));
  const TimeGrid g = build_grid(2.0, 4);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(g.time(k) == doctest::Approx(0.5 * k));
  CHECK(g.dt() * 4 == doctest::Approx(2.0).epsilon(1e-15));

  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kUnsupported;
  };
  CHECK(kind([] { build_grid(0.0, 10); }) == ErrorKind::kInvalidArgument);
  CHECK(kind([] { build_grid(-1.0, 10); }) == ErrorKind::kInvalidArgument);
  CHECK(kind([] { build_grid(1.0, 0); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("philox known answer") {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);
}

TEST_CASE("brownian determinism and substreams") {
  const TimeGrid grid = build_grid(1.0, 50);
  const BrownianEnsemble a = sample_brownian(grid, 64, 2, 99);
  const BrownianEnsemble b = sample_brownian(grid, 64, 2, 99);
  CHECK(std::equal(a.increments().begin(), a.increments().end(), b.increments().begin()));

  const BrownianEnsemble serial = sample_brownian(grid, 64, 2, 99, Exec::kSerial);
  CHECK(std::equal(a.increments().begin(), a.increments().end(), serial.increments().begin()));

  // Path 10 does not depend on how many paths were requested.
  const BrownianEnsemble bigger = sample_brownian(grid, 200, 2, 99);
  for (std::size_t k = 0; k < 50; ++k) {
    CHECK(a.dW(10, k)[0] == bigger.dW(10, k)[0]);
    CHECK(a.dW(10, k)[1] == bigger.dW(10, k)[1]);
  }

  // Streaming reproduces the stored increments.
  const BrownianEnsemble streamed = stream_brownian(grid, 64, 2, 99);
  std::vector<double> buf(100);
  streamed.path_increments(7, buf);
  for (std::size_t k = 0; k < 50; ++k) CHECK(buf[2 * k + 1] == a.dW(7, k)[1]);

  const BrownianEnsemble other = sample_brownian(grid, 64, 2, 100);
  CHECK(other.dW(0, 0)[0] != a.dW(0, 0)[0]);
}

TEST_CASE("coarsen sums consecutive increments") {
  const TimeGrid grid = build_grid(1.0, 8);
  const BrownianEnsemble fine = sample_brownian(grid, 4, 1, 3);
  const BrownianEnsemble coarse = coarsen(fine, 2);
  CHECK(coarse.steps() == 4);
  CHECK(coarse.dW(2, 1)[0] == doctest::Approx(fine.dW(2, 2)[0] + fine.dW(2, 3)[0]));
  CHECK(coarse.terminal(2) == doctest::Approx(fine.terminal(2)));
}

TEST_CASE("W(T) statistics") {
  const TimeGrid grid = build_grid(1.0, 100);
  const std::size_t n = 100000;
  const BrownianEnsemble w = sample_brownian(grid, n, 1, 2024);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double x = w.terminal(p);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = (sumsq - n * mean * mean) / (n - 1);
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(1.0 / n));
  CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("ito_evaluate examples") {
  const TimeGrid grid = build_grid(2.0, 40);
  const BrownianEnsemble w = sample_brownian(grid, 20, 1, 5);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1), one = Eigen::VectorXd::Ones(1);

  const ItoTriple still = ItoTriple::constant(Eigen::VectorXd::Constant(1, 3.0), zero,
                                              Eigen::MatrixXd::Zero(1, 1), 20, 40);
  const PathField xs = ito_evaluate(still, w);
  for (std::size_t k = 0; k <= 40; ++k) CHECK(xs(4, k) == 3.0);

  const ItoTriple clock = ItoTriple::constant(zero, one, Eigen::MatrixXd::Zero(1, 1), 20, 40);
  const PathField t = ito_evaluate(clock, w);
  for (std::size_t k = 0; k <= 40; ++k) CHECK(t(0, k) == doctest::Approx(grid.time(k)));

  const ItoTriple bm = ItoTriple::constant(zero, zero, Eigen::MatrixXd::Ones(1, 1), 20, 40);
  const PathField b = ito_evaluate(bm, w);
  for (std::size_t p = 0; p < 20; ++p) CHECK(b(p, 40) == doctest::Approx(w.terminal(p)));

  const BrownianEnsemble wrong = sample_brownian(build_grid(2.0, 20), 20, 1, 5);
  CHECK_THROWS_AS(ito_evaluate(bm, wrong), Error);
}

TEST_CASE("inner product examples and algebra") {
  const TimeGrid grid = build_grid(2.0, 20);
  const BrownianEnsemble w = sample_brownian(grid, 50, 2, 8);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd z2 = Eigen::MatrixXd::Zero(1, 2);
  const ItoTriple zero = ItoTriple::constant(z, z, z2, 50, 20);
  CHECK(inner_product_I(zero, zero, w) == 0.0);
  const ItoTriple unit = ItoTriple::constant(Eigen::VectorXd::Ones(1), z, z2, 50, 20);
  CHECK(inner_product_I(unit, unit, w) == doctest::Approx(1.0));
  const ItoTriple drift = ItoTriple::constant(z, Eigen::VectorXd::Ones(1), z2, 50, 20);
  CHECK(inner_product_I(drift, drift, w) == doctest::Approx(2.0));

  // Random-field triples: bilinearity, symmetry, Cauchy-Schwarz.
  auto random_triple = [&](std::uint64_t seed) {
    const BrownianEnsemble r = sample_brownian(grid, 50, 3, seed);
    PathField dr(50, 20, 1), df(50, 20, 1, 2);
    for (std::size_t p = 0; p < 50; ++p) {
      for (std::size_t k = 0; k < 20; ++k) {
        dr(p, k) = r.dW(p, k)[0] * 3.0;
        df.at(p, k)(0, 0) = r.dW(p, k)[1] * 2.0;
        df.at(p, k)(0, 1) = 1.0 + r.dW(p, k)[2];
      }
    }
    return ItoTriple(Eigen::VectorXd::Constant(1, 0.1 * static_cast<double>(seed)), dr, df);
  };
  const ItoTriple a = random_triple(1), b = random_triple(2), c = random_triple(3);
  const double alpha = -1.7;
  const double lhs = inner_product_I(a.axpy(alpha, b), c, w);
  const double rhs = alpha * inner_product_I(a, c, w) + inner_product_I(b, c, w);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(inner_product_I(a, b, w) == doctest::Approx(inner_product_I(b, a, w)).epsilon(1e-14));
  const double ab = inner_product_I(a, b, w);
  CHECK(ab * ab <= inner_product_I(a, a, w) * inner_product_I(b, b, w));
}

TEST_CASE("integration by parts") {
  const TimeGrid grid = build_grid(1.0, 1000);
  const std::size_t n = 10000;
  const BrownianEnsemble w = sample_brownian(grid, n, 1, 77);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(1);

  // Ito isometry: E[W(T)^2] = T.
  const ItoTriple bm = ItoTriple::constant(z, z, Eigen::MatrixXd::Ones(1, 1), n, 1000);
  const Estimate iso = integration_by_parts_residual(bm, bm, w);
  CHECK(std::abs(iso.mean) <= 4.0 * iso.std_error);

  // Deterministic product rule: O(dt) residual.
  const ItoTriple t = ItoTriple::constant(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1),
                                          Eigen::MatrixXd::Zero(1, 1), n, 1000);
  const Estimate det = integration_by_parts_residual(t, t, w);
  CHECK(std::abs(det.mean) <= 2.0 * grid.dt());

  // Constant b: martingale mean of the stochastic integral.
  const ItoTriple cst = ItoTriple::constant(Eigen::VectorXd::Ones(1), z, Eigen::MatrixXd::Zero(1, 1), n, 1000);
  const ItoTriple mixed = ItoTriple::constant(Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.3),
                                              Eigen::MatrixXd::Constant(1, 1, 0.7), n, 1000);
  const Estimate mart = integration_by_parts_residual(mixed, cst, w);
  CHECK(std::abs(mart.mean) <= 4.0 * mart.std_error + 1e-12);

  // Thread count does not change results.
  const Estimate serial = integration_by_parts_residual(bm, bm, w, Exec::kSerial);
  CHECK(serial.mean == iso.mean);
  CHECK(serial.std_error == iso.std_error);
}

TEST_CASE("non-finite data is rejected") {
  PathField drift(2, 3, 1), diff(2, 3, 1, 1);
  drift(1, 2) = std::nan("");
  CHECK_THROWS_AS(ItoTriple(Eigen::VectorXd::Zero(1), drift, diff), Error);
}

TEST_CASE("time functions") {
  const TimeGrid grid = build_grid(1.0, 4);
  const TimeFunction c = TimeFunction::scalar(2.0);
  CHECK(c.at(grid, 3, Stage::kRight)(0, 0) == 2.0);
  const TimeFunction s = TimeFunction::samples({Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0),
                                               Eigen::MatrixXd::Constant(1, 1, 3.0), Eigen::MatrixXd::Constant(1, 1, 4.0)});
  CHECK(s.at(grid, 1, Stage::kRight)(0, 0) == 2.0);
  CHECK(s.node(grid, 4)(0, 0) == 4.0);
  const TimeFunction f = TimeFunction::callable(1, 1, [](double t) { return Eigen::MatrixXd::Constant(1, 1, t); });
  CHECK(f.at(grid, 1, Stage::kMid)(0, 0) == doctest::Approx(0.375));
  const TimeFunction comb = TimeFunction::combine(c, 0.5, s);
  CHECK(comb.at(grid, 2, Stage::kLeft)(0, 0) == doctest::Approx(3.5));
  CHECK(TimeFunction(2, 2).is_zero());
  CHECK_THROWS_AS(TimeFunction::samples({Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)}).check_on_grid(grid, "x"), Error);
}
