#pragma once

#include <random>

#include "stocsens/lq/spec.hpp"
#include "stocsens/mv/spec.hpp"

namespace stocsens::testing {

/// A = 0, B = 1, Q = 0, N = 1, M = 1, x0 = 1: P(t) = 1/(2 - t) on [0, 1].
inline lq::LQSpec scalar_lq() {
  lq::LQSpec s = lq::LQSpec::zeros(1, 1, 1);
  s.x0 = Eigen::VectorXd::Ones(1);
  s.B = TimeFunction::scalar(1.0);
  s.M = Eigen::MatrixXd::Ones(1, 1);
  return s;
}

/// x = 0, A = 1, mu = 0.1, sigma = 0.2, r = 0.
inline mv::MVSpec one_asset_mv() {
  mv::MVSpec s;
  s.x = 0.0;
  s.A = 1.0;
  s.mu = TimeFunction::scalar(0.1);
  s.sigma = TimeFunction::scalar(0.2);
  return s;
}

struct RandomLQ {
  std::mt19937_64 rng;
  explicit RandomLQ(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }
  Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c, double scale) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * uniform(-1.0, 1.0);
    return m;
  }
  Eigen::MatrixXd psd(Eigen::Index n, double scale) {
    const Eigen::MatrixXd a = matrix(n, n, 1.0);
    return scale * a * a.transpose() / static_cast<double>(n);
  }
  /// base + amp * sin(omega t) entrywise, smooth in time.
  TimeFunction smooth(const Eigen::MatrixXd& base, const Eigen::MatrixXd& amp, double omega) {
    return TimeFunction::callable(base.rows(), base.cols(), [base, amp, omega](double t) {
      return Eigen::MatrixXd(base + std::sin(omega * t) * amp);
    });
  }

  /// Random instance with n, m <= 3, d <= 2, smooth deterministic coefficients.
  /// deterministic = true gives C = D = f = 0.
  lq::LQSpec instance(bool deterministic = false) {
    const auto n = static_cast<Eigen::Index>(pick(1, 3));
    const auto m = static_cast<Eigen::Index>(pick(1, 3));
    const auto d = static_cast<Eigen::Index>(pick(1, 2));
    lq::LQSpec s = lq::LQSpec::zeros(n, m, d);
    s.x0 = matrix(n, 1, 1.0);
    s.A = smooth(matrix(n, n, 0.5), matrix(n, n, 0.2), uniform(0.5, 3.0));
    s.B = smooth(matrix(n, m, 1.0), matrix(n, m, 0.2), uniform(0.5, 3.0));
    s.e = smooth(matrix(n, 1, 0.3), matrix(n, 1, 0.2), uniform(0.5, 3.0));
    if (!deterministic) {
      for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j) {
        s.C[j] = TimeFunction::constant(matrix(n, n, 0.3));
        s.D[j] = TimeFunction::constant(matrix(n, m, 0.3));
        s.f[j] = smooth(matrix(n, 1, 0.2), matrix(n, 1, 0.1), uniform(0.5, 3.0));
      }
    }
    const Eigen::MatrixXd q = psd(n, 1.0);
    s.Q = smooth(q, Eigen::MatrixXd(0.2 * q), 1.0);
    const Eigen::MatrixXd nn = Eigen::MatrixXd::Identity(m, m) + psd(m, 0.5);
    s.N = smooth(nn, Eigen::MatrixXd(0.2 * nn), 2.0);
    s.M = psd(n, 1.0);
    return s;
  }
};

}  // namespace stocsens::testing
