#include "stocsens/lq/riccati.hpp"

#include <cmath>
#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens::lq {

namespace {

struct State {
  Eigen::MatrixXd P;
  Eigen::VectorXd phi;
  double c = 0.0;
};

State axpy(const State& y, double h, const State& k) {
  return {y.P + h * k.P, y.phi + h * k.phi, y.c + h * k.c};
}

Eigen::LLT<Eigen::MatrixXd> factor_gain(const StageCoefficients& c, const Eigen::MatrixXd& P,
                                        Eigen::MatrixXd& L, Eigen::VectorXd* h,
                                        const Eigen::VectorXd* phi) {
  Eigen::MatrixXd K = c.N;
  L.noalias() = c.B.transpose() * P;
  if (h) h->noalias() = c.B.transpose() * *phi;
  for (std::size_t j = 0; j < c.C.size(); ++j) {
    const Eigen::MatrixXd DtP = c.D[j].transpose() * P;
    K.noalias() += DtP * c.D[j];
    L.noalias() += DtP * c.C[j];
    if (h) h->noalias() += DtP * c.f[j];
  }
  K = 0.5 * (K + K.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::kSingularRiccati,
         "riccati: gain matrix N + sum D'PD is not positive definite");
  }
  return llt;
}

// Right-hand side in backward time s = T - t.
State backward_rhs(const StageCoefficients& c, const State& y) {
  Eigen::MatrixXd L;
  Eigen::VectorXd h;
  const auto llt = factor_gain(c, y.P, L, &h, &y.phi);
  const Eigen::MatrixXd KinvL = llt.solve(L);
  const Eigen::VectorXd Kinvh = llt.solve(h);

  State out;
  out.P.noalias() = c.A.transpose() * y.P;
  out.P.noalias() += y.P * c.A;
  out.P += c.Q;
  out.phi.noalias() = c.A.transpose() * y.phi;
  out.phi.noalias() += y.P * c.e;
  out.c = c.e.dot(y.phi);
  for (std::size_t j = 0; j < c.C.size(); ++j) {
    const Eigen::MatrixXd CtP = c.C[j].transpose() * y.P;
    out.P.noalias() += CtP * c.C[j];
    out.phi.noalias() += CtP * c.f[j];
    out.c += 0.5 * c.f[j].dot(y.P * c.f[j]);
  }
  out.P.noalias() -= L.transpose() * KinvL;
  out.phi.noalias() -= L.transpose() * Kinvh;
  out.c -= 0.5 * h.dot(Kinvh);
  return out;
}

double max_abs(const State& y) {
  double m = std::abs(y.c);
  if (y.P.size()) m = std::max(m, y.P.cwiseAbs().maxCoeff());
  if (y.phi.size()) m = std::max(m, y.phi.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

FeedbackGains feedback_gains(const StageCoefficients& c, const Eigen::MatrixXd& P,
                             const Eigen::VectorXd& phi) {
  Eigen::MatrixXd L;
  Eigen::VectorXd h;
  const auto llt = factor_gain(c, P, L, &h, &phi);
  return {llt.solve(L), llt.solve(h)};
}

RiccatiSolution riccati_integrate(const LQSpec& spec, const TimeGrid& grid,
                                  const RiccatiOptions& opts) {
  validate(spec, grid, opts.validation);
  const std::size_t K = grid.steps();
  const double h = grid.dt();
  const CoefficientTable coef(spec, grid);

  RiccatiSolution sol;
  sol.grid = grid;
  sol.P.resize(K + 1);
  sol.phi.resize(K + 1);
  sol.c.resize(K + 1);
  sol.P_mid.resize(K);
  sol.phi_mid.resize(K);

  State y{spec.M, Eigen::VectorXd::Zero(spec.n), 0.0};
  sol.P[K] = y.P;
  sol.phi[K] = y.phi;
  sol.c[K] = 0.0;

  for (std::size_t k = K; k-- > 0;) {
    const State k1 = backward_rhs(coef.at(k, Stage::kRight), y);
    const State k2 = backward_rhs(coef.at(k, Stage::kMid), axpy(y, 0.5 * h, k1));
    const State k3 = backward_rhs(coef.at(k, Stage::kMid), axpy(y, 0.5 * h, k2));
    const State k4 = backward_rhs(coef.at(k, Stage::kLeft), axpy(y, h, k3));
    State next;
    next.P = y.P + (h / 6.0) * (k1.P + 2.0 * k2.P + 2.0 * k3.P + k4.P);
    next.P = 0.5 * (next.P + next.P.transpose()).eval();
    next.phi = y.phi + (h / 6.0) * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    next.c = y.c + (h / 6.0) * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);

    if (!std::isfinite(max_abs(next)) || max_abs(next) > opts.blowup_threshold) {
      fail(ErrorKind::kIntegrationFailure,
           "riccati: solution exceeded " + format_number(opts.blowup_threshold) +
               " at step " + std::to_string(k));
    }

    // Hermite midpoint from the node values and their time derivatives
    // (d/dt = -backward_rhs) seen from inside this step.
    const State left_rate = backward_rhs(coef.at(k, Stage::kLeft), next);
    sol.P_mid[k] = 0.5 * (next.P + y.P) + (h / 8.0) * (k1.P - left_rate.P);
    sol.P_mid[k] = 0.5 * (sol.P_mid[k] + sol.P_mid[k].transpose()).eval();
    sol.phi_mid[k] = 0.5 * (next.phi + y.phi) + (h / 8.0) * (k1.phi - left_rate.phi);

    y = std::move(next);
    sol.P[k] = y.P;
    sol.phi[k] = y.phi;
    sol.c[k] = y.c;
  }
  return sol;
}

}  // namespace stocsens::lq
