#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "stocsens/lq/spec.hpp"

namespace stocsens::lq {

/// Affine feedback u = -G x - g together with the adjoint representation
/// p = P x + phi that goes with it.
struct StageFeedback {
  Eigen::MatrixXd G;
  Eigen::VectorXd g;
  Eigen::MatrixXd P;
  Eigen::VectorXd phi;
};

/// Closed-loop coefficients of one step at one stage:
/// dx = (Abar x + ebar) dt + sum_j (Cbar_j x + fbar_j) dW_j.
struct ClosedLoopStage {
  StageFeedback fb;
  Eigen::MatrixXd Abar;
  Eigen::VectorXd ebar;
  std::vector<Eigen::MatrixXd> Cbar;
  std::vector<Eigen::VectorXd> fbar;
};

/// Closed-loop system on a grid; three stages per step.
class ClosedLoop {
 public:
  ClosedLoop() = default;
  ClosedLoop(TimeGrid grid, Eigen::Index n, Eigen::Index m, Eigen::Index d,
             std::vector<ClosedLoopStage> stages);

  const TimeGrid& grid() const { return grid_; }
  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  Eigen::Index d() const { return d_; }

  const ClosedLoopStage& at(std::size_t k, Stage s) const {
    return stages_[3 * k + static_cast<std::size_t>(s)];
  }
  /// Stage at grid node k: left stage of step k, right stage of the last
  /// step for k == K.
  const ClosedLoopStage& node(std::size_t k) const {
    return k == grid_.steps() ? at(k - 1, Stage::kRight) : at(k, Stage::kLeft);
  }

 private:
  TimeGrid grid_;
  Eigen::Index n_ = 0, m_ = 0, d_ = 0;
  std::vector<ClosedLoopStage> stages_;
};

using FeedbackProvider = std::function<StageFeedback(std::size_t k, Stage s)>;

ClosedLoop make_closed_loop(const CoefficientTable& coef, const TimeGrid& grid, Eigen::Index n,
                            Eigen::Index m, Eigen::Index d, const FeedbackProvider& feedback);

/// One grid point of a simulated closed-loop path. u and q are set for
/// k < K only; q holds q^j as column j.
struct PathPoint {
  std::size_t k = 0;
  Eigen::VectorXd x, u, p;
  Eigen::MatrixXd q;
};

/// Left-point Euler-Maruyama walk of one path; `dW` holds its K*d increments
/// step-major. `visit(const PathPoint&)` is called for k = 0..K.
template <class Visit>
void walk_path(const ClosedLoop& cl, const Eigen::VectorXd& x0, std::span<const double> dW,
               Visit&& visit) {
  const std::size_t K = cl.grid().steps();
  const double dt = cl.grid().dt();
  const auto d = static_cast<std::size_t>(cl.d());
  PathPoint pt;
  pt.x = x0;
  pt.q.resize(cl.n(), cl.d());
  Eigen::VectorXd next(cl.n()), vol(cl.n());
  for (std::size_t k = 0; k < K; ++k) {
    const ClosedLoopStage& st = cl.at(k, Stage::kLeft);
    pt.k = k;
    pt.u.noalias() = -st.fb.G * pt.x;
    pt.u -= st.fb.g;
    pt.p.noalias() = st.fb.P * pt.x;
    pt.p += st.fb.phi;
    next.noalias() = st.Abar * pt.x;
    next += st.ebar;
    next *= dt;
    next += pt.x;
    for (std::size_t j = 0; j < d; ++j) {
      vol.noalias() = st.Cbar[j] * pt.x;
      vol += st.fbar[j];
      pt.q.col(static_cast<Eigen::Index>(j)).noalias() = st.fb.P * vol;
      next += dW[k * d + j] * vol;
    }
    visit(static_cast<const PathPoint&>(pt));
    pt.x.swap(next);
  }
  const ClosedLoopStage& last = cl.node(K);
  pt.k = K;
  pt.u.resize(0);
  pt.q.resize(0, 0);
  pt.p.noalias() = last.fb.P * pt.x;
  pt.p += last.fb.phi;
  visit(static_cast<const PathPoint&>(pt));
}

/// First and second moments m = E[x], S = E[x x'] at the three stages of a
/// step, as seen by RK4 (left state, mean of the two midpoint states, right
/// predictor state). Linear functionals of the moments integrated with the
/// weights (1, 4, 1) dt/6 over these stages reproduce RK4 on the augmented
/// system.
struct MomentStage {
  Eigen::VectorXd m;
  Eigen::MatrixXd S;
};

struct MomentPath {
  TimeGrid grid;
  std::vector<MomentStage> nodes;   ///< 0..K
  std::vector<MomentStage> stages;  ///< 3 per step

  const MomentStage& at(std::size_t k, Stage s) const {
    return stages[3 * k + static_cast<std::size_t>(s)];
  }
};

/// RK4 on dm = (Abar m + ebar) dt and
/// dS = [Abar S + S Abar' + ebar m' + m ebar' + sum_j (Cbar S Cbar' + Cbar m fbar' + fbar m' Cbar' + fbar fbar')] dt.
MomentPath integrate_moments(const ClosedLoop& cl, const Eigen::VectorXd& x0);

/// Integral over [0, T] of a stage-wise scalar functional with RK4 weights.
double stage_quadrature(const TimeGrid& grid,
                        const std::function<double(std::size_t k, Stage s)>& integrand);

/// Expected path-wise quantities at a stage, from moments.
struct StageExpectations {
  Eigen::VectorXd x;    ///< E[x]
  Eigen::VectorXd u;    ///< E[u]
  Eigen::VectorXd p;    ///< E[p]
  Eigen::MatrixXd xp;   ///< E[x p']
  Eigen::MatrixXd up;   ///< E[u p']
  Eigen::MatrixXd xx;   ///< E[x x']
  Eigen::MatrixXd ux;   ///< E[u x']
  Eigen::MatrixXd uu;   ///< E[u u']
  std::vector<Eigen::VectorXd> q;   ///< E[q_j]
  std::vector<Eigen::MatrixXd> xq;  ///< E[x q_j']
  std::vector<Eigen::MatrixXd> uq;  ///< E[u q_j']
};

StageExpectations expectations(const ClosedLoopStage& st, const MomentStage& mo);

}  // namespace stocsens::lq
