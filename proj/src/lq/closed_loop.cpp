#include "stocsens/lq/closed_loop.hpp"

#include "stocsens/core/error.hpp"

namespace stocsens::lq {

ClosedLoop::ClosedLoop(TimeGrid grid, Eigen::Index n, Eigen::Index m, Eigen::Index d,
                       std::vector<ClosedLoopStage> stages)
    : grid_(grid), n_(n), m_(m), d_(d), stages_(std::move(stages)) {
  require(stages_.size() == 3 * grid_.steps(), "closed loop: expected three stages per step");
}

ClosedLoop make_closed_loop(const CoefficientTable& coef, const TimeGrid& grid, Eigen::Index n,
                            Eigen::Index m, Eigen::Index d, const FeedbackProvider& feedback) {
  std::vector<ClosedLoopStage> stages;
  stages.reserve(3 * grid.steps());
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      const StageCoefficients& c = coef.at(k, s);
      ClosedLoopStage st;
      st.fb = feedback(k, s);
      st.Abar = c.A - c.B * st.fb.G;
      st.ebar = c.e - c.B * st.fb.g;
      st.Cbar.resize(c.C.size());
      st.fbar.resize(c.C.size());
      for (std::size_t j = 0; j < c.C.size(); ++j) {
        st.Cbar[j] = c.C[j] - c.D[j] * st.fb.G;
        st.fbar[j] = c.f[j] - c.D[j] * st.fb.g;
      }
      stages.push_back(std::move(st));
    }
  }
  return ClosedLoop(grid, n, m, d, std::move(stages));
}

namespace {

MomentStage moment_rhs(const ClosedLoopStage& st, const MomentStage& y) {
  MomentStage out;
  out.m = st.Abar * y.m + st.ebar;
  Eigen::MatrixXd AS = st.Abar * y.S;
  Eigen::MatrixXd em = st.ebar * y.m.transpose();
  out.S = AS + AS.transpose() + em + em.transpose();
  for (std::size_t j = 0; j < st.Cbar.size(); ++j) {
    const Eigen::MatrixXd CSC = st.Cbar[j] * y.S * st.Cbar[j].transpose();
    const Eigen::MatrixXd Cmf = (st.Cbar[j] * y.m) * st.fbar[j].transpose();
    out.S += CSC + Cmf + Cmf.transpose() + st.fbar[j] * st.fbar[j].transpose();
  }
  return out;
}

MomentStage step(const MomentStage& y, double h, const MomentStage& k) {
  return {y.m + h * k.m, y.S + h * k.S};
}

}  // namespace

MomentPath integrate_moments(const ClosedLoop& cl, const Eigen::VectorXd& x0) {
  const TimeGrid& grid = cl.grid();
  const std::size_t K = grid.steps();
  const double h = grid.dt();
  MomentPath out;
  out.grid = grid;
  out.nodes.reserve(K + 1);
  out.stages.reserve(3 * K);
  MomentStage y{x0, x0 * x0.transpose()};
  out.nodes.push_back(y);
  for (std::size_t k = 0; k < K; ++k) {
    const MomentStage k1 = moment_rhs(cl.at(k, Stage::kLeft), y);
    const MomentStage y2 = step(y, 0.5 * h, k1);
    const MomentStage k2 = moment_rhs(cl.at(k, Stage::kMid), y2);
    const MomentStage y3 = step(y, 0.5 * h, k2);
    const MomentStage k3 = moment_rhs(cl.at(k, Stage::kMid), y3);
    const MomentStage y4 = step(y, h, k3);
    const MomentStage k4 = moment_rhs(cl.at(k, Stage::kRight), y4);
    out.stages.push_back(y);
    out.stages.push_back({0.5 * (y2.m + y3.m), 0.5 * (y2.S + y3.S)});
    out.stages.push_back(y4);
    y.m += (h / 6.0) * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
    y.S += (h / 6.0) * (k1.S + 2.0 * k2.S + 2.0 * k3.S + k4.S);
    y.S = 0.5 * (y.S + y.S.transpose()).eval();
    out.nodes.push_back(y);
  }
  return out;
}

double stage_quadrature(const TimeGrid& grid,
                        const std::function<double(std::size_t, Stage)>& integrand) {
  double total = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    total += integrand(k, Stage::kLeft) + 4.0 * integrand(k, Stage::kMid) +
             integrand(k, Stage::kRight);
  }
  return total * grid.dt() / 6.0;
}

StageExpectations expectations(const ClosedLoopStage& st, const MomentStage& mo) {
  const StageFeedback& fb = st.fb;
  StageExpectations e;
  e.x = mo.m;
  e.xx = mo.S;
  e.u = -fb.G * mo.m - fb.g;
  e.p = fb.P * mo.m + fb.phi;
  e.xp = mo.S * fb.P + mo.m * fb.phi.transpose();
  e.up = -fb.G * e.xp - fb.g * e.p.transpose();
  e.ux = -fb.G * mo.S - fb.g * mo.m.transpose();
  e.uu = -e.ux * fb.G.transpose() - e.u * fb.g.transpose();
  const std::size_t d = st.Cbar.size();
  e.q.resize(d);
  e.xq.resize(d);
  e.uq.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    e.q[j] = fb.P * (st.Cbar[j] * mo.m + st.fbar[j]);
    e.xq[j] = (mo.S * st.Cbar[j].transpose() + mo.m * st.fbar[j].transpose()) * fb.P;
    e.uq[j] = -fb.G * e.xq[j] - fb.g * e.q[j].transpose();
  }
  return e;
}

}  // namespace stocsens::lq
