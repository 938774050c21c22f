#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "stocsens/core/exec.hpp"
#include "stocsens/core/path_field.hpp"
#include "stocsens/lq/solve.hpp"
#include "stocsens/mv/reduce.hpp"
#include "stocsens/mv/spec.hpp"
#include "stocsens/stochastic/brownian.hpp"

namespace stocsens::mv {

enum class MVMethod { kClosedForm, kDual };

/// Affine map from the working LQ coordinates (state Y, control u, adjoint
/// p, q) to the original problem at one stage:
///   X = x_scale Y + x_shift,  pi = pi_scale u,  (p, q) = adj_scale (p, q).
/// `discount` is e^{int_0^t r}.
struct UnwindStage {
  double x_scale = 1.0;
  double x_shift = 0.0;
  double pi_scale = 1.0;
  double adj_scale = 1.0;
  double discount = 1.0;
};

/// Optimal mean-variance solution.
///
/// The optimum is Markov in wealth: it is stored as a scalar LQ problem in
/// working coordinates plus the unwind maps, so paths can be regenerated on
/// any ensemble and expectations can be integrated from moments. The path
/// fields are filled on the solve ensemble unless disabled:
/// X_bar, p_bar: n_paths x (K+1) scalars; pi_bar: n_paths x K blocks d x 1;
/// q_bar: n_paths x K blocks 1 x d (row convention).
struct MVSolution {
  MVSpec spec;
  TimeGrid grid;
  MVMethod method = MVMethod::kDual;
  std::shared_ptr<const lq::LQModel> work;
  std::vector<UnwindStage> unwind;  ///< 3 per step
  double lambda_E = 0.0;
  double lambda_work = 0.0;  ///< multiplier in working coordinates
  double value = 0.0;
  /// Closed form only: Sigma on each step and the left sums of Sigma^2.
  std::vector<double> Sigma;
  std::vector<double> S_nodes;

  PathField X_bar, pi_bar, p_bar, q_bar;

  const UnwindStage& unwind_at(std::size_t k, Stage s) const {
    return unwind[3 * k + static_cast<std::size_t>(s)];
  }
  const UnwindStage& unwind_node(std::size_t k) const {
    return k == grid.steps() ? unwind_at(k - 1, Stage::kRight) : unwind_at(k, Stage::kLeft);
  }
  bool has_paths() const { return X_bar.n_paths() > 0; }
};

/// One grid point of an optimal path in original coordinates. pi and q are
/// set for k < K only.
struct MVPoint {
  std::size_t k = 0;
  double X = 0.0;
  Eigen::VectorXd pi;
  double p = 0.0;
  Eigen::RowVectorXd q;
};

/// Generates one optimal path from its K*d increments. Closed-form
/// solutions use the exact exponential formulas with left-point sums for
/// int Sigma dW and int Sigma^2 dt; dual solutions use Euler-Maruyama on the
/// working LQ state.
template <class Visit>
void walk_mv(const MVSolution& sol, std::span<const double> dW, Visit&& visit) {
  const lq::ClosedLoop& cl = sol.work->loop;
  const std::size_t K = sol.grid.steps();
  const double dt = sol.grid.dt();
  const auto d = static_cast<std::size_t>(sol.spec.d);
  double Y = sol.work->spec.x0(0);
  MVPoint pt;
  pt.pi.resize(sol.spec.d);
  pt.q.resize(sol.spec.d);
  for (std::size_t k = 0; k < K; ++k) {
    const lq::ClosedLoopStage& st = cl.at(k, Stage::kLeft);
    const UnwindStage& uw = sol.unwind_at(k, Stage::kLeft);
    const double P = st.fb.P(0, 0);
    pt.k = k;
    pt.X = uw.x_scale * Y + uw.x_shift;
    pt.pi = -uw.pi_scale * (st.fb.G.col(0) * Y + st.fb.g);
    pt.p = uw.adj_scale * (P * Y + st.fb.phi(0));
    double next = 0.0;
    if (sol.method == MVMethod::kClosedForm) {
      const double s = sol.Sigma[k];
      next = Y * std::exp(-(s * dW[k] + 1.5 * s * s * dt));
    } else {
      next = Y + dt * (st.Abar(0, 0) * Y + st.ebar(0));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double vol = st.Cbar[j](0, 0) * Y + st.fbar[j](0);
      pt.q(static_cast<Eigen::Index>(j)) = uw.adj_scale * P * vol;
      if (sol.method == MVMethod::kDual) next += vol * dW[k * d + j];
    }
    visit(static_cast<const MVPoint&>(pt));
    Y = next;
  }
  const lq::ClosedLoopStage& last = cl.node(K);
  const UnwindStage& uw = sol.unwind_node(K);
  pt.k = K;
  pt.X = uw.x_scale * Y + uw.x_shift;
  pt.p = uw.adj_scale * (last.fb.P(0, 0) * Y + last.fb.phi(0));
  pt.pi.resize(0);
  pt.q.resize(0);
  visit(static_cast<const MVPoint&>(pt));
}

/// Fills the path fields of `sol` on `w`.
void materialize(MVSolution& sol, const BrownianEnsemble& w, Exec exec = Exec::kParallel);

/// Working LQ problem for multiplier `lambda` in the state Y = X - A + lambda/2:
/// n = 1, m = d, A = r, B = (mu - r 1)', D_j = (column j of sigma)', e = r (A - lambda/2),
/// C = f = Q = N = 0, M = 2. Its value minus lambda^2/4 is the inner dual function.
lq::LQSpec working_spec(const MVSpec& spec, double lambda);

/// Unwind maps when the working problem is the reduced one with multiplier
/// lambda' (Y = X' + lambda'/2).
std::vector<UnwindStage> reduced_unwind(const Reduction& red, const TimeGrid& grid, double A,
                                        double lambda_work);

/// Unwind maps when the working problem is posed directly in original
/// coordinates (Y = X - A + lambda/2).
std::vector<UnwindStage> direct_unwind(const CumulativeIntegral& R, const TimeGrid& grid,
                                       double A, double lambda);

/// Riccati options for working problems: N = 0 is admissible because the
/// gain matrix P sigma sigma' stays positive definite.
lq::RiccatiOptions working_riccati_options();

}  // namespace stocsens::mv
