#include "stocsens/mv/dual.hpp"

#include <cmath>
#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens::mv {

namespace {

struct Inner {
  std::shared_ptr<const lq::LQModel> model;
  InnerSolve result;
};

Inner solve_inner(const MVSpec& working, const TimeGrid& grid, double lambda) {
  Inner in;
  in.model = lq::build_lq_model(working_spec(working, lambda), grid, working_riccati_options());
  const lq::MomentPath mo = lq::integrate_moments(in.model->loop, in.model->spec.x0);
  in.result.lambda = lambda;
  in.result.value = in.model->value - 0.25 * lambda * lambda;
  in.result.terminal_gap = mo.nodes.back().m(0) - 0.5 * lambda;
  return in;
}

// 2 x' / (e^S - 1) with S = int (mu - r)'(sigma sigma')^{-1}(mu - r): exact
// for the reduced problem with piecewise-constant data.
double initial_guess(const MVSpec& working, const TimeGrid& grid) {
  const TimeFunction excess = excess_drift(working);
  double S = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const Eigen::VectorXd m = excess.at(grid, k, Stage::kLeft);
    const Eigen::MatrixXd sg = working.sigma.at(grid, k, Stage::kLeft);
    S += m.dot((sg * sg.transpose()).ldlt().solve(m)) * grid.dt();
  }
  const double gap = working.x - working.A;
  return S > 0.0 ? 2.0 * gap / std::expm1(S) : 0.0;
}

}  // namespace

InnerSolve inner_dual(const MVSpec& spec, const TimeGrid& grid, double lambda, DualRoute route) {
  if (route == DualRoute::kReduced) {
    return solve_inner(reduce(spec, grid).reduced, grid, lambda).result;
  }
  validate(spec, grid);
  return solve_inner(spec, grid, lambda).result;
}

MVSolution solve_dual(const MVSpec& spec, const TimeGrid& grid, const BrownianEnsemble& w,
                      const DualOptions& opts) {
  require(opts.tol > 0.0, "solve_dual: tolerance must be positive");
  const Reduction red = reduce(spec, grid);
  const bool reduced = opts.route == DualRoute::kReduced;
  const MVSpec& working = reduced ? red.reduced : spec;

  double lambda0 = initial_guess(red.reduced, grid);
  if (!reduced) lambda0 *= red.multiplier_factor();
  Inner best = solve_inner(working, grid, lambda0);
  if (std::abs(best.result.terminal_gap) >= opts.tol) {
    const double lambda1 = lambda0 + 0.5 * std::max(1.0, std::abs(lambda0));
    const Inner second = solve_inner(working, grid, lambda1);
    const double slope =
        (second.result.terminal_gap - best.result.terminal_gap) / (lambda1 - lambda0);
    if (!std::isfinite(slope) || std::abs(slope) < 1e-14) {
      fail(ErrorKind::kDegenerateProblem,
           "solve_dual: terminal mean does not respond to the multiplier; the mean "
           "constraint cannot be bracketed");
    }
    best = solve_inner(working, grid, lambda0 - best.result.terminal_gap / slope);

    if (std::abs(best.result.terminal_gap) >= opts.tol) {
      // Bracket the root around the secant estimate, then bisect.
      const double dir = best.result.terminal_gap / slope > 0.0 ? -1.0 : 1.0;
      double step = std::max(std::abs(best.result.terminal_gap / slope), 1e-12);
      Inner a = best, b = best;
      bool bracketed = false;
      for (int i = 0; i < 60 && !bracketed; ++i) {
        b = solve_inner(working, grid, best.result.lambda + dir * step);
        bracketed = (a.result.terminal_gap > 0.0) != (b.result.terminal_gap > 0.0);
        step *= 2.0;
      }
      if (!bracketed) {
        fail(ErrorKind::kDegenerateProblem, "solve_dual: could not bracket the multiplier");
      }
      for (std::size_t i = 0; i < opts.max_bisections; ++i) {
        const Inner mid = solve_inner(working, grid, 0.5 * (a.result.lambda + b.result.lambda));
        best = mid;
        if (std::abs(mid.result.terminal_gap) < opts.tol) break;
        if ((mid.result.terminal_gap > 0.0) == (a.result.terminal_gap > 0.0)) {
          a = mid;
        } else {
          b = mid;
        }
      }
      if (std::abs(best.result.terminal_gap) >= opts.tol) {
        fail(ErrorKind::kConvergenceFailure,
             "solve_dual: |E[X(T)] - A| = " + format_number(std::abs(best.result.terminal_gap)) +
                 " after bisection, tolerance " + format_number(opts.tol));
      }
    }
  }

  MVSolution sol;
  sol.spec = spec;
  sol.grid = grid;
  sol.method = MVMethod::kDual;
  sol.work = best.model;
  sol.lambda_work = best.result.lambda;
  if (reduced) {
    sol.unwind = reduced_unwind(red, grid, spec.A, sol.lambda_work);
    sol.lambda_E = red.multiplier_factor() * sol.lambda_work;
    sol.value = red.scale * best.result.value;
  } else {
    sol.unwind = direct_unwind(red.R, grid, spec.A, sol.lambda_work);
    sol.lambda_E = sol.lambda_work;
    sol.value = best.result.value;
  }
  if (opts.store_paths) materialize(sol, w, opts.exec);
  return sol;
}

}  // namespace stocsens::mv
