#pragma once

#include "stocsens/mv/closed_form.hpp"
#include "stocsens/mv/dual.hpp"
#include "stocsens/sens/fd.hpp"

namespace stocsens::sens {

/// Direction in the mean-variance parameters (x, r, A, mu, sigma).
struct MVPerturbation {
  double dx = 0.0;
  TimeFunction dr = TimeFunction(1, 1);
  double dA = 0.0;
  TimeFunction dmu;     ///< d x 1
  TimeFunction dsigma;  ///< d x d

  static MVPerturbation zeros(const mv::MVSpec& spec);
};

void check_shapes(const mv::MVSpec& spec, const MVPerturbation& pert);

/// spec + s * pert.
mv::MVSpec perturbed(const mv::MVSpec& spec, const MVPerturbation& pert, double s);

inline constexpr const char* kMVBlocks[] = {"D_x", "D_r", "D_A", "D_mu", "D_sigma"};

/// The five terms
///   D_x = p(0) dx,  D_r = E int p (X - pi'1) dr dt,  D_A = -lambda_E dA,
///   D_mu = E int p pi'dmu dt,  D_sigma = E int pi'dsigma q' dt,
/// with expectations integrated from the moments of the optimal wealth.
SensitivityReport dv_mv(const mv::MVSolution& sol, const MVPerturbation& pert);

/// Same terms by left-point Monte Carlo sums over the stored optimal paths.
SensitivityReport dv_mv_mc(const mv::MVSolution& sol, const MVPerturbation& pert);

/// Which solver evaluates the value along a ray.
enum class MVValueMethod { kClosedForm, kDual };

/// s -> optimal value of spec + s * pert (deterministic; no paths).
RayValue mv_value_ray(const mv::MVSpec& spec, const MVPerturbation& pert, const TimeGrid& grid,
                      MVValueMethod method, const mv::DualOptions& dual = {});

double ray_scale(const MVPerturbation& pert, const TimeGrid& grid);

}  // namespace stocsens::sens
