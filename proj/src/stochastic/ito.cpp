#include "stocsens/stochastic/ito.hpp"

#include <vector>

#include "stocsens/core/error.hpp"

namespace stocsens {

ItoTriple::ItoTriple(Eigen::VectorXd x0, PathField drift, PathField diffusion)
    : x0_(std::move(x0)), drift_(std::move(drift)), diffusion_(std::move(diffusion)) {
  require(drift_.rows() == x0_.size() && drift_.cols() == 1,
          "ito triple: drift blocks must be n x 1");
  require(diffusion_.rows() == x0_.size() && diffusion_.cols() >= 1,
          "ito triple: diffusion blocks must be n x d");
  require(drift_.n_paths() == diffusion_.n_paths() && drift_.n_times() == diffusion_.n_times(),
          "ito triple: drift and diffusion must share n_paths and K");
  require(x0_.allFinite() && drift_.all_finite() && diffusion_.all_finite(),
          "ito triple: non-finite entry");
}

ItoTriple ItoTriple::constant(const Eigen::VectorXd& x0, const Eigen::VectorXd& drift,
                              const Eigen::MatrixXd& diffusion, std::size_t n_paths,
                              std::size_t steps) {
  PathField a(n_paths, steps, drift.size(), 1);
  PathField b(n_paths, steps, diffusion.rows(), diffusion.cols());
  for (std::size_t p = 0; p < n_paths; ++p) {
    for (std::size_t k = 0; k < steps; ++k) {
      a.at(p, k) = drift;
      b.at(p, k) = diffusion;
    }
  }
  return ItoTriple(x0, std::move(a), std::move(b));
}

ItoTriple ItoTriple::axpy(double alpha, const ItoTriple& other) const {
  require(drift_.same_shape(other.drift_) && diffusion_.same_shape(other.diffusion_),
          "ito triple: shape mismatch in axpy");
  PathField a = other.drift_;
  PathField b = other.diffusion_;
  auto ad = a.data();
  auto bd = b.data();
  const auto da = drift_.data();
  const auto db = diffusion_.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += alpha * da[i];
  for (std::size_t i = 0; i < bd.size(); ++i) bd[i] += alpha * db[i];
  return ItoTriple(alpha * x0_ + other.x0_, std::move(a), std::move(b));
}

namespace {

void check_against(const ItoTriple& t, const BrownianEnsemble& w) {
  require(t.n_paths() == w.n_paths() && t.steps() == w.steps(),
          "ito triple: n_paths / K differ from the Brownian ensemble");
  require(static_cast<std::size_t>(t.noise_dim()) == w.dim(),
          "ito triple: diffusion columns differ from the Brownian dimension");
}

void check_pair(const ItoTriple& a, const ItoTriple& b) {
  require(a.dim() == b.dim() && a.noise_dim() == b.noise_dim() &&
              a.n_paths() == b.n_paths() && a.steps() == b.steps(),
          "ito triple: dimension mismatch between operands");
}

// x(t_{k+1}) = x(t_k) + drift_k dt + diffusion_k dW_k for one path.
void evaluate_path(const ItoTriple& t, std::span<const double> dw, double dt,
                   std::size_t p, PathField& out) {
  const std::size_t steps = t.steps();
  const auto d = t.noise_dim();
  out.at(p, 0) = t.x0();
  for (std::size_t k = 0; k < steps; ++k) {
    Eigen::Map<const Eigen::VectorXd> inc(dw.data() + k * d, d);
    out.at(p, k + 1).noalias() =
        out.at(p, k) + t.drift().at(p, k) * dt + t.diffusion().at(p, k) * inc;
  }
}

}  // namespace

PathField ito_evaluate(const ItoTriple& triple, const BrownianEnsemble& w, Exec exec) {
  check_against(triple, w);
  PathField out(triple.n_paths(), triple.steps() + 1, triple.dim(), 1);
  const double dt = w.grid().dt();
  const std::size_t per_path = w.steps() * w.dim();
  for_each_path(exec, triple.n_paths(), [&](std::size_t p) {
    std::vector<double> dw(per_path);
    w.path_increments(p, dw);
    evaluate_path(triple, dw, dt, p, out);
  });
  return out;
}

double inner_product_I(const ItoTriple& a, const ItoTriple& b, const BrownianEnsemble& w,
                       Exec exec) {
  check_pair(a, b);
  check_against(a, w);
  const double dt = w.grid().dt();
  std::vector<double> per_path(a.n_paths());
  for_each_path(exec, a.n_paths(), [&](std::size_t p) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.steps(); ++k) {
      s += a.drift().at(p, k).cwiseProduct(b.drift().at(p, k)).sum();
      s += a.diffusion().at(p, k).cwiseProduct(b.diffusion().at(p, k)).sum();
    }
    per_path[p] = s * dt;
  });
  return a.x0().dot(b.x0()) + estimate_mean(per_path).mean;
}

Estimate integration_by_parts_residual(const ItoTriple& a, const ItoTriple& b,
                                       const BrownianEnsemble& w, Exec exec) {
  check_pair(a, b);
  check_against(a, w);
  const double dt = w.grid().dt();
  const std::size_t steps = a.steps();
  const std::size_t per_path = w.steps() * w.dim();
  const double initial = a.x0().dot(b.x0());
  std::vector<double> residual(a.n_paths());
  // Evaluate path by path so the state paths are never stored in full.
  for_each_path(exec, a.n_paths(), [&](std::size_t p) {
    std::vector<double> dw(per_path);
    w.path_increments(p, dw);
    const auto d = a.noise_dim();
    Eigen::VectorXd x = a.x0();
    Eigen::VectorXd y = b.x0();
    double integral = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      const auto x1 = a.drift().at(p, k);
      const auto y1 = b.drift().at(p, k);
      const auto x2 = a.diffusion().at(p, k);
      const auto y2 = b.diffusion().at(p, k);
      integral += (x.dot(y1.col(0)) + y.dot(x1.col(0)) + x2.cwiseProduct(y2).sum()) * dt;
      Eigen::Map<const Eigen::VectorXd> inc(dw.data() + k * d, d);
      x += x1 * dt + x2 * inc;
      y += y1 * dt + y2 * inc;
    }
    residual[p] = x.dot(y) - initial - integral;
  });
  return estimate_mean(residual);
}

}  // namespace stocsens
