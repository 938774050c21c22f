#include "stocsens/lq/spec.hpp"

#include <string>

#include "stocsens/core/error.hpp"

namespace stocsens::lq {

LQSpec LQSpec::zeros(Eigen::Index n, Eigen::Index m, Eigen::Index d) {
  LQSpec s;
  s.n = n;
  s.m = m;
  s.d = d;
  s.x0 = Eigen::VectorXd::Zero(n);
  s.A = TimeFunction(n, n);
  s.B = TimeFunction(n, m);
  s.C.assign(static_cast<std::size_t>(d), TimeFunction(n, n));
  s.D.assign(static_cast<std::size_t>(d), TimeFunction(n, m));
  s.e = TimeFunction(n, 1);
  s.f.assign(static_cast<std::size_t>(d), TimeFunction(n, 1));
  s.Q = TimeFunction(n, n);
  s.N = TimeFunction::constant(Eigen::MatrixXd::Identity(m, m));
  s.M = Eigen::MatrixXd::Zero(n, n);
  return s;
}

namespace {

void check_shape(const TimeFunction& f, Eigen::Index rows, Eigen::Index cols,
                 const std::string& name) {
  if (f.rows() != rows || f.cols() != cols) {
    fail(ErrorKind::kInvalidArgument,
         name + ": expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
             ", got " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
  }
}

double min_eigenvalue(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

void check_symmetric(const Eigen::MatrixXd& s, double tol, const std::string& name) {
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    fail(ErrorKind::kInvalidArgument, name + ": matrix is not symmetric");
  }
}

}  // namespace

void validate(const LQSpec& spec, const TimeGrid& grid, const ValidationOptions& opts) {
  const auto n = spec.n, m = spec.m, d = spec.d;
  require(n >= 1 && m >= 1 && d >= 1, "lq spec: n, m and d must be positive");
  require(spec.x0.size() == n, "x0: expected " + std::to_string(n) + " entries");
  require(spec.x0.allFinite(), "x0: non-finite entry");
  check_shape(spec.A, n, n, "A");
  check_shape(spec.B, n, m, "B");
  check_shape(spec.e, n, 1, "e");
  check_shape(spec.Q, n, n, "Q");
  check_shape(spec.N, m, m, "N");
  require(spec.M.rows() == n && spec.M.cols() == n, "M: expected shape n x n");
  require(spec.M.allFinite(), "M: non-finite entry");
  const auto dd = static_cast<std::size_t>(d);
  require(spec.C.size() == dd && spec.D.size() == dd && spec.f.size() == dd,
          "lq spec: C, D and f must have one entry per Brownian component");
  for (std::size_t j = 0; j < dd; ++j) {
    check_shape(spec.C[j], n, n, "C[" + std::to_string(j) + "]");
    check_shape(spec.D[j], n, m, "D[" + std::to_string(j) + "]");
    check_shape(spec.f[j], n, 1, "f[" + std::to_string(j) + "]");
    spec.C[j].check_on_grid(grid, "C");
    spec.D[j].check_on_grid(grid, "D");
    spec.f[j].check_on_grid(grid, "f");
  }
  spec.A.check_on_grid(grid, "A");
  spec.B.check_on_grid(grid, "B");
  spec.e.check_on_grid(grid, "e");
  spec.Q.check_on_grid(grid, "Q");
  spec.N.check_on_grid(grid, "N");

  check_symmetric(spec.M, opts.symmetry_tol, "M");
  if (min_eigenvalue(spec.M) < -opts.psd_tol * std::max(1.0, spec.M.norm())) {
    fail(ErrorKind::kInvalidArgument, "M: terminal weight must be positive semidefinite");
  }
  if (opts.require_positive_control_weight) {
    require(spec.delta > 0.0, "delta: control-weight bound must be positive");
  }
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      const Eigen::MatrixXd q = spec.Q.at(grid, k, s);
      check_symmetric(q, opts.symmetry_tol, "Q");
      if (min_eigenvalue(q) < -opts.psd_tol * std::max(1.0, q.norm())) {
        fail(ErrorKind::kInvalidArgument,
             "Q: state weight must be positive semidefinite (step " + std::to_string(k) + ")");
      }
      const Eigen::MatrixXd nn = spec.N.at(grid, k, s);
      check_symmetric(nn, opts.symmetry_tol, "N");
      if (opts.require_positive_control_weight && min_eigenvalue(nn) < spec.delta) {
        fail(ErrorKind::kInvalidArgument,
             "N: control weight must be uniformly positive definite, smallest eigenvalue " +
                 format_number(min_eigenvalue(nn)) + " < delta = " +
                 format_number(spec.delta) + " (step " + std::to_string(k) + ")");
      }
    }
    if (spec.Q.is_constant() && spec.N.is_constant()) break;
  }
}

StageCoefficients evaluate(const LQSpec& spec, const TimeGrid& grid, std::size_t k, Stage s) {
  StageCoefficients c;
  c.A = spec.A.at(grid, k, s);
  c.B = spec.B.at(grid, k, s);
  c.Q = spec.Q.at(grid, k, s);
  c.N = spec.N.at(grid, k, s);
  c.e = spec.e.at(grid, k, s);
  const auto dd = static_cast<std::size_t>(spec.d);
  c.C.resize(dd);
  c.D.resize(dd);
  c.f.resize(dd);
  for (std::size_t j = 0; j < dd; ++j) {
    c.C[j] = spec.C[j].at(grid, k, s);
    c.D[j] = spec.D[j].at(grid, k, s);
    c.f[j] = spec.f[j].at(grid, k, s);
  }
  return c;
}

CoefficientTable::CoefficientTable(const LQSpec& spec, const TimeGrid& grid) {
  table_.reserve(3 * grid.steps());
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (Stage s : {Stage::kLeft, Stage::kMid, Stage::kRight}) {
      table_.push_back(evaluate(spec, grid, k, s));
    }
  }
}

}  // namespace stocsens::lq
