#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace stocsens {

/// Dense per-path, per-time-index block of rows x cols values, stored
/// path-major so a whole path is contiguous (one path = one work item of the
/// parallel kernels). Each block is column-major like Eigen.
class PathField {
 public:
  using Block = Eigen::Map<Eigen::MatrixXd>;
  using ConstBlock = Eigen::Map<const Eigen::MatrixXd>;

  PathField() = default;
  PathField(std::size_t n_paths, std::size_t n_times, Eigen::Index rows,
            Eigen::Index cols = 1, double fill = 0.0)
      : n_paths_(n_paths),
        n_times_(n_times),
        rows_(rows),
        cols_(cols),
        data_(n_paths * n_times * static_cast<std::size_t>(rows * cols), fill) {}

  std::size_t n_paths() const { return n_paths_; }
  std::size_t n_times() const { return n_times_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  std::size_t block_size() const { return static_cast<std::size_t>(rows_ * cols_); }

  Block at(std::size_t p, std::size_t k) { return Block(ptr(p, k), rows_, cols_); }
  ConstBlock at(std::size_t p, std::size_t k) const {
    return ConstBlock(ptr(p, k), rows_, cols_);
  }

  /// Scalar entry shortcut for rows x 1 fields.
  double& operator()(std::size_t p, std::size_t k, Eigen::Index i = 0) {
    return ptr(p, k)[i];
  }
  double operator()(std::size_t p, std::size_t k, Eigen::Index i = 0) const {
    return ptr(p, k)[i];
  }

  std::span<double> path(std::size_t p) {
    return {data_.data() + p * n_times_ * block_size(), n_times_ * block_size()};
  }
  std::span<const double> path(std::size_t p) const {
    return {data_.data() + p * n_times_ * block_size(), n_times_ * block_size()};
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool same_shape(const PathField& o) const {
    return n_paths_ == o.n_paths_ && n_times_ == o.n_times_ && rows_ == o.rows_ &&
           cols_ == o.cols_;
  }

  bool all_finite() const;

 private:
  double* ptr(std::size_t p, std::size_t k) {
    return data_.data() + (p * n_times_ + k) * block_size();
  }
  const double* ptr(std::size_t p, std::size_t k) const {
    return data_.data() + (p * n_times_ + k) * block_size();
  }

  std::size_t n_paths_ = 0;
  std::size_t n_times_ = 0;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<double> data_;
};

inline bool PathField::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace stocsens
