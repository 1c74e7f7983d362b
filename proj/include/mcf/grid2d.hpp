#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcf {

/// Row-major 2-D array of doubles. Row index is the slow (axial / x) direction.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int rows, int cols, double fill = 0.0);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int k) noexcept { return data_[static_cast<std::size_t>(i) * cols_ + k]; }
  double operator()(int i, int k) const noexcept {
    return data_[static_cast<std::size_t>(i) * cols_ + k];
  }

  std::span<double> row(int i) noexcept {
    return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int i) const noexcept {
    return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> values() const noexcept { return data_; }

  void fill(double v);

  bool operator==(const Grid2D&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace mcf
