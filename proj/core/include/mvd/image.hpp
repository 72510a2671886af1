#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mvd/manifold.hpp"

namespace mvd {

struct GridIndex {
  int row = 0;
  int col = 0;
  bool operator==(const GridIndex&) const = default;
};

/// rows x cols grid of manifold-valued pixels. Pixels are stored row-major,
/// each pixel occupying ambient_len consecutive reals.
class ManifoldImage {
 public:
  ManifoldImage() = default;
  ManifoldImage(Manifold m, int rows, int cols, std::vector<double> data);
  /// Every pixel a copy of `value`.
  static ManifoldImage filled(Manifold m, int rows, int cols, std::span<const double> value);

  const Manifold& manifold() const noexcept { return m_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_); }
  std::size_t stride() const noexcept { return static_cast<std::size_t>(m_.ambient_len()); }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(col);
  }
  bool contains(int row, int col) const noexcept { return row >= 0 && col >= 0 && row < rows_ && col < cols_; }

  std::span<const double> pixel(std::size_t idx) const { return {data_.data() + idx * stride(), stride()}; }
  std::span<double> pixel(std::size_t idx) { return {data_.data() + idx * stride(), stride()}; }
  std::span<const double> pixel(int row, int col) const { return pixel(index(row, col)); }
  std::span<double> pixel(int row, int col) { return pixel(index(row, col)); }

  Point point(int row, int col) const { return Point(m_, pixel(row, col)); }
  void set(int row, int col, std::span<const double> value);

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  /// Index of the first pixel failing validate(), or size() if none.
  std::size_t first_invalid_pixel() const;

 private:
  Manifold m_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace mvd
