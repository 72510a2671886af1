#include "mvd/image.hpp"

#include <algorithm>

#include "mvd/errors.hpp"

namespace mvd {

ManifoldImage ManifoldImage::filled(Manifold m, int rows, int cols, std::span<const double> value) {
  if (rows < 0 || cols < 0) throw ShapeError("image dimensions must be non-negative");
  if (value.size() != static_cast<std::size_t>(m.ambient_len())) throw ShapeError("fill value has the wrong length");
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * value.size());
  for (int i = 0; i < rows * cols; ++i) data.insert(data.end(), value.begin(), value.end());
  return ManifoldImage(m, rows, cols, std::move(data));
}

ManifoldImage::ManifoldImage(Manifold m, int rows, int cols, std::vector<double> data)
    : m_(m), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0) throw ShapeError("image dimensions must be non-negative");
  if (data_.size() != size() * stride()) throw ShapeError("image payload length does not match dimensions");
}

void ManifoldImage::set(int row, int col, std::span<const double> value) {
  if (value.size() != stride()) throw ShapeError("pixel value has the wrong length");
  std::copy(value.begin(), value.end(), pixel(row, col).begin());
}

std::size_t ManifoldImage::first_invalid_pixel() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!validate(m_, pixel(i))) return i;
  }
  return size();
}

}  // namespace mvd
