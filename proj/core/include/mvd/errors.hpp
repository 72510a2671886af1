#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mvd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched manifolds, lengths or matrix shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a formula (boundary of the simplex,
/// non-positive variance, patch crossing the image border, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// log_x(y) requested for y in the cut locus of x. `index()` names the
/// offending point or product component.
class CutLocusError : public Error {
 public:
  explicit CutLocusError(const std::string& what, std::size_t index = 0)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Karcher iteration did not reach the gradient tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double grad_norm)
      : Error(what), grad_norm_(grad_norm) {}
  double grad_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

/// Malformed .mvi file. `offset()` is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// A decoded or supplied pixel is not a valid point of its manifold.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t pixel)
      : Error(what), pixel_(pixel) {}
  std::size_t pixel() const noexcept { return pixel_; }

 private:
  std::size_t pixel_;
};

/// Failure while processing one patch group of the denoiser.
class GroupError : public Error {
 public:
  GroupError(const std::string& what, int row, int col)
      : Error(what), row_(row), col_(col) {}
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int row_;
  int col_;
};

}  // namespace mvd
