#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rankrelax {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t element_count(const Shape& shape);

/// Dense row-major array of doubles. Rank 0 (scalar), 1 (vector) and
/// 2 (matrix) are the only ranks the operation set produces.
///
/// Arrays are immutable once built: construct the data vector first, then
/// move it in. This makes read-only sharing across threads safe.
class Array {
 public:
  Array() : data_(1, 0.0) {}
  Array(Shape shape, std::vector<double> data);

  static Array scalar(double value);
  static Array vector(std::vector<double> values);
  static Array matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Array zeros(Shape shape);
  static Array full(Shape shape, double value);
  static Array identity(std::size_t n);

  [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool is_scalar() const noexcept { return data_.size() == 1 && shape_.empty(); }

  // Matrix view of the array: rank 1 reads as a single row.
  [[nodiscard]] std::size_t rows() const noexcept;
  [[nodiscard]] std::size_t cols() const noexcept;

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return data_[i]; }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const noexcept { return data_[r * cols() + c]; }
  [[nodiscard]] double item() const;

  [[nodiscard]] bool all_finite() const noexcept;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace rankrelax
