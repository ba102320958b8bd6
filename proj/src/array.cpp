#include "rankrelax/array.hpp"

#include <cmath>
#include <utility>

#include "rankrelax/error.hpp"

namespace rankrelax {

std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Array::Array(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_) {
    if (d == 0) throw ShapeError("array: dimensions must be positive, got " + to_string(shape_));
  }
  if (data_.size() != element_count(shape_)) {
    throw ShapeError("array: shape " + to_string(shape_) + " needs " + std::to_string(element_count(shape_)) +
                     " values, got " + std::to_string(data_.size()));
  }
}

Array Array::scalar(double value) { return Array({}, {value}); }

Array Array::vector(std::vector<double> values) {
  const auto n = values.size();
  return Array({n}, std::move(values));
}

Array Array::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Array({rows, cols}, std::move(values));
}

Array Array::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Array Array::full(Shape shape, double value) {
  const auto n = element_count(shape);
  return Array(std::move(shape), std::vector<double>(n, value));
}

Array Array::identity(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return matrix(n, n, std::move(v));
}

std::size_t Array::rows() const noexcept {
  if (shape_.size() == 2) return shape_[0];
  return 1;
}

std::size_t Array::cols() const noexcept {
  if (shape_.size() == 2) return shape_[1];
  if (shape_.size() == 1) return shape_[0];
  return 1;
}

double Array::item() const {
  if (data_.size() != 1) throw ShapeError("item: array of shape " + to_string(shape_) + " is not a scalar");
  return data_[0];
}

bool Array::all_finite() const noexcept {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace rankrelax
