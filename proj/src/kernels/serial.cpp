// Reference kernels. The parallel versions in parallel.cpp must reproduce
// these results bit for bit.

#include <algorithm>
#include <cmath>

#include "rankrelax/kernels.hpp"

namespace rankrelax::kernels::serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out, std::size_t m,
            std::size_t k, std::size_t n) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
    }
  }
}

void transpose(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j * rows + i] = in[i * cols + j];
  }
}

void softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* x = in.data() + i * cols;
    double* y = out.data() + i * cols;
    const double top = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      y[j] = shifted_exp(x[j] - top);
      total += y[j];
    }
    for (std::size_t j = 0; j < cols; ++j) y[j] /= total;
  }
}

void log_softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* x = in.data() + i * cols;
    double* y = out.data() + i * cols;
    const double top = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) total += shifted_exp(x[j] - top);
    const double lse = top + std::log(total);
    for (std::size_t j = 0; j < cols; ++j) y[j] = x[j] - lse;
  }
}

void row_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) total += in[i * cols + j];
    out[i] = total;
  }
}

void col_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(cols), 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j] += in[i * cols + j];
  }
}

void normalize_rows(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols) {
  row_sums(in, sums, rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = in[i * cols + j] / sums[i];
  }
}

void normalize_cols(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols) {
  col_sums(in, sums, rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = in[i * cols + j] / sums[j];
  }
}

}  // namespace rankrelax::kernels::serial
