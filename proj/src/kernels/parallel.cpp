// OpenMP kernels. Work is split over independent output rows (columns for
// col_sums); each element is accumulated in the same order as the serial
// reference.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>

#include "rankrelax/kernels.hpp"

namespace rankrelax::kernels {

namespace {
std::atomic<Execution> g_execution{Execution::parallel};

using Index = std::ptrdiff_t;
}  // namespace

void set_execution(Execution mode) noexcept { g_execution.store(mode, std::memory_order_relaxed); }
Execution execution() noexcept { return g_execution.load(std::memory_order_relaxed); }

namespace parallel {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out, std::size_t m,
            std::size_t k, std::size_t n) {
  const Index rows = static_cast<Index>(m);
#pragma omp parallel for schedule(static) if (m * n * k >= kParallelThreshold)
  for (Index i = 0; i < rows; ++i) {
    double* row = out.data() + i * n;
    std::fill(row, row + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
    }
  }
}

void transpose(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  const Index r = static_cast<Index>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (Index i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j * rows + i] = in[i * cols + j];
  }
}

void softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  const Index r = static_cast<Index>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (Index i = 0; i < r; ++i) {
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
  const Index r = static_cast<Index>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (Index i = 0; i < r; ++i) {
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
  const Index r = static_cast<Index>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (Index i = 0; i < r; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) total += in[i * cols + j];
    out[i] = total;
  }
}

void col_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  const Index c = static_cast<Index>(cols);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (Index j = 0; j < c; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) total += in[i * cols + j];
    out[j] = total;
  }
}

void normalize_rows(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols) {
  const Index r = static_cast<Index>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (Index i = 0; i < r; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) total += in[i * cols + j];
    sums[i] = total;
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = in[i * cols + j] / total;
  }
}

void normalize_cols(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols) {
  col_sums(in, sums, rows, cols);
  const Index r = static_cast<Index>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (Index i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = in[i * cols + j] / sums[j];
  }
}

}  // namespace parallel

#define RANKRELAX_DISPATCH(name, work, ...)            \
  do {                                                 \
    if (use_parallel(work)) {                          \
      parallel::name(__VA_ARGS__);                     \
    } else {                                           \
      serial::name(__VA_ARGS__);                       \
    }                                                  \
  } while (false)

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out, std::size_t m,
            std::size_t k, std::size_t n) {
  RANKRELAX_DISPATCH(matmul, m * k * n, a, b, out, m, k, n);
}
void transpose(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  RANKRELAX_DISPATCH(transpose, rows * cols, in, out, rows, cols);
}
void softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  RANKRELAX_DISPATCH(softmax_rows, rows * cols, in, out, rows, cols);
}
void log_softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  RANKRELAX_DISPATCH(log_softmax_rows, rows * cols, in, out, rows, cols);
}
void row_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  RANKRELAX_DISPATCH(row_sums, rows * cols, in, out, rows, cols);
}
void col_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols) {
  RANKRELAX_DISPATCH(col_sums, rows * cols, in, out, rows, cols);
}
void normalize_rows(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols) {
  RANKRELAX_DISPATCH(normalize_rows, rows * cols, in, out, sums, rows, cols);
}
void normalize_cols(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols) {
  RANKRELAX_DISPATCH(normalize_cols, rows * cols, in, out, sums, rows, cols);
}

#undef RANKRELAX_DISPATCH

}  // namespace rankrelax::kernels
