#pragma once

// Dense numeric kernels behind the autodiff operations.
//
// Every kernel has a serial reference in `kernels::serial` and an OpenMP
// version in `kernels::parallel`. The parallel versions split work over
// independent output rows (or columns) and keep the serial accumulation order
// for each output element, so both produce bit-identical results. Tests rely
// on that.

#include <cmath>
#include <cstddef>
#include <span>

namespace rankrelax::kernels {

enum class Execution { serial, parallel };

void set_execution(Execution mode) noexcept;
[[nodiscard]] Execution execution() noexcept;

// Restores the previous mode on scope exit.
class ScopedExecution {
 public:
  explicit ScopedExecution(Execution mode) noexcept : previous_(execution()) { set_execution(mode); }
  ~ScopedExecution() { set_execution(previous_); }
  ScopedExecution(const ScopedExecution&) = delete;
  ScopedExecution& operator=(const ScopedExecution&) = delete;

 private:
  Execution previous_;
};

// Below this many output elements the parallel kernels stay on one thread.
inline constexpr std::size_t kParallelThreshold = 4096;

[[nodiscard]] inline bool use_parallel(std::size_t work) noexcept {
  return execution() == Execution::parallel && work >= kParallelThreshold;
}

// exp(d) rounds to +0 for every d below this, so the call can be skipped.
// Arguments in the subnormal range are slow on common libm builds.
inline constexpr double kExpZeroBelow = -746.0;

[[nodiscard]] inline double shifted_exp(double d) noexcept { return d < kExpZeroBelow ? 0.0 : std::exp(d); }

#define RANKRELAX_KERNEL_DECLS                                                                         \
  void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out, std::size_t m, \
              std::size_t k, std::size_t n);                                                            \
  void transpose(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols); \
  void softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols); \
  void log_softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows,             \
                        std::size_t cols);                                                               \
  void row_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols);  \
  void col_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols);  \
  void normalize_rows(std::span<const double> in, std::span<double> out, std::span<double> sums,         \
                      std::size_t rows, std::size_t cols);                                               \
  void normalize_cols(std::span<const double> in, std::span<double> out, std::span<double> sums,         \
                      std::size_t rows, std::size_t cols);

namespace serial {
RANKRELAX_KERNEL_DECLS
}  // namespace serial

namespace parallel {
RANKRELAX_KERNEL_DECLS
}  // namespace parallel

#undef RANKRELAX_KERNEL_DECLS

// Dispatching entry points: pick serial or parallel by the current mode.
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> out, std::size_t m,
            std::size_t k, std::size_t n);
void transpose(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols);
void softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols);
void log_softmax_rows(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols);
void row_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols);
void col_sums(std::span<const double> in, std::span<double> out, std::size_t rows, std::size_t cols);
void normalize_rows(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols);
void normalize_cols(std::span<const double> in, std::span<double> out, std::span<double> sums, std::size_t rows,
                    std::size_t cols);

template <class F>
void map(std::span<const double> in, std::span<double> out, F f) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  if (use_parallel(in.size())) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(in[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(in[i]);
  }
}

template <class F>
void zip(std::span<const double> a, std::span<const double> b, std::span<double> out, F f) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  if (use_parallel(a.size())) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(a[i], b[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(a[i], b[i]);
  }
}

}  // namespace rankrelax::kernels
