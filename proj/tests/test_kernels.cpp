#include <gtest/gtest.h>
#include <omp.h>

#include <vector>

#include "rankrelax/kernels.hpp"
#include "rankrelax/losses.hpp"
#include "rankrelax/random.hpp"
#include "rankrelax/relaxed_sort.hpp"

using namespace rankrelax;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -3.0, double hi = 3.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

class KernelParity : public ::testing::Test {
 protected:
  void SetUp() override {
    threads_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(threads_); }

  static constexpr std::size_t kRows = 96;
  static constexpr std::size_t kCols = 80;

 private:
  int threads_ = 1;
};

}  // namespace

TEST_F(KernelParity, Matmul) {
  const std::size_t m = kRows, k = 70, n = kCols;
  const auto a = random_values(m * k, 1);
  const auto b = random_values(k * n, 2);
  std::vector<double> s(m * n), p(m * n);
  kernels::serial::matmul(a, b, s, m, k, n);
  kernels::parallel::matmul(a, b, p, m, k, n);
  EXPECT_EQ(s, p);
}

TEST_F(KernelParity, Transpose) {
  const auto a = random_values(kRows * kCols, 3);
  std::vector<double> s(a.size()), p(a.size());
  kernels::serial::transpose(a, s, kRows, kCols);
  kernels::parallel::transpose(a, p, kRows, kCols);
  EXPECT_EQ(s, p);
}

TEST_F(KernelParity, SoftmaxAndLogSoftmax) {
  const auto a = random_values(kRows * kCols, 4, -40.0, 40.0);
  std::vector<double> s(a.size()), p(a.size());
  kernels::serial::softmax_rows(a, s, kRows, kCols);
  kernels::parallel::softmax_rows(a, p, kRows, kCols);
  EXPECT_EQ(s, p);
  kernels::serial::log_softmax_rows(a, s, kRows, kCols);
  kernels::parallel::log_softmax_rows(a, p, kRows, kCols);
  EXPECT_EQ(s, p);
}

TEST_F(KernelParity, SumsAndNormalizations) {
  const auto a = random_values(kRows * kCols, 5, 0.1, 2.0);
  std::vector<double> rs(kRows), rp(kRows), cs(kCols), cp(kCols);
  kernels::serial::row_sums(a, rs, kRows, kCols);
  kernels::parallel::row_sums(a, rp, kRows, kCols);
  EXPECT_EQ(rs, rp);
  kernels::serial::col_sums(a, cs, kRows, kCols);
  kernels::parallel::col_sums(a, cp, kRows, kCols);
  EXPECT_EQ(cs, cp);

  std::vector<double> s(a.size()), p(a.size());
  kernels::serial::normalize_rows(a, s, rs, kRows, kCols);
  kernels::parallel::normalize_rows(a, p, rp, kRows, kCols);
  EXPECT_EQ(s, p);
  kernels::serial::normalize_cols(a, s, cs, kRows, kCols);
  kernels::parallel::normalize_cols(a, p, cp, kRows, kCols);
  EXPECT_EQ(s, p);
}

TEST_F(KernelParity, NeuralNdcgValueAndGradientAcrossModes) {
  const std::size_t n = 120;  // n * n above the parallel threshold
  const auto scores = random_values(n, 6);
  std::vector<int> labels(n);
  Rng rng(7);
  for (auto& l : labels) l = static_cast<int>(rng.index(5));
  const RelevanceVector y(labels);

  auto run = [&](kernels::Execution mode) {
    kernels::ScopedExecution guard(mode);
    Tape tape;
    const Var s = tape.variable(Array::vector(scores));
    const Var loss = neural_ndcg(s, y);
    return std::make_pair(loss.value().item(), tape.backward(loss).wrt(s).values());
  };
  const auto serial = run(kernels::Execution::serial);
  const auto parallel = run(kernels::Execution::parallel);
  EXPECT_EQ(serial.first, parallel.first);
  EXPECT_EQ(serial.second, parallel.second);
}

TEST(ExecutionMode, ScopedGuardRestores) {
  const auto before = kernels::execution();
  {
    kernels::ScopedExecution guard(kernels::Execution::serial);
    EXPECT_EQ(kernels::execution(), kernels::Execution::serial);
  }
  EXPECT_EQ(kernels::execution(), before);
}
