// Serial reference kernels against their OpenMP versions.
//
//   ./build/bench_kernels --benchmark_filter=softmax
//
// Each benchmark takes the matrix side as its argument. The end-to-end cases
// switch the dispatch mode with ScopedExecution.

#include <benchmark/benchmark.h>

#include <vector>

#include "rankrelax/kernels.hpp"
#include "rankrelax/losses.hpp"
#include "rankrelax/random.hpp"
#include "rankrelax/relaxed_sort.hpp"
#include "rankrelax/tape.hpp"

namespace kernels = rankrelax::kernels;

namespace {

std::vector<double> random_values(std::size_t count, std::uint64_t seed) {
  rankrelax::Rng rng(seed);
  std::vector<double> v(count);
  for (auto& x : v) x = rng.uniform(-3.0, 3.0);
  return v;
}

std::vector<double> positive_values(std::size_t count, std::uint64_t seed) {
  auto v = random_values(count, seed);
  for (auto& x : v) x = x + 3.5;
  return v;
}

template <auto Kernel>
void matmul_case(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 1);
  const auto b = random_values(n * n, 2);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(a, b, out, n, n, n);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

template <auto Kernel>
void rowwise_case(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = random_values(n * n, 3);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel(in, out, n, n);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Kernel>
void normalize_case(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = positive_values(n * n, 4);
  std::vector<double> out(n * n);
  std::vector<double> sums(n);
  for (auto _ : state) {
    Kernel(in, out, sums, n, n);
    benchmark::DoNotOptimize(out.data());
  }
}

template <kernels::Execution Mode>
void neural_sort_case(benchmark::State& state) {
  const kernels::ScopedExecution scope(Mode);
  const auto scores = random_values(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) {
    auto p = rankrelax::neural_sort(scores, 1.0);
    benchmark::DoNotOptimize(p);
  }
  state.SetComplexityN(state.range(0));
}

template <kernels::Execution Mode>
void neural_ndcg_case(benchmark::State& state) {
  const kernels::ScopedExecution scope(Mode);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto scores = random_values(n, 6);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 5);
  const rankrelax::RelevanceVector y(labels);
  for (auto _ : state) {
    rankrelax::Tape tape;
    const auto s = tape.variable(rankrelax::Array::vector(scores));
    const auto loss = rankrelax::neural_ndcg(s, y);
    auto grads = tape.backward(loss);
    benchmark::DoNotOptimize(grads);
  }
}

constexpr auto kSerial = kernels::Execution::serial;
constexpr auto kParallel = kernels::Execution::parallel;

}  // namespace

BENCHMARK(matmul_case<kernels::serial::matmul>)->Name("matmul/serial")->RangeMultiplier(2)->Range(64, 256);
BENCHMARK(matmul_case<kernels::parallel::matmul>)->Name("matmul/parallel")->RangeMultiplier(2)->Range(64, 256);
BENCHMARK(rowwise_case<kernels::serial::softmax_rows>)->Name("softmax_rows/serial")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(rowwise_case<kernels::parallel::softmax_rows>)->Name("softmax_rows/parallel")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(rowwise_case<kernels::serial::transpose>)->Name("transpose/serial")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(rowwise_case<kernels::parallel::transpose>)->Name("transpose/parallel")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(normalize_case<kernels::serial::normalize_rows>)->Name("normalize_rows/serial")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(normalize_case<kernels::parallel::normalize_rows>)->Name("normalize_rows/parallel")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(normalize_case<kernels::serial::normalize_cols>)->Name("normalize_cols/serial")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(normalize_case<kernels::parallel::normalize_cols>)->Name("normalize_cols/parallel")->RangeMultiplier(2)->Range(64, 512);
BENCHMARK(neural_sort_case<kSerial>)->Name("neural_sort/serial")->RangeMultiplier(2)->Range(32, 256)->Complexity();
BENCHMARK(neural_sort_case<kParallel>)->Name("neural_sort/parallel")->RangeMultiplier(2)->Range(32, 256)->Complexity();
BENCHMARK(neural_ndcg_case<kSerial>)->Name("neural_ndcg_backward/serial")->RangeMultiplier(2)->Range(16, 128);
BENCHMARK(neural_ndcg_case<kParallel>)->Name("neural_ndcg_backward/parallel")->RangeMultiplier(2)->Range(16, 128);

BENCHMARK_MAIN();
