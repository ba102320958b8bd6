#include "rankrelax/relaxed_sort.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rankrelax/error.hpp"
#include "rankrelax/kernels.hpp"
#include "rankrelax/random.hpp"

namespace rankrelax {

namespace {

Array column_of_ones(std::size_t n) { return Array::full({n, 1}, 1.0); }

void require_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw DomainError("neural_sort: temperature must be positive, got " + std::to_string(temperature));
  }
}

void require_vector(const Var& scores, const char* what) {
  if (scores.shape().size() != 1) {
    throw ShapeError(std::string(what) + ": scores must be a vector, got " + to_string(scores.shape()));
  }
}

}  // namespace

Var pairwise_abs_diff(const Var& scores) {
  require_vector(scores, "pairwise_abs_diff");
  Tape& tape = *scores.tape();
  const std::size_t n = scores.size();
  const Var ones_col = tape.constant(column_of_ones(n));
  const Var ones_row = tape.constant(Array::full({1, n}, 1.0));
  const Var as_col = reshape(scores, {n, 1});
  const Var as_row = reshape(scores, {1, n});
  // s 1^T - 1 s^T
  return abs(matmul(as_col, ones_row) - matmul(ones_col, as_row));
}

Array pairwise_abs_diff(std::span<const double> scores) {
  Tape tape;
  return pairwise_abs_diff(tape.constant(Array::vector(std::vector<double>(scores.begin(), scores.end())))).value();
}

Var neural_sort(const Var& scores, double temperature) {
  require_temperature(temperature);
  require_vector(scores, "neural_sort");
  Tape& tape = *scores.tape();
  const std::size_t n = scores.size();

  std::vector<double> coeffs(n);
  for (std::size_t i = 0; i < n; ++i) coeffs[i] = static_cast<double>(n + 1) - 2.0 * static_cast<double>(i + 1);

  const Var ones_col = tape.constant(column_of_ones(n));
  const Var abs_row_sums = matmul(pairwise_abs_diff(scores), ones_col);  // (A_s 1)_j, shape [n, 1]
  const Var logits = matmul(tape.constant(Array::matrix(n, 1, std::move(coeffs))), reshape(scores, {1, n})) -
                     matmul(ones_col, reshape(abs_row_sums, {1, n}));
  return clamp(softmax_rows(scalar_mul(logits, 1.0 / temperature)), kRelaxedSortFloor, 1.0);
}

// Forward-only evaluation with two n x n buffers. The arithmetic matches the
// tape version operation for operation, so both give identical values.
RelaxedPermutation neural_sort(std::span<const double> scores, double temperature) {
  require_temperature(temperature);
  const std::size_t n = scores.size();
  if (n == 0) throw ShapeError("neural_sort: scores must not be empty");
  for (double v : scores) {
    if (!std::isfinite(v)) throw NonFiniteError("neural_sort: input contains a non-finite value");
  }
  std::vector<double> abs_row_sums(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 0; m < n; ++m) abs_row_sums[j] += std::fabs(scores[j] - scores[m]);
  }
  const double inv_temperature = 1.0 / temperature;
  thread_local std::vector<double> logits;
  logits.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(n + 1) - 2.0 * static_cast<double>(i + 1);
    double* row = logits.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) row[j] = inv_temperature * (c * scores[j] - abs_row_sums[j]);
  }
  std::vector<double> p(n * n);
  kernels::softmax_rows(std::span<const double>(logits.data(), n * n), p, n, n);
  for (auto& v : p) v = std::clamp(v, kRelaxedSortFloor, 1.0);
  if (!std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); })) {
    throw NonFiniteError("neural_sort: produced a non-finite value");
  }
  return RelaxedPermutation{Array::matrix(n, n, std::move(p)), temperature, false};
}

std::vector<std::vector<double>> gumbel_perturbations(std::size_t n, const GumbelNoise& noise) {
  if (noise.samples == 0) throw DomainError("stochastic_neural_sort: samples must be at least 1");
  if (!(noise.scale >= 0.0)) throw DomainError("stochastic_neural_sort: noise scale must be non-negative");
  Rng rng(noise.seed);
  std::vector<std::vector<double>> out(noise.samples, std::vector<double>(n));
  for (auto& sample : out) {
    for (auto& v : sample) v = noise.scale * (rng.gumbel() - std::numbers::egamma);
  }
  return out;
}

std::vector<Var> stochastic_neural_sort(const Var& scores, double temperature, const GumbelNoise& noise) {
  require_vector(scores, "stochastic_neural_sort");
  Tape& tape = *scores.tape();
  std::vector<Var> out;
  for (auto& perturbation : gumbel_perturbations(scores.size(), noise)) {
    out.push_back(neural_sort(scores + tape.constant(Array::vector(std::move(perturbation))), temperature));
  }
  return out;
}

std::vector<RelaxedPermutation> stochastic_neural_sort(std::span<const double> scores, double temperature,
                                                       const GumbelNoise& noise) {
  Tape tape;
  const Var s = tape.constant(Array::vector(std::vector<double>(scores.begin(), scores.end())));
  std::vector<RelaxedPermutation> out;
  for (const Var& m : stochastic_neural_sort(s, temperature, noise)) {
    out.push_back(RelaxedPermutation{m.value(), temperature, false});
  }
  return out;
}

double doubly_stochastic_deviation(const Array& m) {
  const std::size_t r = m.rows();
  const std::size_t c = m.cols();
  std::vector<double> col(c, 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      row += m.at(i, j);
      col[j] += m.at(i, j);
    }
    worst = std::max(worst, std::fabs(row - 1.0));
  }
  for (double s : col) worst = std::max(worst, std::fabs(s - 1.0));
  return worst;
}

SinkhornResult<Var> sinkhorn_scale(const Var& m, const SinkhornOptions& options) {
  const Array& value = m.value();
  if (value.rank() != 2 || value.rows() != value.cols()) {
    throw ShapeError("sinkhorn_scale: expects a square matrix, got " + to_string(value.shape()));
  }
  for (double x : value.data()) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("sinkhorn_scale: entries must be non-negative and finite");
  }
  // normalize_rows/normalize_cols reject a row or column that sums to zero.
  SinkhornResult<Var> result{m, 0, doubly_stochastic_deviation(value)};
  while (result.max_deviation >= options.tol && result.iterations < options.max_iter) {
    result.matrix = normalize_cols(normalize_rows(result.matrix));
    ++result.iterations;
    result.max_deviation = doubly_stochastic_deviation(result.matrix.value());
  }
  return result;
}

SinkhornResult<Array> sinkhorn_scale(const Array& m, const SinkhornOptions& options) {
  Tape tape;
  auto r = sinkhorn_scale(tape.constant(m), options);
  return SinkhornResult<Array>{r.matrix.value(), r.iterations, r.max_deviation};
}

}  // namespace rankrelax
