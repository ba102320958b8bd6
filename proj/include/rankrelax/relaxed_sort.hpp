#pragma once

// Relaxed sorting: a row-stochastic n x n matrix that approaches the sorting
// permutation matrix as the temperature goes to zero, plus Sinkhorn scaling
// toward a doubly stochastic matrix.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rankrelax/array.hpp"
#include "rankrelax/tape.hpp"

namespace rankrelax {

/// Entries of the relaxed permutation are floored here so they stay strictly
/// positive when exp() underflows at very small temperatures.
inline constexpr double kRelaxedSortFloor = 1e-300;

struct RelaxedPermutation {
  Array matrix;
  double temperature = 1.0;
  bool scaled = false;
};

/// Gumbel perturbation for the stochastic variant.
struct GumbelNoise {
  double scale = 1.0;  // beta
  std::uint64_t seed = 0;
  std::size_t samples = 1;
};

struct SinkhornOptions {
  int max_iter = 30;
  double tol = 1e-6;
};

template <class Matrix>
struct SinkhornResult {
  Matrix matrix;
  int iterations = 0;      // row+column normalization rounds actually run
  double max_deviation = 0.0;  // max |row or column sum - 1| of the result
};

/// A[i, j] = |s_i - s_j|.
Var pairwise_abs_diff(const Var& scores);
Array pairwise_abs_diff(std::span<const double> scores);

/// Row i (1-based) is softmax(((n + 1 - 2i) s - A_s 1) / tau).
Var neural_sort(const Var& scores, double temperature);
RelaxedPermutation neural_sort(std::span<const double> scores, double temperature);

/// Zero-mean Gumbel perturbations s + beta * (g - euler_gamma), one vector per sample.
std::vector<std::vector<double>> gumbel_perturbations(std::size_t n, const GumbelNoise& noise);

/// neural_sort on independently perturbed copies of the scores. Gradients
/// reach `scores` through the additive perturbation.
std::vector<Var> stochastic_neural_sort(const Var& scores, double temperature, const GumbelNoise& noise);
std::vector<RelaxedPermutation> stochastic_neural_sort(std::span<const double> scores, double temperature,
                                                       const GumbelNoise& noise);

/// max over rows and columns of |sum - 1|.
double doubly_stochastic_deviation(const Array& m);

/// Alternating row then column normalization of a non-negative square matrix
/// whose rows and columns all have positive sums. Stops once the deviation is
/// below `tol` (checked before each round) or after `max_iter` rounds.
/// The executed rounds are recorded on the tape.
SinkhornResult<Var> sinkhorn_scale(const Var& m, const SinkhornOptions& options = {});
SinkhornResult<Array> sinkhorn_scale(const Array& m, const SinkhornOptions& options = {});

}  // namespace rankrelax
