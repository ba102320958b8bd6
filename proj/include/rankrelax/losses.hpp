#pragma once

// Ranking losses on a score vector. Every loss here is minimized, so the
// NDCG-style losses return the negated (approximate) NDCG.
//
// Padded documents (mask = false) are removed before anything is computed:
// the losses see each query at its true length.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankrelax/metrics.hpp"
#include "rankrelax/relaxed_sort.hpp"
#include "rankrelax/tape.hpp"

namespace rankrelax {

enum class LossKind { neural_ndcg, neural_ndcg_t, approx_ndcg, listnet, listmle, ranknet, lambdarank, rmse };

[[nodiscard]] std::string_view loss_name(LossKind kind) noexcept;
[[nodiscard]] LossKind parse_loss_kind(std::string_view name);
[[nodiscard]] const std::vector<LossKind>& all_loss_kinds();
// False only for lambdarank, which defines gradients but no scalar loss.
[[nodiscard]] bool has_scalar_loss(LossKind kind) noexcept;
[[nodiscard]] bool is_neural_ndcg(LossKind kind) noexcept;

struct LossConfig {
  LossKind kind = LossKind::neural_ndcg;
  RankCutoff k = RankCutoff::max();
  double temperature = 1.0;  // neural_ndcg, neural_ndcg_t
  double alpha = 1.0;        // approx_ndcg
  std::optional<GumbelNoise> noise;
  bool sinkhorn = true;
  SinkhornOptions sinkhorn_options;
  int rmse_levels = 4;
};

/// Throws DomainError on non-positive temperature, alpha or levels.
void validate(const LossConfig& config);

/// Discounts per rank, 1/log2(j + 2) for zero-based j < effective k, else 0.
std::vector<double> discount_vector(std::size_t n, RankCutoff k);

struct NeuralNdcgOptions {
  double temperature = 1.0;
  RankCutoff k = RankCutoff::max();
  bool sinkhorn = true;
  SinkhornOptions sinkhorn_options;
  // When set, the loss is averaged over Gumbel-perturbed relaxed sorts.
  std::optional<GumbelNoise> noise;
};

/// -(1/maxDCG@k) * sum_{j <= k} (scale(P) g(y))_j d(j)
Var neural_ndcg(const Var& scores, const RelevanceVector& y, const NeuralNdcgOptions& options = {});

/// -(1/maxDCG@k) * sum_i g(y_i) (scale(P^T) d)_i with d zeroed beyond k.
Var neural_ndcg_transposed(const Var& scores, const RelevanceVector& y, const NeuralNdcgOptions& options = {});

/// Sigmoid-smoothed positions pi(i) = 1 + sum_{j != i} sigmoid(-alpha (s_i - s_j)),
/// loss -(1/maxDCG) * sum_i g(y_i) / log2(1 + pi(i)).
Var approx_ndcg(const Var& scores, const RelevanceVector& y, double alpha = 1.0);

/// Cross-entropy between softmax(labels) and softmax(scores).
Var listnet(const Var& scores, const RelevanceVector& y);

/// Negative Plackett-Luce log-likelihood of the label ordering
/// (labels descending, ties by index).
Var listmle(const Var& scores, const RelevanceVector& y);

/// Mean over pairs with y_i > y_j of log(1 + exp(-(s_i - s_j))).
Var ranknet(const Var& scores, const RelevanceVector& y);

/// sqrt(mean((levels * sigmoid(s_i) - y_i)^2)).
Var rmse_loss(const Var& scores, const RelevanceVector& y, int levels = 4);

struct LambdaRankResult {
  // d(loss)/d(score) for minimization; zero for padded documents.
  std::vector<double> gradient;
  // sum over label-discordant pairs of |dNDCG| * log(1 + exp(-(s_hi - s_lo))),
  // whose gradient (with |dNDCG| held fixed) is `gradient`.
  double loss = 0.0;
};

LambdaRankResult lambdarank(std::span<const double> scores, const RelevanceVector& y, RankCutoff k);
std::vector<double> lambdarank_gradients(std::span<const double> scores, const RelevanceVector& y, RankCutoff k);

/// |NDCG@k change| from swapping documents i and j in the current ranking,
/// row-major n x n over document indices. Padded documents get 0.
std::vector<double> delta_ndcg(std::span<const double> scores, const RelevanceVector& y, RankCutoff k);

/// Whether `y` contributes to training under `config` (empty queries and
/// queries without a discordant pair for ranknet do not).
bool is_trainable(const LossConfig& config, const RelevanceVector& y);

/// Dispatches to the scalar loss selected by `config`. Not valid for lambdarank.
Var compute_loss(const LossConfig& config, const Var& scores, const RelevanceVector& y);

}  // namespace rankrelax
