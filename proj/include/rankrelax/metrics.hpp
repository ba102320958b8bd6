#pragma once

// Exact ranking metrics: gain, discount, DCG@k, NDCG@k.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rankrelax {

/// Relevance labels of one query plus a padding mask (true = real document).
class RelevanceVector {
 public:
  RelevanceVector() = default;
  explicit RelevanceVector(std::vector<int> labels);
  RelevanceVector(std::vector<int> labels, std::vector<std::uint8_t> mask);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] int label(std::size_t i) const { return labels_[i]; }
  [[nodiscard]] bool is_real(std::size_t i) const { return mask_[i] != 0; }
  [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

  [[nodiscard]] std::size_t real_count() const noexcept;
  // Indices of unmasked documents, ascending.
  [[nodiscard]] std::vector<std::size_t> real_indices() const;
  [[nodiscard]] bool has_padding() const noexcept { return real_count() != size(); }
  // True when every real document has label 0.
  [[nodiscard]] bool is_empty_query() const noexcept;

 private:
  std::vector<int> labels_;
  std::vector<std::uint8_t> mask_;
};

/// Rank cutoff k; `max()` means the full list.
class RankCutoff {
 public:
  static RankCutoff max() { return RankCutoff(); }
  static RankCutoff at(std::size_t k);
  // Accepts "max" or a positive integer.
  static RankCutoff parse(const std::string& text);

  [[nodiscard]] bool is_max() const noexcept { return !k_.has_value(); }
  [[nodiscard]] std::size_t effective(std::size_t real_docs) const noexcept;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const RankCutoff&, const RankCutoff&) = default;

 private:
  RankCutoff() = default;
  std::optional<std::size_t> k_;
};

/// 2^r - 1.
double gain(int relevance);
/// 1 / log2(rank + 1), rank starting at 1.
double discount(std::size_t rank);

/// Document indices in ranking order: real documents by descending score
/// (ties by ascending index), then padded documents.
std::vector<std::size_t> ranking_order(std::span<const double> scores, const RelevanceVector& y);

/// Labels and mask reordered by `ranking_order`.
RelevanceVector sort_by_scores(std::span<const double> scores, const RelevanceVector& y);

/// DCG over the first effective-k ranks of an already ranked vector.
double dcg_at_k(const RelevanceVector& ranked, RankCutoff k);

/// DCG@k of the ideal ordering (labels sorted descending).
double max_dcg_at_k(const RelevanceVector& y, RankCutoff k);

/// NDCG@k in [0, 1]; empty queries score 1.
double ndcg_at_k(std::span<const double> scores, const RelevanceVector& y, RankCutoff k);

}  // namespace rankrelax
