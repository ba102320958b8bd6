#include "rankrelax/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>

#include "rankrelax/error.hpp"

namespace rankrelax {

RelevanceVector::RelevanceVector(std::vector<int> labels)
    : RelevanceVector(std::move(labels), std::vector<std::uint8_t>()) {}

RelevanceVector::RelevanceVector(std::vector<int> labels, std::vector<std::uint8_t> mask)
    : labels_(std::move(labels)), mask_(std::move(mask)) {
  if (mask_.empty()) mask_.assign(labels_.size(), 1);
  if (mask_.size() != labels_.size()) throw ShapeError("relevance: mask and labels differ in length");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0) throw DomainError("relevance: labels must be non-negative");
    if (mask_[i] == 0 && labels_[i] != 0) throw DomainError("relevance: padded documents must carry label 0");
  }
}

std::size_t RelevanceVector::real_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](auto m) { return m != 0; }));
}

std::vector<std::size_t> RelevanceVector::real_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i] != 0) out.push_back(i);
  }
  return out;
}

bool RelevanceVector::is_empty_query() const noexcept {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (mask_[i] != 0 && labels_[i] > 0) return false;
  }
  return true;
}

RankCutoff RankCutoff::at(std::size_t k) {
  if (k == 0) throw DomainError("rank cutoff must be at least 1");
  RankCutoff c;
  c.k_ = k;
  return c;
}

RankCutoff RankCutoff::parse(const std::string& text) {
  if (text == "max") return max();
  std::size_t k = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DomainError("rank cutoff must be a positive integer or 'max', got '" + text + "'");
  }
  return at(k);
}

std::size_t RankCutoff::effective(std::size_t real_docs) const noexcept {
  return k_ ? std::min(*k_, real_docs) : real_docs;
}

std::string RankCutoff::to_string() const { return k_ ? std::to_string(*k_) : std::string("max"); }

double gain(int relevance) {
  if (relevance < 0) throw DomainError("gain: relevance must be non-negative");
  return std::exp2(static_cast<double>(relevance)) - 1.0;
}

double discount(std::size_t rank) {
  if (rank < 1) throw DomainError("discount: rank must be at least 1");
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

std::vector<std::size_t> ranking_order(std::span<const double> scores, const RelevanceVector& y) {
  if (scores.size() != y.size()) throw ShapeError("ranking: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (y.is_real(a) != y.is_real(b)) return y.is_real(a);
    if (!y.is_real(a)) return false;
    return scores[a] > scores[b];
  });
  return order;
}

RelevanceVector sort_by_scores(std::span<const double> scores, const RelevanceVector& y) {
  const auto order = ranking_order(scores, y);
  std::vector<int> labels;
  std::vector<std::uint8_t> mask;
  labels.reserve(order.size());
  mask.reserve(order.size());
  for (auto i : order) {
    labels.push_back(y.label(i));
    mask.push_back(y.mask()[i]);
  }
  return RelevanceVector(std::move(labels), std::move(mask));
}

double dcg_at_k(const RelevanceVector& ranked, RankCutoff k) {
  const std::size_t limit = k.effective(ranked.real_count());
  double total = 0.0;
  for (std::size_t j = 0; j < limit; ++j) total += gain(ranked.label(j)) * discount(j + 1);
  return total;
}

double max_dcg_at_k(const RelevanceVector& y, RankCutoff k) {
  std::vector<int> ideal;
  for (auto i : y.real_indices()) ideal.push_back(y.label(i));
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  return dcg_at_k(RelevanceVector(std::move(ideal)), k);
}

double ndcg_at_k(std::span<const double> scores, const RelevanceVector& y, RankCutoff k) {
  if (scores.size() != y.size()) throw ShapeError("ndcg: scores and labels differ in length");
  const double ideal = max_dcg_at_k(y, k);
  if (ideal <= 0.0) return 1.0;
  return dcg_at_k(sort_by_scores(scores, y), k) / ideal;
}

}  // namespace rankrelax
