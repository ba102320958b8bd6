#include "rankrelax/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "rankrelax/error.hpp"

namespace rankrelax {

std::string_view loss_name(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::neural_ndcg: return "neural_ndcg";
    case LossKind::neural_ndcg_t: return "neural_ndcg_t";
    case LossKind::approx_ndcg: return "approx_ndcg";
    case LossKind::listnet: return "listnet";
    case LossKind::listmle: return "listmle";
    case LossKind::ranknet: return "ranknet";
    case LossKind::lambdarank: return "lambdarank";
    case LossKind::rmse: return "rmse";
  }
  return "unknown";
}

const std::vector<LossKind>& all_loss_kinds() {
  static const std::vector<LossKind> kinds = {LossKind::neural_ndcg, LossKind::neural_ndcg_t, LossKind::approx_ndcg,
                                              LossKind::listnet,     LossKind::listmle,       LossKind::ranknet,
                                              LossKind::lambdarank,  LossKind::rmse};
  return kinds;
}

LossKind parse_loss_kind(std::string_view name) {
  for (auto kind : all_loss_kinds()) {
    if (loss_name(kind) == name) return kind;
  }
  throw DomainError("unknown loss kind '" + std::string(name) + "'");
}

bool has_scalar_loss(LossKind kind) noexcept { return kind != LossKind::lambdarank; }

bool is_neural_ndcg(LossKind kind) noexcept {
  return kind == LossKind::neural_ndcg || kind == LossKind::neural_ndcg_t;
}

void validate(const LossConfig& config) {
  if (!(config.temperature > 0.0)) throw DomainError("loss: temperature must be positive");
  if (!(config.alpha > 0.0)) throw DomainError("loss: alpha must be positive");
  if (config.rmse_levels <= 0) throw DomainError("loss: rmse levels must be positive");
  if (config.noise && config.noise->samples == 0) throw DomainError("loss: gumbel samples must be at least 1");
  if (config.sinkhorn_options.max_iter < 0 || !(config.sinkhorn_options.tol > 0.0)) {
    throw DomainError("loss: invalid sinkhorn options");
  }
}

std::vector<double> discount_vector(std::size_t n, RankCutoff k) {
  const std::size_t limit = k.effective(n);
  std::vector<double> d(n, 0.0);
  for (std::size_t j = 0; j < limit; ++j) d[j] = discount(j + 1);
  return d;
}

namespace {

struct Compacted {
  Var scores;
  RelevanceVector labels;
};

// Drops padded documents.
Compacted compact(const Var& scores, const RelevanceVector& y, const char* what) {
  if (scores.shape().size() != 1 || scores.size() != y.size()) {
    throw ShapeError(std::string(what) + ": scores " + to_string(scores.shape()) + " do not match " +
                     std::to_string(y.size()) + " labels");
  }
  if (y.real_count() == 0) throw DomainError(std::string(what) + ": query has no real documents");
  if (!y.has_padding()) return {scores, y};
  const auto idx = y.real_indices();
  std::vector<int> labels;
  for (auto i : idx) labels.push_back(y.label(i));
  return {gather(scores, idx), RelevanceVector(std::move(labels))};
}

std::vector<double> gains(const RelevanceVector& y) {
  std::vector<double> g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) g[i] = gain(y.label(i));
  return g;
}

double require_ideal(const RelevanceVector& y, RankCutoff k, const char* what) {
  const double ideal = max_dcg_at_k(y, k);
  if (!(ideal > 0.0)) throw DomainError(std::string(what) + ": empty query (all labels 0) has no ideal DCG");
  return ideal;
}

// s_i - s_j as an n x n matrix.
Var score_differences(const Var& s) {
  Tape& tape = *s.tape();
  const std::size_t n = s.size();
  const Var ones_col = tape.constant(Array::full({n, 1}, 1.0));
  const Var ones_row = tape.constant(Array::full({1, n}, 1.0));
  return matmul(reshape(s, {n, 1}), ones_row) - matmul(ones_col, reshape(s, {1, n}));
}

template <class Body>
Var average_over_noise(const Var& s, const std::optional<GumbelNoise>& noise, Body body) {
  if (!noise) return body(s);
  Tape& tape = *s.tape();
  Var total;
  bool first = true;
  for (auto& perturbation : gumbel_perturbations(s.size(), *noise)) {
    const Var loss = body(s + tape.constant(Array::vector(std::move(perturbation))));
    total = first ? loss : total + loss;
    first = false;
  }
  return scalar_mul(total, 1.0 / static_cast<double>(noise->samples));
}

}  // namespace

Var neural_ndcg(const Var& scores, const RelevanceVector& y, const NeuralNdcgOptions& options) {
  auto [s, labels] = compact(scores, y, "neural_ndcg");
  const double ideal = require_ideal(labels, options.k, "neural_ndcg");
  Tape& tape = *s.tape();
  const std::size_t n = s.size();
  const Var g = tape.constant(Array::matrix(n, 1, gains(labels)));
  const Var d = tape.constant(Array::matrix(n, 1, discount_vector(n, options.k)));

  return average_over_noise(s, options.noise, [&](const Var& sv) {
    Var p = neural_sort(sv, options.temperature);
    if (options.sinkhorn) p = sinkhorn_scale(p, options.sinkhorn_options).matrix;
    const Var quasi_sorted_gains = matmul(p, g);
    return scalar_mul(sum(quasi_sorted_gains * d), -1.0 / ideal);
  });
}

Var neural_ndcg_transposed(const Var& scores, const RelevanceVector& y, const NeuralNdcgOptions& options) {
  auto [s, labels] = compact(scores, y, "neural_ndcg_t");
  const double ideal = require_ideal(labels, options.k, "neural_ndcg_t");
  Tape& tape = *s.tape();
  const std::size_t n = s.size();
  const Var g = tape.constant(Array::matrix(n, 1, gains(labels)));
  const Var d = tape.constant(Array::matrix(n, 1, discount_vector(n, options.k)));

  return average_over_noise(s, options.noise, [&](const Var& sv) {
    Var pt = transpose(neural_sort(sv, options.temperature));
    if (options.sinkhorn) pt = sinkhorn_scale(pt, options.sinkhorn_options).matrix;
    const Var weighted_discounts = matmul(pt, d);
    return scalar_mul(sum(g * weighted_discounts), -1.0 / ideal);
  });
}

Var approx_ndcg(const Var& scores, const RelevanceVector& y, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("approx_ndcg: alpha must be positive");
  auto [s, labels] = compact(scores, y, "approx_ndcg");
  const double ideal = require_ideal(labels, RankCutoff::max(), "approx_ndcg");
  Tape& tape = *s.tape();
  const std::size_t n = s.size();
  // The j == i term contributes sigmoid(0) = 1/2, so 1 + sum_{j != i} = 1/2 + sum_j,
  // and log2(1 + position) takes the constant 3/2.
  const Var position_sums = sum_axis(sigmoid(scalar_mul(score_differences(s), -alpha)), 1);
  const Var denom = log2(position_sums + tape.constant(Array::full({n, 1}, 1.5)));
  const Var g = tape.constant(Array::matrix(n, 1, gains(labels)));
  return scalar_mul(sum(g / denom), -1.0 / ideal);
}

Var listnet(const Var& scores, const RelevanceVector& y) {
  auto [s, labels] = compact(scores, y, "listnet");
  Tape& tape = *s.tape();
  std::vector<double> raw(labels.labels().begin(), labels.labels().end());
  const Array raw_labels = Array::vector(std::move(raw));
  const Var target = tape.constant(forward_op(OpKind::softmax_rows, {&raw_labels}));
  return -sum(target * log_softmax_rows(s));
}

Var listmle(const Var& scores, const RelevanceVector& y) {
  auto [s, labels] = compact(scores, y, "listmle");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels.label(a) > labels.label(b); });
  const Var ordered = gather(s, std::move(order));
  return sum(suffix_logsumexp(ordered) - ordered);
}

Var ranknet(const Var& scores, const RelevanceVector& y) {
  auto [s, labels] = compact(scores, y, "ranknet");
  Tape& tape = *s.tape();
  const std::size_t n = s.size();
  std::vector<double> pairs(n * n, 0.0);
  double count = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (labels.label(i) > labels.label(j)) {
        pairs[i * n + j] = 1.0;
        count += 1.0;
      }
    }
  }
  if (count == 0.0) throw DomainError("ranknet: query has no pair with different labels");
  const Var mask = tape.constant(Array::matrix(n, n, std::move(pairs)));
  return scalar_mul(sum(mask * softplus(-score_differences(s))), 1.0 / count);
}

Var rmse_loss(const Var& scores, const RelevanceVector& y, int levels) {
  if (levels <= 0) throw DomainError("rmse: levels must be positive");
  auto [s, labels] = compact(scores, y, "rmse");
  for (int label : labels.labels()) {
    if (label > levels) throw DomainError("rmse: label exceeds the number of relevance levels");
  }
  Tape& tape = *s.tape();
  const std::size_t n = s.size();
  std::vector<double> target(labels.labels().begin(), labels.labels().end());
  const Var diff = scalar_mul(sigmoid(s), static_cast<double>(levels)) - tape.constant(Array::vector(std::move(target)));
  return sqrt(scalar_mul(sum(diff * diff), 1.0 / static_cast<double>(n)));
}

namespace {

struct RankedQuery {
  std::vector<std::size_t> real;      // original indices of real documents
  std::vector<double> scores;         // compacted
  RelevanceVector labels;             // compacted
  std::vector<std::size_t> position;  // zero-based rank of each compacted document
  std::vector<double> rank_discount;  // discount at that rank, 0 beyond k
  double ideal = 0.0;
};

RankedQuery rank_query(std::span<const double> scores, const RelevanceVector& y, RankCutoff k, const char* what) {
  if (scores.size() != y.size()) throw ShapeError(std::string(what) + ": scores and labels differ in length");
  RankedQuery q;
  q.real = y.real_indices();
  std::vector<int> labels;
  for (auto i : q.real) {
    q.scores.push_back(scores[i]);
    labels.push_back(y.label(i));
  }
  q.labels = RelevanceVector(std::move(labels));
  q.ideal = max_dcg_at_k(q.labels, k);
  const auto order = ranking_order(q.scores, q.labels);
  const std::size_t n = q.real.size();
  const std::size_t limit = k.effective(n);
  q.position.resize(n);
  q.rank_discount.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    q.position[order[r]] = r;
    q.rank_discount[order[r]] = r < limit ? discount(r + 1) : 0.0;
  }
  return q;
}

double swap_delta(const RankedQuery& q, std::size_t i, std::size_t j) {
  const double dg = gain(q.labels.label(i)) - gain(q.labels.label(j));
  const double dd = q.rank_discount[i] - q.rank_discount[j];
  return std::fabs(dg * dd) / q.ideal;
}

double logistic(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }
double log1p_exp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

std::vector<double> delta_ndcg(std::span<const double> scores, const RelevanceVector& y, RankCutoff k) {
  const auto q = rank_query(scores, y, k, "delta_ndcg");
  const std::size_t n = y.size();
  std::vector<double> out(n * n, 0.0);
  if (!(q.ideal > 0.0)) return out;
  for (std::size_t a = 0; a < q.real.size(); ++a) {
    for (std::size_t b = 0; b < q.real.size(); ++b) {
      out[q.real[a] * n + q.real[b]] = swap_delta(q, a, b);
    }
  }
  return out;
}

LambdaRankResult lambdarank(std::span<const double> scores, const RelevanceVector& y, RankCutoff k) {
  const auto q = rank_query(scores, y, k, "lambdarank");
  if (!(q.ideal > 0.0)) throw DomainError("lambdarank: empty query (all labels 0)");
  LambdaRankResult result;
  result.gradient.assign(y.size(), 0.0);
  const std::size_t m = q.real.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (q.labels.label(a) == q.labels.label(b)) continue;
      const auto [hi, lo] = q.labels.label(a) > q.labels.label(b) ? std::pair{a, b} : std::pair{b, a};
      const double delta = swap_delta(q, hi, lo);
      const double margin = q.scores[hi] - q.scores[lo];
      const double lambda = delta * logistic(-margin);
      result.gradient[q.real[hi]] -= lambda;
      result.gradient[q.real[lo]] += lambda;
      result.loss += delta * log1p_exp(-margin);
    }
  }
  return result;
}

std::vector<double> lambdarank_gradients(std::span<const double> scores, const RelevanceVector& y, RankCutoff k) {
  return lambdarank(scores, y, k).gradient;
}

bool is_trainable(const LossConfig& config, const RelevanceVector& y) {
  if (y.real_count() == 0 || y.is_empty_query()) return false;
  if (config.kind == LossKind::ranknet) {
    const auto idx = y.real_indices();
    for (auto i : idx) {
      if (y.label(i) != y.label(idx.front())) return true;
    }
    return false;
  }
  return true;
}

Var compute_loss(const LossConfig& config, const Var& scores, const RelevanceVector& y) {
  switch (config.kind) {
    case LossKind::neural_ndcg:
    case LossKind::neural_ndcg_t: {
      NeuralNdcgOptions options;
      options.temperature = config.temperature;
      options.k = config.k;
      options.sinkhorn = config.sinkhorn;
      options.sinkhorn_options = config.sinkhorn_options;
      options.noise = config.noise;
      return config.kind == LossKind::neural_ndcg ? neural_ndcg(scores, y, options)
                                                  : neural_ndcg_transposed(scores, y, options);
    }
    case LossKind::approx_ndcg: return approx_ndcg(scores, y, config.alpha);
    case LossKind::listnet: return listnet(scores, y);
    case LossKind::listmle: return listmle(scores, y);
    case LossKind::ranknet: return ranknet(scores, y);
    case LossKind::rmse: return rmse_loss(scores, y, config.rmse_levels);
    case LossKind::lambdarank: break;
  }
  throw DomainError("lambdarank has no scalar loss; use lambdarank() gradients");
}

}  // namespace rankrelax
