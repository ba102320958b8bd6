#pragma once

// LETOR / SVMLight-with-qid ranking data: parsing, standardization,
// fixed-length lists for training, query-level splits and a synthetic
// generator with a known scoring rule.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankrelax/array.hpp"
#include "rankrelax/metrics.hpp"

namespace rankrelax {

struct QueryGroup {
  std::string qid;
  Array features;  // [n, d]
  RelevanceVector labels;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] std::size_t feature_count() const noexcept { return features.cols(); }
};

/// Groups rows by qid in order of first appearance. Feature ids are 1-based;
/// the feature count is the largest id seen anywhere in the input, and missing
/// ids read as 0. Text after '#' is ignored. Errors carry the line number.
std::vector<QueryGroup> parse_letor_text(std::string_view text);

/// As parse_letor_text; gzip input is recognised by its magic bytes.
std::vector<QueryGroup> parse_letor(const std::filesystem::path& path);

/// Writes real documents only, every feature explicitly, values round-trip exact.
std::string format_letor(std::span<const QueryGroup> groups);
void write_letor(const std::filesystem::path& path, std::span<const QueryGroup> groups);

/// Appends zero-valued features so every group has `d` columns (files of one
/// dataset may differ in their largest feature id).
std::vector<QueryGroup> widen_features(std::span<const QueryGroup> groups, std::size_t d);

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<std::uint8_t> log_transform;

  [[nodiscard]] std::size_t size() const noexcept { return mean.size(); }
};

/// Training-split absolute maximum above which a feature is log-transformed.
inline constexpr double kLogTransformThreshold = 1e3;
inline constexpr double kStdFloor = 1e-12;

/// x -> sign(x) * log(1 + |x|)
double signed_log1p(double x);

/// Statistics over the real documents of `train` only.
FeatureStats fit_standardizer(std::span<const QueryGroup> train, double log_threshold = kLogTransformThreshold);
QueryGroup apply_standardizer(const FeatureStats& stats, const QueryGroup& group);
std::vector<QueryGroup> apply_standardizer(const FeatureStats& stats, std::span<const QueryGroup> groups);

/// Subsamples without replacement (longer groups) or appends masked zero rows
/// (shorter groups) so the result has exactly `target` rows. Subsampling keeps
/// the original document order of the kept rows.
QueryGroup pad_or_sample(const QueryGroup& group, std::size_t target, std::uint64_t seed);

struct DataSplit {
  std::vector<QueryGroup> train;
  std::vector<QueryGroup> validation;
  std::vector<QueryGroup> test;
};

/// Query-level seeded 60/20/20 partition. The validation and test sizes are
/// the rounded fractions; training takes the rest.
DataSplit split(std::span<const QueryGroup> groups, std::uint64_t seed, double train_fraction = 0.6,
                double validation_fraction = 0.2);

struct SyntheticOptions {
  std::size_t queries = 200;
  std::size_t docs_per_query = 20;
  std::size_t features = 10;
  double noise = 0.3;  // std of the utility noise before quantization
  std::uint64_t seed = 7;
};

struct SyntheticData {
  std::vector<QueryGroup> groups;
  std::vector<double> weights;  // unit vector of the noise-free utility w.x
};

/// Features ~ N(0, 1); label = quantized (w.x + noise) in 0..4.
SyntheticData generate_synthetic(const SyntheticOptions& options);

/// Noise-free utility scores w.x for every document of `group`.
std::vector<double> oracle_scores(const SyntheticData& data, const QueryGroup& group);

}  // namespace rankrelax
