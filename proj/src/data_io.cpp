#include "rankrelax/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "rankrelax/error.hpp"
#include "rankrelax/random.hpp"

namespace rankrelax {

namespace {

struct ParsedRow {
  int label = 0;
  std::vector<std::pair<std::size_t, double>> features;  // zero-based id, value
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string gunzip(const std::string& bytes) {
  z_stream stream{};
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK) throw IoError("gzip: cannot initialise inflate");
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  stream.avail_in = static_cast<uInt>(bytes.size());
  std::string out;
  char buffer[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    stream.next_out = reinterpret_cast<Bytef*>(buffer);
    stream.avail_out = sizeof(buffer);
    rc = inflate(&stream, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&stream);
      throw IoError("gzip: corrupt stream");
    }
    out.append(buffer, sizeof(buffer) - stream.avail_out);
    if (rc == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw IoError("gzip: truncated stream");
    }
  }
  inflateEnd(&stream);
  return out;
}

void append_double(std::string& out, double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, ptr);
}

}  // namespace

std::vector<QueryGroup> parse_letor_text(std::string_view text) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<ParsedRow>> rows;
  std::size_t feature_count = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto tokens = split_ws(line);
    ParsedRow row;
    if (!parse_number(tokens[0], row.label)) {
      throw ParseError("label '" + std::string(tokens[0]) + "' is not an integer", line_no);
    }
    if (row.label < 0) throw ParseError("label must be non-negative", line_no);
    if (tokens.size() < 2 || !tokens[1].starts_with("qid:") || tokens[1].size() == 4) {
      throw ParseError("expected qid:<id> after the label", line_no);
    }
    const std::string qid(tokens[1].substr(4));
    std::size_t last_id = 0;
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      std::size_t id = 0;
      double value = 0.0;
      if (colon == std::string_view::npos || !parse_number(tokens[t].substr(0, colon), id) ||
          !parse_number(tokens[t].substr(colon + 1), value)) {
        throw ParseError("malformed feature '" + std::string(tokens[t]) + "'", line_no);
      }
      if (id == 0) throw ParseError("feature ids are 1-based", line_no);
      if (id <= last_id) throw ParseError("feature ids must be increasing", line_no);
      if (!std::isfinite(value)) throw ParseError("non-finite feature value", line_no);
      last_id = id;
      feature_count = std::max(feature_count, id);
      row.features.emplace_back(id - 1, value);
    }
    auto [it, inserted] = rows.try_emplace(qid);
    if (inserted) order.push_back(qid);
    it->second.push_back(std::move(row));
  }

  if (feature_count == 0 && !order.empty()) feature_count = 1;
  std::vector<QueryGroup> groups;
  groups.reserve(order.size());
  for (const auto& qid : order) {
    const auto& group_rows = rows.at(qid);
    std::vector<double> features(group_rows.size() * feature_count, 0.0);
    std::vector<int> labels;
    for (std::size_t r = 0; r < group_rows.size(); ++r) {
      labels.push_back(group_rows[r].label);
      for (auto [id, value] : group_rows[r].features) features[r * feature_count + id] = value;
    }
    groups.push_back(
        {qid, Array::matrix(group_rows.size(), feature_count, std::move(features)), RelevanceVector(std::move(labels))});
  }
  return groups;
}

std::vector<QueryGroup> parse_letor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f && static_cast<unsigned char>(bytes[1]) == 0x8b) {
    bytes = gunzip(bytes);
  }
  return parse_letor_text(bytes);
}

std::string format_letor(std::span<const QueryGroup> groups) {
  std::string out;
  for (const auto& g : groups) {
    const std::size_t d = g.feature_count();
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (!g.labels.is_real(r)) continue;
      out += std::to_string(g.labels.label(r));
      out += " qid:";
      out += g.qid;
      for (std::size_t f = 0; f < d; ++f) {
        out += ' ';
        out += std::to_string(f + 1);
        out += ':';
        append_double(out, g.features.at(r, f));
      }
      out += '\n';
    }
  }
  return out;
}

void write_letor(const std::filesystem::path& path, std::span<const QueryGroup> groups) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << format_letor(groups);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<QueryGroup> widen_features(std::span<const QueryGroup> groups, std::size_t d) {
  std::vector<QueryGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    const std::size_t have = g.feature_count();
    if (have > d) throw ShapeError("widen_features: group '" + g.qid + "' already has more features");
    if (have == d) {
      out.push_back(g);
      continue;
    }
    std::vector<double> features(g.size() * d, 0.0);
    for (std::size_t r = 0; r < g.size(); ++r) {
      for (std::size_t f = 0; f < have; ++f) features[r * d + f] = g.features.at(r, f);
    }
    out.push_back({g.qid, Array::matrix(g.size(), d, std::move(features)), g.labels});
  }
  return out;
}

double signed_log1p(double x) { return std::copysign(std::log1p(std::fabs(x)), x); }

FeatureStats fit_standardizer(std::span<const QueryGroup> train, double log_threshold) {
  if (train.empty()) throw DomainError("fit_standardizer: no training groups");
  const std::size_t d = train.front().feature_count();
  FeatureStats stats;
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  stats.log_transform.assign(d, 0);

  std::vector<double> abs_max(d, 0.0);
  std::size_t count = 0;
  for (const auto& g : train) {
    if (g.feature_count() != d) throw ShapeError("fit_standardizer: groups differ in feature count");
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (!g.labels.is_real(r)) continue;
      ++count;
      for (std::size_t f = 0; f < d; ++f) abs_max[f] = std::max(abs_max[f], std::fabs(g.features.at(r, f)));
    }
  }
  if (count == 0) throw DomainError("fit_standardizer: no training documents");
  for (std::size_t f = 0; f < d; ++f) stats.log_transform[f] = abs_max[f] > log_threshold ? 1 : 0;

  auto value = [&](const QueryGroup& g, std::size_t r, std::size_t f) {
    const double x = g.features.at(r, f);
    return stats.log_transform[f] ? signed_log1p(x) : x;
  };
  for (const auto& g : train) {
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (!g.labels.is_real(r)) continue;
      for (std::size_t f = 0; f < d; ++f) stats.mean[f] += value(g, r, f);
    }
  }
  for (auto& m : stats.mean) m /= static_cast<double>(count);
  for (const auto& g : train) {
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (!g.labels.is_real(r)) continue;
      for (std::size_t f = 0; f < d; ++f) {
        const double c = value(g, r, f) - stats.mean[f];
        stats.stddev[f] += c * c;
      }
    }
  }
  for (auto& s : stats.stddev) {
    s = std::sqrt(s / static_cast<double>(count));
    if (s < kStdFloor) s = 1.0;
  }
  return stats;
}

QueryGroup apply_standardizer(const FeatureStats& stats, const QueryGroup& group) {
  const std::size_t d = group.feature_count();
  if (d != stats.size()) {
    throw ShapeError("apply_standardizer: group '" + group.qid + "' has " + std::to_string(d) +
                     " features, statistics have " + std::to_string(stats.size()));
  }
  std::vector<double> out(group.features.values());
  for (std::size_t r = 0; r < group.size(); ++r) {
    if (!group.labels.is_real(r)) continue;
    for (std::size_t f = 0; f < d; ++f) {
      double x = out[r * d + f];
      if (stats.log_transform[f]) x = signed_log1p(x);
      out[r * d + f] = (x - stats.mean[f]) / stats.stddev[f];
    }
  }
  return {group.qid, Array(group.features.shape(), std::move(out)), group.labels};
}

std::vector<QueryGroup> apply_standardizer(const FeatureStats& stats, std::span<const QueryGroup> groups) {
  std::vector<QueryGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(apply_standardizer(stats, g));
  return out;
}

QueryGroup pad_or_sample(const QueryGroup& group, std::size_t target, std::uint64_t seed) {
  if (target == 0) throw DomainError("pad_or_sample: target length must be at least 1");
  const std::size_t n = group.size();
  const std::size_t d = group.feature_count();
  if (n == target) return group;

  std::vector<std::size_t> keep(n);
  std::iota(keep.begin(), keep.end(), 0);
  if (n > target) {
    Rng rng(seed);
    for (std::size_t i = 0; i < target; ++i) std::swap(keep[i], keep[i + rng.index(n - i)]);
    keep.resize(target);
    std::sort(keep.begin(), keep.end());
  }

  std::vector<double> features(target * d, 0.0);
  std::vector<int> labels(target, 0);
  std::vector<std::uint8_t> mask(target, 0);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t src = keep[r];
    std::copy_n(group.features.values().begin() + static_cast<std::ptrdiff_t>(src * d), d,
                features.begin() + static_cast<std::ptrdiff_t>(r * d));
    labels[r] = group.labels.label(src);
    mask[r] = group.labels.mask()[src];
  }
  return {group.qid, Array::matrix(target, d, std::move(features)), RelevanceVector(std::move(labels), std::move(mask))};
}

DataSplit split(std::span<const QueryGroup> groups, std::uint64_t seed, double train_fraction,
                double validation_fraction) {
  if (groups.size() < 3) throw DomainError("split: need at least 3 query groups, got " + std::to_string(groups.size()));
  const double test_fraction = 1.0 - train_fraction - validation_fraction;
  if (!(train_fraction > 0.0) || !(validation_fraction > 0.0) || !(test_fraction > 0.0)) {
    throw DomainError("split: fractions must be positive and sum to less than 1");
  }
  const double n = static_cast<double>(groups.size());
  const auto n_validation = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * validation_fraction)));
  const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * test_fraction)));

  std::vector<std::size_t> idx(groups.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  auto take = [&](std::size_t from, std::size_t to) {
    std::vector<std::size_t> part(idx.begin() + static_cast<std::ptrdiff_t>(from),
                                  idx.begin() + static_cast<std::ptrdiff_t>(to));
    std::sort(part.begin(), part.end());
    std::vector<QueryGroup> out;
    for (auto i : part) out.push_back(groups[i]);
    return out;
  };
  const std::size_t n_train = groups.size() - n_validation - n_test;
  return {take(0, n_train), take(n_train, n_train + n_validation), take(n_train + n_validation, groups.size())};
}

SyntheticData generate_synthetic(const SyntheticOptions& options) {
  if (options.queries == 0 || options.docs_per_query == 0 || options.features == 0) {
    throw DomainError("generate_synthetic: sizes must be positive");
  }
  static constexpr double kThresholds[] = {0.0, 0.7, 1.4, 2.1};
  Rng rng(options.seed);
  SyntheticData data;
  data.weights.resize(options.features);
  double norm = 0.0;
  for (auto& w : data.weights) {
    w = rng.normal();
    norm += w * w;
  }
  norm = std::sqrt(norm);
  for (auto& w : data.weights) w /= norm;

  const std::size_t d = options.features;
  for (std::size_t q = 0; q < options.queries; ++q) {
    std::vector<double> features(options.docs_per_query * d);
    std::vector<int> labels(options.docs_per_query);
    for (std::size_t r = 0; r < options.docs_per_query; ++r) {
      double utility = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        const double x = rng.normal();
        features[r * d + f] = x;
        utility += data.weights[f] * x;
      }
      const double noisy = utility + options.noise * rng.normal();
      labels[r] = static_cast<int>(std::count_if(std::begin(kThresholds), std::end(kThresholds),
                                                 [&](double t) { return noisy >= t; }));
    }
    data.groups.push_back({"q" + std::to_string(q + 1), Array::matrix(options.docs_per_query, d, std::move(features)),
                           RelevanceVector(std::move(labels))});
  }
  return data;
}

std::vector<double> oracle_scores(const SyntheticData& data, const QueryGroup& group) {
  if (group.feature_count() != data.weights.size()) throw ShapeError("oracle_scores: feature count mismatch");
  std::vector<double> out(group.size());
  for (std::size_t r = 0; r < group.size(); ++r) {
    double u = 0.0;
    for (std::size_t f = 0; f < data.weights.size(); ++f) u += data.weights[f] * group.features.at(r, f);
    out[r] = u;
  }
  return out;
}

}  // namespace rankrelax
