#include <gtest/gtest.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "rankrelax/data_io.hpp"
#include "rankrelax/error.hpp"

using namespace rankrelax;

namespace {

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

std::size_t parse_error_line(std::string_view text) {
  try {
    parse_letor_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

QueryGroup make_group(std::string qid, std::size_t n, std::size_t d, double base) {
  std::vector<double> f(n * d);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = base + static_cast<double>(i);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 5);
  return {std::move(qid), Array::matrix(n, d, std::move(f)), RelevanceVector(std::move(labels))};
}

}  // namespace

TEST(ParseLetor, GroupsAndFeatures) {
  const auto groups = parse_letor_text(
      "2 qid:1 1:0.5 3:1.5 # comment\n"
      "0 qid:1 2:-1\n"
      "\n"
      "1 qid:7 1:2e1\n"
      "3 qid:1 1:4\n");
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].qid, "1");
  EXPECT_EQ(groups[1].qid, "7");
  EXPECT_EQ(groups[0].labels.labels(), (std::vector<int>{2, 0, 3}));
  EXPECT_EQ(groups[0].features.shape(), (Shape{3, 3}));
  EXPECT_EQ(groups[0].features.values(), (std::vector<double>{0.5, 0, 1.5, 0, -1, 0, 4, 0, 0}));
  EXPECT_EQ(groups[1].features.values(), (std::vector<double>{20, 0, 0}));
}

TEST(ParseLetor, EmptyInput) {
  EXPECT_TRUE(parse_letor_text("").empty());
  EXPECT_TRUE(parse_letor_text("# only a comment\n\n").empty());
}

TEST(ParseLetor, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("1 qid:1 1:0\nx qid:1 1:0\n"), 2u);
  EXPECT_EQ(parse_error_line("1 qid:1 1:0\n1 2:0\n"), 2u);
  EXPECT_EQ(parse_error_line("1 qid:1 1:abc\n"), 1u);
  EXPECT_EQ(parse_error_line("\n\n1 qid:1 0:1\n"), 3u);
  EXPECT_EQ(parse_error_line("1 qid:1 2:1 1:1\n"), 1u);
  EXPECT_EQ(parse_error_line("1 qid:1 1:nan\n"), 1u);
  EXPECT_EQ(parse_error_line("-1 qid:1 1:0\n"), 1u);
  EXPECT_EQ(parse_error_line("1.5 qid:1 1:0\n"), 1u);
  try {
    parse_letor_text("1 qid:1 1:0\n1 qid:1 1:zz\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ParseLetor, MissingFile) { EXPECT_THROW(parse_letor("/nonexistent/file.txt"), IoError); }

TEST(ParseLetor, GzipMatchesPlainText) {
  const std::string text = "2 qid:a 1:0.25 2:3\n0 qid:b 1:-1 2:0\n1 qid:a 1:1 2:1\n";
  const auto plain = temp_file("rankrelax_test_plain.txt");
  const auto packed = temp_file("rankrelax_test_packed.txt.gz");
  std::ofstream(plain) << text;
  gzFile gz = gzopen(packed.c_str(), "wb");
  ASSERT_NE(gz, nullptr);
  gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
  gzclose(gz);
  const auto a = parse_letor(plain);
  const auto b = parse_letor(packed);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].qid, b[i].qid);
    EXPECT_EQ(a[i].features.values(), b[i].features.values());
    EXPECT_EQ(a[i].labels.labels(), b[i].labels.labels());
  }
  std::filesystem::remove(plain);
  std::filesystem::remove(packed);
}

TEST(FormatLetor, RoundTripIsExact) {
  auto data = generate_synthetic({5, 7, 4, 0.3, 3});
  const auto text = format_letor(data.groups);
  const auto back = parse_letor_text(text);
  ASSERT_EQ(back.size(), data.groups.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].qid, data.groups[i].qid);
    EXPECT_EQ(back[i].features.values(), data.groups[i].features.values());
    EXPECT_EQ(back[i].labels.labels(), data.groups[i].labels.labels());
  }
  EXPECT_EQ(format_letor(back), text);
}

TEST(FormatLetor, SkipsPadding) {
  const auto padded = pad_or_sample(make_group("q", 2, 2, 1.0), 4, 0);
  const auto text = format_letor(std::span<const QueryGroup>(&padded, 1));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(WidenFeatures, AppendsZeroColumns) {
  const auto g = make_group("q", 2, 2, 1.0);
  const auto wide = widen_features(std::span<const QueryGroup>(&g, 1), 4);
  EXPECT_EQ(wide[0].features.values(), (std::vector<double>{1, 2, 0, 0, 3, 4, 0, 0}));
  EXPECT_THROW(widen_features(std::span<const QueryGroup>(&g, 1), 1), ShapeError);
}

TEST(Standardizer, MeanAndStd) {
  const std::vector<QueryGroup> train = {
      {"a", Array::matrix(2, 2, {1, 5, 3, 5}), RelevanceVector({1, 0})},
      {"b", Array::matrix(1, 2, {5, 5}), RelevanceVector({2})},
  };
  const auto stats = fit_standardizer(train);
  EXPECT_DOUBLE_EQ(stats.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(stats.stddev[0], std::sqrt(8.0 / 3.0));
  // A constant feature keeps a unit divisor and maps to 0.
  EXPECT_EQ(stats.stddev[1], 1.0);
  const auto out = apply_standardizer(stats, train[0]);
  EXPECT_EQ(out.features.at(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(out.features.at(0, 0), -2.0 / std::sqrt(8.0 / 3.0));
}

TEST(Standardizer, TrainingStatisticsAreStandardized) {
  const auto data = generate_synthetic({30, 10, 3, 0.3, 4});
  const auto stats = fit_standardizer(data.groups);
  const auto out = apply_standardizer(stats, data.groups);
  for (std::size_t f = 0; f < 3; ++f) {
    double sum = 0, sq = 0, n = 0;
    for (const auto& g : out) {
      for (std::size_t r = 0; r < g.size(); ++r) {
        sum += g.features.at(r, f);
        sq += g.features.at(r, f) * g.features.at(r, f);
        n += 1;
      }
    }
    EXPECT_NEAR(sum / n, 0.0, 1e-12);
    EXPECT_NEAR(sq / n, 1.0, 1e-12);
  }
}

TEST(Standardizer, LogTransformsHeavyFeatures) {
  const std::vector<QueryGroup> train = {
      {"a", Array::matrix(3, 2, {1e5, 2, -3e4, 4, 10, 6}), RelevanceVector({1, 0, 2})},
  };
  const auto stats = fit_standardizer(train);
  EXPECT_EQ(stats.log_transform, (std::vector<std::uint8_t>{1, 0}));
  double max_abs = 0.0;
  for (const auto& g : train) {
    for (std::size_t r = 0; r < g.size(); ++r) max_abs = std::max(max_abs, std::fabs(signed_log1p(g.features.at(r, 0))));
  }
  EXPECT_LT(max_abs, 15.0);
  EXPECT_DOUBLE_EQ(signed_log1p(-std::expm1(2.0)), -2.0);
  EXPECT_EQ(signed_log1p(0.0), 0.0);
}

TEST(Standardizer, IgnoresAndPreservesPadding) {
  const auto g = make_group("q", 3, 2, 1.0);
  const auto padded = pad_or_sample(g, 5, 0);
  const auto a = fit_standardizer(std::span<const QueryGroup>(&g, 1));
  const auto b = fit_standardizer(std::span<const QueryGroup>(&padded, 1));
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
  const auto out = apply_standardizer(b, padded);
  for (std::size_t r = 3; r < 5; ++r) {
    EXPECT_EQ(out.features.at(r, 0), 0.0);
    EXPECT_EQ(out.features.at(r, 1), 0.0);
  }
}

TEST(Standardizer, Errors) {
  EXPECT_THROW(fit_standardizer(std::vector<QueryGroup>{}), DomainError);
  const auto g = make_group("q", 3, 2, 1.0);
  const auto stats = fit_standardizer(std::span<const QueryGroup>(&g, 1));
  EXPECT_THROW(apply_standardizer(stats, make_group("r", 2, 3, 0.0)), ShapeError);
}

TEST(PadOrSample, PadsShortGroups) {
  const auto g = make_group("q", 3, 2, 1.0);
  const auto p = pad_or_sample(g, 5, 9);
  EXPECT_EQ(p.size(), 5u);
  EXPECT_EQ(p.labels.real_count(), 3u);
  EXPECT_EQ(p.labels.mask(), (std::vector<std::uint8_t>{1, 1, 1, 0, 0}));
  EXPECT_EQ(p.labels.labels(), (std::vector<int>{0, 1, 2, 0, 0}));
  EXPECT_EQ(p.features.values(), (std::vector<double>{1, 2, 3, 4, 5, 6, 0, 0, 0, 0}));
  EXPECT_EQ(pad_or_sample(g, 3, 9).features.values(), g.features.values());
  EXPECT_THROW(pad_or_sample(g, 0, 9), DomainError);
}

TEST(PadOrSample, SamplesWithoutReplacementInOrder) {
  const auto g = make_group("q", 20, 1, 0.0);  // feature value = document index
  std::set<double> seen_first;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = pad_or_sample(g, 6, seed);
    ASSERT_EQ(s.size(), 6u);
    EXPECT_EQ(s.labels.real_count(), 6u);
    const auto& v = s.features.values();
    EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
    EXPECT_EQ(std::set<double>(v.begin(), v.end()).size(), 6u);
    for (std::size_t r = 0; r < 6; ++r) EXPECT_EQ(s.labels.label(r), static_cast<int>(v[r]) % 5);
    EXPECT_EQ(pad_or_sample(g, 6, seed).features.values(), v);
    seen_first.insert(v[0]);
  }
  EXPECT_GT(seen_first.size(), 3u);
}

TEST(Split, SixtyTwentyTwentyPartition) {
  std::vector<QueryGroup> groups;
  for (int i = 0; i < 10; ++i) groups.push_back(make_group("q" + std::to_string(i), 2, 1, i));
  const auto s = split(groups, 3);
  EXPECT_EQ(s.train.size(), 6u);
  EXPECT_EQ(s.validation.size(), 2u);
  EXPECT_EQ(s.test.size(), 2u);
  std::set<std::string> all;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (const auto& g : *part) EXPECT_TRUE(all.insert(g.qid).second) << g.qid;
  }
  EXPECT_EQ(all.size(), 10u);
  const auto again = split(groups, 3);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(again.test[i].qid, s.test[i].qid);
  EXPECT_THROW(split(std::vector<QueryGroup>(groups.begin(), groups.begin() + 2), 3), DomainError);
  EXPECT_THROW(split(groups, 3, 0.9, 0.2), DomainError);
}

TEST(Split, SeedChangesAssignment) {
  std::vector<QueryGroup> groups;
  for (int i = 0; i < 50; ++i) groups.push_back(make_group("q" + std::to_string(i), 1, 1, i));
  const auto a = split(groups, 1);
  const auto b = split(groups, 2);
  std::vector<std::string> qa, qb;
  for (const auto& g : a.test) qa.push_back(g.qid);
  for (const auto& g : b.test) qb.push_back(g.qid);
  EXPECT_NE(qa, qb);
}

TEST(Synthetic, ShapesLabelsAndOracle) {
  const auto data = generate_synthetic({12, 8, 5, 0.3, 7});
  ASSERT_EQ(data.groups.size(), 12u);
  EXPECT_EQ(data.groups[0].qid, "q1");
  double norm = 0.0;
  for (double w : data.weights) norm += w * w;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  std::set<int> labels;
  for (const auto& g : data.groups) {
    EXPECT_EQ(g.features.shape(), (Shape{8, 5}));
    for (int l : g.labels.labels()) {
      EXPECT_GE(l, 0);
      EXPECT_LE(l, 4);
      labels.insert(l);
    }
  }
  EXPECT_GE(labels.size(), 4u);
  // The noise-free utility ranks well.
  double ndcg = 0.0;
  for (const auto& g : data.groups) ndcg += ndcg_at_k(oracle_scores(data, g), g.labels, RankCutoff::at(5));
  EXPECT_GT(ndcg / 12.0, 0.8);
  const auto again = generate_synthetic({12, 8, 5, 0.3, 7});
  EXPECT_EQ(again.groups[3].features.values(), data.groups[3].features.values());
  EXPECT_THROW(generate_synthetic({0, 8, 5, 0.3, 7}), DomainError);
}
