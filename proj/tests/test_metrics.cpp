#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankrelax/error.hpp"
#include "rankrelax/metrics.hpp"
#include "rankrelax/random.hpp"

using namespace rankrelax;

TEST(Gain, Values) {
  EXPECT_EQ(gain(0), 0.0);
  EXPECT_EQ(gain(2), 3.0);
  EXPECT_EQ(gain(4), 15.0);
  EXPECT_THROW(gain(-1), DomainError);
}

TEST(Discount, Values) {
  EXPECT_DOUBLE_EQ(discount(1), 1.0);
  EXPECT_DOUBLE_EQ(discount(3), 0.5);
  EXPECT_NEAR(discount(2), 0.6309297535714574, 1e-15);
  EXPECT_THROW(discount(0), DomainError);
}

TEST(RelevanceVector, Validation) {
  EXPECT_THROW(RelevanceVector({-1}), DomainError);
  EXPECT_THROW(RelevanceVector({1, 2}, {1, 0}), DomainError);
  EXPECT_THROW(RelevanceVector({1, 2}, {1}), ShapeError);
  const RelevanceVector y({3, 0, 0}, {1, 1, 0});
  EXPECT_EQ(y.real_count(), 2u);
  EXPECT_TRUE(y.has_padding());
  EXPECT_FALSE(y.is_empty_query());
  EXPECT_TRUE(RelevanceVector({0, 0}).is_empty_query());
}

TEST(RankCutoff, ParseAndEffective) {
  EXPECT_TRUE(RankCutoff::parse("max").is_max());
  EXPECT_EQ(RankCutoff::parse("5"), RankCutoff::at(5));
  EXPECT_THROW(RankCutoff::parse("0"), DomainError);
  EXPECT_THROW(RankCutoff::parse("5x"), DomainError);
  EXPECT_THROW(RankCutoff::at(0), DomainError);
  EXPECT_EQ(RankCutoff::at(10).effective(4), 4u);
  EXPECT_EQ(RankCutoff::max().effective(7), 7u);
  EXPECT_EQ(RankCutoff::at(3).to_string(), "3");
}

TEST(SortByScores, Examples) {
  const std::vector<double> s1 = {1, 2, 3};
  EXPECT_EQ(sort_by_scores(s1, RelevanceVector({0, 1, 2})).labels(), (std::vector<int>{2, 1, 0}));
  const std::vector<double> s2 = {1, 1};
  EXPECT_EQ(sort_by_scores(s2, RelevanceVector({3, 1})).labels(), (std::vector<int>{3, 1}));
  const std::vector<double> s3 = {0.5, 0.2, 0.1, 0.01, 0.65, 0.3};
  EXPECT_EQ(sort_by_scores(s3, RelevanceVector({4, 2, 1, 0, 4, 3})).labels(), (std::vector<int>{4, 4, 3, 2, 1, 0}));
  EXPECT_THROW(sort_by_scores(s1, RelevanceVector({1, 2})), ShapeError);
}

TEST(SortByScores, PaddingGoesLast) {
  const std::vector<double> s = {0.0, 9.0, 1.0};
  const auto ranked = sort_by_scores(s, RelevanceVector({2, 0, 1}, {1, 0, 1}));
  EXPECT_EQ(ranked.labels(), (std::vector<int>{1, 2, 0}));
  EXPECT_EQ(ranked.mask(), (std::vector<std::uint8_t>{1, 1, 0}));
}

TEST(Dcg, Examples) {
  EXPECT_EQ(dcg_at_k(RelevanceVector({0, 0, 0}), RankCutoff::max()), 0.0);
  EXPECT_NEAR(dcg_at_k(RelevanceVector({2, 1, 0}), RankCutoff::at(3)), 3.0 + 1.0 / std::log2(3.0), 1e-12);
  EXPECT_NEAR(dcg_at_k(RelevanceVector({2, 1, 0}), RankCutoff::at(3)), 3.63093, 1e-5);
  EXPECT_EQ(dcg_at_k(RelevanceVector({4, 3, 2}), RankCutoff::at(1)), 15.0);
}

TEST(Ndcg, Examples) {
  const std::vector<double> s = {0.3, 0.2, 0.1};
  EXPECT_DOUBLE_EQ(ndcg_at_k(s, RelevanceVector({2, 1, 0}), RankCutoff::max()), 1.0);
  EXPECT_EQ(ndcg_at_k(s, RelevanceVector({0, 0, 0}), RankCutoff::at(2)), 1.0);
  const std::vector<double> rev = {0.1, 0.2, 0.3};
  const double oracle = (0.0 + 1.0 / std::log2(3.0) + 3.0 / 2.0) / (3.0 + 1.0 / std::log2(3.0));
  EXPECT_NEAR(ndcg_at_k(rev, RelevanceVector({2, 1, 0}), RankCutoff::at(3)), oracle, 1e-12);
  EXPECT_NEAR(oracle, 0.58688, 1e-5);
}

TEST(MaxDcg, TieOrderDoesNotMatter) {
  // Any ordering that is descending in labels gives the same DCG.
  const RelevanceVector y({3, 1, 3, 0, 1});
  const double ideal = max_dcg_at_k(y, RankCutoff::max());
  const std::vector<double> a = {5, 2, 4, 0, 1};
  const std::vector<double> b = {4, 1, 5, 0, 2};
  EXPECT_DOUBLE_EQ(dcg_at_k(sort_by_scores(a, y), RankCutoff::max()), ideal);
  EXPECT_DOUBLE_EQ(dcg_at_k(sort_by_scores(b, y), RankCutoff::max()), ideal);
}

namespace {

struct Instance {
  std::vector<double> scores;
  RelevanceVector labels;
};

Instance random_instance(Rng& rng, std::size_t max_n = 12) {
  const std::size_t n = 1 + rng.index(max_n);
  Instance inst;
  std::vector<int> labels(n);
  for (auto& l : labels) l = static_cast<int>(rng.index(5));
  inst.scores.resize(n);
  for (auto& s : inst.scores) s = std::round(rng.uniform(-3, 3) * 4) / 4;  // quarter steps give ties
  inst.labels = RelevanceVector(labels);
  return inst;
}

}  // namespace

TEST(NdcgProperties, BoundedAndOneIffIdeal) {
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    const auto inst = random_instance(rng);
    for (auto k : {RankCutoff::at(1), RankCutoff::at(5), RankCutoff::max()}) {
      const double v = ndcg_at_k(inst.scores, inst.labels, k);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
    // Scores equal to labels always produce an ideal ordering.
    std::vector<double> perfect(inst.labels.labels().begin(), inst.labels.labels().end());
    EXPECT_NEAR(ndcg_at_k(perfect, inst.labels, RankCutoff::max()), 1.0, 1e-12);
    // NDCG@max is 1 exactly when the ranked labels are non-increasing.
    const auto ranked = sort_by_scores(inst.scores, inst.labels).labels();
    const bool ideal = std::is_sorted(ranked.begin(), ranked.end(), std::greater<>());
    const double v = ndcg_at_k(inst.scores, inst.labels, RankCutoff::max());
    if (inst.labels.is_empty_query() || ideal) {
      EXPECT_NEAR(v, 1.0, 1e-12);
    } else {
      EXPECT_LT(v, 1.0 - 1e-12);
    }
  }
}

TEST(NdcgProperties, MonotoneTransformInvariance) {
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) {
    const auto inst = random_instance(rng);
    std::vector<double> transformed;
    for (double s : inst.scores) transformed.push_back(std::exp(0.7 * s) + 3.0 * s);
    for (auto k : {RankCutoff::at(3), RankCutoff::max()}) {
      EXPECT_EQ(ndcg_at_k(inst.scores, inst.labels, k), ndcg_at_k(transformed, inst.labels, k));
    }
  }
}

TEST(NdcgProperties, PaddingInvariance) {
  Rng rng(13);
  for (int t = 0; t < 1000; ++t) {
    const auto inst = random_instance(rng);
    std::vector<double> padded_scores = inst.scores;
    std::vector<int> labels = inst.labels.labels();
    std::vector<std::uint8_t> mask(labels.size(), 1);
    const std::size_t extra = 1 + rng.index(5);
    for (std::size_t i = 0; i < extra; ++i) {
      padded_scores.push_back(rng.uniform(-10, 10));
      labels.push_back(0);
      mask.push_back(0);
    }
    const RelevanceVector padded(labels, mask);
    for (auto k : {RankCutoff::at(2), RankCutoff::at(5), RankCutoff::max()}) {
      EXPECT_EQ(ndcg_at_k(inst.scores, inst.labels, k), ndcg_at_k(padded_scores, padded, k));
    }
  }
}

TEST(NdcgProperties, IdealDcgEqualsMaxDcg) {
  Rng rng(14);
  for (int t = 0; t < 200; ++t) {
    const auto inst = random_instance(rng);
    std::vector<int> sorted = inst.labels.labels();
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    EXPECT_DOUBLE_EQ(dcg_at_k(RelevanceVector(sorted), RankCutoff::max()),
                     max_dcg_at_k(inst.labels, RankCutoff::max()));
  }
}
