#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "rankrelax/checkpoint.hpp"
#include "rankrelax/error.hpp"
#include "rankrelax/grad_check.hpp"
#include "rankrelax/model.hpp"
#include "rankrelax/random.hpp"

using namespace rankrelax;

namespace {

Array random_features(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> v(n * d);
  for (auto& x : v) x = rng.normal();
  return Array::matrix(n, d, std::move(v));
}

// Straight-line forward pass.
std::vector<double> reference_score(const MlpParams& p, const Array& x) {
  std::vector<double> out;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::vector<double> h(x.values().begin() + static_cast<std::ptrdiff_t>(r * x.cols()),
                          x.values().begin() + static_cast<std::ptrdiff_t>((r + 1) * x.cols()));
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      const auto& layer = p.layers[l];
      std::vector<double> next(layer.weight.cols());
      for (std::size_t o = 0; o < next.size(); ++o) {
        double a = layer.bias[o];
        for (std::size_t i = 0; i < h.size(); ++i) a += h[i] * layer.weight.at(i, o);
        next[o] = (l + 1 < p.layers.size()) ? std::max(a, 0.0) : a;
      }
      h = std::move(next);
    }
    out.push_back(p.output_activation == OutputActivation::tanh ? std::tanh(h[0]) : h[0]);
  }
  return out;
}

MlpParams randomized(MlpParams p, std::uint64_t seed) {
  Rng rng(seed);
  auto tensors = parameter_tensors(p);
  for (auto& t : tensors) {
    std::vector<double> v(t.size());
    for (auto& x : v) x = rng.uniform(-0.5, 0.5);
    t = Array(t.shape(), std::move(v));
  }
  return with_parameter_tensors(p, std::move(tensors));
}

}  // namespace

TEST(Activation, Names) {
  EXPECT_EQ(parse_activation("tanh"), OutputActivation::tanh);
  EXPECT_EQ(parse_activation(activation_name(OutputActivation::none)), OutputActivation::none);
  EXPECT_THROW((void)parse_activation("relu"), DomainError);
}

TEST(InitParams, ShapesAndCount) {
  const auto p = init_params({10, 32, 1}, 42);
  ASSERT_EQ(p.layers.size(), 2u);
  EXPECT_EQ(p.layers[0].weight.shape(), (Shape{10, 32}));
  EXPECT_EQ(p.layers[0].bias.shape(), (Shape{32}));
  EXPECT_EQ(p.layers[1].weight.shape(), (Shape{32, 1}));
  EXPECT_EQ(p.parameter_count(), 10u * 32 + 32 + 32 + 1);
  EXPECT_EQ(p.input_dim(), 10u);
  for (const auto& layer : p.layers) {
    for (double b : layer.bias.values()) EXPECT_EQ(b, 0.0);
  }
}

TEST(InitParams, SeedDeterminism) {
  const auto a = init_params({6, 8, 4, 1}, 5);
  const auto b = init_params({6, 8, 4, 1}, 5);
  const auto c = init_params({6, 8, 4, 1}, 6);
  for (std::size_t l = 0; l < a.layers.size(); ++l) EXPECT_EQ(a.layers[l].weight.values(), b.layers[l].weight.values());
  EXPECT_NE(a.layers[0].weight.values(), c.layers[0].weight.values());
}

TEST(InitParams, GlorotUniformMoments) {
  const auto p = init_params({200, 300, 1}, 9);
  const double bound = std::sqrt(6.0 / 500.0);
  const auto& w = p.layers[0].weight.values();
  double mean = 0.0, sq = 0.0;
  for (double v : w) {
    EXPECT_LE(std::fabs(v), bound);
    mean += v;
    sq += v * v;
  }
  const double n = static_cast<double>(w.size());
  mean /= n;
  const double variance = sq / n - mean * mean;
  const double expected = bound * bound / 3.0;
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(expected / n));
  EXPECT_NEAR(variance, expected, 0.02 * expected);
}

TEST(InitParams, Invalid) {
  EXPECT_THROW(init_params({10}, 1), DomainError);
  EXPECT_THROW(init_params({10, 0, 1}, 1), DomainError);
  EXPECT_THROW(init_params({10, 4}, 1), DomainError);
}

TEST(Score, MatchesReference) {
  Rng rng(1);
  for (auto act : {OutputActivation::none, OutputActivation::tanh}) {
    const auto p = randomized(init_params({5, 7, 3, 1}, 2, act), 3);
    const Array x = random_features(rng, 9, 5);
    const auto expected = reference_score(p, x);
    const auto got = score(p, x);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
    Tape tape;
    const Var v = score(bind(tape, p), tape.constant(x));
    EXPECT_EQ(v.shape(), (Shape{9}));
    EXPECT_EQ(v.value().values(), got);
  }
}

TEST(Score, ZeroWeightsGiveOutputBias) {
  auto p = init_params({4, 3, 1}, 1);
  auto tensors = parameter_tensors(p);
  for (auto& t : tensors) t = Array::zeros(t.shape());
  tensors[3] = Array::vector({0.25});
  p = with_parameter_tensors(p, std::move(tensors));
  Rng rng(2);
  for (double s : score(p, random_features(rng, 6, 4))) EXPECT_EQ(s, 0.25);
}

TEST(Score, TanhOutputInUnitInterval) {
  Rng rng(3);
  auto p = randomized(init_params({4, 16, 1}, 1, OutputActivation::tanh), 4);
  for (double s : score(p, random_features(rng, 200, 4))) {
    EXPECT_GT(s, -1.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(Score, RowsScoredIndependently) {
  Rng rng(4);
  const auto p = randomized(init_params({3, 8, 1}, 1), 5);
  const Array x = random_features(rng, 10, 3);
  std::vector<std::size_t> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<double> permuted;
  for (auto r : perm) {
    for (std::size_t c = 0; c < 3; ++c) permuted.push_back(x.at(r, c));
  }
  const auto a = score(p, x);
  const auto b = score(p, Array::matrix(10, 3, permuted));
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(b[i], a[perm[i]]);
}

TEST(Score, FeatureMismatch) {
  const auto p = init_params({3, 1}, 1);
  EXPECT_THROW(score(p, Array::matrix(2, 4, std::vector<double>(8, 0.0))), ShapeError);
}

TEST(Score, GradientsMatchFiniteDifferences) {
  Rng rng(5);
  const auto p = randomized(init_params({4, 6, 1}, 1, OutputActivation::tanh), 6);
  const Array x = random_features(rng, 5, 4);
  const Array w = Array::vector({1.0, -2.0, 0.5, 3.0, -1.0});
  const auto tensors = parameter_tensors(p);
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    const auto r = grad_check(
        [&](Tape& tape, const Var& v) {
          BoundMlp bound{&p, {}};
          for (std::size_t u = 0; u < tensors.size(); ++u) bound.tensors.push_back(u == t ? v : tape.constant(tensors[u]));
          return sum(score(bound, tape.constant(x)) * tape.constant(w));
        },
        tensors[t]);
    EXPECT_LT(r.max_relative_error, 1e-6) << "tensor " << t;
  }
  const auto r = grad_check(
      [&](Tape& tape, const Var& v) { return sum(score(bind(tape, p), v) * tape.constant(w)); }, x);
  EXPECT_LT(r.max_relative_error, 1e-6);
}

TEST(ParameterTensors, RoundTripAndValidation) {
  const auto p = init_params({3, 2, 1}, 1);
  const auto t = parameter_tensors(p);
  ASSERT_EQ(t.size(), 4u);
  const auto q = with_parameter_tensors(p, t);
  for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(q.layers[l].weight.values(), p.layers[l].weight.values());
  EXPECT_THROW(with_parameter_tensors(p, {t[0]}), ShapeError);
  auto bad = t;
  bad[0] = Array::zeros({2, 2});
  EXPECT_THROW(with_parameter_tensors(p, bad), ShapeError);
}

TEST(Checkpoint, RoundTripIsExact) {
  Checkpoint c{randomized(init_params({3, 5, 1}, 1, OutputActivation::tanh), 2),
               FeatureStats{{0.1, -2.0 / 3.0, 1e-17}, {1.0, 0.3, 7.0}, {0, 1, 0}}};
  const auto text = serialize_checkpoint(c);
  const auto back = deserialize_checkpoint(text);
  EXPECT_EQ(back.params.dims, c.params.dims);
  EXPECT_EQ(back.params.output_activation, OutputActivation::tanh);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_EQ(back.params.layers[l].weight.values(), c.params.layers[l].weight.values());
    EXPECT_EQ(back.params.layers[l].bias.values(), c.params.layers[l].bias.values());
  }
  EXPECT_EQ(back.stats.mean, c.stats.mean);
  EXPECT_EQ(back.stats.stddev, c.stats.stddev);
  EXPECT_EQ(back.stats.log_transform, c.stats.log_transform);
  EXPECT_EQ(serialize_checkpoint(back), text);

  const auto path = std::filesystem::temp_directory_path() / "rankrelax_test_checkpoint.json";
  save_checkpoint(path, c);
  EXPECT_EQ(serialize_checkpoint(load_checkpoint(path)), text);
  std::filesystem::remove(path);
}

TEST(Checkpoint, Errors) {
  EXPECT_THROW(deserialize_checkpoint("not json"), ParseError);
  EXPECT_THROW(deserialize_checkpoint(R"({"format": "other", "version": 1})"), ParseError);
  Checkpoint c{init_params({2, 1}, 1), FeatureStats{{0, 0}, {1, 1}, {0, 0}}};
  auto text = serialize_checkpoint(c);
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos) << text;
  text.replace(pos, 12, "\"version\": 9");
  EXPECT_THROW(deserialize_checkpoint(text), ParseError);
  Checkpoint mismatched{init_params({2, 1}, 1), FeatureStats{{0}, {1}, {0}}};
  EXPECT_THROW(deserialize_checkpoint(serialize_checkpoint(mismatched)), ParseError);
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/model.json"), IoError);
}
