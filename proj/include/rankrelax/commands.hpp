#pragma once

// Implementations behind the command-line subcommands. Each run_* function
// writes human-readable output to `out` and returns a process exit code;
// failures are reported by throwing rankrelax::Error.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rankrelax/config.hpp"
#include "rankrelax/losses.hpp"
#include "rankrelax/metrics.hpp"

namespace rankrelax {

inline constexpr int kDefaultPrecision = 6;

/// Fixed-precision number formatting shared by all text and CSV output.
std::string format_number(double x, int precision = kDefaultPrecision);

// ---- sort-demo ----------------------------------------------------------

struct SortDemoRow {
  std::string label;  // "exact" or "tau=<value>"
  double temperature = 0.0;  // 0 for the exact row
  std::vector<double> values;
  double sum = 0.0;
};

struct SortDemoTable {
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<SortDemoRow> rows;  // exact, then each temperature
};

/// Scores [0.5, 0.2, 0.1, 0.01, 0.65, 0.3], labels [4, 2, 1, 0, 4, 3]: the
/// exactly sorted labels and P_hat * y for each temperature.
SortDemoTable sort_demo_table(const std::vector<double>& temperatures = {0.01, 0.1, 1.0});

struct SortDemoOptions {
  std::filesystem::path csv;
  int precision = kDefaultPrecision;
};

int run_sort_demo(const SortDemoOptions& options, std::ostream& out);

// ---- sweep --------------------------------------------------------------

enum class Figure { fig1, fig2 };

struct SweepOptions {
  Figure figure = Figure::fig1;
  std::vector<double> temperatures = {1.0};
  double lo = -1.0;
  double hi = 5.0;
  std::size_t count = 500;
  std::filesystem::path out;
  int precision = kDefaultPrecision;
};

struct SweepRow {
  double x = 0.0;
  double ndcg = 0.0;
  double neural_ndcg_scaled = 0.0;    // NeuralNDCG (not negated) with Sinkhorn scaling
  double neural_ndcg_unscaled = 0.0;  // without
  double tau = 0.0;
};

/// fig1: y = [2,1,0,0,0], s = [4,1,0,0,x]; fig2: y = [1,2,3,4,5], s = [1,2,3,4,x].
/// Rows are grouped by temperature, x ascending within a group.
std::vector<SweepRow> sweep_rows(const SweepOptions& options);
std::string sweep_csv(const std::vector<SweepRow>& rows, int precision = kDefaultPrecision);
int run_sweep(const SweepOptions& options, std::ostream& out);

Figure parse_figure(std::string_view name);
/// "lo:hi:count" with count >= 2 and lo < hi.
void parse_grid(std::string_view text, double& lo, double& hi, std::size_t& count);
/// Comma-separated positive reals.
std::vector<double> parse_temperatures(std::string_view text);

// ---- gradcheck ----------------------------------------------------------

struct GradcheckOptions {
  std::vector<LossKind> kinds;  // empty = every loss with a scalar value
  std::size_t max_n = 10;
  std::size_t trials = 50;
  double step = 1e-5;
  double threshold = 1e-4;
  std::uint64_t seed = kDefaultSeed;
  int precision = kDefaultPrecision;
};

struct GradcheckSummary {
  LossKind kind;
  std::size_t trials = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

/// Random instances: n uniform in [2, max_n], scores uniform in [-2, 2],
/// labels uniform in 0..4 with at least two distinct labels.
std::vector<GradcheckSummary> gradcheck_losses(const GradcheckOptions& options);
int run_gradcheck(const GradcheckOptions& options, std::ostream& out);

// ---- train / evaluate ---------------------------------------------------

int run_train(const std::filesystem::path& config_path, std::ostream& out, int precision = kDefaultPrecision);

struct EvaluateOptions {
  std::filesystem::path model;
  std::filesystem::path data;
  std::vector<RankCutoff> ks = {RankCutoff::at(5), RankCutoff::at(10), RankCutoff::max()};
  std::filesystem::path csv;
  int precision = kDefaultPrecision;
};

/// "5,10,max"
std::vector<RankCutoff> parse_cutoffs(std::string_view text);
int run_evaluate(const EvaluateOptions& options, std::ostream& out);

// ---- make-synthetic -----------------------------------------------------

struct SyntheticCommandOptions {
  std::filesystem::path dir;
  std::size_t queries = 200;
  std::size_t docs = 20;
  std::size_t features = 10;
  double noise = 0.3;
  std::uint64_t seed = kDefaultSeed;
};

/// Writes train.txt, vali.txt and test.txt (60/20/20 by query) into `dir`.
int run_make_synthetic(const SyntheticCommandOptions& options, std::ostream& out);

}  // namespace rankrelax
