#include "rankrelax/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "rankrelax/checkpoint.hpp"
#include "rankrelax/data_io.hpp"
#include "rankrelax/error.hpp"
#include "rankrelax/grad_check.hpp"
#include "rankrelax/random.hpp"
#include "rankrelax/relaxed_sort.hpp"
#include "rankrelax/trainer.hpp"

namespace rankrelax {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

double parse_double(std::string_view text, std::string_view what) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(x)) {
    throw DomainError(std::string(what) + ": '" + std::string(text) + "' is not a number");
  }
  return x;
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_numbers(const std::vector<double>& v, int precision) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i], precision);
  return out;
}

void check_precision(int precision) {
  if (precision < 1 || precision > 17) throw DomainError("precision must lie in [1, 17]");
}

}  // namespace

std::string format_number(double x, int precision) { return fmt::format("{:.{}g}", x, precision); }

// ---- sort-demo ----------------------------------------------------------

SortDemoTable sort_demo_table(const std::vector<double>& temperatures) {
  SortDemoTable table;
  table.scores = {0.5, 0.2, 0.1, 0.01, 0.65, 0.3};
  table.labels = {4, 2, 1, 0, 4, 3};
  const RelevanceVector y(table.labels);

  SortDemoRow exact{"exact", 0.0, {}, 0.0};
  const RelevanceVector ranked = sort_by_scores(table.scores, y);
  for (auto label : ranked.labels()) {
    exact.values.push_back(label);
    exact.sum += label;
  }
  table.rows.push_back(exact);

  const std::size_t n = table.scores.size();
  for (double tau : temperatures) {
    const auto p = neural_sort(table.scores, tau).matrix;
    SortDemoRow row{"tau=" + format_number(tau), tau, std::vector<double>(n, 0.0), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) row.values[i] += p.at(i, j) * table.labels[j];
      row.sum += row.values[i];
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

int run_sort_demo(const SortDemoOptions& options, std::ostream& out) {
  check_precision(options.precision);
  const auto table = sort_demo_table();
  out << fmt::format("# sort-demo scores={} labels={} temperatures=0.01,0.1,1 precision={} csv={} seed=none\n",
                     join_numbers(table.scores, options.precision),
                     fmt::format("{}", fmt::join(table.labels, ",")), options.precision,
                     options.csv.empty() ? "-" : options.csv.string());
  const int width = options.precision + 7;
  std::string header = fmt::format("{:<10}", "row");
  for (std::size_t i = 1; i <= table.scores.size(); ++i) header += fmt::format("{:>{}}", fmt::format("y{}", i), width);
  header += fmt::format("{:>{}}", "sum", width);
  out << header << '\n';
  for (const auto& row : table.rows) {
    std::string line = fmt::format("{:<10}", row.label);
    for (double v : row.values) line += fmt::format("{:>{}}", format_number(v, options.precision), width);
    line += fmt::format("{:>{}}", format_number(row.sum, options.precision), width);
    out << line << '\n';
  }
  if (!options.csv.empty()) {
    std::string csv = "row,tau";
    for (std::size_t i = 1; i <= table.scores.size(); ++i) csv += fmt::format(",y{}", i);
    csv += ",sum\n";
    for (const auto& row : table.rows) {
      csv += fmt::format("{},{},{},{}\n", row.label, format_number(row.temperature, options.precision),
                         join_numbers(row.values, options.precision), format_number(row.sum, options.precision));
    }
    write_file(options.csv, csv);
  }
  return 0;
}

// ---- sweep --------------------------------------------------------------

Figure parse_figure(std::string_view name) {
  if (name == "fig1") return Figure::fig1;
  if (name == "fig2") return Figure::fig2;
  throw DomainError("figure must be fig1 or fig2, got '" + std::string(name) + "'");
}

void parse_grid(std::string_view text, double& lo, double& hi, std::size_t& count) {
  const auto parts = split_on(text, ':');
  if (parts.size() != 3) throw DomainError("grid must be lo:hi:count, got '" + std::string(text) + "'");
  lo = parse_double(parts[0], "grid");
  hi = parse_double(parts[1], "grid");
  std::size_t c = 0;
  auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), c);
  if (ec != std::errc() || ptr != parts[2].data() + parts[2].size()) {
    throw DomainError("grid count '" + std::string(parts[2]) + "' is not an integer");
  }
  if (c < 2) throw DomainError("grid count must be at least 2");
  if (!(lo < hi)) throw DomainError("grid needs lo < hi");
  count = c;
}

std::vector<double> parse_temperatures(std::string_view text) {
  std::vector<double> out;
  for (auto part : split_on(text, ',')) {
    const double tau = parse_double(part, "tau");
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    out.push_back(tau);
  }
  return out;
}

std::vector<SweepRow> sweep_rows(const SweepOptions& options) {
  if (options.count < 2) throw DomainError("sweep: grid count must be at least 2");
  if (!(options.lo < options.hi)) throw DomainError("sweep: grid needs lo < hi");
  if (options.temperatures.empty()) throw DomainError("sweep: no temperatures");
  const bool fig1 = options.figure == Figure::fig1;
  const RelevanceVector y(fig1 ? std::vector<int>{2, 1, 0, 0, 0} : std::vector<int>{1, 2, 3, 4, 5});
  std::vector<double> s = fig1 ? std::vector<double>{4, 1, 0, 0, 0} : std::vector<double>{1, 2, 3, 4, 0};

  std::vector<SweepRow> rows;
  for (double tau : options.temperatures) {
    if (!(tau > 0.0)) throw DomainError("sweep: tau must be positive");
    NeuralNdcgOptions scaled;
    scaled.temperature = tau;
    NeuralNdcgOptions unscaled = scaled;
    unscaled.sinkhorn = false;
    for (std::size_t i = 0; i < options.count; ++i) {
      const double x =
          options.lo + (options.hi - options.lo) * static_cast<double>(i) / static_cast<double>(options.count - 1);
      s.back() = x;
      Tape tape;
      const Var sv = tape.constant(Array::vector(s));
      rows.push_back({x, ndcg_at_k(s, y, RankCutoff::max()), -neural_ndcg(sv, y, scaled).value().item(),
                      -neural_ndcg(sv, y, unscaled).value().item(), tau});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, int precision) {
  std::string csv = "x,ndcg,neural_ndcg_scaled,neural_ndcg_unscaled,tau\n";
  for (const auto& r : rows) {
    csv += fmt::format("{},{},{},{},{}\n", format_number(r.x, precision), format_number(r.ndcg, precision),
                       format_number(r.neural_ndcg_scaled, precision),
                       format_number(r.neural_ndcg_unscaled, precision), format_number(r.tau, precision));
  }
  return csv;
}

int run_sweep(const SweepOptions& options, std::ostream& out) {
  check_precision(options.precision);
  if (options.out.empty()) throw DomainError("sweep: --out is required");
  out << fmt::format("# sweep figure={} tau={} grid={}:{}:{} out={} precision={} seed=none\n",
                     options.figure == Figure::fig1 ? "fig1" : "fig2",
                     join_numbers(options.temperatures, options.precision), format_number(options.lo),
                     format_number(options.hi), options.count, options.out.string(), options.precision);
  const auto rows = sweep_rows(options);
  write_file(options.out, sweep_csv(rows, options.precision));
  out << fmt::format("wrote {} rows to {}\n", rows.size(), options.out.string());
  return 0;
}

// ---- gradcheck ----------------------------------------------------------

std::vector<GradcheckSummary> gradcheck_losses(const GradcheckOptions& options) {
  if (options.max_n < 2) throw DomainError("gradcheck: n must be at least 2");
  if (options.trials == 0) throw DomainError("gradcheck: trials must be at least 1");
  if (!(options.step > 0.0)) throw DomainError("gradcheck: step must be positive");
  std::vector<LossKind> kinds = options.kinds;
  if (kinds.empty()) {
    for (auto k : all_loss_kinds()) {
      if (has_scalar_loss(k)) kinds.push_back(k);
    }
  }
  std::vector<GradcheckSummary> out;
  for (auto kind : kinds) {
    if (!has_scalar_loss(kind)) throw DomainError("gradcheck: " + std::string(loss_name(kind)) + " has no scalar loss");
    LossConfig config;
    config.kind = kind;
    Rng rng(mix_seed(options.seed, {static_cast<std::uint64_t>(kind)}));
    GradcheckSummary summary{kind, options.trials, 0.0, false};
    for (std::size_t t = 0; t < options.trials; ++t) {
      const std::size_t n = 2 + rng.index(options.max_n - 1);
      std::vector<double> s(n);
      for (auto& v : s) v = rng.uniform(-2.0, 2.0);
      std::vector<int> labels(n);
      do {
        for (auto& l : labels) l = static_cast<int>(rng.index(5));
      } while (std::set<int>(labels.begin(), labels.end()).size() < 2);
      const RelevanceVector y(labels);
      const auto result = grad_check(
          [&](Tape&, const Var& x) { return compute_loss(config, x, y); }, Array::vector(s), options.step);
      summary.max_relative_error = std::max(summary.max_relative_error, result.max_relative_error);
    }
    summary.passed = summary.max_relative_error < options.threshold;
    out.push_back(summary);
  }
  return out;
}

int run_gradcheck(const GradcheckOptions& options, std::ostream& out) {
  check_precision(options.precision);
  std::string kinds;
  for (auto k : options.kinds) kinds += (kinds.empty() ? "" : ",") + std::string(loss_name(k));
  out << fmt::format("# gradcheck loss={} n<={} trials={} h={} threshold={} seed={}\n",
                     kinds.empty() ? "all" : kinds, options.max_n, options.trials, format_number(options.step),
                     format_number(options.threshold), options.seed);
  bool all_passed = true;
  for (const auto& s : gradcheck_losses(options)) {
    out << fmt::format("{:<16}{:>8}{:>16}  {}\n", loss_name(s.kind), s.trials,
                       format_number(s.max_relative_error, options.precision), s.passed ? "pass" : "FAIL");
    all_passed = all_passed && s.passed;
  }
  return all_passed ? 0 : 1;
}

// ---- train / evaluate ---------------------------------------------------

int run_train(const std::filesystem::path& config_path, std::ostream& out, int precision) {
  check_precision(precision);
  const TrainConfig config = load_config(config_path);
  out << "# train config=" << config_path.string() << " seed=" << config.seed << '\n';
  const std::string config_text = format_config(config);
  for (auto line : split_on(config_text, '\n')) {
    if (!line.empty()) out << "# " << line << '\n';
  }
  auto p = [&](double x) { return format_number(x, precision); };
  const auto result = train(config, [&](const EpochRecord& r) {
    out << fmt::format("epoch {:>4}  loss {:>12}  ndcg@5 {:>10}  ndcg@10 {:>10}  ndcg@max {:>10}  lr {:>10}  {}s\n",
                       r.epoch, p(r.loss), p(r.ndcg_at_5), p(r.ndcg_at_10), p(r.ndcg_at_max), p(r.lr), p(r.seconds));
    out.flush();
  });
  out << fmt::format("best epoch {}  test ndcg@5 {}  ndcg@10 {}  ndcg@max {}\n", result.best_epoch,
                     p(metric_at(result.test, RankCutoff::at(5))), p(metric_at(result.test, RankCutoff::at(10))),
                     p(metric_at(result.test, RankCutoff::max())));
  if (!config.model_out.empty()) out << "model written to " << config.model_out.string() << '\n';
  if (!config.history_out.empty()) out << "history written to " << config.history_out.string() << '\n';
  return 0;
}

std::vector<RankCutoff> parse_cutoffs(std::string_view text) {
  std::vector<RankCutoff> out;
  for (auto part : split_on(text, ',')) out.push_back(RankCutoff::parse(std::string(part)));
  return out;
}

int run_evaluate(const EvaluateOptions& options, std::ostream& out) {
  check_precision(options.precision);
  if (options.model.empty() || options.data.empty()) throw DomainError("evaluate: --model and --data are required");
  std::string ks;
  for (const auto& k : options.ks) ks += (ks.empty() ? "" : ",") + k.to_string();
  out << fmt::format("# evaluate model={} data={} k={} csv={} precision={} seed=none\n", options.model.string(),
                     options.data.string(), ks, options.csv.empty() ? "-" : options.csv.string(), options.precision);
  const Checkpoint checkpoint = load_checkpoint(options.model);
  auto groups = parse_letor(options.data);
  groups = widen_features(groups, checkpoint.stats.size());
  groups = apply_standardizer(checkpoint.stats, groups);
  const auto table = evaluate(checkpoint.params, groups, options.ks);

  out << fmt::format("{:<10}{:>6}{:>14}\n", "metric", "k", "value");
  std::string csv = "metric,k,value\n";
  for (const auto& m : table) {
    out << fmt::format("{:<10}{:>6}{:>14}\n", "ndcg", m.k.to_string(), format_number(m.value, options.precision));
    csv += fmt::format("ndcg,{},{}\n", m.k.to_string(), format_number(m.value, options.precision));
  }
  out << fmt::format("queries {}\n", groups.size());
  if (!options.csv.empty()) write_file(options.csv, csv);
  return 0;
}

// ---- make-synthetic -----------------------------------------------------

int run_make_synthetic(const SyntheticCommandOptions& options, std::ostream& out) {
  if (options.dir.empty()) throw DomainError("make-synthetic: --dir is required");
  out << fmt::format("# make-synthetic dir={} queries={} docs={} features={} noise={} seed={}\n",
                     options.dir.string(), options.queries, options.docs, options.features,
                     format_number(options.noise), options.seed);
  SyntheticOptions so;
  so.queries = options.queries;
  so.docs_per_query = options.docs;
  so.features = options.features;
  so.noise = options.noise;
  so.seed = options.seed;
  const auto data = generate_synthetic(so);
  const auto parts = split(data.groups, mix_seed(options.seed, {4}));
  std::error_code ec;
  std::filesystem::create_directories(options.dir, ec);
  if (ec) throw IoError("cannot create '" + options.dir.string() + "': " + ec.message());
  write_letor(options.dir / "train.txt", parts.train);
  write_letor(options.dir / "vali.txt", parts.validation);
  write_letor(options.dir / "test.txt", parts.test);
  out << fmt::format("wrote {} / {} / {} queries; utility weights {}\n", parts.train.size(), parts.validation.size(),
                     parts.test.size(), join_numbers(data.weights, 6));
  return 0;
}

}  // namespace rankrelax
