#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rankrelax/checkpoint.hpp"
#include "rankrelax/commands.hpp"
#include "rankrelax/data_io.hpp"
#include "rankrelax/error.hpp"

using namespace rankrelax;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(FormatNumber, Precision) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333");
  EXPECT_EQ(format_number(14.0), "14");
  EXPECT_EQ(format_number(0.1, 17), "0.10000000000000001");
}

TEST(SortDemo, Rows) {
  const auto t = sort_demo_table();
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0].label, "exact");
  EXPECT_EQ(t.rows[0].values, (std::vector<double>{4, 4, 3, 2, 1, 0}));
  EXPECT_EQ(t.rows[0].sum, 14.0);
  const std::vector<double> tau01 = {3.9995, 3.8909, 2.8239, 1.9730, 0.9989, 0.3136};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(t.rows[2].values[i], tau01[i], 5e-4);
  for (const auto& row : t.rows) {
    double sum = 0.0;
    for (double v : row.values) sum += v;
    EXPECT_NEAR(row.sum, sum, 1e-12);
    EXPECT_LE(row.sum, 14.0 + 1e-9);
  }
}

TEST(SortDemo, CsvIsByteStable) {
  const auto dir = std::filesystem::temp_directory_path();
  std::ostringstream out1, out2;
  run_sort_demo({dir / "rankrelax_demo1.csv"}, out1);
  run_sort_demo({dir / "rankrelax_demo2.csv"}, out2);
  const auto a = read_file(dir / "rankrelax_demo1.csv");
  EXPECT_EQ(a, read_file(dir / "rankrelax_demo2.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "row,tau,y1,y2,y3,y4,y5,y6,sum");
  EXPECT_EQ(out1.str().rfind("# sort-demo", 0), 0u);
  std::filesystem::remove(dir / "rankrelax_demo1.csv");
  std::filesystem::remove(dir / "rankrelax_demo2.csv");
}

TEST(Sweep, Fig1ExactNdcgIsPiecewiseConstant) {
  SweepOptions o;
  o.temperatures = {0.1, 1.0};
  o.count = 101;
  const auto rows = sweep_rows(o);
  ASSERT_EQ(rows.size(), 202u);
  EXPECT_EQ(rows[0].tau, 0.1);
  EXPECT_EQ(rows[101].tau, 1.0);
  EXPECT_EQ(rows[0].x, -1.0);
  EXPECT_EQ(rows[100].x, 5.0);
  std::set<double> distinct;
  for (const auto& r : rows) {
    distinct.insert(r.ndcg);
    EXPECT_GT(r.neural_ndcg_scaled, 0.0);
    EXPECT_LE(r.neural_ndcg_scaled, 1.0 + 1e-9);
    EXPECT_GT(r.neural_ndcg_unscaled, 0.0);
  }
  EXPECT_LE(distinct.size(), 3u);
  EXPECT_EQ(rows[0].ndcg, 1.0);
}

TEST(Sweep, LowTemperatureTracksNdcg) {
  SweepOptions o;
  o.figure = Figure::fig2;
  o.temperatures = {0.01};
  o.lo = -5;
  o.hi = 10;
  o.count = 16;
  for (const auto& r : sweep_rows(o)) {
    // Away from the ties at the integer scores.
    if (std::fabs(r.x - std::round(r.x)) > 0.2 || r.x < 0.5 || r.x > 4.5) {
      EXPECT_NEAR(r.neural_ndcg_scaled, r.ndcg, 1e-3) << r.x;
    }
  }
}

TEST(Sweep, Fig2RelevantDocumentOnTopIsIdeal) {
  SweepOptions o;
  o.figure = Figure::fig2;
  o.lo = 6;
  o.hi = 8;
  o.count = 3;
  for (const auto& r : sweep_rows(o)) EXPECT_DOUBLE_EQ(r.ndcg, 1.0);
}

TEST(Sweep, CsvIsByteStable) {
  SweepOptions o;
  o.count = 20;
  o.temperatures = {0.5, 2.0};
  const auto a = sweep_csv(sweep_rows(o));
  EXPECT_EQ(a, sweep_csv(sweep_rows(o)));
  EXPECT_EQ(a.substr(0, a.find('\n')), "x,ndcg,neural_ndcg_scaled,neural_ndcg_unscaled,tau");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 41);
}

TEST(Sweep, ArgumentParsing) {
  double lo = 0, hi = 0;
  std::size_t count = 0;
  parse_grid("-2:3.5:11", lo, hi, count);
  EXPECT_EQ(lo, -2.0);
  EXPECT_EQ(hi, 3.5);
  EXPECT_EQ(count, 11u);
  EXPECT_THROW(parse_grid("1:0:5", lo, hi, count), Error);
  EXPECT_THROW(parse_grid("0:1:1", lo, hi, count), Error);
  EXPECT_THROW(parse_grid("0:1", lo, hi, count), Error);
  EXPECT_THROW(parse_grid("a:1:3", lo, hi, count), Error);
  EXPECT_EQ(parse_temperatures("0.1,1"), (std::vector<double>{0.1, 1.0}));
  EXPECT_THROW(parse_temperatures("0.1,-1"), Error);
  EXPECT_THROW(parse_temperatures(""), Error);
  EXPECT_EQ(parse_figure("fig2"), Figure::fig2);
  EXPECT_THROW(parse_figure("fig3"), Error);
}

TEST(Gradcheck, AllLossesPass) {
  GradcheckOptions o;
  o.trials = 10;
  const auto summary = gradcheck_losses(o);
  EXPECT_EQ(summary.size(), 7u);
  for (const auto& s : summary) {
    EXPECT_TRUE(s.passed) << loss_name(s.kind) << " " << s.max_relative_error;
    EXPECT_EQ(s.trials, 10u);
  }
  std::ostringstream out;
  EXPECT_EQ(run_gradcheck(o, out), 0);
}

TEST(Gradcheck, ImpossibleThresholdFails) {
  GradcheckOptions o;
  o.kinds = {LossKind::listnet};
  o.trials = 5;
  o.threshold = 0.0;
  std::ostringstream out;
  EXPECT_EQ(run_gradcheck(o, out), 1);
}

TEST(Cutoffs, Parse) {
  const auto ks = parse_cutoffs("1,10,max");
  ASSERT_EQ(ks.size(), 3u);
  EXPECT_EQ(ks[0], RankCutoff::at(1));
  EXPECT_TRUE(ks[2].is_max());
  EXPECT_THROW(parse_cutoffs("5,,max"), Error);
  EXPECT_THROW(parse_cutoffs("0"), Error);
}

TEST(Workflow, SyntheticTrainEvaluate) {
  const auto dir = std::filesystem::temp_directory_path() / "rankrelax_test_workflow";
  std::filesystem::remove_all(dir);
  std::ostringstream log;
  EXPECT_EQ(run_make_synthetic({dir, 20, 6, 3, 0.3, 4}, log), 0);
  EXPECT_EQ(parse_letor(dir / "train.txt").size(), 12u);
  EXPECT_EQ(parse_letor(dir / "vali.txt").size(), 4u);
  EXPECT_EQ(parse_letor(dir / "test.txt").size(), 4u);

  std::ofstream(dir / "run.cfg") << "data.train = train.txt\n"
                                    "data.validation = vali.txt\n"
                                    "data.test = test.txt\n"
                                    "data.list_length = 6\n"
                                    "model.hidden = 4\n"
                                    "train.epochs = 2\n"
                                    "train.decay_epoch = 2\n"
                                    "output.model = model.json\n";
  std::ostringstream train_out;
  EXPECT_EQ(run_train(dir / "run.cfg", train_out), 0);
  EXPECT_EQ(train_out.str().rfind("# train", 0), 0u);
  EXPECT_NE(train_out.str().find("\n# data.train = " + (dir / "train.txt").string() + "\n"), std::string::npos);
  EXPECT_NO_THROW(load_checkpoint(dir / "model.json"));

  EvaluateOptions e;
  e.model = dir / "model.json";
  e.data = dir / "test.txt";
  e.csv = dir / "metrics.csv";
  std::ostringstream eval_out;
  EXPECT_EQ(run_evaluate(e, eval_out), 0);
  const auto csv = read_file(dir / "metrics.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "metric,k,value");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  std::filesystem::remove_all(dir);
}
