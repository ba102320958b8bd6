// rankrelax command-line driver.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "rankrelax/commands.hpp"
#include "rankrelax/error.hpp"

using namespace rankrelax;

namespace {

// One line, machine-parsable: "error: <code>: <message>".
int report(std::string_view code, std::string_view message) {
  std::string flat(message);
  for (auto& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "error: " << code << ": " << flat << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NeuralNDCG learning-to-rank toolkit"};
  app.require_subcommand(1);
  int precision = kDefaultPrecision;
  app.add_option("--precision", precision, "significant digits in numeric output")->check(CLI::Range(1, 17));

  std::string config_path;
  auto* train = app.add_subcommand("train", "train an MLP ranker from a config file");
  train->add_option("--config", config_path, "config file (see README)")->required();

  EvaluateOptions eval;
  std::string eval_ks = "5,10,max";
  auto* evaluate = app.add_subcommand("evaluate", "report NDCG@k of a checkpoint on a LETOR file");
  evaluate->add_option("--model", eval.model, "checkpoint written by train")->required();
  evaluate->add_option("--data", eval.data, "LETOR file, optionally gzip")->required();
  evaluate->add_option("--k", eval_ks, "comma-separated cutoffs, integers or max");
  evaluate->add_option("--csv", eval.csv, "also write metric,k,value CSV here");

  SortDemoOptions demo;
  auto* sort_demo = app.add_subcommand("sort-demo", "relaxed sorting of the six-document example");
  sort_demo->add_option("--csv", demo.csv, "also write the table as CSV");

  SweepOptions sweep;
  std::string sweep_figure = "fig1";
  std::string sweep_tau = "1";
  std::string sweep_grid = "-1:5:500";
  auto* sweep_cmd = app.add_subcommand("sweep", "NDCG and NeuralNDCG as one score varies");
  sweep_cmd->add_option("--figure", sweep_figure, "fig1 or fig2");
  sweep_cmd->add_option("--tau", sweep_tau, "comma-separated temperatures");
  sweep_cmd->add_option("--grid", sweep_grid, "lo:hi:count");
  sweep_cmd->add_option("--out", sweep.out, "CSV output path")->required();

  GradcheckOptions grad;
  std::string grad_loss = "all";
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every loss gradient");
  gradcheck->add_option("--loss", grad_loss, "loss kind or all");
  gradcheck->add_option("--n", grad.max_n, "largest list length");
  gradcheck->add_option("--trials", grad.trials, "random instances per loss");
  gradcheck->add_option("--seed", grad.seed, "instance seed");

  SyntheticCommandOptions synth;
  auto* make_synthetic = app.add_subcommand("make-synthetic", "write a synthetic LETOR dataset");
  make_synthetic->add_option("--dir", synth.dir, "output directory")->required();
  make_synthetic->add_option("--queries", synth.queries, "number of queries");
  make_synthetic->add_option("--docs", synth.docs, "documents per query");
  make_synthetic->add_option("--features", synth.features, "feature count");
  make_synthetic->add_option("--noise", synth.noise, "utility noise std");
  make_synthetic->add_option("--seed", synth.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return 2;
  }

  try {
    if (*train) return run_train(config_path, std::cout, precision);
    if (*evaluate) {
      eval.ks = parse_cutoffs(eval_ks);
      eval.precision = precision;
      return run_evaluate(eval, std::cout);
    }
    if (*sort_demo) {
      demo.precision = precision;
      return run_sort_demo(demo, std::cout);
    }
    if (*sweep_cmd) {
      sweep.figure = parse_figure(sweep_figure);
      sweep.temperatures = parse_temperatures(sweep_tau);
      parse_grid(sweep_grid, sweep.lo, sweep.hi, sweep.count);
      sweep.precision = precision;
      return run_sweep(sweep, std::cout);
    }
    if (*gradcheck) {
      if (grad_loss != "all") grad.kinds = {parse_loss_kind(grad_loss)};
      grad.precision = precision;
      return run_gradcheck(grad, std::cout);
    }
    if (*make_synthetic) return run_make_synthetic(synth, std::cout);
  } catch (const Error& e) {
    return report(e.code(), e.what());
  } catch (const std::exception& e) {
    return report("internal", e.what());
  }
  return 0;
}
