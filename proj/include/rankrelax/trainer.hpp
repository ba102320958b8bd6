#pragma once

// Mini-batch training of the MLP scorer with Adam, a single step decay of
// the learning rate, per-epoch validation and best-model selection.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rankrelax/config.hpp"
#include "rankrelax/data_io.hpp"
#include "rankrelax/metrics.hpp"
#include "rankrelax/model.hpp"

namespace rankrelax {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;
};

/// One bias-corrected Adam update in place. The state is sized on first use.
void adam_step(std::vector<Array>& params, const std::vector<Array>& grads, AdamState& state, double lr,
               const AdamOptions& options = {});

struct MetricValue {
  RankCutoff k;
  double value = 0.0;
};
using MetricTable = std::vector<MetricValue>;

/// NDCG@5, NDCG@10, NDCG@max.
std::vector<RankCutoff> default_cutoffs();

/// Mean per-query NDCG@k over full-length groups; empty queries count as 1,
/// and an empty group list yields 1 for every k.
MetricTable evaluate(const MlpParams& params, std::span<const QueryGroup> groups,
                     std::span<const RankCutoff> ks);
MetricTable evaluate(const MlpParams& params, std::span<const QueryGroup> groups);
double metric_at(const MetricTable& table, RankCutoff k);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // mean training loss over the epoch's trainable queries
  double ndcg_at_5 = 0.0;  // validation
  double ndcg_at_10 = 0.0;
  double ndcg_at_max = 0.0;
  double lr = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  /// Header epoch,loss,ndcg_at_5,ndcg_at_10,ndcg_at_max,lr,seconds.
  /// Without `include_seconds` the wall-time column is left out.
  [[nodiscard]] std::string to_csv(bool include_seconds = true) const;
};

/// Learning rate in effect during 1-based `epoch`.
double learning_rate(const TrainConfig& config, int epoch);

struct TrainResult {
  MlpParams best;   // highest validation NDCG@5 (earliest epoch on ties)
  MlpParams final;
  int best_epoch = 0;
  FeatureStats stats;
  TrainHistory history;
  MetricTable initial_validation;  // untrained model
  MetricTable initial_test;
  MetricTable test;  // best model
};

/// Called after every epoch, e.g. for progress output.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains on `data` (raw features; standardization is fitted on data.train).
TrainResult train(const TrainConfig& config, const DataSplit& data, const EpochCallback& on_epoch = {});

/// Loads the data named by the config, trains, and writes the configured outputs.
TrainResult train(const TrainConfig& config, const EpochCallback& on_epoch = {});

DataSplit load_data(const TrainConfig& config);

}  // namespace rankrelax
