#include "rankrelax/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "rankrelax/checkpoint.hpp"
#include "rankrelax/error.hpp"
#include "rankrelax/kernels.hpp"
#include "rankrelax/losses.hpp"
#include "rankrelax/random.hpp"

namespace rankrelax {

void adam_step(std::vector<Array>& params, const std::vector<Array>& grads, AdamState& state, double lr,
               const AdamOptions& options) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_step: optimizer state does not match parameters");
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].shape() != grads[t].shape() || state.m[t].size() != params[t].size()) {
      throw ShapeError("adam_step: tensor " + std::to_string(t) + " has parameter " + to_string(params[t].shape()) +
                       " and gradient " + to_string(grads[t].shape()));
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    std::vector<double> p = params[t].values();
    auto& m = state.m[t];
    auto& v = state.v[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = grads[t][i];
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * g;
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * g * g;
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + options.epsilon);
    }
    params[t] = Array(params[t].shape(), std::move(p));
  }
}

std::vector<RankCutoff> default_cutoffs() { return {RankCutoff::at(5), RankCutoff::at(10), RankCutoff::max()}; }

MetricTable evaluate(const MlpParams& params, std::span<const QueryGroup> groups, std::span<const RankCutoff> ks) {
  const auto n = static_cast<std::ptrdiff_t>(groups.size());
  std::vector<std::vector<double>> per_query(groups.size());
  std::vector<std::exception_ptr> errors(groups.size());
#pragma omp parallel for schedule(dynamic) if (kernels::execution() == kernels::Execution::parallel && n > 1)
  for (std::ptrdiff_t q = 0; q < n; ++q) {
    try {
      const auto& g = groups[static_cast<std::size_t>(q)];
      const auto s = score(params, g.features);
      for (const auto& k : ks) per_query[static_cast<std::size_t>(q)].push_back(ndcg_at_k(s, g.labels, k));
    } catch (...) {
      errors[static_cast<std::size_t>(q)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  MetricTable table;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    double total = 0.0;
    for (const auto& row : per_query) total += row[i];
    table.push_back({ks[i], groups.empty() ? 1.0 : total / static_cast<double>(groups.size())});
  }
  return table;
}

MetricTable evaluate(const MlpParams& params, std::span<const QueryGroup> groups) {
  const auto ks = default_cutoffs();
  return evaluate(params, groups, ks);
}

double metric_at(const MetricTable& table, RankCutoff k) {
  for (const auto& m : table) {
    if (m.k == k) return m.value;
  }
  throw DomainError("metric table has no entry for k = " + k.to_string());
}

std::string TrainHistory::to_csv(bool include_seconds) const {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,loss,ndcg_at_5,ndcg_at_10,ndcg_at_max,lr" << (include_seconds ? ",seconds" : "") << '\n';
  for (const auto& r : epochs) {
    out << r.epoch << ',' << r.loss << ',' << r.ndcg_at_5 << ',' << r.ndcg_at_10 << ',' << r.ndcg_at_max << ','
        << r.lr;
    if (include_seconds) out << ',' << r.seconds;
    out << '\n';
  }
  return out.str();
}

double learning_rate(const TrainConfig& config, int epoch) {
  return epoch <= config.decay_epoch ? config.lr : config.lr * config.decay_factor;
}

namespace {

struct QueryGradient {
  bool used = false;
  double loss = 0.0;
  std::vector<std::vector<double>> grads;
  std::exception_ptr error;
};

QueryGradient query_gradient(const MlpParams& params, const QueryGroup& group, const LossConfig& loss) {
  QueryGradient out;
  if (!is_trainable(loss, group.labels)) return out;
  Tape tape;
  const BoundMlp model = bind(tape, params);
  const Var scores = score(model, tape.constant(group.features));
  Gradients grads;
  if (loss.kind == LossKind::lambdarank) {
    auto lambdas = lambdarank(scores.value().data(), group.labels, loss.k);
    out.loss = lambdas.loss;
    grads = tape.backward(scores, Array::vector(std::move(lambdas.gradient)));
  } else {
    const Var value = compute_loss(loss, scores, group.labels);
    out.loss = value.value().item();
    grads = tape.backward(value);
  }
  for (const auto& t : model.tensors) {
    const Array g = grads.wrt(t);
    if (!g.all_finite()) throw NonFiniteError("non-finite parameter gradient");
    out.grads.push_back(g.values());
  }
  out.used = true;
  return out;
}

std::vector<double> ndcg_triplet(const MetricTable& t) {
  return {metric_at(t, RankCutoff::at(5)), metric_at(t, RankCutoff::at(10)), metric_at(t, RankCutoff::max())};
}

}  // namespace

TrainResult train(const TrainConfig& config, const DataSplit& data, const EpochCallback& on_epoch) {
  validate(config);
  if (data.train.empty()) throw TrainingError("no training queries");
  const bool any_trainable = std::any_of(data.train.begin(), data.train.end(),
                                         [&](const QueryGroup& g) { return is_trainable(config.loss, g.labels); });
  if (!any_trainable) throw TrainingError("every training query is empty (all labels 0)");

  kernels::ScopedExecution mode(config.parallel ? kernels::Execution::parallel : kernels::Execution::serial);

  TrainResult result;
  result.stats = fit_standardizer(data.train);
  const auto train_set = apply_standardizer(result.stats, data.train);
  const auto validation_set = apply_standardizer(result.stats, data.validation);
  const auto test_set = apply_standardizer(result.stats, data.test);

  std::vector<std::size_t> dims{result.stats.size()};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(1);
  MlpParams params = init_params(dims, mix_seed(config.seed, {0}), resolve_activation(config));
  result.initial_validation = evaluate(params, validation_set);
  result.initial_test = evaluate(params, test_set);
  result.best = params;
  double best_ndcg = -std::numeric_limits<double>::infinity();

  AdamState adam;
  std::vector<Array> tensors = parameter_tensors(params);
  const std::size_t n_train = train_set.size();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const double lr = learning_rate(config, epoch);
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffler(mix_seed(config.seed, {1, static_cast<std::uint64_t>(epoch)}));
    shuffler.shuffle(order);

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n_train; start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(n_train, start + config.batch_size);
      const auto batch_n = static_cast<std::ptrdiff_t>(stop - start);
      std::vector<QueryGradient> results(stop - start);

#pragma omp parallel for schedule(dynamic) if (config.parallel && batch_n > 1)
      for (std::ptrdiff_t i = 0; i < batch_n; ++i) {
        const std::size_t q = order[start + static_cast<std::size_t>(i)];
        auto& slot = results[static_cast<std::size_t>(i)];
        try {
          const auto e = static_cast<std::uint64_t>(epoch);
          const QueryGroup group = pad_or_sample(train_set[q], config.list_length, mix_seed(config.seed, {2, e, q}));
          LossConfig loss = config.loss;
          if (loss.noise) loss.noise->seed = mix_seed(config.seed, {3, e, q});
          slot = query_gradient(params, group, loss);
        } catch (...) {
          slot.error = std::current_exception();
        }
      }

      for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error) continue;
        const std::string where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index + 1) +
                                  ", query " + train_set[order[start + i]].qid + ": ";
        try {
          std::rethrow_exception(results[i].error);
        } catch (const Error& e) {
          throw TrainingError(where + e.what());
        }
      }

      std::vector<std::vector<double>> total;
      std::size_t used = 0;
      for (const auto& r : results) {
        if (!r.used) continue;
        if (total.empty()) {
          total = r.grads;
        } else {
          for (std::size_t t = 0; t < total.size(); ++t) {
            for (std::size_t j = 0; j < total[t].size(); ++j) total[t][j] += r.grads[t][j];
          }
        }
        loss_sum += r.loss;
        ++used;
      }
      if (used == 0) continue;

      const double scale = 1.0 / static_cast<double>(used);
      double norm2 = 0.0;
      for (auto& t : total) {
        for (auto& g : t) {
          g *= scale;
          norm2 += g * g;
        }
      }
      if (config.grad_clip > 0.0 && std::sqrt(norm2) > config.grad_clip) {
        const double clip = config.grad_clip / std::sqrt(norm2);
        for (auto& t : total) {
          for (auto& g : t) g *= clip;
        }
      }
      std::vector<Array> grads;
      for (std::size_t t = 0; t < total.size(); ++t) grads.emplace_back(tensors[t].shape(), std::move(total[t]));
      adam_step(tensors, grads, adam, lr);
      for (const auto& t : tensors) {
        if (!t.all_finite()) {
          throw TrainingError("epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index + 1) +
                              ": parameters became non-finite");
        }
      }
      params = with_parameter_tensors(params, tensors);
      loss_count += used;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
    const auto metrics = ndcg_triplet(evaluate(params, validation_set));
    record.ndcg_at_5 = metrics[0];
    record.ndcg_at_10 = metrics[1];
    record.ndcg_at_max = metrics[2];
    record.lr = lr;
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.epochs.push_back(record);
    if (record.ndcg_at_5 > best_ndcg) {
      best_ndcg = record.ndcg_at_5;
      result.best = params;
      result.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(record);
  }

  result.final = params;
  result.test = evaluate(result.best, test_set);
  return result;
}

DataSplit load_data(const TrainConfig& config) {
  if (!config.train_path.empty()) {
    if (config.validation_path.empty() || config.test_path.empty()) {
      throw DomainError("config: data.train needs data.validation and data.test");
    }
    DataSplit data{parse_letor(config.train_path), parse_letor(config.validation_path),
                   parse_letor(config.test_path)};
    std::size_t d = 0;
    for (const auto* part : {&data.train, &data.validation, &data.test}) {
      for (const auto& g : *part) d = std::max(d, g.feature_count());
    }
    for (auto* part : {&data.train, &data.validation, &data.test}) *part = widen_features(*part, d);
    return data;
  }
  if (config.data_path.empty()) throw DomainError("config: set data.train/validation/test or data.path");
  const auto groups = parse_letor(config.data_path);
  return split(groups, mix_seed(config.seed, {4}));
}

TrainResult train(const TrainConfig& config, const EpochCallback& on_epoch) {
  validate(config);
  auto result = train(config, load_data(config), on_epoch);
  if (!config.model_out.empty()) save_checkpoint(config.model_out, {result.best, result.stats});
  if (!config.history_out.empty()) {
    std::ofstream out(config.history_out, std::ios::binary);
    if (!out) throw IoError("cannot write '" + config.history_out.string() + "'");
    out << result.history.to_csv();
  }
  return result;
}

}  // namespace rankrelax
