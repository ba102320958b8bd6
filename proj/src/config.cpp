#include "rankrelax/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>

#include "rankrelax/error.hpp"

namespace rankrelax {

namespace {

std::string shortest(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_value(std::string_view key, std::string_view text) {
  T out{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("config: invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw DomainError("config: expected true or false for " + std::string(key));
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  if (text.empty() || text == "none") return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(parse_value<std::size_t>(key, trim(text.substr(start, comma - start))));
    start = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<std::size_t>& v) {
  if (v.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string_view choice_name(ActivationChoice c) {
  switch (c) {
    case ActivationChoice::automatic: return "auto";
    case ActivationChoice::none: return "none";
    case ActivationChoice::tanh: return "tanh";
  }
  return "auto";
}

struct Key {
  std::string_view name;
  std::string_view description;
  std::function<void(TrainConfig&, std::string_view, const std::filesystem::path&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view text) {
  std::filesystem::path p{std::string(text)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

const std::vector<Key>& keys() {
  using P = const std::filesystem::path&;
  static const std::vector<Key> table = {
      {"data.train", "training split (LETOR text, optionally gzip)",
       [](TrainConfig& c, std::string_view v, P b) { c.train_path = resolve(b, v); },
       [](const TrainConfig& c) { return c.train_path.string(); }},
      {"data.validation", "validation split",
       [](TrainConfig& c, std::string_view v, P b) { c.validation_path = resolve(b, v); },
       [](const TrainConfig& c) { return c.validation_path.string(); }},
      {"data.test", "test split", [](TrainConfig& c, std::string_view v, P b) { c.test_path = resolve(b, v); },
       [](const TrainConfig& c) { return c.test_path.string(); }},
      {"data.path", "single file split 60/20/20 by query when data.train is empty",
       [](TrainConfig& c, std::string_view v, P b) { c.data_path = resolve(b, v); },
       [](const TrainConfig& c) { return c.data_path.string(); }},
      {"data.list_length", "training lists are padded or subsampled to this length",
       [](TrainConfig& c, std::string_view v, P) { c.list_length = parse_value<std::size_t>("data.list_length", v); },
       [](const TrainConfig& c) { return std::to_string(c.list_length); }},
      {"model.hidden", "hidden layer widths, comma separated, or none",
       [](TrainConfig& c, std::string_view v, P) { c.hidden = parse_list("model.hidden", v); },
       [](const TrainConfig& c) { return format_list(c.hidden); }},
      {"model.output_activation", "auto (tanh for neural_ndcg losses), none or tanh",
       [](TrainConfig& c, std::string_view v, P) {
         if (v == "auto") {
           c.output_activation = ActivationChoice::automatic;
         } else {
           c.output_activation = parse_activation(v) == OutputActivation::tanh ? ActivationChoice::tanh
                                                                               : ActivationChoice::none;
         }
       },
       [](const TrainConfig& c) { return std::string(choice_name(c.output_activation)); }},
      {"loss.kind", "neural_ndcg, neural_ndcg_t, approx_ndcg, listnet, listmle, ranknet, lambdarank or rmse",
       [](TrainConfig& c, std::string_view v, P) { c.loss.kind = parse_loss_kind(v); },
       [](const TrainConfig& c) { return std::string(loss_name(c.loss.kind)); }},
      {"loss.k", "rank cutoff: positive integer or max",
       [](TrainConfig& c, std::string_view v, P) { c.loss.k = RankCutoff::parse(std::string(v)); },
       [](const TrainConfig& c) { return c.loss.k.to_string(); }},
      {"loss.temperature", "relaxed sort temperature",
       [](TrainConfig& c, std::string_view v, P) { c.loss.temperature = parse_value<double>("loss.temperature", v); },
       [](const TrainConfig& c) { return shortest(c.loss.temperature); }},
      {"loss.alpha", "approx_ndcg sigmoid sharpness",
       [](TrainConfig& c, std::string_view v, P) { c.loss.alpha = parse_value<double>("loss.alpha", v); },
       [](const TrainConfig& c) { return shortest(c.loss.alpha); }},
      {"loss.sinkhorn", "Sinkhorn-scale the relaxed permutation",
       [](TrainConfig& c, std::string_view v, P) { c.loss.sinkhorn = parse_bool("loss.sinkhorn", v); },
       [](const TrainConfig& c) { return std::string(c.loss.sinkhorn ? "true" : "false"); }},
      {"loss.sinkhorn_max_iter", "Sinkhorn round limit",
       [](TrainConfig& c, std::string_view v, P) {
         c.loss.sinkhorn_options.max_iter = parse_value<int>("loss.sinkhorn_max_iter", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.loss.sinkhorn_options.max_iter); }},
      {"loss.sinkhorn_tol", "Sinkhorn stopping tolerance on row/column sums",
       [](TrainConfig& c, std::string_view v, P) {
         c.loss.sinkhorn_options.tol = parse_value<double>("loss.sinkhorn_tol", v);
       },
       [](const TrainConfig& c) { return shortest(c.loss.sinkhorn_options.tol); }},
      {"loss.gumbel_samples", "Gumbel-perturbed samples per query, 0 = deterministic",
       [](TrainConfig& c, std::string_view v, P) {
         const auto samples = parse_value<std::size_t>("loss.gumbel_samples", v);
         if (samples == 0) {
           c.loss.noise.reset();
         } else {
           if (!c.loss.noise) c.loss.noise.emplace();
           c.loss.noise->samples = samples;
         }
       },
       [](const TrainConfig& c) { return std::to_string(c.loss.noise ? c.loss.noise->samples : 0); }},
      {"loss.gumbel_scale", "Gumbel noise scale (used when loss.gumbel_samples > 0)",
       [](TrainConfig& c, std::string_view v, P) {
         const double scale = parse_value<double>("loss.gumbel_scale", v);
         if (!c.loss.noise) {
           c.loss.noise.emplace();
           c.loss.noise->samples = 0;  // set by loss.gumbel_samples
         }
         c.loss.noise->scale = scale;
       },
       [](const TrainConfig& c) { return shortest(c.loss.noise ? c.loss.noise->scale : 1.0); }},
      {"loss.rmse_levels", "relevance levels for rmse",
       [](TrainConfig& c, std::string_view v, P) { c.loss.rmse_levels = parse_value<int>("loss.rmse_levels", v); },
       [](const TrainConfig& c) { return std::to_string(c.loss.rmse_levels); }},
      {"train.lr", "Adam learning rate",
       [](TrainConfig& c, std::string_view v, P) { c.lr = parse_value<double>("train.lr", v); },
       [](const TrainConfig& c) { return shortest(c.lr); }},
      {"train.decay_factor", "learning rate multiplier applied once after train.decay_epoch",
       [](TrainConfig& c, std::string_view v, P) { c.decay_factor = parse_value<double>("train.decay_factor", v); },
       [](const TrainConfig& c) { return shortest(c.decay_factor); }},
      {"train.decay_epoch", "last epoch at the undecayed learning rate",
       [](TrainConfig& c, std::string_view v, P) { c.decay_epoch = parse_value<int>("train.decay_epoch", v); },
       [](const TrainConfig& c) { return std::to_string(c.decay_epoch); }},
      {"train.epochs", "number of epochs",
       [](TrainConfig& c, std::string_view v, P) { c.epochs = parse_value<int>("train.epochs", v); },
       [](const TrainConfig& c) { return std::to_string(c.epochs); }},
      {"train.batch_size", "queries per optimizer step",
       [](TrainConfig& c, std::string_view v, P) { c.batch_size = parse_value<std::size_t>("train.batch_size", v); },
       [](const TrainConfig& c) { return std::to_string(c.batch_size); }},
      {"train.grad_clip", "clip the global gradient norm to this value, 0 = off",
       [](TrainConfig& c, std::string_view v, P) { c.grad_clip = parse_value<double>("train.grad_clip", v); },
       [](const TrainConfig& c) { return shortest(c.grad_clip); }},
      {"train.seed", "seed for initialization, shuffling, subsampling, splitting and noise",
       [](TrainConfig& c, std::string_view v, P) { c.seed = parse_value<std::uint64_t>("train.seed", v); },
       [](const TrainConfig& c) { return std::to_string(c.seed); }},
      {"train.parallel", "process the queries of a batch on OpenMP threads",
       [](TrainConfig& c, std::string_view v, P) { c.parallel = parse_bool("train.parallel", v); },
       [](const TrainConfig& c) { return std::string(c.parallel ? "true" : "false"); }},
      {"output.model", "checkpoint path for the best validation NDCG@5 model",
       [](TrainConfig& c, std::string_view v, P b) { c.model_out = resolve(b, v); },
       [](const TrainConfig& c) { return c.model_out.string(); }},
      {"output.history", "per-epoch history CSV path",
       [](TrainConfig& c, std::string_view v, P b) { c.history_out = resolve(b, v); },
       [](const TrainConfig& c) { return c.history_out.string(); }},
  };
  return table;
}

}  // namespace

void validate(const TrainConfig& config) {
  validate(config.loss);
  if (!(config.lr > 0.0)) throw DomainError("config: train.lr must be positive");
  if (!(config.decay_factor > 0.0)) throw DomainError("config: train.decay_factor must be positive");
  if (config.epochs < 1) throw DomainError("config: train.epochs must be at least 1");
  if (config.decay_epoch < 1 || config.decay_epoch > config.epochs) {
    throw DomainError("config: train.decay_epoch must lie in [1, train.epochs]");
  }
  if (config.batch_size == 0) throw DomainError("config: train.batch_size must be positive");
  if (config.list_length == 0) throw DomainError("config: data.list_length must be positive");
  if (config.grad_clip < 0.0) throw DomainError("config: train.grad_clip must be non-negative");
  for (auto h : config.hidden) {
    if (h == 0) throw DomainError("config: model.hidden widths must be positive");
  }
  if (config.loss.noise && config.loss.noise->samples == 0) {
    throw DomainError("config: loss.gumbel_scale needs loss.gumbel_samples > 0");
  }
}

OutputActivation resolve_activation(const TrainConfig& config) {
  switch (config.output_activation) {
    case ActivationChoice::none: return OutputActivation::none;
    case ActivationChoice::tanh: return OutputActivation::tanh;
    case ActivationChoice::automatic: break;
  }
  return is_neural_ndcg(config.loss.kind) ? OutputActivation::tanh : OutputActivation::none;
}

TrainConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  TrainConfig config;
  std::set<std::string, std::less<>> seen;
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
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const Key* entry = nullptr;
    for (const auto& k : keys()) {
      if (k.name == key) entry = &k;
    }
    if (!entry) throw ParseError("unknown key '" + std::string(key) + "'", line_no);
    if (!seen.insert(std::string(key)).second) throw ParseError("duplicate key '" + std::string(key) + "'", line_no);
    try {
      entry->set(config, value, base_dir);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  validate(config);
  return config;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.parent_path());
}

std::string format_config(const TrainConfig& config) {
  std::ostringstream out;
  for (const auto& k : keys()) out << k.name << " = " << k.get(config) << '\n';
  return out.str();
}

std::string config_reference() {
  const TrainConfig defaults;
  std::ostringstream out;
  for (const auto& k : keys()) {
    out << "# " << k.description << '\n' << k.name << " = " << k.get(defaults) << "\n\n";
  }
  return out.str();
}

}  // namespace rankrelax
