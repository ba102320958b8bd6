#include "rankrelax/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rankrelax/error.hpp"
#include "rankrelax/random.hpp"

namespace rankrelax {

std::string_view activation_name(OutputActivation a) noexcept {
  return a == OutputActivation::tanh ? "tanh" : "none";
}

OutputActivation parse_activation(std::string_view name) {
  if (name == "none") return OutputActivation::none;
  if (name == "tanh") return OutputActivation::tanh;
  throw DomainError("unknown output activation '" + std::string(name) + "'");
}

std::size_t MlpParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto& layer : layers) total += layer.weight.size() + layer.bias.size();
  return total;
}

void validate(const MlpParams& params) {
  if (params.dims.size() < 2) throw DomainError("mlp: need at least input and output dims");
  if (params.dims.back() != 1) throw DomainError("mlp: final dim must be 1");
  for (auto d : params.dims) {
    if (d == 0) throw DomainError("mlp: dims must be positive");
  }
  if (params.layers.size() != params.dims.size() - 1) throw ShapeError("mlp: layer count does not match dims");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    const Shape w{params.dims[l], params.dims[l + 1]};
    const Shape b{params.dims[l + 1]};
    if (layer.weight.shape() != w || layer.bias.shape() != b) {
      throw ShapeError("mlp: layer " + std::to_string(l) + " has weight " + to_string(layer.weight.shape()) +
                       " and bias " + to_string(layer.bias.shape()) + ", expected " + to_string(w) + " and " +
                       to_string(b));
    }
    if (!layer.weight.all_finite() || !layer.bias.all_finite()) throw NonFiniteError("mlp: non-finite parameter");
  }
}

MlpParams init_params(const std::vector<std::size_t>& dims, std::uint64_t seed, OutputActivation output) {
  if (dims.size() < 2) throw DomainError("init_params: need at least input and output dims");
  MlpParams params;
  params.dims = dims;
  params.output_activation = output;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t fan_in = dims[l];
    const std::size_t fan_out = dims[l + 1];
    if (fan_in == 0 || fan_out == 0) throw DomainError("init_params: dims must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::vector<double> w(fan_in * fan_out);
    for (auto& x : w) x = rng.uniform(-limit, limit);
    params.layers.push_back({Array::matrix(fan_in, fan_out, std::move(w)), Array::zeros({fan_out})});
  }
  validate(params);
  return params;
}

std::vector<Array> parameter_tensors(const MlpParams& params) {
  std::vector<Array> out;
  for (const auto& layer : params.layers) {
    out.push_back(layer.weight);
    out.push_back(layer.bias);
  }
  return out;
}

MlpParams with_parameter_tensors(const MlpParams& params, std::vector<Array> tensors) {
  if (tensors.size() != 2 * params.layers.size()) throw ShapeError("mlp: wrong number of parameter tensors");
  MlpParams out = params;
  for (std::size_t l = 0; l < out.layers.size(); ++l) {
    out.layers[l].weight = std::move(tensors[2 * l]);
    out.layers[l].bias = std::move(tensors[2 * l + 1]);
  }
  validate(out);
  return out;
}

BoundMlp bind(Tape& tape, const MlpParams& params) {
  BoundMlp model{&params, {}};
  for (auto& t : parameter_tensors(params)) model.tensors.push_back(tape.variable(std::move(t)));
  return model;
}

Var score(const BoundMlp& model, const Var& features) {
  const MlpParams& params = *model.params;
  const Shape& shape = features.shape();
  if (shape.size() != 2 || shape[1] != params.input_dim()) {
    throw ShapeError("score: features " + to_string(shape) + " do not match input dim " +
                     std::to_string(params.input_dim()));
  }
  Tape& tape = *features.tape();
  const std::size_t n = shape[0];
  const Var ones = tape.constant(Array::full({n, 1}, 1.0));
  Var h = features;
  const std::size_t depth = params.layers.size();
  for (std::size_t l = 0; l < depth; ++l) {
    const Var& w = model.tensors[2 * l];
    const Var& b = model.tensors[2 * l + 1];
    h = matmul(h, w) + matmul(ones, reshape(b, {1, params.dims[l + 1]}));
    if (l + 1 < depth) h = clamp(h, 0.0, std::numeric_limits<double>::infinity());
  }
  Var s = reshape(h, {n});
  if (params.output_activation == OutputActivation::tanh) s = tanh(s);
  return s;
}

std::vector<double> score(const MlpParams& params, const Array& features) {
  Tape tape;
  BoundMlp model{&params, {}};
  for (auto& t : parameter_tensors(params)) model.tensors.push_back(tape.constant(std::move(t)));
  return score(model, tape.constant(features)).value().values();
}

}  // namespace rankrelax
