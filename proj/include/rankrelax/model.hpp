#pragma once

// Multi-layer perceptron scoring function: each document's feature row is
// mapped to one score, independently of the other documents in the list.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rankrelax/array.hpp"
#include "rankrelax/tape.hpp"

namespace rankrelax {

enum class OutputActivation { none, tanh };

[[nodiscard]] std::string_view activation_name(OutputActivation a) noexcept;
[[nodiscard]] OutputActivation parse_activation(std::string_view name);

struct DenseLayer {
  Array weight;  // [fan_in, fan_out]
  Array bias;    // [fan_out]
};

struct MlpParams {
  std::vector<std::size_t> dims;  // d, h1, ..., 1
  std::vector<DenseLayer> layers;
  OutputActivation output_activation = OutputActivation::none;

  [[nodiscard]] std::size_t input_dim() const { return dims.front(); }
  [[nodiscard]] std::size_t parameter_count() const;
};

/// Throws ShapeError/DomainError if dims, layer shapes or values are inconsistent.
void validate(const MlpParams& params);

/// Glorot-uniform weights, zero biases.
MlpParams init_params(const std::vector<std::size_t>& dims, std::uint64_t seed,
                      OutputActivation output = OutputActivation::none);

/// Flattened view in the order W0, b0, W1, b1, ... used by the optimizer.
std::vector<Array> parameter_tensors(const MlpParams& params);
MlpParams with_parameter_tensors(const MlpParams& params, std::vector<Array> tensors);

/// Parameters recorded as differentiable leaves on one tape.
struct BoundMlp {
  const MlpParams* params = nullptr;
  std::vector<Var> tensors;  // same order as parameter_tensors
};

BoundMlp bind(Tape& tape, const MlpParams& params);

/// Scores [n] for features [n, d]; rectifier between layers.
Var score(const BoundMlp& model, const Var& features);
std::vector<double> score(const MlpParams& params, const Array& features);

}  // namespace rankrelax
