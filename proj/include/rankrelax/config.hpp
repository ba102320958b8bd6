#pragma once

// Training configuration file: one `section.key = value` per line, '#' starts
// a comment. Unknown keys and repeated keys are errors. Every key, its type
// and its default are listed by config_reference().

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rankrelax/data_io.hpp"
#include "rankrelax/losses.hpp"
#include "rankrelax/model.hpp"

namespace rankrelax {

enum class ActivationChoice { automatic, none, tanh };

struct TrainConfig {
  // data
  std::filesystem::path train_path;
  std::filesystem::path validation_path;
  std::filesystem::path test_path;
  std::filesystem::path data_path;  // single file split 60/20/20 when the three above are empty
  std::size_t list_length = 240;

  // model
  std::vector<std::size_t> hidden = {32};
  ActivationChoice output_activation = ActivationChoice::automatic;  // tanh for the NeuralNDCG losses

  LossConfig loss;

  // optimizer and schedule
  double lr = 0.001;
  double decay_factor = 0.1;
  int decay_epoch = 50;
  int epochs = 100;
  std::size_t batch_size = 16;
  double grad_clip = 0.0;  // global-norm clip, 0 = off
  std::uint64_t seed = 42;
  bool parallel = true;

  // outputs (empty = not written)
  std::filesystem::path model_out;
  std::filesystem::path history_out;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Throws DomainError when a field is out of range.
void validate(const TrainConfig& config);

OutputActivation resolve_activation(const TrainConfig& config);

/// Parses config text; relative paths resolve against `base_dir`.
TrainConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
TrainConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in the file syntax.
std::string format_config(const TrainConfig& config);

/// Every key with its default and a one-line description.
std::string config_reference();

}  // namespace rankrelax
