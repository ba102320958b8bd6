#pragma once

// Model checkpoints: a JSON document holding the MLP and the feature
// statistics it was trained with.
//
//   {
//     "format": "rankrelax-mlp",
//     "version": 1,
//     "dims": [d, h1, ..., 1],
//     "output_activation": "none" | "tanh",
//     "layers": [{"weight": [row-major fan_in * fan_out values], "bias": [...]}, ...],
//     "feature_stats": {"mean": [...], "stddev": [...], "log_transform": [0|1, ...]}
//   }
//
// Doubles are written in shortest round-trip form, so save/load is exact.

#include <filesystem>
#include <string>
#include <string_view>

#include "rankrelax/data_io.hpp"
#include "rankrelax/model.hpp"

namespace rankrelax {

inline constexpr std::string_view kCheckpointFormat = "rankrelax-mlp";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  MlpParams params;
  FeatureStats stats;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rankrelax
