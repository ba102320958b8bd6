#include "rankrelax/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "rankrelax/error.hpp"

namespace rankrelax {

using nlohmann::json;

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  validate(checkpoint.params);
  json doc;
  doc["format"] = kCheckpointFormat;
  doc["version"] = kCheckpointVersion;
  doc["dims"] = checkpoint.params.dims;
  doc["output_activation"] = activation_name(checkpoint.params.output_activation);
  json layers = json::array();
  for (const auto& layer : checkpoint.params.layers) {
    layers.push_back({{"weight", layer.weight.values()}, {"bias", layer.bias.values()}});
  }
  doc["layers"] = std::move(layers);
  doc["feature_stats"] = {{"mean", checkpoint.stats.mean},
                          {"stddev", checkpoint.stats.stddev},
                          {"log_transform", checkpoint.stats.log_transform}};
  return doc.dump(1) + "\n";
}

Checkpoint deserialize_checkpoint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 0);
  }
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat) throw ParseError("checkpoint: unknown format", 0);
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported version " + std::to_string(version), 0);
    }
    Checkpoint out;
    out.params.dims = doc.at("dims").get<std::vector<std::size_t>>();
    out.params.output_activation = parse_activation(doc.at("output_activation").get<std::string>());
    const auto& layers = doc.at("layers");
    if (out.params.dims.size() < 2 || layers.size() != out.params.dims.size() - 1) {
      throw ParseError("checkpoint: layer count does not match dims", 0);
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto w = layers[l].at("weight").get<std::vector<double>>();
      auto b = layers[l].at("bias").get<std::vector<double>>();
      const std::size_t in = out.params.dims[l];
      const std::size_t o = out.params.dims[l + 1];
      if (w.size() != in * o || b.size() != o) throw ParseError("checkpoint: layer size does not match dims", 0);
      out.params.layers.push_back({Array::matrix(in, o, std::move(w)), Array::vector(std::move(b))});
    }
    validate(out.params);
    const auto& stats = doc.at("feature_stats");
    out.stats.mean = stats.at("mean").get<std::vector<double>>();
    out.stats.stddev = stats.at("stddev").get<std::vector<double>>();
    out.stats.log_transform = stats.at("log_transform").get<std::vector<std::uint8_t>>();
    if (out.stats.stddev.size() != out.stats.size() || out.stats.log_transform.size() != out.stats.size() ||
        out.stats.size() != out.params.input_dim()) {
      throw ParseError("checkpoint: feature statistics do not match the input dim", 0);
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 0);
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::string text = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(text);
}

}  // namespace rankrelax
