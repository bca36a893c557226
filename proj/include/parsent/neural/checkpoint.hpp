#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "parsent/neural/cnn_lstm.hpp"

namespace parsent::neural {

inline constexpr const char* kCheckpointFormat = "parsent-cnn-lstm";
inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json shape_to_json(const ModelShape& s) {
  return {{"input_dim", s.input_dim}, {"kernel_width", s.kernel_width}, {"filters", s.filters},
          {"pool_size", s.pool_size}, {"hidden", s.hidden},             {"classes", s.classes},
          {"dropout_rate", s.dropout_rate}};
}

inline ModelShape shape_from_json(const nlohmann::json& j) {
  ModelShape s;
  s.input_dim = j.at("input_dim").get<std::size_t>();
  s.kernel_width = j.at("kernel_width").get<std::size_t>();
  s.filters = j.at("filters").get<std::size_t>();
  s.pool_size = j.at("pool_size").get<std::size_t>();
  s.hidden = j.at("hidden").get<std::size_t>();
  s.classes = j.at("classes").get<std::size_t>();
  s.dropout_rate = j.at("dropout_rate").get<double>();
  s.validate();
  return s;
}

inline nlohmann::json checkpoint_to_json(const CnnLstmModel<double>& m) {
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"shape", shape_to_json(m.shape())},
          {"params", m.params()}};
}

inline CnnLstmModel<double> checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat)
      throw FormatError("not a CNN-LSTM checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw FormatError("unsupported checkpoint version " + j.at("version").dump());
    CnnLstmModel<double> m(shape_from_json(j.at("shape")));
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != m.params().size())
      throw DimensionMismatch("checkpoint holds " + std::to_string(params.size()) +
                              " parameters, shape needs " + std::to_string(m.params().size()));
    m.params() = std::move(params);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const CnnLstmModel<double>& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << checkpoint_to_json(m).dump() << '\n';
}

inline CnnLstmModel<double> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace parsent::neural
