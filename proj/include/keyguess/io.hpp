#pragma once

// JSON schemas for source models, ciphers, and run configurations.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyguess/cipher.hpp"
#include "keyguess/sources.hpp"

namespace keyguess {

using json = nlohmann::json;

/// A probability given as a JSON number or a decimal string such as "0.25".
double parse_probability(const json& j);

SourceModel model_from_json(const json& j);
json model_to_json(const SourceModel& model);
SourceModel load_model(const std::string& path);

json cipher_to_json(const Cipher& c);
Cipher cipher_from_json(const json& j);

struct RateGrid {
  double min = 0.05;
  double max = 1.0;
  double step = 0.05;
  std::vector<double> values() const;
};

struct RunConfig {
  std::string command;
  SourceModel model;
  std::vector<double> rhos{1.0};
  RateGrid rates;
  std::vector<double> rate_list;           // overrides `rates` when nonempty
  std::vector<unsigned> block_lengths{8};
  std::string format = "csv";
  std::string out;
  std::size_t materialize_cap = kDefaultMaterializeCap;
  std::size_t bruteforce_messages = 5;     // brute-force cipher bracket when N <= this
  int threads = 1;
  std::uint64_t seed = 0;
  bool grid_check = true;
  double tolerance_scale = 1.0;            // verify: multiplies identity tolerances

  std::vector<double> rate_values() const;
};

/// Reads a config document. `model` may be an inline object or a path
/// relative to `base_dir`.
RunConfig config_from_json(const json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

}  // namespace keyguess
