#include "keyguess/io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <type_traits>

#include "keyguess/errors.hpp"

namespace keyguess {
namespace {

std::vector<double> probability_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(parse_probability(e));
  return v;
}

std::vector<std::vector<double>> probability_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(probability_vector(r, what));
  return rows;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

json pmf_json(const Pmf& p) { return json(p.values()); }

}  // namespace

double parse_probability(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
      throw ValidationError("not a decimal number: \"" + s + "\"");
    return v;
  }
  throw ValidationError("probability must be a number or a decimal string");
}

SourceModel model_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("model must be a JSON object");
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "iid") {
    SourceModel m = IidSource{Pmf(probability_vector(require(j, "p"), "p"))};
    validate(m);
    return m;
  }
  if (kind == "markov") {
    StochasticMatrix pi(probability_matrix(require(j, "transition"), "transition"));
    if (!j.contains("init")) return make_markov(std::move(pi));
    MarkovSource m = make_markov(pi, Pmf(probability_vector(j.at("init"), "init")));
    m.stationary = j.value("stationary", false);
    validate(SourceModel{m});
    return m;
  }
  if (kind == "unifilar") {
    auto next = require(j, "next").get<std::vector<std::vector<std::size_t>>>();
    std::vector<Pmf> emission;
    for (auto& row : probability_matrix(require(j, "emission"), "emission"))
      emission.emplace_back(std::move(row));
    std::optional<Pmf> init;
    if (j.contains("init")) init = Pmf(probability_vector(j.at("init"), "init"));
    return make_unifilar(std::move(next), std::move(emission), std::move(init));
  }
  if (kind == "explicit") {
    ExplicitSource e;
    e.alphabet = require(j, "alphabet").get<std::size_t>();
    unsigned n = 0;
    for (const auto& p : require(j, "pmfs")) {
      ++n;
      e.pmfs.emplace_back(probability_vector(p, "pmfs"), e.alphabet, n, kProductPmfTolerance);
    }
    SourceModel m = e;
    validate(m);
    return m;
  }
  throw ValidationError("unknown model kind \"" + kind + "\"");
}

json model_to_json(const SourceModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          return {{"kind", "iid"}, {"p", pmf_json(m.marginal)}};
        } else if constexpr (std::is_same_v<T, MarkovSource>) {
          return {{"kind", "markov"},
                  {"transition", m.transition.rows()},
                  {"init", pmf_json(m.init)},
                  {"stationary", m.stationary}};
        } else if constexpr (std::is_same_v<T, UnifilarSource>) {
          json emission = json::array();
          for (const auto& e : m.emission) emission.push_back(pmf_json(e));
          return {{"kind", "unifilar"},
                  {"next", m.next},
                  {"emission", emission},
                  {"init", pmf_json(m.init)}};
        } else {
          json pmfs = json::array();
          for (const auto& p : m.pmfs) pmfs.push_back(pmf_json(p));
          return {{"kind", "explicit"}, {"alphabet", m.alphabet}, {"pmfs", pmfs}};
        }
      },
      model);
}

SourceModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path);
  try {
    return model_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ValidationError("model file " + path + ": " + e.what());
  }
}

json cipher_to_json(const Cipher& c) {
  const CipherSpec& s = c.spec();
  return {{"spec",
           {{"n", s.n},
            {"key_bits", s.key_bits},
            {"num_keys", s.num_keys},
            {"key_rate", s.key_rate},
            {"num_real", s.num_real},
            {"num_messages", s.num_messages}}},
          {"table", c.table()}};
}

Cipher cipher_from_json(const json& j) {
  const json& s = require(j, "spec");
  CipherSpec spec = CipherSpec::make(require(s, "n").get<unsigned>(),
                                     require(s, "key_bits").get<unsigned>(),
                                     require(s, "num_real").get<std::size_t>());
  spec.num_messages = s.value("num_messages", spec.num_messages);
  return Cipher(spec, require(j, "table").get<std::vector<std::vector<std::uint32_t>>>());
}

std::vector<double> RateGrid::values() const {
  if (!(step > 0.0)) throw ValidationError("R grid step must be positive");
  if (!(min > 0.0) || max < min) throw ValidationError("R grid needs 0 < min <= max");
  std::vector<double> v;
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) v.push_back(min + step * static_cast<double>(i));
  return v;
}

std::vector<double> RunConfig::rate_values() const {
  if (rate_list.empty()) return rates.values();
  for (double r : rate_list)
    if (!(r > 0.0)) throw ValidationError("rates must be positive");
  return rate_list;
}

RunConfig config_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  try {
    c.command = j.value("command", "");
    if (j.contains("model")) {
      const json& m = j.at("model");
      if (m.is_string()) {
        std::filesystem::path p(m.get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        c.model = load_model(p.string());
      } else {
        c.model = model_from_json(m);
      }
    } else {
      c.model = IidSource{Pmf({0.8, 0.2})};
    }
    if (j.contains("rho")) {
      const json& r = j.at("rho");
      c.rhos = r.is_array() ? r.get<std::vector<double>>() : std::vector<double>{r.get<double>()};
    }
    if (j.contains("R")) {
      const json& r = j.at("R");
      if (r.is_array()) {
        c.rate_list = r.get<std::vector<double>>();
      } else if (r.is_number()) {
        c.rate_list = {r.get<double>()};
      } else {
        c.rates.min = r.value("min", c.rates.min);
        c.rates.max = r.value("max", c.rates.max);
        c.rates.step = r.value("step", c.rates.step);
      }
    }
    if (j.contains("n")) {
      const json& n = j.at("n");
      c.block_lengths =
          n.is_array() ? n.get<std::vector<unsigned>>() : std::vector<unsigned>{n.get<unsigned>()};
    }
    c.format = j.value("format", c.format);
    c.out = j.value("out", c.out);
    if (j.contains("caps")) {
      const json& caps = j.at("caps");
      c.materialize_cap = caps.value("materialize", c.materialize_cap);
      c.bruteforce_messages = caps.value("bruteforce_messages", c.bruteforce_messages);
    }
    c.threads = j.value("threads", c.threads);
    c.seed = j.value("seed", c.seed);
    c.grid_check = j.value("grid_check", c.grid_check);
    c.tolerance_scale = j.value("tolerance_scale", c.tolerance_scale);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  for (double r : c.rhos)
    if (!(r > 0.0)) throw ValidationError("rho values must be positive");
  for (unsigned n : c.block_lengths)
    if (n == 0) throw ValidationError("block lengths must be positive");
  if (c.format != "csv" && c.format != "json") throw ValidationError("format must be csv or json");
  if (c.threads < 1) throw ValidationError("threads must be at least 1");
  if (c.materialize_cap == 0 || c.bruteforce_messages == 0)
    throw ValidationError("caps must be positive");
  if (!(c.tolerance_scale > 0.0)) throw ValidationError("tolerance_scale must be positive");
  if (c.rate_list.empty()) (void)c.rates.values();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  return config_from_json(j, base.empty() ? "." : base.string());
}

}  // namespace keyguess
