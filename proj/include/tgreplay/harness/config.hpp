#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tgreplay/error.hpp"
#include "tgreplay/harness/experiment.hpp"
#include "tgreplay/sampler.hpp"

namespace tgreplay::harness {

/// A sweep described by a `key = value` text file. `sampler`, `utd` and
/// `batch_size` take comma-separated lists and span a Cartesian grid; every
/// other key is a scalar shared by all cells. `#` starts a comment.
///
///   sampler = uniform, truncgeom
///   utd = 1/4
///   batch_size = 4, 16, 64, 256
///   seeds = 0..19
struct SweepConfig {
  ExperimentConfig base;
  std::vector<SamplerKind> samplers{SamplerKind::Uniform};
  std::vector<Rational> utds{{1, 4}};
  std::vector<std::size_t> batch_sizes{16};
  unsigned threads = 1;

  std::vector<ExperimentConfig> cells() const {
    std::vector<ExperimentConfig> grid;
    for (auto kind : samplers) {
      for (auto utd : utds) {
        for (auto batch : batch_sizes) {
          ExperimentConfig c = base;
          c.sampler.kind = kind;
          c.utd = utd;
          c.batch_size = batch;
          c.validate();
          grid.push_back(c);
        }
      }
    }
    return grid;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (item.empty()) throw ConfigError("empty list element");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("expected a non-negative integer, got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw ConfigError("integer out of range: '" + s + "'");
  }
}

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

// "a..b" (inclusive) or a comma list.
inline std::vector<std::uint64_t> parse_seed_list(std::string_view s) {
  std::vector<std::uint64_t> seeds;
  if (auto dots = s.find(".."); dots != std::string_view::npos) {
    const auto lo = parse_u64(std::string(trim(s.substr(0, dots))));
    const auto hi = parse_u64(std::string(trim(s.substr(dots + 2))));
    if (hi < lo) throw ConfigError("seed range is empty");
    for (auto x = lo; x <= hi; ++x) seeds.push_back(x);
    return seeds;
  }
  for (const auto& item : split_list(s)) seeds.push_back(parse_u64(item));
  return seeds;
}

}  // namespace detail

inline SweepConfig parse_sweep_config(std::istream& in, const std::string& source = "<config>") {
  using namespace detail;
  SweepConfig cfg;
  ExperimentConfig& b = cfg.base;
  SamplerSpec& s = b.sampler;
  auto size = [](const std::string& v) { return static_cast<std::size_t>(parse_u64(v)); };

  const std::map<std::string, std::function<void(const std::string&)>, std::less<>> handlers{
      {"sampler",
       [&](const std::string& v) {
         cfg.samplers.clear();
         for (const auto& x : split_list(v)) cfg.samplers.push_back(parse_sampler_kind(x));
       }},
      {"utd",
       [&](const std::string& v) {
         cfg.utds.clear();
         for (const auto& x : split_list(v)) cfg.utds.push_back(Rational::parse(x));
       }},
      {"batch_size",
       [&](const std::string& v) {
         cfg.batch_sizes.clear();
         for (const auto& x : split_list(v)) cfg.batch_sizes.push_back(size(x));
       }},
      {"seeds", [&](const std::string& v) { b.seeds = parse_seed_list(v); }},
      {"threads", [&](const std::string& v) { cfg.threads = static_cast<unsigned>(parse_u64(v)); }},
      {"buffer_capacity", [&](const std::string& v) { b.buffer_capacity = size(v); }},
      {"total_env_steps", [&](const std::string& v) { b.total_env_steps = size(v); }},
      {"eval_every", [&](const std::string& v) { b.eval_every = size(v); }},
      {"metrics_every", [&](const std::string& v) { b.metrics_every = size(v); }},
      {"learning_rate", [&](const std::string& v) { b.learning_rate = parse_real(v); }},
      {"gamma", [&](const std::string& v) { b.gamma = parse_real(v); }},
      {"env", [&](const std::string& v) { b.env.kind = parse_env_kind(v); }},
      {"state_count", [&](const std::string& v) { b.env.state_count = size(v); }},
      {"drift_period", [&](const std::string& v) { b.env.drift_period = size(v); }},
      {"episode_len", [&](const std::string& v) { b.env.episode_len = size(v); }},
      {"alpha", [&](const std::string& v) { s.alpha = parse_real(v); }},
      {"eta", [&](const std::string& v) { s.eta = parse_real(v); }},
      {"ere_updates_per_cycle", [&](const std::string& v) { s.ere_updates_per_cycle = size(v); }},
      {"c_min", [&](const std::string& v) { s.c_min = size(v); }},
      {"fifo_window", [&](const std::string& v) { s.fifo_window = size(v); }},
      {"per_exponent", [&](const std::string& v) { s.per_exponent = parse_real(v); }},
      {"per_beta_start", [&](const std::string& v) { s.per_beta_start = parse_real(v); }},
      {"per_beta_end", [&](const std::string& v) { s.per_beta_end = parse_real(v); }},
      {"per_epsilon", [&](const std::string& v) { s.per_epsilon = parse_real(v); }},
      {"ratio_exponent", [&](const std::string& v) { s.ratio_exponent = parse_real(v); }},
  };

  std::map<std::string, std::size_t, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = line;
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    auto h = handlers.find(key);
    if (h == handlers.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (auto [it, fresh] = seen.emplace(key, lineno); !fresh) {
      throw ConfigError(where + "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    }
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    try {
      h->second(value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (cfg.threads == 0) throw ConfigError(source + ": threads must be positive");
  return cfg;
}

inline SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_sweep_config(in, path.string());
}

}  // namespace tgreplay::harness
