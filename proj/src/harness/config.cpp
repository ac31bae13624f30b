// SPDX-License-Identifier: Apache-2.0
//
// fim-mimo: capacity optimization for MIMO links between flexible
// intelligent metasurfaces
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fim/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fim/bcd.hpp"
#include "fim/harness/table.hpp"

namespace fim::harness {

namespace {

struct RawValue {
  enum class Kind { number, text, boolean, list } kind;
  double number = 0.0;
  std::string text;
  bool boolean = false;
  std::vector<RawValue> items;
  int line = 0;
};

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

RawValue parse_scalar(const std::string& token, int line) {
  RawValue value;
  value.line = line;
  if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
    value.kind = RawValue::Kind::text;
    value.text = token.substr(1, token.size() - 2);
    return value;
  }
  if (token == "true" || token == "false") {
    value.kind = RawValue::Kind::boolean;
    value.boolean = token == "true";
    return value;
  }
  try {
    std::size_t used = 0;
    value.number = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) +
                      ": cannot parse value '" + token + "'");
  }
  value.kind = RawValue::Kind::number;
  return value;
}

RawValue parse_value(const std::string& token, int line) {
  if (!token.empty() && token.front() == '[') {
    if (token.back() != ']') {
      throw ConfigError("config line " + std::to_string(line) +
                        ": unterminated array");
    }
    RawValue value;
    value.kind = RawValue::Kind::list;
    value.line = line;
    const std::string inner = strip(token.substr(1, token.size() - 2));
    if (inner.empty()) return value;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
      if (i < inner.size() && inner[i] == '"') quoted = !quoted;
      if (i == inner.size() || (inner[i] == ',' && !quoted)) {
        value.items.push_back(
            parse_scalar(strip(inner.substr(start, i - start)), line));
        start = i + 1;
      }
    }
    return value;
  }
  return parse_scalar(token, line);
}

std::map<std::string, RawValue> parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, RawValue> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Trim comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    if (values.count(key)) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
    values.emplace(key, parse_value(strip(line.substr(eq + 1)), line_no));
  }
  return values;
}

class Schema {
 public:
  explicit Schema(ExperimentConfig* config) : config_(config) {}

  void number(const std::string& key, double* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::number)
        throw ConfigError("field '" + key + "' must be a number");
      *target = v.number;
    };
  }

  void integer(const std::string& key, int* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::number ||
          v.number != std::floor(v.number))
        throw ConfigError("field '" + key + "' must be an integer");
      *target = static_cast<int>(v.number);
    };
  }

  void seed(const std::string& key, std::uint64_t* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::number || v.number < 0 ||
          v.number != std::floor(v.number))
        throw ConfigError("field '" + key +
                          "' must be a nonnegative integer");
      *target = static_cast<std::uint64_t>(v.number);
    };
  }

  void text(const std::string& key, std::string* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::text)
        throw ConfigError("field '" + key + "' must be a quoted string");
      *target = v.text;
    };
  }

  void boolean(const std::string& key, bool* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::boolean)
        throw ConfigError("field '" + key + "' must be true or false");
      *target = v.boolean;
    };
  }

  void number_list(const std::string& key, std::vector<double>* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::list)
        throw ConfigError("field '" + key + "' must be an array");
      target->clear();
      for (const RawValue& item : v.items) {
        if (item.kind != RawValue::Kind::number)
          throw ConfigError("field '" + key + "' must hold numbers");
        target->push_back(item.number);
      }
    };
  }

  void text_list(const std::string& key, std::vector<std::string>* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::list)
        throw ConfigError("field '" + key + "' must be an array");
      target->clear();
      for (const RawValue& item : v.items) {
        if (item.kind != RawValue::Kind::text)
          throw ConfigError("field '" + key + "' must hold quoted strings");
        target->push_back(item.text);
      }
    };
  }

  template <std::size_t K, typename T>
  void fixed_numbers(const std::string& key, std::array<T, K>* target) {
    fields_[key] = [target, key](const RawValue& v) {
      if (v.kind != RawValue::Kind::list || v.items.size() != K)
        throw ConfigError("field '" + key + "' must be an array of " +
                          std::to_string(K) + " numbers");
      for (std::size_t i = 0; i < K; ++i) {
        if (v.items[i].kind != RawValue::Kind::number)
          throw ConfigError("field '" + key + "' must hold numbers");
        (*target)[i] = static_cast<T>(v.items[i].number);
      }
    };
  }

  void apply(const std::map<std::string, RawValue>& values) {
    for (const auto& [key, value] : values) {
      const auto found = fields_.find(key);
      if (found == fields_.end()) {
        throw ConfigError("unknown config key '" + key + "'");
      }
      found->second(value);
    }
  }

 private:
  ExperimentConfig* config_;
  std::map<std::string, std::function<void(const RawValue&)>> fields_;
};

}  // namespace

SweepKind sweep_kind_from_name(const std::string& name) {
  if (name == "antenna_count") return SweepKind::antenna_count;
  if (name == "spacing") return SweepKind::spacing;
  if (name == "power") return SweepKind::power;
  if (name == "clusters") return SweepKind::clusters;
  if (name == "morph_range") return SweepKind::morph_range;
  if (name == "paths_spread") return SweepKind::paths_spread;
  if (name == "csi_gain") return SweepKind::csi_gain;
  if (name == "csi_angle") return SweepKind::csi_angle;
  if (name == "eigenchannel") return SweepKind::eigenchannel;
  if (name == "convergence_trace") return SweepKind::convergence_trace;
  throw ConfigError("field 'experiment': unknown kind '" + name + "'");
}

std::string sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::antenna_count: return "antenna_count";
    case SweepKind::spacing: return "spacing";
    case SweepKind::power: return "power";
    case SweepKind::clusters: return "clusters";
    case SweepKind::morph_range: return "morph_range";
    case SweepKind::paths_spread: return "paths_spread";
    case SweepKind::csi_gain: return "csi_gain";
    case SweepKind::csi_angle: return "csi_angle";
    case SweepKind::eigenchannel: return "eigenchannel";
    case SweepKind::convergence_trace: return "convergence_trace";
  }
  throw std::logic_error("sweep_kind_name: unknown kind");
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  require(realizations >= 1, "field 'realizations' must be >= 1");
  require(frequency_ghz > 0, "field 'frequency_ghz' must be positive");
  require(bandwidth_mhz > 0, "field 'bandwidth_mhz' must be positive");
  require(pathloss_ref_distance_m > 0,
          "field 'pathloss_ref_distance_m' must be positive");
  require(spacing_wl > 0, "field 'spacing_wl' must be positive");
  require(tx_grid[0] >= 1 && tx_grid[1] >= 1,
          "field 'tx_grid' entries must be >= 1");
  require(rx_grid[0] >= 1 && rx_grid[1] >= 1,
          "field 'rx_grid' entries must be >= 1");
  require(clusters >= 1, "field 'clusters' must be >= 1");
  require(paths_per_cluster >= 1, "field 'paths_per_cluster' must be >= 1");
  require(azimuth_spread >= 0, "field 'azimuth_spread' must be >= 0");
  require(elevation_spread >= 0, "field 'elevation_spread' must be >= 0");
  require(morph_range_wl >= 0, "field 'morph_range_wl' must be >= 0");
  require(max_outer_iterations >= 1,
          "field 'max_outer_iterations' must be >= 1");
  require(std::isfinite(convergence_threshold_db),
          "field 'convergence_threshold_db' must be finite");
  require(inner_max_steps >= 0, "field 'inner_max_steps' must be >= 0");
  require(inner_gain_tol > 0, "field 'inner_gain_tol' must be positive");
  require(format == "csv" || format == "json",
          "field 'format' must be \"csv\" or \"json\"");
  require(!schemes.empty(), "field 'schemes' must not be empty");
  for (const std::string& scheme : schemes) {
    try {
      (void)fim::scheme_from_name(scheme);
    } catch (const std::exception&) {
      throw ConfigError("field 'schemes': unknown scheme '" + scheme + "'");
    }
  }

  const bool needs_values =
      kind != SweepKind::paths_spread && kind != SweepKind::eigenchannel &&
      kind != SweepKind::convergence_trace;
  if (needs_values) {
    require(!sweep_values.empty(), "field 'sweep_values' must not be empty");
  }
  switch (kind) {
    case SweepKind::antenna_count:
      for (double v : sweep_values)
        require(v >= 1 && v == std::floor(v),
                "field 'sweep_values': antenna counts must be integers >= 1");
      break;
    case SweepKind::spacing:
      for (double v : sweep_values)
        require(v > 0 && v <= 0.5,
                "field 'sweep_values': spacings must lie in (0, 0.5] "
                "wavelengths (lambda/2 aperture)");
      break;
    case SweepKind::clusters:
      for (double v : sweep_values)
        require(v >= 1 && v == std::floor(v),
                "field 'sweep_values': cluster counts must be integers >= 1");
      break;
    case SweepKind::morph_range:
      for (double v : sweep_values)
        require(v >= 0, "field 'sweep_values': ranges must be >= 0");
      break;
    case SweepKind::csi_gain:
    case SweepKind::csi_angle:
      for (double v : sweep_values)
        require(v >= 0, "field 'sweep_values': error levels must be >= 0");
      break;
    case SweepKind::paths_spread:
      require(!sweep_paths.empty() &&
                  sweep_paths.size() == sweep_spreads.size(),
              "fields 'sweep_paths' and 'sweep_spreads' must be non-empty "
              "and the same length");
      for (double v : sweep_paths)
        require(v >= 1 && v == std::floor(v),
                "field 'sweep_paths' entries must be integers >= 1");
      for (double v : sweep_spreads)
        require(v >= 0, "field 'sweep_spreads' entries must be >= 0");
      break;
    case SweepKind::convergence_trace:
      require(!stage_bounds_wl.empty(),
              "field 'stage_bounds_wl' must not be empty");
      for (double v : stage_bounds_wl)
        require(v >= 0, "field 'stage_bounds_wl' entries must be >= 0");
      require(stage_iterations >= 1, "field 'stage_iterations' must be >= 1");
      break;
    default:
      break;
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  const auto values = parse_file(path);

  ExperimentConfig config;
  std::string kind_name = sweep_kind_name(config.kind);
  Schema schema(&config);
  schema.text("experiment", &kind_name);
  schema.text_list("schemes", &config.schemes);
  schema.integer("realizations", &config.realizations);
  schema.seed("base_seed", &config.base_seed);
  schema.text("output", &config.output);
  schema.text("format", &config.format);
  schema.number("frequency_ghz", &config.frequency_ghz);
  schema.number("bandwidth_mhz", &config.bandwidth_mhz);
  schema.number("noise_dbm", &config.noise_dbm);
  schema.number("transmit_power_dbm", &config.transmit_power_dbm);
  schema.number("pathloss_exponent", &config.pathloss_exponent);
  schema.number("pathloss_ref_db", &config.pathloss_ref_db);
  schema.number("pathloss_ref_distance_m", &config.pathloss_ref_distance_m);
  schema.fixed_numbers("tx_position", &config.tx_position);
  schema.fixed_numbers("rx_position", &config.rx_position);
  schema.fixed_numbers("tx_orientation", &config.tx_orientation);
  schema.fixed_numbers("rx_orientation", &config.rx_orientation);
  schema.fixed_numbers("tx_grid", &config.tx_grid);
  schema.fixed_numbers("rx_grid", &config.rx_grid);
  schema.number("spacing_wl", &config.spacing_wl);
  schema.integer("clusters", &config.clusters);
  schema.integer("paths_per_cluster", &config.paths_per_cluster);
  schema.number("azimuth_spread", &config.azimuth_spread);
  schema.number("elevation_spread", &config.elevation_spread);
  schema.number("morph_range_wl", &config.morph_range_wl);
  schema.integer("max_outer_iterations", &config.max_outer_iterations);
  schema.number("convergence_threshold_db", &config.convergence_threshold_db);
  schema.integer("num_random_inits", &config.num_random_inits);
  schema.integer("inner_max_steps", &config.inner_max_steps);
  schema.number("inner_gain_tol", &config.inner_gain_tol);
  schema.number_list("sweep_values", &config.sweep_values);
  schema.number_list("sweep_paths", &config.sweep_paths);
  schema.number_list("sweep_spreads", &config.sweep_spreads);
  schema.number_list("stage_bounds_wl", &config.stage_bounds_wl);
  schema.integer("stage_iterations", &config.stage_iterations);
  schema.boolean("emit_per_realization", &config.emit_per_realization);
  schema.apply(values);

  config.kind = sweep_kind_from_name(kind_name);
  config.validate();
  return config;
}

std::string canonical_config_text(const ExperimentConfig& config) {
  std::ostringstream out;
  auto num = [](double v) { return format_double(v); };
  out << "experiment=" << sweep_kind_name(config.kind) << '\n';
  out << "schemes=";
  for (const auto& s : config.schemes) out << s << ';';
  out << '\n';
  out << "realizations=" << config.realizations << '\n';
  out << "base_seed=" << config.base_seed << '\n';
  out << "format=" << config.format << '\n';
  out << "frequency_ghz=" << num(config.frequency_ghz) << '\n';
  out << "bandwidth_mhz=" << num(config.bandwidth_mhz) << '\n';
  out << "noise_dbm=" << num(config.noise_dbm) << '\n';
  out << "transmit_power_dbm=" << num(config.transmit_power_dbm) << '\n';
  out << "pathloss_exponent=" << num(config.pathloss_exponent) << '\n';
  out << "pathloss_ref_db=" << num(config.pathloss_ref_db) << '\n';
  out << "pathloss_ref_distance_m=" << num(config.pathloss_ref_distance_m)
      << '\n';
  auto triple = [&](const char* key, const std::array<double, 3>& v) {
    out << key << '=' << num(v[0]) << ';' << num(v[1]) << ';' << num(v[2])
        << '\n';
  };
  triple("tx_position", config.tx_position);
  triple("rx_position", config.rx_position);
  triple("tx_orientation", config.tx_orientation);
  triple("rx_orientation", config.rx_orientation);
  out << "tx_grid=" << config.tx_grid[0] << ';' << config.tx_grid[1] << '\n';
  out << "rx_grid=" << config.rx_grid[0] << ';' << config.rx_grid[1] << '\n';
  out << "spacing_wl=" << num(config.spacing_wl) << '\n';
  out << "clusters=" << config.clusters << '\n';
  out << "paths_per_cluster=" << config.paths_per_cluster << '\n';
  out << "azimuth_spread=" << num(config.azimuth_spread) << '\n';
  out << "elevation_spread=" << num(config.elevation_spread) << '\n';
  out << "morph_range_wl=" << num(config.morph_range_wl) << '\n';
  out << "max_outer_iterations=" << config.max_outer_iterations << '\n';
  out << "convergence_threshold_db=" << num(config.convergence_threshold_db)
      << '\n';
  out << "num_random_inits=" << config.num_random_inits << '\n';
  out << "inner_max_steps=" << config.inner_max_steps << '\n';
  out << "inner_gain_tol=" << num(config.inner_gain_tol) << '\n';
  auto list = [&](const char* key, const std::vector<double>& v) {
    out << key << '=';
    for (double x : v) out << num(x) << ';';
    out << '\n';
  };
  list("sweep_values", config.sweep_values);
  list("sweep_paths", config.sweep_paths);
  list("sweep_spreads", config.sweep_spreads);
  list("stage_bounds_wl", config.stage_bounds_wl);
  out << "stage_iterations=" << config.stage_iterations << '\n';
  out << "emit_per_realization=" << (config.emit_per_realization ? 1 : 0)
      << '\n';
  return out.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace fim::harness
