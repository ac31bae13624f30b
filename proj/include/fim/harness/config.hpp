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

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fim::harness {

/// Raised on malformed config files, unknown keys or invalid field values.
/// The CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepKind {
  antenna_count,   // values: elements per axis, square grids both sides
  spacing,         // values: spacing in wavelengths, lambda/2 aperture fixed
  power,           // values: transmit power, dBm
  clusters,        // values: cluster count L
  morph_range,     // values: morphing bound in wavelengths, both sides
  paths_spread,    // pairs from sweep_paths x sweep_spreads, elementwise
  csi_gain,        // values: gain-estimate MSE relative to per-path power
  csi_angle,       // values: angle-estimate RMSE, radians
  eigenchannel,    // no sweep; per-mode eigenchannel gain statistics
  convergence_trace  // staged morphing-range schedule, per-iteration rows
};

SweepKind sweep_kind_from_name(const std::string& name);
std::string sweep_kind_name(SweepKind kind);

/// Full experiment description. Defaults reproduce the reference scenario:
/// 28 GHz link, 2x2 square FIMs at lambda/2 spacing 100.5 m apart, 8 clusters
/// of 4 paths with pi/128 angular spread, -94 dBm noise.
struct ExperimentConfig {
  SweepKind kind = SweepKind::morph_range;
  std::vector<std::string> schemes = {"fim-wpa", "fim-epa", "raa-wpa",
                                      "raa-epa"};
  int realizations = 100;
  std::uint64_t base_seed = 1;
  std::string output;             // empty: stdout
  std::string format = "csv";     // csv | json

  double frequency_ghz = 28.0;
  double bandwidth_mhz = 100.0;   // informational; noise given directly
  double noise_dbm = -94.0;
  double transmit_power_dbm = 10.0;
  double pathloss_exponent = 2.2;
  double pathloss_ref_db = -60.0;
  double pathloss_ref_distance_m = 1.0;

  std::array<double, 3> tx_position = {0.0, 0.0, 10.0};
  std::array<double, 3> rx_position = {0.0, 100.0, 0.0};
  // azimuth, elevation, spin (radians)
  std::array<double, 3> tx_orientation = {1.5707963267948966,
                                          2.356194490192345, 0.0};
  std::array<double, 3> rx_orientation = {1.5707963267948966,
                                          2.356194490192345, 0.0};
  std::array<int, 2> tx_grid = {2, 2};
  std::array<int, 2> rx_grid = {2, 2};
  double spacing_wl = 0.5;

  int clusters = 8;
  int paths_per_cluster = 4;
  double azimuth_spread = 0.024543692606170259;    // pi/128
  double elevation_spread = 0.024543692606170259;  // pi/128

  double morph_range_wl = 0.5;

  int max_outer_iterations = 50;
  double convergence_threshold_db = -30.0;
  int num_random_inits = -1;  // -1: auto peak-count heuristic
  int inner_max_steps = 100;
  double inner_gain_tol = 1e-4;

  std::vector<double> sweep_values;
  std::vector<double> sweep_paths;    // paths_spread kind only
  std::vector<double> sweep_spreads;  // paths_spread kind only
  std::vector<double> stage_bounds_wl = {0.1, 0.2, 0.5};
  int stage_iterations = 25;
  bool emit_per_realization = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a flat `key = value` config file (strings quoted, arrays in
/// brackets, # comments) and applies it over the defaults. Unknown keys are
/// errors. Throws ConfigError.
ExperimentConfig load_experiment_config(const std::string& path);

/// Fixed-order serialization of every field; input to the config hash and
/// the reproducibility story.
std::string canonical_config_text(const ExperimentConfig& config);

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace fim::harness
