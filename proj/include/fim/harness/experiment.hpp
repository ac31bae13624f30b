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

#include <Eigen/Dense>
#include <functional>

#include "fim/bcd.hpp"
#include "fim/harness/config.hpp"
#include "fim/harness/table.hpp"

namespace fim::harness {

/// Fully resolved per-sweep-point scenario: everything a realization needs.
struct Scenario {
  EnvironmentConfig env_config;
  ArrayGeometry tx_geom;
  ArrayGeometry rx_geom;
  double tx_bound = 0.0;
  double rx_bound = 0.0;
  double power_w = 0.0;
  double noise_w = 0.0;
  double wavelength = 0.0;
  double csi_gain_mse = 0.0;    // absolute variance on path gains
  double csi_angle_rmse = 0.0;  // radians
  BcdConfig bcd;                // seed filled per realization
  std::string sweep_param;
  std::string sweep_value;
};

/// Expands the config's sweep axis into concrete scenarios.
std::vector<Scenario> build_scenarios(const ExperimentConfig& config);

/// Runs `fn(0..count-1)` on up to `threads` workers. Exceptions from workers
/// are rethrown on the caller. With threads <= 1 this is a plain loop;
/// results must be keyed by index so scheduling never affects output.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Eigenvalues of H^H H sorted descending (squared singular values of H).
Eigen::VectorXd eigenchannel_gains(const Eigen::MatrixXcd& H);

/// Monte Carlo sweep: for every sweep value and scheme, `realizations`
/// seeded runs (realization r derives its seed from SplitMix64 of the base
/// seed, shared across schemes and sweep points so comparisons are paired).
/// Identical config and seed reproduce the table byte for byte at any
/// thread count.
ResultTable run_experiment(const ExperimentConfig& config, int threads);

/// Staged morphing-range schedule: the bound steps through stage_bounds_wl,
/// each stage warm-started from the previous shapes and run for exactly
/// stage_iterations outer iterations. Emits per-iteration capacity and
/// per-element deformation traces.
ResultTable convergence_trace_experiment(const ExperimentConfig& config,
                                         int threads);

}  // namespace fim::harness
