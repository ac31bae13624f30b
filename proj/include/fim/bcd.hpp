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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fim/capacity.hpp"
#include "fim/channel.hpp"
#include "fim/morphing.hpp"

namespace fim {

/// How the transmit covariance is chosen inside the outer loop.
enum class PowerAllocation { waterfilling, equal };

/// The four benchmark transmission schemes. RAA variants pin both morphing
/// bounds to zero, reducing the FIM to a conventional rigid array.
enum class Scheme { fim_wpa, fim_epa, raa_wpa, raa_epa };

std::string scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);

struct BcdConfig {
  int max_outer_iterations = 50;
  double convergence_threshold_db = -30.0;  // on the fractional capacity gain
  int num_random_inits = -1;  // -1: auto, ceil(4 * max bound / wavelength)
  InnerLoopConfig inner;      // inner.step.initial_step 0 = wavelength/10
  std::uint64_t seed = 0;     // drives the random initial shapes
  bool stop_on_convergence = true;  // false: always run the full horizon
};

struct BcdReport {
  std::vector<double> capacity_trace;  // one entry per outer iteration
  SurfaceShape tx_shape;
  SurfaceShape rx_shape;
  TransmitCovariance covariance;
  bool converged = false;
  int iterations_used = 0;
  std::vector<double> init_candidate_capacities;  // flat candidate first

  double final_capacity() const {
    return capacity_trace.empty() ? 0.0 : capacity_trace.back();
  }
};

struct InitShapes {
  SurfaceShape tx;
  SurfaceShape rx;
  std::vector<double> candidate_capacities;
};

/// Evaluates `num_candidates` uniform random shapes in the feasible box plus
/// the all-zero (flat) shape and returns the one with the highest capacity
/// under the given power-allocation rule. Auto candidate count follows the
/// peak-count heuristic ceil(4 * max(bounds) / wavelength), at least 1.
/// Keeping the flat shape in the pool makes every FIM scheme at least as
/// good as its rigid-array counterpart on the same realization.
InitShapes initialize_shapes(const PathBasis& basis, double tx_bound,
                             double rx_bound, int num_candidates,
                             std::uint64_t seed, double power_budget,
                             double noise_power, double wavelength,
                             PowerAllocation ranking);

/// Outer block-coordinate loop: covariance update (water-filling or fixed
/// equal split) alternating with the inner morphing loop, stopping when the
/// fractional capacity increase falls below 10^(threshold_db/10) or the
/// iteration budget runs out. The capacity trace is non-decreasing and every
/// trace entry corresponds to a mutually consistent (shapes, covariance)
/// pair. `warm_start` skips initialization and begins from the given
/// deformations (used by staged morphing-range schedules).
BcdReport run_bcd(const ScatteringEnvironment& env,
                  const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                  double tx_bound, double rx_bound, double power_budget,
                  double noise_power, double wavelength,
                  const BcdConfig& config,
                  PowerAllocation allocation = PowerAllocation::waterfilling,
                  const std::optional<std::pair<Eigen::VectorXd,
                                                Eigen::VectorXd>>& warm_start =
                      std::nullopt);

/// Runs one of the four benchmark schemes and returns its report.
BcdReport run_scheme_report(Scheme scheme, const ScatteringEnvironment& env,
                            const ArrayGeometry& tx_geom,
                            const ArrayGeometry& rx_geom, double tx_bound,
                            double rx_bound, double power_budget,
                            double noise_power, double wavelength,
                            const BcdConfig& config);

/// Achieved capacity of a scheme (the report's final trace entry).
double run_scheme(Scheme scheme, const ScatteringEnvironment& env,
                  const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                  double tx_bound, double rx_bound, double power_budget,
                  double noise_power, double wavelength,
                  const BcdConfig& config);

}  // namespace fim
