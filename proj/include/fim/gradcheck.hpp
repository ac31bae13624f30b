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

#include "fim/channel.hpp"

namespace fim {

/// Central finite differences of capacity w.r.t. every deformation, step h
/// in meters. Touches only channel assembly and the capacity evaluation, so
/// it is independent of the analytic gradient path it is used to check.
struct FiniteDifferenceGradients {
  Eigen::VectorXd tx;
  Eigen::VectorXd rx;
};

FiniteDifferenceGradients finite_difference_gradients(
    const PathBasis& basis, const Eigen::VectorXd& tx_deformations,
    const Eigen::VectorXd& rx_deformations, const Eigen::MatrixXcd& T,
    double noise_power, double step);

/// One random feasible instance for the gradient suite: array sizes with
/// M, N <= 4, multipath environments with 2 <= L*G <= 16, random
/// orientations, shapes and a random PSD covariance. Single-path channels
/// (L*G = 1) are excluded: their capacity is provably independent of the
/// receive shape, so finite differences return pure roundoff there and the
/// relative comparison is vacuous.
struct GradCheckInstance {
  ArrayGeometry tx_geom;
  ArrayGeometry rx_geom;
  ScatteringEnvironment env;
  Eigen::VectorXd tx_deformations;
  Eigen::VectorXd rx_deformations;
  Eigen::MatrixXcd covariance;
  double noise_power = 1.0;
  double wavelength = 1.0;
};

GradCheckInstance make_gradcheck_instance(std::uint64_t seed,
                                          double wavelength);

/// Max elementwise relative error between the analytic gradients and central
/// finite differences (step 1e-7 * wavelength) over `instances` seeded
/// random instances. Denominators are floored at 1e-6 of the instance's
/// gradient scale so exact zeros compare against scale, not against noise.
double gradcheck_max_rel_err(std::uint64_t seed, int instances,
                             double wavelength);

}  // namespace fim
