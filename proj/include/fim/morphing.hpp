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

#include "fim/capacity.hpp"
#include "fim/channel.hpp"

namespace fim {

/// Intermediates of one gradient evaluation. With W_t = A_t o F_t(zeta) and
/// W_r = A_r o F_r(xi):
///
///   o_tx = diag(g) W_t^H T W_t diag(g)^H / sigma^2        (P x P, Hermitian)
///   o_rx = diag(g)^H W_r^H W_r diag(g) / sigma^2          (P x P, Hermitian)
///   b_rx = I_N + W_r o_tx W_r^H                           (Hermitian PD)
///   b_tx = I_M + T W_t o_rx W_t^H                         (general complex)
///   s_rx = W_r K_r o_tx W_r^H
///   s_tx = W_t K_t o_rx W_t^H
///
/// where K_* = diag(kappa <k, o_p>). The capacity equals log2 det b_rx and
/// log2 det b_tx, and the per-element derivatives are
///
///   dC/dxi_n   = -(2/ln 2) Im([s_rx b_rx^-1]_nn)
///   dC/dzeta_m = -(2/ln 2) Im([s_tx b_tx^-1 T]_mm)
struct GradientWorkspace {
  Eigen::MatrixXcd o_tx, o_rx;
  Eigen::MatrixXcd b_rx, b_tx;
  Eigen::MatrixXcd s_rx, s_tx;
  Eigen::VectorXd k_proj_tx, k_proj_rx;
};

struct ShapeGradients {
  Eigen::VectorXd tx;  // dC/dzeta, length M
  Eigen::VectorXd rx;  // dC/dxi, length N
};

/// Both analytic capacity gradients for one configuration. The workspace
/// output is optional scratch exposure for diagnostics.
ShapeGradients shape_gradients(const PathBasis& basis,
                               const Eigen::VectorXd& tx_deformations,
                               const Eigen::VectorXd& rx_deformations,
                               const Eigen::MatrixXcd& T, double noise_power,
                               GradientWorkspace* workspace = nullptr);

/// Gradient of capacity w.r.t. the receive deformations.
Eigen::VectorXd grad_rx_shape(const ScatteringEnvironment& env,
                              const ArrayGeometry& tx_geom,
                              const ArrayGeometry& rx_geom,
                              const SurfaceShape& tx_shape,
                              const SurfaceShape& rx_shape,
                              const TransmitCovariance& cov,
                              double wavelength);

/// Gradient of capacity w.r.t. the transmit deformations.
Eigen::VectorXd grad_tx_shape(const ScatteringEnvironment& env,
                              const ArrayGeometry& tx_geom,
                              const ArrayGeometry& rx_geom,
                              const SurfaceShape& tx_shape,
                              const SurfaceShape& rx_shape,
                              const TransmitCovariance& cov,
                              double wavelength);

/// Backtracking line-search policy for the joint shape update.
struct StepPolicy {
  double initial_step = 0.0;  // meters; wavelength/10 by convention
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 30;

  static StepPolicy for_wavelength(double wavelength) {
    return StepPolicy{wavelength / 10.0, 0.5, 1e-4, 30};
  }
};

struct InnerLoopConfig {
  int max_steps = 100;
  double relative_gain_tol = 1e-4;
  StepPolicy step;
};

struct MorphState {
  Eigen::VectorXd tx_deformations;
  Eigen::VectorXd rx_deformations;
  double capacity = 0.0;
  bool moved = false;
  int steps_taken = 0;
};

/// One projected gradient-ascent step: both shapes move simultaneously along
/// their gradients with a common step found by backtracking; candidates are
/// clamped into the box before the capacity is evaluated, so the Armijo test
/// sees the true feasible iterate. A failed search returns the inputs
/// unchanged. The returned capacity never decreases.
MorphState ascent_step(const PathBasis& basis,
                       const Eigen::VectorXd& tx_deformations,
                       const Eigen::VectorXd& rx_deformations,
                       double tx_bound, double rx_bound,
                       const Eigen::MatrixXcd& T, double noise_power,
                       const StepPolicy& policy);

/// Repeated ascent steps until one step's relative capacity gain drops below
/// the tolerance, the search fails, or max_steps is reached.
MorphState inner_morph_loop(const PathBasis& basis,
                            const Eigen::VectorXd& tx_deformations,
                            const Eigen::VectorXd& rx_deformations,
                            double tx_bound, double rx_bound,
                            const Eigen::MatrixXcd& T, double noise_power,
                            const InnerLoopConfig& config);

/// Environment-level wrappers of the two loop operations.
MorphState ascent_step(const ScatteringEnvironment& env,
                       const ArrayGeometry& tx_geom,
                       const ArrayGeometry& rx_geom,
                       const SurfaceShape& tx_shape,
                       const SurfaceShape& rx_shape,
                       const TransmitCovariance& cov, double wavelength,
                       const StepPolicy& policy);

MorphState inner_morph_loop(const ScatteringEnvironment& env,
                            const ArrayGeometry& tx_geom,
                            const ArrayGeometry& rx_geom,
                            const SurfaceShape& tx_shape,
                            const SurfaceShape& rx_shape,
                            const TransmitCovariance& cov, double wavelength,
                            const InnerLoopConfig& config);

}  // namespace fim
