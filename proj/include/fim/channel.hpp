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
#include <complex>
#include <cstdint>

#include "fim/geometry.hpp"

namespace fim {

/// Azimuth/elevation pairs for all L*G propagation paths on one link side,
/// grouped cluster-major: path index p = l*G + g. Angles are in radians and
/// are not wrapped; all downstream formulas are periodic.
struct PathAngles {
  Eigen::VectorXd azimuth;
  Eigen::VectorXd elevation;
};

/// Clustered multipath environment: L clusters of G paths each, with complex
/// per-path gains drawn CN(0, rho_l^2 / G) and cluster powers summing to the
/// link path loss beta^2.
struct ScatteringEnvironment {
  int num_clusters = 0;      // L
  int paths_per_cluster = 0; // G
  PathAngles departure;      // w.r.t. the transmitting FIM
  PathAngles arrival;        // w.r.t. the receiving FIM
  Eigen::VectorXcd gains;    // L*G entries, cluster-major
  Eigen::VectorXd cluster_powers;  // rho_l^2, length L
  double pathloss = 0.0;           // beta^2

  int path_count() const { return num_clusters * paths_per_cluster; }
};

/// Knobs for sampling a ScatteringEnvironment.
struct EnvironmentConfig {
  int num_clusters = 8;
  int paths_per_cluster = 4;
  double azimuth_spread = 0.0;    // std dev of per-path azimuth, radians
  double elevation_spread = 0.0;  // std dev of per-path elevation, radians
  double pathloss = 1.0;          // beta^2, linear
};

/// Distance-dependent path loss beta^2 = ref_gain * (distance/ref_distance)^-exponent.
double path_loss(double ref_gain, double ref_distance, double exponent,
                 double distance);

/// Draws an environment: cluster mean angles uniform on [0, pi) (departure
/// and arrival independently), per-path angles uniform around the cluster
/// mean with the configured standard deviation (width 2*sqrt(3)*spread),
/// gains CN(0, beta^2/(L*G)). Deterministic under the seed.
ScatteringEnvironment sample_environment(const EnvironmentConfig& config,
                                         std::uint64_t seed);

/// Noisy channel estimate: adds CN(0, gain_mse) to every path gain and a
/// zero-mean uniform error of standard deviation angle_rmse to every path
/// angle. Deterministic under the seed.
ScatteringEnvironment perturb_csi(const ScatteringEnvironment& env,
                                  double gain_mse, double angle_rmse,
                                  std::uint64_t seed);

/// Unit propagation direction [sin(el)cos(az), sin(el)sin(az), cos(el)].
Eigen::Vector3d propagation_direction(double azimuth, double elevation);

/// Steering vector of the unmorphed array for a plane wave along
/// `direction`: entry m is exp(j*kappa*(x_m <i,o> + y_m <j,o>)) with
/// kappa = 2*pi/wavelength. Entry 0 is always 1.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom,
                                 const Eigen::Vector3d& direction,
                                 double wavelength);

/// Multiplicative response of the morphed surface: entry m is
/// exp(j*kappa*deformation_m*<k,o>). All-ones for a flat shape.
Eigen::VectorXcd morphing_response(const SurfaceShape& shape,
                                   const OrientationFrame& frame,
                                   const Eigen::Vector3d& direction,
                                   double wavelength);

/// Shape-independent per-link factors, precomputed once per environment so
/// that channel evaluations during morphing touch only the deformation
/// phases. k_proj_* holds kappa*<k, o_p> per path.
struct PathBasis {
  Eigen::MatrixXcd steer_tx;  // A_t, M x P
  Eigen::MatrixXcd steer_rx;  // A_r, N x P
  Eigen::VectorXd k_proj_tx;  // length P
  Eigen::VectorXd k_proj_rx;  // length P
  Eigen::VectorXcd gains;     // varsigma diagonal, length P

  int tx_count() const { return static_cast<int>(steer_tx.rows()); }
  int rx_count() const { return static_cast<int>(steer_rx.rows()); }
  int path_count() const { return static_cast<int>(gains.size()); }
};

PathBasis make_path_basis(const ScatteringEnvironment& env,
                          const ArrayGeometry& tx_geom,
                          const ArrayGeometry& rx_geom, double wavelength);

/// Morphing phase matrix F (rows: elements, cols: paths) for the given
/// deformations and per-path normal projections.
Eigen::MatrixXcd morphing_matrix(const Eigen::VectorXd& deformations,
                                 const Eigen::VectorXd& k_proj);

/// H = [A_r o F_r] diag(gains) [A_t o F_t]^H without revalidation; the fast
/// path used inside optimization loops.
Eigen::MatrixXcd channel_from_basis(const PathBasis& basis,
                                    const Eigen::VectorXd& tx_deformations,
                                    const Eigen::VectorXd& rx_deformations);

/// Assembled channel with its factors. The factored product (matrix form)
/// and the explicit rank-one sum are algebraically identical; the sum form
/// is kept as an independent assembly route for cross-checking.
struct ChannelMatrix {
  Eigen::MatrixXcd H;         // N x M
  PathBasis basis;            // A_t, A_r, gains, normal projections
  Eigen::MatrixXcd morph_tx;  // F_t(zeta), M x P
  Eigen::MatrixXcd morph_rx;  // F_r(xi),  N x P
};

/// Factored assembly (matrix form). Throws std::invalid_argument on shape /
/// geometry dimension mismatches or infeasible shapes.
ChannelMatrix assemble_channel(const ScatteringEnvironment& env,
                               const ArrayGeometry& tx_geom,
                               const ArrayGeometry& rx_geom,
                               const SurfaceShape& tx_shape,
                               const SurfaceShape& rx_shape,
                               double wavelength);

/// Reference assembly: the explicit sum of L*G rank-one terms
/// gain_p * a_r(p) a_t(p)^H built path by path from steering_vector and
/// morphing_response. Used as the dual route against assemble_channel.
Eigen::MatrixXcd assemble_channel_sum(const ScatteringEnvironment& env,
                                      const ArrayGeometry& tx_geom,
                                      const ArrayGeometry& rx_geom,
                                      const SurfaceShape& tx_shape,
                                      const SurfaceShape& rx_shape,
                                      double wavelength);

}  // namespace fim
