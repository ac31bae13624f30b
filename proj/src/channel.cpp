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

#include "fim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fim/rng.hpp"

namespace fim {

namespace {
constexpr double kPi = std::numbers::pi;
// Half-width of a zero-mean uniform distribution with unit standard
// deviation; uniform on [-sqrt(3)s, sqrt(3)s] has std dev exactly s.
const double kUniformHalfWidth = std::sqrt(3.0);

std::complex<double> unit_phasor(double phase) {
  return {std::cos(phase), std::sin(phase)};
}
}  // namespace

double path_loss(double ref_gain, double ref_distance, double exponent,
                 double distance) {
  if (!(ref_distance > 0.0) || !(distance > 0.0)) {
    throw std::invalid_argument("path_loss: distances must be positive");
  }
  return ref_gain * std::pow(distance / ref_distance, -exponent);
}

ScatteringEnvironment sample_environment(const EnvironmentConfig& config,
                                         std::uint64_t seed) {
  if (config.num_clusters < 1 || config.paths_per_cluster < 1) {
    throw std::invalid_argument(
        "sample_environment: need at least one cluster and one path");
  }
  if (config.azimuth_spread < 0.0 || config.elevation_spread < 0.0) {
    throw std::invalid_argument(
        "sample_environment: angular spreads must be nonnegative");
  }
  if (!(config.pathloss > 0.0)) {
    throw std::invalid_argument("sample_environment: pathloss must be > 0");
  }

  const int L = config.num_clusters;
  const int G = config.paths_per_cluster;
  const int P = L * G;
  Rng rng(seed);

  ScatteringEnvironment env;
  env.num_clusters = L;
  env.paths_per_cluster = G;
  env.departure.azimuth.resize(P);
  env.departure.elevation.resize(P);
  env.arrival.azimuth.resize(P);
  env.arrival.elevation.resize(P);
  env.gains.resize(P);
  env.cluster_powers = Eigen::VectorXd::Constant(L, config.pathloss / L);
  env.pathloss = config.pathloss;

  const double waz = kUniformHalfWidth * config.azimuth_spread;
  const double wel = kUniformHalfWidth * config.elevation_spread;
  for (int l = 0; l < L; ++l) {
    const double mean_dep_az = rng.uniform(0.0, kPi);
    const double mean_dep_el = rng.uniform(0.0, kPi);
    const double mean_arr_az = rng.uniform(0.0, kPi);
    const double mean_arr_el = rng.uniform(0.0, kPi);
    for (int g = 0; g < G; ++g) {
      const int p = l * G + g;
      env.departure.azimuth[p] = mean_dep_az + rng.uniform(-waz, waz);
      env.departure.elevation[p] = mean_dep_el + rng.uniform(-wel, wel);
      env.arrival.azimuth[p] = mean_arr_az + rng.uniform(-waz, waz);
      env.arrival.elevation[p] = mean_arr_el + rng.uniform(-wel, wel);
    }
  }
  for (int l = 0; l < L; ++l) {
    const double variance = env.cluster_powers[l] / G;
    for (int g = 0; g < G; ++g) {
      env.gains[l * G + g] = rng.complex_gaussian(variance);
    }
  }
  return env;
}

ScatteringEnvironment perturb_csi(const ScatteringEnvironment& env,
                                  double gain_mse, double angle_rmse,
                                  std::uint64_t seed) {
  if (gain_mse < 0.0 || angle_rmse < 0.0) {
    throw std::invalid_argument("perturb_csi: error levels must be >= 0");
  }
  ScatteringEnvironment est = env;
  Rng rng(seed);
  const int P = env.path_count();
  for (int p = 0; p < P; ++p) {
    est.gains[p] += rng.complex_gaussian(gain_mse);
  }
  const double w = kUniformHalfWidth * angle_rmse;
  for (int p = 0; p < P; ++p) {
    est.departure.azimuth[p] += rng.uniform(-w, w);
    est.departure.elevation[p] += rng.uniform(-w, w);
    est.arrival.azimuth[p] += rng.uniform(-w, w);
    est.arrival.elevation[p] += rng.uniform(-w, w);
  }
  return est;
}

Eigen::Vector3d propagation_direction(double azimuth, double elevation) {
  return {std::sin(elevation) * std::cos(azimuth),
          std::sin(elevation) * std::sin(azimuth), std::cos(elevation)};
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom,
                                 const Eigen::Vector3d& direction,
                                 double wavelength) {
  geom.validate();
  if (!(wavelength > 0.0)) {
    throw std::invalid_argument("steering_vector: wavelength must be > 0");
  }
  const double kappa = 2.0 * kPi / wavelength;
  const double along_i = geom.frame.i.dot(direction);
  const double along_j = geom.frame.j.dot(direction);
  Eigen::VectorXcd steer(geom.element_count());
  for (int m = 0; m < geom.element_count(); ++m) {
    steer[m] =
        unit_phasor(kappa * (geom.offset_x(m) * along_i +
                             geom.offset_y(m) * along_j));
  }
  return steer;
}

Eigen::VectorXcd morphing_response(const SurfaceShape& shape,
                                   const OrientationFrame& frame,
                                   const Eigen::Vector3d& direction,
                                   double wavelength) {
  if (!validate_shape(shape)) {
    throw std::invalid_argument("morphing_response: infeasible shape");
  }
  const double kappa = 2.0 * kPi / wavelength;
  const double along_k = frame.k.dot(direction);
  Eigen::VectorXcd response(shape.deformations.size());
  for (Eigen::Index m = 0; m < shape.deformations.size(); ++m) {
    response[m] = unit_phasor(kappa * shape.deformations[m] * along_k);
  }
  return response;
}

PathBasis make_path_basis(const ScatteringEnvironment& env,
                          const ArrayGeometry& tx_geom,
                          const ArrayGeometry& rx_geom, double wavelength) {
  tx_geom.validate();
  rx_geom.validate();
  if (!(wavelength > 0.0)) {
    throw std::invalid_argument("make_path_basis: wavelength must be > 0");
  }
  const int P = env.path_count();
  if (env.departure.azimuth.size() != P || env.arrival.azimuth.size() != P ||
      env.gains.size() != P) {
    throw std::invalid_argument("make_path_basis: inconsistent environment");
  }
  const double kappa = 2.0 * kPi / wavelength;

  PathBasis basis;
  basis.steer_tx.resize(tx_geom.element_count(), P);
  basis.steer_rx.resize(rx_geom.element_count(), P);
  basis.k_proj_tx.resize(P);
  basis.k_proj_rx.resize(P);
  basis.gains = env.gains;
  for (int p = 0; p < P; ++p) {
    const Eigen::Vector3d dep = propagation_direction(
        env.departure.azimuth[p], env.departure.elevation[p]);
    const Eigen::Vector3d arr = propagation_direction(
        env.arrival.azimuth[p], env.arrival.elevation[p]);
    basis.steer_tx.col(p) = steering_vector(tx_geom, dep, wavelength);
    basis.steer_rx.col(p) = steering_vector(rx_geom, arr, wavelength);
    basis.k_proj_tx[p] = kappa * tx_geom.frame.k.dot(dep);
    basis.k_proj_rx[p] = kappa * rx_geom.frame.k.dot(arr);
  }
  return basis;
}

Eigen::MatrixXcd morphing_matrix(const Eigen::VectorXd& deformations,
                                 const Eigen::VectorXd& k_proj) {
  Eigen::MatrixXcd morph(deformations.size(), k_proj.size());
  for (Eigen::Index p = 0; p < k_proj.size(); ++p) {
    for (Eigen::Index m = 0; m < deformations.size(); ++m) {
      morph(m, p) = unit_phasor(deformations[m] * k_proj[p]);
    }
  }
  return morph;
}

Eigen::MatrixXcd channel_from_basis(const PathBasis& basis,
                                    const Eigen::VectorXd& tx_deformations,
                                    const Eigen::VectorXd& rx_deformations) {
  const Eigen::MatrixXcd tx_side =
      (basis.steer_tx.array() *
       morphing_matrix(tx_deformations, basis.k_proj_tx).array())
          .matrix();
  const Eigen::MatrixXcd rx_side =
      (basis.steer_rx.array() *
       morphing_matrix(rx_deformations, basis.k_proj_rx).array())
          .matrix();
  return rx_side * basis.gains.asDiagonal() * tx_side.adjoint();
}

ChannelMatrix assemble_channel(const ScatteringEnvironment& env,
                               const ArrayGeometry& tx_geom,
                               const ArrayGeometry& rx_geom,
                               const SurfaceShape& tx_shape,
                               const SurfaceShape& rx_shape,
                               double wavelength) {
  if (tx_shape.deformations.size() != tx_geom.element_count() ||
      rx_shape.deformations.size() != rx_geom.element_count()) {
    throw std::invalid_argument(
        "assemble_channel: shape length does not match element count");
  }
  if (!validate_shape(tx_shape) || !validate_shape(rx_shape)) {
    throw std::invalid_argument("assemble_channel: infeasible shape");
  }
  ChannelMatrix channel;
  channel.basis = make_path_basis(env, tx_geom, rx_geom, wavelength);
  channel.morph_tx =
      morphing_matrix(tx_shape.deformations, channel.basis.k_proj_tx);
  channel.morph_rx =
      morphing_matrix(rx_shape.deformations, channel.basis.k_proj_rx);
  channel.H = ((channel.basis.steer_rx.array() * channel.morph_rx.array())
                   .matrix()) *
              channel.basis.gains.asDiagonal() *
              ((channel.basis.steer_tx.array() * channel.morph_tx.array())
                   .matrix())
                  .adjoint();
  return channel;
}

Eigen::MatrixXcd assemble_channel_sum(const ScatteringEnvironment& env,
                                      const ArrayGeometry& tx_geom,
                                      const ArrayGeometry& rx_geom,
                                      const SurfaceShape& tx_shape,
                                      const SurfaceShape& rx_shape,
                                      double wavelength) {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(rx_geom.element_count(),
                                              tx_geom.element_count());
  for (int p = 0; p < env.path_count(); ++p) {
    const Eigen::Vector3d dep = propagation_direction(
        env.departure.azimuth[p], env.departure.elevation[p]);
    const Eigen::Vector3d arr = propagation_direction(
        env.arrival.azimuth[p], env.arrival.elevation[p]);
    const Eigen::VectorXcd tx_steer =
        steering_vector(tx_geom, dep, wavelength).cwiseProduct(
            morphing_response(tx_shape, tx_geom.frame, dep, wavelength));
    const Eigen::VectorXcd rx_steer =
        steering_vector(rx_geom, arr, wavelength).cwiseProduct(
            morphing_response(rx_shape, rx_geom.frame, arr, wavelength));
    H += env.gains[p] * rx_steer * tx_steer.adjoint();
  }
  return H;
}

}  // namespace fim
