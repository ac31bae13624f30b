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

#include "fim/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fim/capacity.hpp"
#include "fim/morphing.hpp"
#include "fim/rng.hpp"

namespace fim {

FiniteDifferenceGradients finite_difference_gradients(
    const PathBasis& basis, const Eigen::VectorXd& tx_deformations,
    const Eigen::VectorXd& rx_deformations, const Eigen::MatrixXcd& T,
    double noise_power, double step) {
  auto eval = [&](const Eigen::VectorXd& tx, const Eigen::VectorXd& rx) {
    return detail::capacity_unchecked(channel_from_basis(basis, tx, rx), T,
                                      noise_power);
  };
  FiniteDifferenceGradients fd;
  fd.tx.resize(tx_deformations.size());
  fd.rx.resize(rx_deformations.size());
  Eigen::VectorXd probe = tx_deformations;
  for (Eigen::Index m = 0; m < probe.size(); ++m) {
    const double center = probe[m];
    probe[m] = center + step;
    const double up = eval(probe, rx_deformations);
    probe[m] = center - step;
    const double down = eval(probe, rx_deformations);
    probe[m] = center;
    fd.tx[m] = (up - down) / (2.0 * step);
  }
  probe = rx_deformations;
  for (Eigen::Index n = 0; n < probe.size(); ++n) {
    const double center = probe[n];
    probe[n] = center + step;
    const double up = eval(tx_deformations, probe);
    probe[n] = center - step;
    const double down = eval(tx_deformations, probe);
    probe[n] = center;
    fd.rx[n] = (up - down) / (2.0 * step);
  }
  return fd;
}

GradCheckInstance make_gradcheck_instance(std::uint64_t seed,
                                          double wavelength) {
  constexpr double kPi = std::numbers::pi;
  Rng rng(seed);
  GradCheckInstance inst;
  inst.wavelength = wavelength;

  auto random_geom = [&]() {
    // Grids with 1..4 elements total.
    static constexpr int kGrids[][2] = {{1, 1}, {2, 1}, {1, 2}, {3, 1},
                                        {1, 3}, {4, 1}, {1, 4}, {2, 2}};
    const int pick = static_cast<int>(rng.uniform(0.0, 8.0));
    ArrayGeometry geom;
    geom.counts_x = kGrids[pick][0];
    geom.counts_y = kGrids[pick][1];
    geom.spacing_x = geom.spacing_y = wavelength / 2.0;
    geom.frame = frame_from_angles({rng.uniform(0.0, kPi),
                                    rng.uniform(0.0, kPi),
                                    rng.uniform(0.0, 2.0 * kPi)});
    return geom;
  };
  inst.tx_geom = random_geom();
  inst.rx_geom = random_geom();

  EnvironmentConfig env_config;
  do {
    env_config.num_clusters = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    env_config.paths_per_cluster = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
  } while (env_config.num_clusters * env_config.paths_per_cluster < 2);
  env_config.azimuth_spread = kPi / 64.0;
  env_config.elevation_spread = kPi / 64.0;
  env_config.pathloss = 1.0;
  inst.env = sample_environment(env_config, rng.next_u64());

  const int M = inst.tx_geom.element_count();
  const int N = inst.rx_geom.element_count();
  inst.tx_deformations.resize(M);
  inst.rx_deformations.resize(N);
  const double bound = wavelength / 2.0;
  for (int m = 0; m < M; ++m)
    inst.tx_deformations[m] = rng.uniform(-bound, bound);
  for (int n = 0; n < N; ++n)
    inst.rx_deformations[n] = rng.uniform(-bound, bound);

  Eigen::MatrixXcd X(M, M);
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < M; ++c) X(r, c) = rng.complex_gaussian(1.0);
  inst.covariance = X * X.adjoint();
  const double budget = rng.uniform(0.5, 4.0);
  inst.covariance *= budget / inst.covariance.trace().real();
  inst.noise_power = 1.0;
  return inst;
}

double gradcheck_max_rel_err(std::uint64_t seed, int instances,
                             double wavelength) {
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const GradCheckInstance inst =
        make_gradcheck_instance(split_seed(seed, i), wavelength);
    const PathBasis basis =
        make_path_basis(inst.env, inst.tx_geom, inst.rx_geom, inst.wavelength);
    const ShapeGradients analytic =
        shape_gradients(basis, inst.tx_deformations, inst.rx_deformations,
                        inst.covariance, inst.noise_power);
    const FiniteDifferenceGradients fd = finite_difference_gradients(
        basis, inst.tx_deformations, inst.rx_deformations, inst.covariance,
        inst.noise_power, 1e-7 * inst.wavelength);

    const double scale =
        std::max({1.0, fd.tx.cwiseAbs().maxCoeff(), fd.rx.cwiseAbs().maxCoeff()});
    auto side_err = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      double err = 0.0;
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double den =
            std::max({std::abs(a[k]), std::abs(b[k]), 1e-6 * scale});
        err = std::max(err, std::abs(a[k] - b[k]) / den);
      }
      return err;
    };
    worst = std::max(worst, side_err(analytic.tx, fd.tx));
    worst = std::max(worst, side_err(analytic.rx, fd.rx));
  }
  return worst;
}

}  // namespace fim
