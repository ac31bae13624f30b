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

#include <doctest.h>

#include <complex>

#include "fim/channel.hpp"
#include "fim/rng.hpp"
#include "oracles.hpp"

using namespace fim;
using namespace std::complex_literals;

namespace {

ArrayGeometry identity_grid(int nx, int ny, double spacing) {
  ArrayGeometry geom;
  geom.counts_x = nx;
  geom.counts_y = ny;
  geom.spacing_x = geom.spacing_y = spacing;
  return geom;
}

ArrayGeometry random_grid(Rng& rng, double wavelength, int max_side = 2) {
  ArrayGeometry geom;
  geom.counts_x = 1 + static_cast<int>(rng.uniform(0.0, max_side));
  geom.counts_y = 1 + static_cast<int>(rng.uniform(0.0, max_side));
  geom.spacing_x = geom.spacing_y = wavelength / 2;
  geom.frame = frame_from_angles({rng.uniform(0.0, test::kPi),
                                  rng.uniform(0.0, test::kPi),
                                  rng.uniform(0.0, 2 * test::kPi)});
  return geom;
}

SurfaceShape random_shape(Rng& rng, int count, double bound) {
  SurfaceShape shape = SurfaceShape::flat(count, bound);
  for (int m = 0; m < count; ++m)
    shape.deformations[m] = rng.uniform(-bound, bound);
  return shape;
}

}  // namespace

TEST_CASE("propagation direction basics") {
  CHECK(propagation_direction(0.0, 0.0)
            .isApprox(Eigen::Vector3d::UnitZ(), 1e-15));
  CHECK(propagation_direction(test::kPi / 2, test::kPi / 2)
            .isApprox(Eigen::Vector3d::UnitY(), 1e-14));
  const Eigen::Vector3d diag =
      propagation_direction(test::kPi / 4, test::kPi / 2);
  const double half_sqrt2 = std::sqrt(2.0) / 2.0;
  CHECK(diag.isApprox(Eigen::Vector3d(half_sqrt2, half_sqrt2, 0.0), 1e-14));
  CHECK(std::abs(diag.norm() - 1.0) < 1e-15);
}

TEST_CASE("environment sampling honors the configured statistics") {
  SUBCASE("zero spread collapses each cluster to its mean") {
    EnvironmentConfig config{2, 3, 0.0, 0.0, 1.0};
    const ScatteringEnvironment env = sample_environment(config, 5);
    for (int l = 0; l < 2; ++l) {
      for (int g = 1; g < 3; ++g) {
        CHECK(env.departure.azimuth[l * 3 + g] ==
              env.departure.azimuth[l * 3]);
        CHECK(env.arrival.elevation[l * 3 + g] ==
              env.arrival.elevation[l * 3]);
      }
    }
  }

  SUBCASE("cluster powers split the path loss evenly") {
    EnvironmentConfig config{4, 2, 0.01, 0.01, 4.0};
    const ScatteringEnvironment env = sample_environment(config, 9);
    REQUIRE(env.cluster_powers.size() == 4);
    for (int l = 0; l < 4; ++l) CHECK(env.cluster_powers[l] == 1.0);
    CHECK(env.cluster_powers.sum() == doctest::Approx(env.pathloss));
  }

  SUBCASE("empirical gain variance tracks rho^2/G") {
    EnvironmentConfig config{2, 100, 0.01, 0.01, 2.0};
    const ScatteringEnvironment env = sample_environment(config, 12);
    for (int l = 0; l < 2; ++l) {
      double sum_sq = 0.0;
      for (int g = 0; g < 100; ++g)
        sum_sq += std::norm(env.gains[l * 100 + g]);
      const double expected = env.cluster_powers[l] / 100.0;
      CHECK(sum_sq / 100.0 == doctest::Approx(expected).epsilon(0.2));
    }
  }

  SUBCASE("deterministic under a fixed seed") {
    EnvironmentConfig config{3, 2, 0.02, 0.02, 1.0};
    const ScatteringEnvironment a = sample_environment(config, 77);
    const ScatteringEnvironment b = sample_environment(config, 77);
    CHECK(a.gains == b.gains);
    CHECK(a.departure.azimuth == b.departure.azimuth);
  }

  SUBCASE("invalid configs are rejected") {
    CHECK_THROWS_AS(sample_environment({0, 1, 0.0, 0.0, 1.0}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_environment({1, 1, -0.1, 0.0, 1.0}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_environment({1, 1, 0.0, 0.0, 0.0}, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("steering vector phases") {
  const double wavelength = 0.0107;

  SUBCASE("reference element responds with unity") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const ArrayGeometry geom = random_grid(rng, wavelength);
      const Eigen::Vector3d direction = propagation_direction(
          rng.uniform(0.0, test::kPi), rng.uniform(0.0, test::kPi));
      const Eigen::VectorXcd steer =
          steering_vector(geom, direction, wavelength);
      CHECK(steer[0] == 1.0 + 0.0i);
      for (Eigen::Index m = 0; m < steer.size(); ++m)
        CHECK(std::abs(std::abs(steer[m]) - 1.0) < 1e-12);
    }
  }

  SUBCASE("broadside wave sees a uniform array") {
    const ArrayGeometry geom = identity_grid(3, 2, wavelength / 2);
    const Eigen::VectorXcd steer =
        steering_vector(geom, Eigen::Vector3d::UnitZ(), wavelength);
    for (Eigen::Index m = 0; m < steer.size(); ++m)
      CHECK(std::abs(steer[m] - 1.0) < 1e-14);
  }

  SUBCASE("endfire wave at half-wavelength spacing alternates sign") {
    const ArrayGeometry geom = identity_grid(2, 1, wavelength / 2);
    const Eigen::VectorXcd steer =
        steering_vector(geom, Eigen::Vector3d::UnitX(), wavelength);
    CHECK(std::abs(steer[1] - (-1.0 + 0.0i)) < 1e-12);
  }

  SUBCASE("simplified identity-orientation form matches the general one") {
    Rng rng(4);
    const ArrayGeometry geom = identity_grid(3, 3, wavelength / 2);
    const double kappa = 2 * test::kPi / wavelength;
    for (int trial = 0; trial < 20; ++trial) {
      const double az = rng.uniform(0.0, test::kPi);
      const double el = rng.uniform(0.0, test::kPi);
      const Eigen::VectorXcd general =
          steering_vector(geom, propagation_direction(az, el), wavelength);
      for (int m = 0; m < geom.element_count(); ++m) {
        const double phase =
            kappa * (geom.offset_x(m) * std::sin(el) * std::cos(az) +
                     geom.offset_y(m) * std::sin(el) * std::sin(az));
        CHECK(std::abs(general[m] -
                       std::complex<double>(std::cos(phase),
                                            std::sin(phase))) < 1e-12);
      }
    }
  }
}

TEST_CASE("morphing response phases") {
  const double wavelength = 0.0107;
  const OrientationFrame identity;

  SUBCASE("flat shape responds with all ones") {
    const Eigen::VectorXcd response = morphing_response(
        SurfaceShape::flat(5, 1e-3), identity, Eigen::Vector3d::UnitZ(),
        wavelength);
    for (Eigen::Index m = 0; m < 5; ++m) CHECK(response[m] == 1.0 + 0.0i);
  }

  SUBCASE("half-wavelength displacement along the path flips the sign") {
    SurfaceShape shape = SurfaceShape::flat(1, wavelength);
    shape.deformations[0] = wavelength / 2;  // <k, o> = 1 for broadside
    const Eigen::VectorXcd response = morphing_response(
        shape, identity, Eigen::Vector3d::UnitZ(), wavelength);
    CHECK(std::abs(response[0] - (-1.0 + 0.0i)) < 1e-12);
  }

  SUBCASE("in-plane paths cannot see the morphing") {
    Rng rng(5);
    SurfaceShape shape = random_shape(rng, 4, wavelength / 2);
    const Eigen::VectorXcd response = morphing_response(
        shape, identity, Eigen::Vector3d::UnitX(), wavelength);
    for (Eigen::Index m = 0; m < 4; ++m)
      CHECK(std::abs(response[m] - 1.0) < 1e-14);
  }
}

TEST_CASE("channel assembly") {
  const double wavelength = 0.0107;

  SUBCASE("zero gains give a zero channel") {
    EnvironmentConfig config{2, 2, 0.01, 0.01, 1.0};
    ScatteringEnvironment env = sample_environment(config, 21);
    env.gains.setZero();
    const ArrayGeometry geom = identity_grid(2, 1, wavelength / 2);
    const ChannelMatrix channel =
        assemble_channel(env, geom, geom, SurfaceShape::flat(2, 0.0),
                         SurfaceShape::flat(2, 0.0), wavelength);
    CHECK(channel.H.norm() == 0.0);
  }

  SUBCASE("single path, single antennas: H is the path gain") {
    EnvironmentConfig config{1, 1, 0.0, 0.0, 1.0};
    const ScatteringEnvironment env = sample_environment(config, 33);
    const ArrayGeometry geom = identity_grid(1, 1, wavelength / 2);
    const ChannelMatrix channel =
        assemble_channel(env, geom, geom, SurfaceShape::flat(1, 0.0),
                         SurfaceShape::flat(1, 0.0), wavelength);
    CHECK(std::abs(channel.H(0, 0) - env.gains[0]) < 1e-15);
  }

  SUBCASE("matrix form equals the rank-one sum") {
    Rng rng(6);
    for (int trial = 0; trial < 25; ++trial) {
      EnvironmentConfig config{1 + static_cast<int>(rng.uniform(0, 4)),
                               1 + static_cast<int>(rng.uniform(0, 4)),
                               test::kPi / 64, test::kPi / 64, 1.0};
      const ScatteringEnvironment env =
          sample_environment(config, rng.next_u64());
      const ArrayGeometry tx = random_grid(rng, wavelength);
      const ArrayGeometry rx = random_grid(rng, wavelength);
      const SurfaceShape tx_shape =
          random_shape(rng, tx.element_count(), wavelength / 2);
      const SurfaceShape rx_shape =
          random_shape(rng, rx.element_count(), wavelength / 2);
      const ChannelMatrix channel =
          assemble_channel(env, tx, rx, tx_shape, rx_shape, wavelength);
      const Eigen::MatrixXcd reference = assemble_channel_sum(
          env, tx, rx, tx_shape, rx_shape, wavelength);
      CHECK((channel.H - reference).norm() <= 1e-10 * reference.norm());
      CHECK(channel.H.isApprox(
          channel_from_basis(channel.basis, tx_shape.deformations,
                             rx_shape.deformations),
          1e-15));
    }
  }

  SUBCASE("factor matrices are pure phases; flat shapes give all-ones F") {
    Rng rng(7);
    EnvironmentConfig config{2, 2, 0.01, 0.01, 1.0};
    const ScatteringEnvironment env = sample_environment(config, 8);
    const ArrayGeometry tx = random_grid(rng, wavelength);
    const ArrayGeometry rx = random_grid(rng, wavelength);
    const SurfaceShape tx_shape =
        random_shape(rng, tx.element_count(), wavelength / 2);
    const ChannelMatrix morphed = assemble_channel(
        env, tx, rx, tx_shape,
        SurfaceShape::flat(rx.element_count(), wavelength / 2), wavelength);
    for (Eigen::Index r = 0; r < morphed.morph_tx.rows(); ++r) {
      for (Eigen::Index c = 0; c < morphed.morph_tx.cols(); ++c) {
        CHECK(std::abs(std::abs(morphed.morph_tx(r, c)) - 1.0) < 1e-14);
        CHECK(std::abs(std::abs(morphed.basis.steer_tx(r, c)) - 1.0) < 1e-14);
      }
    }
    CHECK(morphed.morph_rx.isOnes(0.0));
  }

  SUBCASE("dimension mismatches are rejected") {
    EnvironmentConfig config{1, 1, 0.0, 0.0, 1.0};
    const ScatteringEnvironment env = sample_environment(config, 2);
    const ArrayGeometry geom = identity_grid(2, 1, wavelength / 2);
    CHECK_THROWS_AS(
        assemble_channel(env, geom, geom, SurfaceShape::flat(3, 0.0),
                         SurfaceShape::flat(2, 0.0), wavelength),
        std::invalid_argument);
  }
}

TEST_CASE("uniform receive shift factors out as per-path phases") {
  const double wavelength = 0.0107;
  Rng rng(9);
  EnvironmentConfig config{3, 2, test::kPi / 64, test::kPi / 64, 1.0};
  const ScatteringEnvironment env = sample_environment(config, 31);
  const ArrayGeometry tx = identity_grid(2, 1, wavelength / 2);
  ArrayGeometry rx = identity_grid(2, 2, wavelength / 2);
  rx.frame = frame_from_angles({0.4, 1.1, 0.0});
  const PathBasis basis = make_path_basis(env, tx, rx, wavelength);

  const double shift = 0.13 * wavelength;
  const Eigen::VectorXd tx_def = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd rx_def = random_shape(rng, 4, 0.2 * wavelength)
                                     .deformations;
  const Eigen::MatrixXcd shifted = channel_from_basis(
      basis, tx_def, rx_def.array() + shift);

  // Equivalent channel: original shapes, per-path gain rotated by the
  // path's own normal projection.
  PathBasis rotated = basis;
  for (int p = 0; p < basis.path_count(); ++p) {
    const std::complex<double> factor(std::cos(shift * basis.k_proj_rx[p]),
                                      std::sin(shift * basis.k_proj_rx[p]));
    CHECK(std::abs(std::abs(factor) - 1.0) < 1e-15);
    rotated.gains[p] *= factor;
  }
  const Eigen::MatrixXcd predicted =
      channel_from_basis(rotated, tx_def, rx_def);
  CHECK((shifted - predicted).norm() < 1e-12 * predicted.norm());
}

TEST_CASE("csi perturbation statistics") {
  EnvironmentConfig config{4, 25, 0.01, 0.01, 1.0};
  const ScatteringEnvironment env = sample_environment(config, 44);

  SUBCASE("zero error is the identity") {
    const ScatteringEnvironment est = perturb_csi(env, 0.0, 0.0, 3);
    CHECK(est.gains == env.gains);
    CHECK(est.arrival.azimuth == env.arrival.azimuth);
  }

  SUBCASE("angle errors are bounded by sqrt(3) rmse with matching std") {
    const double rmse = test::kPi / 16;
    const ScatteringEnvironment est = perturb_csi(env, 0.0, rmse, 3);
    double sum_sq = 0.0;
    int count = 0;
    for (int p = 0; p < env.path_count(); ++p) {
      for (const auto [a, b] :
           {std::pair{est.departure.azimuth[p], env.departure.azimuth[p]},
            std::pair{est.departure.elevation[p],
                      env.departure.elevation[p]},
            std::pair{est.arrival.azimuth[p], env.arrival.azimuth[p]},
            std::pair{est.arrival.elevation[p],
                      env.arrival.elevation[p]}}) {
        const double dev = a - b;
        CHECK(std::abs(dev) <= std::sqrt(3.0) * rmse + 1e-15);
        sum_sq += dev * dev;
        ++count;
      }
    }
    CHECK(std::sqrt(sum_sq / count) == doctest::Approx(rmse).epsilon(0.2));
  }

  SUBCASE("gain error variance matches the mse") {
    const double mse = 0.03;
    const ScatteringEnvironment est = perturb_csi(env, mse, 0.0, 5);
    double sum_sq = 0.0;
    for (int p = 0; p < env.path_count(); ++p)
      sum_sq += std::norm(est.gains[p] - env.gains[p]);
    CHECK(sum_sq / env.path_count() ==
          doctest::Approx(mse).epsilon(0.2));
  }

  SUBCASE("deterministic under a fixed seed") {
    const ScatteringEnvironment a = perturb_csi(env, 0.1, 0.01, 9);
    const ScatteringEnvironment b = perturb_csi(env, 0.1, 0.01, 9);
    CHECK(a.gains == b.gains);
    CHECK(a.departure.elevation == b.departure.elevation);
  }
}

TEST_CASE("path loss decays monotonically in distance") {
  const double ref = 1e-6;
  double previous = path_loss(ref, 1.0, 2.2, 1.0);
  for (double d : {2.0, 5.0, 20.0, 100.0, 400.0}) {
    const double value = path_loss(ref, 1.0, 2.2, d);
    CHECK(value < previous);
    previous = value;
  }
  CHECK(path_loss(ref, 1.0, 2.2, 1.0) == doctest::Approx(ref));
}
