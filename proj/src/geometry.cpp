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

#include "fim/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kFrameTol = 1e-12;
}  // namespace

bool OrientationAngles::valid() const {
  return azimuth >= 0.0 && azimuth < kPi && elevation >= 0.0 &&
         elevation < kPi && spin >= 0.0 && spin < 2.0 * kPi;
}

OrientationFrame frame_from_angles(const OrientationAngles& angles) {
  if (!angles.valid()) {
    throw std::invalid_argument(
        "frame_from_angles: azimuth/elevation must lie in [0, pi), spin in "
        "[0, 2*pi)");
  }
  const double ca = std::cos(angles.azimuth), sa = std::sin(angles.azimuth);
  const double ce = std::cos(angles.elevation), se = std::sin(angles.elevation);
  const double cs = std::cos(angles.spin), ss = std::sin(angles.spin);

  OrientationFrame frame;
  frame.k = Eigen::Vector3d(se * ca, se * sa, ce);
  frame.i = Eigen::Vector3d(ce * ca * cs - sa * ss, ce * sa * cs + ca * ss,
                            -se * cs);
  frame.j = Eigen::Vector3d(-ce * ca * ss - sa * cs, -ce * sa * ss + ca * cs,
                            se * ss);

  // The formulas are exact; a violation here is an implementation error.
  const bool orthonormal =
      std::abs(frame.i.norm() - 1.0) <= kFrameTol &&
      std::abs(frame.j.norm() - 1.0) <= kFrameTol &&
      std::abs(frame.k.norm() - 1.0) <= kFrameTol &&
      std::abs(frame.i.dot(frame.j)) <= kFrameTol &&
      std::abs(frame.i.dot(frame.k)) <= kFrameTol &&
      std::abs(frame.j.dot(frame.k)) <= kFrameTol;
  if (!orthonormal) {
    throw std::logic_error("frame_from_angles: triad failed orthonormality");
  }
  return frame;
}

void ArrayGeometry::validate() const {
  if (counts_x < 1 || counts_y < 1) {
    throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
  }
  if (!(spacing_x > 0.0) || !(spacing_y > 0.0)) {
    throw std::invalid_argument(
        "ArrayGeometry: element spacings must be positive");
  }
}

SurfaceShape SurfaceShape::flat(int element_count, double bound) {
  return SurfaceShape{Eigen::VectorXd::Zero(element_count), bound};
}

bool validate_shape(const SurfaceShape& shape) {
  if (shape.bound < 0.0) return false;
  for (Eigen::Index m = 0; m < shape.deformations.size(); ++m) {
    if (!(std::abs(shape.deformations[m]) <= shape.bound)) return false;
  }
  return true;
}

std::vector<Eigen::Vector3d> element_positions(const ArrayGeometry& geom,
                                               const SurfaceShape& shape) {
  geom.validate();
  if (shape.deformations.size() != geom.element_count()) {
    throw std::invalid_argument(
        "element_positions: shape length does not match element count");
  }
  std::vector<Eigen::Vector3d> positions;
  positions.reserve(geom.element_count());
  for (int m = 0; m < geom.element_count(); ++m) {
    positions.push_back(geom.reference_position +
                        geom.offset_x(m) * geom.frame.i +
                        geom.offset_y(m) * geom.frame.j +
                        shape.deformations[m] * geom.frame.k);
  }
  return positions;
}

}  // namespace fim
