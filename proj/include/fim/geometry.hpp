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
#include <vector>

namespace fim {

/// Orientation of a planar array: azimuth and elevation of the surface
/// normal plus the spin of the array around that normal.
/// Azimuth and elevation live in [0, pi), spin in [0, 2*pi).
struct OrientationAngles {
  double azimuth = 0.0;
  double elevation = 0.0;
  double spin = 0.0;

  bool valid() const;
};

/// Right-handed orthonormal triad attached to an array: `i` and `j` span the
/// array plane (the two side directions), `k` is the surface normal.
struct OrientationFrame {
  Eigen::Vector3d i = Eigen::Vector3d::UnitX();
  Eigen::Vector3d j = Eigen::Vector3d::UnitY();
  Eigen::Vector3d k = Eigen::Vector3d::UnitZ();
};

/// Builds the orientation triad from the three angles. The normal is
/// k = [sin(el)cos(az), sin(el)sin(az), cos(el)], and i, j follow from the
/// spin rotation about k. Throws std::invalid_argument if the angles are
/// outside their ranges; throws std::logic_error if the constructed triad
/// fails orthonormality at 1e-12 (cannot happen for valid inputs).
OrientationFrame frame_from_angles(const OrientationAngles& angles);

/// Rectangular element grid of one FIM: counts and spacings along the i and
/// j side directions, the orientation frame and the position of element 1.
/// Elements are linearized i-direction first: element m (0-based) sits at
/// grid column m % counts_x, row m / counts_x.
struct ArrayGeometry {
  int counts_x = 1;
  int counts_y = 1;
  double spacing_x = 0.0;  // meters
  double spacing_y = 0.0;  // meters
  OrientationFrame frame;
  Eigen::Vector3d reference_position = Eigen::Vector3d::Zero();

  int element_count() const { return counts_x * counts_y; }

  /// In-plane offset of element m (0-based) from the reference element,
  /// along the i direction.
  double offset_x(int m) const { return spacing_x * (m % counts_x); }
  /// Same along the j direction.
  double offset_y(int m) const { return spacing_y * (m / counts_x); }

  /// Throws std::invalid_argument on non-positive counts or spacings.
  void validate() const;
};

/// Per-element perpendicular deformation of one FIM surface, box-bounded:
/// |deformations[m]| <= bound for a feasible shape.
struct SurfaceShape {
  Eigen::VectorXd deformations;
  double bound = 0.0;  // meters, max unilateral deformation

  static SurfaceShape flat(int element_count, double bound);
};

/// True iff every deformation lies within [-bound, bound] (inclusive).
bool validate_shape(const SurfaceShape& shape);

/// 3D positions of all elements: reference + in-plane grid offsets plus the
/// perpendicular deformation along the frame normal. Throws
/// std::invalid_argument if the shape length does not match the geometry.
std::vector<Eigen::Vector3d> element_positions(const ArrayGeometry& geom,
                                               const SurfaceShape& shape);

}  // namespace fim
