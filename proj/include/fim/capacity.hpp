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

namespace fim {

/// Transmit signal covariance with its power budget and the receiver noise
/// power it is evaluated against. Feasible when Hermitian PSD (within
/// tolerance) and trace <= power_budget + 1e-9.
struct TransmitCovariance {
  Eigen::MatrixXcd matrix;    // M x M
  double power_budget = 0.0;  // P_t, watts
  double noise_power = 0.0;   // sigma^2, watts

  /// Throws std::invalid_argument on any invariant violation.
  void validate() const;
};

/// T = (P_t / M) I, the equal power allocation benchmark.
TransmitCovariance equal_power_covariance(int tx_count, double power_budget,
                                          double noise_power);

/// Shannon capacity log2 det(I + H T H^H / sigma^2) in bps/Hz, evaluated
/// through a Cholesky factorization of the identity-plus-PSD matrix.
/// Validates the covariance; throws std::invalid_argument on a non-PSD T or
/// dimension mismatch.
double capacity(const Eigen::MatrixXcd& H, const TransmitCovariance& cov);

namespace detail {
/// Same value without covariance validation; for optimization loops that
/// reuse an already-validated T.
double capacity_unchecked(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& T,
                          double noise_power);
}  // namespace detail

/// Eigenmode transmission solution: modes of H^H H sorted descending with
/// the water-filling allocation p_m = max(level - sigma^2/lambda_m, 0).
struct EigenmodeSolution {
  Eigen::MatrixXcd basis;      // U, columns ordered with eigenvalues
  Eigen::VectorXd eigenvalues; // lambda_m^2, descending
  Eigen::VectorXd allocations; // p_m, same order
  double water_level = 0.0;    // mu
  bool rank_zero = false;      // H had no usable modes; equal split returned
};

struct WaterfillResult {
  TransmitCovariance covariance;  // T = U diag(p) U^H
  EigenmodeSolution modes;
};

/// Capacity-optimal covariance for a fixed channel: eigendecompose H^H H,
/// bisect the water level until the poured power meets the budget (residual
/// tolerance 1e-12, at most 200 halvings), and rebuild T = U P U^H.
/// Eigenvalues below 1e-14 of the largest are treated as zero modes. When
/// every mode is zero the equal-power covariance is returned with
/// rank_zero set. Throws std::invalid_argument on nonpositive budget/noise.
WaterfillResult eigenmode_waterfill(const Eigen::MatrixXcd& H,
                                    double power_budget, double noise_power);

}  // namespace fim
