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

#include "fim/capacity.hpp"

#include <cmath>
#include <stdexcept>

namespace fim {

void TransmitCovariance::validate() const {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("TransmitCovariance: matrix must be square");
  }
  if (!(power_budget > 0.0) || !(noise_power > 0.0)) {
    throw std::invalid_argument(
        "TransmitCovariance: power budget and noise power must be positive");
  }
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("TransmitCovariance: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix,
                                                         Eigen::EigenvaluesOnly);
  const double max_eig = solver.eigenvalues().maxCoeff();
  if (solver.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, max_eig)) {
    throw std::invalid_argument(
        "TransmitCovariance: matrix is not positive semidefinite");
  }
  if (matrix.trace().real() > power_budget + 1e-9) {
    throw std::invalid_argument(
        "TransmitCovariance: trace exceeds the power budget");
  }
}

TransmitCovariance equal_power_covariance(int tx_count, double power_budget,
                                          double noise_power) {
  if (tx_count < 1) {
    throw std::invalid_argument("equal_power_covariance: tx_count must be >= 1");
  }
  if (!(power_budget > 0.0) || !(noise_power > 0.0)) {
    throw std::invalid_argument(
        "equal_power_covariance: power budget and noise power must be positive");
  }
  TransmitCovariance cov;
  cov.matrix = (power_budget / tx_count) *
               Eigen::MatrixXcd::Identity(tx_count, tx_count);
  cov.power_budget = power_budget;
  cov.noise_power = noise_power;
  return cov;
}

namespace detail {

double capacity_unchecked(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& T,
                          double noise_power) {
  const Eigen::Index N = H.rows();
  Eigen::MatrixXcd A = H * T * H.adjoint() / noise_power;
  A = 0.5 * (A + A.adjoint()).eval();  // strip roundoff skew
  A += Eigen::MatrixXcd::Identity(N, N);
  Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() == Eigen::Success) {
    double log2det = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
      log2det += std::log2(std::real(llt.matrixLLT()(n, n)));
    }
    return std::max(2.0 * log2det, 0.0);
  }
  // A = I + PSD has eigenvalues >= 1; reaching here means severe roundoff,
  // fall back to the Hermitian eigenvalue route.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(A,
                                                         Eigen::EigenvaluesOnly);
  double log2det = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    log2det += std::log2(std::max(solver.eigenvalues()[n], 1.0));
  }
  return log2det;
}

}  // namespace detail

double capacity(const Eigen::MatrixXcd& H, const TransmitCovariance& cov) {
  if (H.cols() != cov.matrix.rows()) {
    throw std::invalid_argument(
        "capacity: channel and covariance dimensions do not agree");
  }
  cov.validate();
  return detail::capacity_unchecked(H, cov.matrix, cov.noise_power);
}

WaterfillResult eigenmode_waterfill(const Eigen::MatrixXcd& H,
                                    double power_budget, double noise_power) {
  if (!(power_budget > 0.0) || !(noise_power > 0.0)) {
    throw std::invalid_argument(
        "eigenmode_waterfill: power budget and noise power must be positive");
  }
  const Eigen::Index M = H.cols();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H.adjoint() * H);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenmode_waterfill: eigendecomposition failed");
  }

  // Reorder descending; Eigen returns ascending.
  EigenmodeSolution modes;
  modes.eigenvalues.resize(M);
  modes.basis.resize(M, M);
  for (Eigen::Index m = 0; m < M; ++m) {
    modes.eigenvalues[m] = std::max(solver.eigenvalues()[M - 1 - m], 0.0);
    modes.basis.col(m) = solver.eigenvectors().col(M - 1 - m);
  }

  const double floor = 1e-14 * modes.eigenvalues[0];
  Eigen::Index active = 0;
  while (active < M && modes.eigenvalues[active] > floor &&
         modes.eigenvalues[active] > 0.0) {
    ++active;
  }

  modes.allocations = Eigen::VectorXd::Zero(M);
  if (active == 0) {
    modes.rank_zero = true;
    modes.water_level = 0.0;
    modes.allocations.setConstant(power_budget / M);
  } else {
    double lo = 0.0;
    double hi = power_budget;
    for (Eigen::Index m = 0; m < active; ++m) {
      hi = std::max(hi, power_budget + noise_power / modes.eigenvalues[m]);
    }
    double level = hi;
    for (int iter = 0; iter < 200; ++iter) {
      level = 0.5 * (lo + hi);
      double poured = 0.0;
      for (Eigen::Index m = 0; m < active; ++m) {
        poured +=
            std::max(level - noise_power / modes.eigenvalues[m], 0.0);
      }
      const double residual = poured - power_budget;
      if (std::abs(residual) <= 1e-12) break;
      (residual > 0.0 ? hi : lo) = level;
    }
    modes.water_level = level;
    for (Eigen::Index m = 0; m < active; ++m) {
      modes.allocations[m] =
          std::max(level - noise_power / modes.eigenvalues[m], 0.0);
    }
  }

  WaterfillResult result;
  result.covariance.matrix = modes.basis *
                             modes.allocations.asDiagonal() *
                             modes.basis.adjoint();
  result.covariance.power_budget = power_budget;
  result.covariance.noise_power = noise_power;
  result.modes = std::move(modes);
  return result;
}

}  // namespace fim
