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

#include "fim/morphing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fim {

namespace {

constexpr double kLn2 = std::numbers::ln2;

Eigen::VectorXd clamp(const Eigen::VectorXd& v, double bound) {
  return v.cwiseMax(-bound).cwiseMin(bound);
}

struct GradientPass {
  Eigen::VectorXd grad_tx;
  Eigen::VectorXd grad_rx;
};

// Evaluates both gradients. b_rx is Hermitian positive definite and solved
// by Cholesky; b_tx is not Hermitian in general and gets a partial-pivot LU.
GradientPass gradient_pass(const PathBasis& basis,
                           const Eigen::VectorXd& tx_def,
                           const Eigen::VectorXd& rx_def,
                           const Eigen::MatrixXcd& T, double noise_power,
                           GradientWorkspace* workspace) {
  const int M = basis.tx_count();
  const int N = basis.rx_count();
  const Eigen::MatrixXcd w_tx =
      (basis.steer_tx.array() * morphing_matrix(tx_def, basis.k_proj_tx).array())
          .matrix();
  const Eigen::MatrixXcd w_rx =
      (basis.steer_rx.array() * morphing_matrix(rx_def, basis.k_proj_rx).array())
          .matrix();
  const Eigen::VectorXcd gains_conj = basis.gains.conjugate();

  // Receive side: C = log2 det(I + W_r O_t W_r^H).
  const Eigen::MatrixXcd o_tx = basis.gains.asDiagonal() *
                                (w_tx.adjoint() * T * w_tx) *
                                gains_conj.asDiagonal() / noise_power;
  const Eigen::MatrixXcd b_rx =
      Eigen::MatrixXcd::Identity(N, N) + w_rx * o_tx * w_rx.adjoint();
  const Eigen::MatrixXcd s_rx =
      w_rx * basis.k_proj_rx.asDiagonal() * o_tx * w_rx.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(b_rx);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("shape_gradients: receive-side system singular");
  }
  // Im([S_r B_r^-1]_nn) = -Im([B_r^-1 S_r^H]_nn) for Hermitian B_r.
  const Eigen::MatrixXcd solved_rx = llt.solve(s_rx.adjoint());
  Eigen::VectorXd grad_rx(N);
  for (int n = 0; n < N; ++n) {
    grad_rx[n] = (2.0 / kLn2) * std::imag(solved_rx(n, n));
  }

  // Transmit side: C = log2 det(I + T W_t O_r W_t^H).
  const Eigen::MatrixXcd o_rx = gains_conj.asDiagonal() *
                                (w_rx.adjoint() * w_rx) *
                                basis.gains.asDiagonal() / noise_power;
  const Eigen::MatrixXcd gram_tx = w_tx * o_rx * w_tx.adjoint();
  const Eigen::MatrixXcd b_tx =
      Eigen::MatrixXcd::Identity(M, M) + T * gram_tx;
  const Eigen::MatrixXcd s_tx =
      w_tx * basis.k_proj_tx.asDiagonal() * o_rx * w_tx.adjoint();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(b_tx);
  const Eigen::MatrixXcd solved_tx = lu.solve(T);  // B_t^-1 T
  Eigen::VectorXd grad_tx(M);
  for (int m = 0; m < M; ++m) {
    const std::complex<double> diag_entry =
        (s_tx.row(m) * solved_tx.col(m)).value();
    grad_tx[m] = -(2.0 / kLn2) * std::imag(diag_entry);
  }

  if (workspace != nullptr) {
    workspace->o_tx = o_tx;
    workspace->o_rx = o_rx;
    workspace->b_rx = b_rx;
    workspace->b_tx = b_tx;
    workspace->s_rx = s_rx;
    workspace->s_tx = s_tx;
    workspace->k_proj_tx = basis.k_proj_tx;
    workspace->k_proj_rx = basis.k_proj_rx;
  }
  return GradientPass{std::move(grad_tx), std::move(grad_rx)};
}

}  // namespace

ShapeGradients shape_gradients(const PathBasis& basis,
                               const Eigen::VectorXd& tx_deformations,
                               const Eigen::VectorXd& rx_deformations,
                               const Eigen::MatrixXcd& T, double noise_power,
                               GradientWorkspace* workspace) {
  if (tx_deformations.size() != basis.tx_count() ||
      rx_deformations.size() != basis.rx_count()) {
    throw std::invalid_argument("shape_gradients: deformation length mismatch");
  }
  auto pass =
      gradient_pass(basis, tx_deformations, rx_deformations, T, noise_power,
                    workspace);
  return ShapeGradients{std::move(pass.grad_tx), std::move(pass.grad_rx)};
}

Eigen::VectorXd grad_rx_shape(const ScatteringEnvironment& env,
                              const ArrayGeometry& tx_geom,
                              const ArrayGeometry& rx_geom,
                              const SurfaceShape& tx_shape,
                              const SurfaceShape& rx_shape,
                              const TransmitCovariance& cov,
                              double wavelength) {
  cov.validate();
  const PathBasis basis = make_path_basis(env, tx_geom, rx_geom, wavelength);
  return shape_gradients(basis, tx_shape.deformations, rx_shape.deformations,
                         cov.matrix, cov.noise_power)
      .rx;
}

Eigen::VectorXd grad_tx_shape(const ScatteringEnvironment& env,
                              const ArrayGeometry& tx_geom,
                              const ArrayGeometry& rx_geom,
                              const SurfaceShape& tx_shape,
                              const SurfaceShape& rx_shape,
                              const TransmitCovariance& cov,
                              double wavelength) {
  cov.validate();
  const PathBasis basis = make_path_basis(env, tx_geom, rx_geom, wavelength);
  return shape_gradients(basis, tx_shape.deformations, rx_shape.deformations,
                         cov.matrix, cov.noise_power)
      .tx;
}

MorphState ascent_step(const PathBasis& basis,
                       const Eigen::VectorXd& tx_deformations,
                       const Eigen::VectorXd& rx_deformations,
                       double tx_bound, double rx_bound,
                       const Eigen::MatrixXcd& T, double noise_power,
                       const StepPolicy& policy) {
  MorphState state{tx_deformations, rx_deformations, 0.0, false, 0};
  state.capacity = detail::capacity_unchecked(
      channel_from_basis(basis, tx_deformations, rx_deformations), T,
      noise_power);

  const auto grads = shape_gradients(basis, tx_deformations, rx_deformations,
                                     T, noise_power);
  const double grad_norm_sq =
      grads.tx.squaredNorm() + grads.rx.squaredNorm();
  if (grad_norm_sq == 0.0) return state;

  double step = policy.initial_step;
  for (int k = 0; k < policy.max_backtracks; ++k, step *= policy.shrink) {
    const Eigen::VectorXd tx_next =
        clamp(tx_deformations + step * grads.tx, tx_bound);
    const Eigen::VectorXd rx_next =
        clamp(rx_deformations + step * grads.rx, rx_bound);
    // Projected Armijo: sufficient increase against the move actually taken.
    const double along_grad = grads.tx.dot(tx_next - tx_deformations) +
                              grads.rx.dot(rx_next - rx_deformations);
    if (along_grad <= 0.0) {
      // Fully clamped against the gradient; no feasible progress this way.
      break;
    }
    const double cap_next = detail::capacity_unchecked(
        channel_from_basis(basis, tx_next, rx_next), T, noise_power);
    if (cap_next >= state.capacity + policy.armijo * along_grad &&
        cap_next > state.capacity) {
      state.tx_deformations = tx_next;
      state.rx_deformations = rx_next;
      state.capacity = cap_next;
      state.moved = true;
      return state;
    }
  }
  return state;
}

MorphState inner_morph_loop(const PathBasis& basis,
                            const Eigen::VectorXd& tx_deformations,
                            const Eigen::VectorXd& rx_deformations,
                            double tx_bound, double rx_bound,
                            const Eigen::MatrixXcd& T, double noise_power,
                            const InnerLoopConfig& config) {
  MorphState state{tx_deformations, rx_deformations, 0.0, false, 0};
  state.capacity = detail::capacity_unchecked(
      channel_from_basis(basis, tx_deformations, rx_deformations), T,
      noise_power);
  for (int step = 0; step < config.max_steps; ++step) {
    MorphState next =
        ascent_step(basis, state.tx_deformations, state.rx_deformations,
                    tx_bound, rx_bound, T, noise_power, config.step);
    if (!next.moved) break;
    const double gain =
        (next.capacity - state.capacity) / std::max(state.capacity, 1e-300);
    state.tx_deformations = std::move(next.tx_deformations);
    state.rx_deformations = std::move(next.rx_deformations);
    state.capacity = next.capacity;
    state.moved = true;
    state.steps_taken = step + 1;
    if (gain < config.relative_gain_tol) break;
  }
  return state;
}

MorphState ascent_step(const ScatteringEnvironment& env,
                       const ArrayGeometry& tx_geom,
                       const ArrayGeometry& rx_geom,
                       const SurfaceShape& tx_shape,
                       const SurfaceShape& rx_shape,
                       const TransmitCovariance& cov, double wavelength,
                       const StepPolicy& policy) {
  if (!validate_shape(tx_shape) || !validate_shape(rx_shape)) {
    throw std::invalid_argument("ascent_step: infeasible starting shapes");
  }
  cov.validate();
  const PathBasis basis = make_path_basis(env, tx_geom, rx_geom, wavelength);
  return ascent_step(basis, tx_shape.deformations, rx_shape.deformations,
                     tx_shape.bound, rx_shape.bound, cov.matrix,
                     cov.noise_power, policy);
}

MorphState inner_morph_loop(const ScatteringEnvironment& env,
                            const ArrayGeometry& tx_geom,
                            const ArrayGeometry& rx_geom,
                            const SurfaceShape& tx_shape,
                            const SurfaceShape& rx_shape,
                            const TransmitCovariance& cov, double wavelength,
                            const InnerLoopConfig& config) {
  if (!validate_shape(tx_shape) || !validate_shape(rx_shape)) {
    throw std::invalid_argument("inner_morph_loop: infeasible starting shapes");
  }
  cov.validate();
  const PathBasis basis = make_path_basis(env, tx_geom, rx_geom, wavelength);
  return inner_morph_loop(basis, tx_shape.deformations, rx_shape.deformations,
                          tx_shape.bound, rx_shape.bound, cov.matrix,
                          cov.noise_power, config);
}

}  // namespace fim
