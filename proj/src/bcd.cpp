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

#include "fim/bcd.hpp"

#include <cmath>
#include <stdexcept>

#include "fim/rng.hpp"

namespace fim {

namespace {

// Covariance per the allocation rule, and the capacity it achieves.
std::pair<TransmitCovariance, double> allocate(const Eigen::MatrixXcd& H,
                                               PowerAllocation allocation,
                                               double power_budget,
                                               double noise_power) {
  if (allocation == PowerAllocation::waterfilling) {
    WaterfillResult wf = eigenmode_waterfill(H, power_budget, noise_power);
    const double cap = detail::capacity_unchecked(H, wf.covariance.matrix,
                                                  noise_power);
    return {std::move(wf.covariance), cap};
  }
  TransmitCovariance cov = equal_power_covariance(
      static_cast<int>(H.cols()), power_budget, noise_power);
  const double cap = detail::capacity_unchecked(H, cov.matrix, noise_power);
  return {std::move(cov), cap};
}

int auto_candidate_count(double tx_bound, double rx_bound, double wavelength) {
  const double peaks = 4.0 * std::max(tx_bound, rx_bound) / wavelength;
  return std::max(1, static_cast<int>(std::ceil(peaks)));
}

InnerLoopConfig resolve_inner(const InnerLoopConfig& inner, double wavelength) {
  InnerLoopConfig resolved = inner;
  if (resolved.step.initial_step <= 0.0) {
    resolved.step = StepPolicy::for_wavelength(wavelength);
  }
  return resolved;
}

}  // namespace

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::fim_wpa: return "fim-wpa";
    case Scheme::fim_epa: return "fim-epa";
    case Scheme::raa_wpa: return "raa-wpa";
    case Scheme::raa_epa: return "raa-epa";
  }
  throw std::logic_error("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "fim-wpa") return Scheme::fim_wpa;
  if (name == "fim-epa") return Scheme::fim_epa;
  if (name == "raa-wpa") return Scheme::raa_wpa;
  if (name == "raa-epa") return Scheme::raa_epa;
  throw std::invalid_argument("unknown scheme name: " + name);
}

InitShapes initialize_shapes(const PathBasis& basis, double tx_bound,
                             double rx_bound, int num_candidates,
                             std::uint64_t seed, double power_budget,
                             double noise_power, double wavelength,
                             PowerAllocation ranking) {
  if (tx_bound < 0.0 || rx_bound < 0.0) {
    throw std::invalid_argument("initialize_shapes: bounds must be >= 0");
  }
  const int count = num_candidates >= 0
                        ? std::max(num_candidates, 0)
                        : auto_candidate_count(tx_bound, rx_bound, wavelength);
  const int M = basis.tx_count();
  const int N = basis.rx_count();

  Rng rng(seed);
  InitShapes best;
  best.tx = SurfaceShape::flat(M, tx_bound);
  best.rx = SurfaceShape::flat(N, rx_bound);
  double best_capacity = -1.0;

  auto consider = [&](const Eigen::VectorXd& tx_def,
                      const Eigen::VectorXd& rx_def) {
    const Eigen::MatrixXcd H = channel_from_basis(basis, tx_def, rx_def);
    const double cap =
        allocate(H, ranking, power_budget, noise_power).second;
    best.candidate_capacities.push_back(cap);
    if (cap > best_capacity) {
      best_capacity = cap;
      best.tx.deformations = tx_def;
      best.rx.deformations = rx_def;
    }
  };

  consider(Eigen::VectorXd::Zero(M), Eigen::VectorXd::Zero(N));
  for (int c = 0; c < count; ++c) {
    Eigen::VectorXd tx_def(M), rx_def(N);
    for (int m = 0; m < M; ++m) tx_def[m] = rng.uniform(-tx_bound, tx_bound);
    for (int n = 0; n < N; ++n) rx_def[n] = rng.uniform(-rx_bound, rx_bound);
    consider(tx_def, rx_def);
  }
  return best;
}

BcdReport run_bcd(const ScatteringEnvironment& env,
                  const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                  double tx_bound, double rx_bound, double power_budget,
                  double noise_power, double wavelength,
                  const BcdConfig& config, PowerAllocation allocation,
                  const std::optional<std::pair<Eigen::VectorXd,
                                                Eigen::VectorXd>>& warm_start) {
  if (config.max_outer_iterations < 1) {
    throw std::invalid_argument("run_bcd: max_outer_iterations must be >= 1");
  }
  if (!std::isfinite(config.convergence_threshold_db)) {
    throw std::invalid_argument("run_bcd: convergence threshold must be finite");
  }
  const PathBasis basis = make_path_basis(env, tx_geom, rx_geom, wavelength);
  const InnerLoopConfig inner = resolve_inner(config.inner, wavelength);
  const double threshold =
      std::pow(10.0, config.convergence_threshold_db / 10.0);

  BcdReport report;
  Eigen::VectorXd tx_def, rx_def;
  if (warm_start.has_value()) {
    tx_def = warm_start->first;
    rx_def = warm_start->second;
    if (tx_def.size() != basis.tx_count() || rx_def.size() != basis.rx_count())
      throw std::invalid_argument("run_bcd: warm start length mismatch");
  } else {
    InitShapes init = initialize_shapes(
        basis, tx_bound, rx_bound, config.num_random_inits, config.seed,
        power_budget, noise_power, wavelength, allocation);
    tx_def = init.tx.deformations;
    rx_def = init.rx.deformations;
    report.init_candidate_capacities = std::move(init.candidate_capacities);
  }

  auto [cov, cap] = allocate(channel_from_basis(basis, tx_def, rx_def),
                             allocation, power_budget, noise_power);
  report.capacity_trace.push_back(cap);

  for (int iter = 0; iter < config.max_outer_iterations; ++iter) {
    MorphState morphed =
        inner_morph_loop(basis, tx_def, rx_def, tx_bound, rx_bound,
                         cov.matrix, noise_power, inner);
    tx_def = std::move(morphed.tx_deformations);
    rx_def = std::move(morphed.rx_deformations);
    auto refreshed = allocate(channel_from_basis(basis, tx_def, rx_def),
                              allocation, power_budget, noise_power);
    cov = std::move(refreshed.first);

    const double previous = report.capacity_trace.back();
    report.capacity_trace.push_back(refreshed.second);
    report.iterations_used = iter + 1;

    if (previous == 0.0) {
      report.converged = true;
      break;
    }
    const double gain = (refreshed.second - previous) / previous;
    if (gain < threshold) {
      report.converged = true;
      if (config.stop_on_convergence) break;
    }
  }

  report.tx_shape = SurfaceShape{tx_def, tx_bound};
  report.rx_shape = SurfaceShape{rx_def, rx_bound};
  report.covariance = std::move(cov);
  return report;
}

BcdReport run_scheme_report(Scheme scheme, const ScatteringEnvironment& env,
                            const ArrayGeometry& tx_geom,
                            const ArrayGeometry& rx_geom, double tx_bound,
                            double rx_bound, double power_budget,
                            double noise_power, double wavelength,
                            const BcdConfig& config) {
  const bool rigid = scheme == Scheme::raa_wpa || scheme == Scheme::raa_epa;
  const bool equal = scheme == Scheme::fim_epa || scheme == Scheme::raa_epa;
  return run_bcd(env, tx_geom, rx_geom, rigid ? 0.0 : tx_bound,
                 rigid ? 0.0 : rx_bound, power_budget, noise_power, wavelength,
                 config,
                 equal ? PowerAllocation::equal : PowerAllocation::waterfilling);
}

double run_scheme(Scheme scheme, const ScatteringEnvironment& env,
                  const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                  double tx_bound, double rx_bound, double power_budget,
                  double noise_power, double wavelength,
                  const BcdConfig& config) {
  return run_scheme_report(scheme, env, tx_geom, rx_geom, tx_bound, rx_bound,
                           power_budget, noise_power, wavelength, config)
      .final_capacity();
}

}  // namespace fim
