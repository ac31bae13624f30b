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

#include "fim/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "fim/harness/units.hpp"
#include "fim/rng.hpp"

namespace fim::harness {

namespace {

ArrayGeometry build_geometry(const std::array<int, 2>& grid,
                             const std::array<double, 3>& orientation,
                             const std::array<double, 3>& position,
                             double spacing) {
  ArrayGeometry geom;
  geom.counts_x = grid[0];
  geom.counts_y = grid[1];
  geom.spacing_x = geom.spacing_y = spacing;
  geom.frame = frame_from_angles(
      OrientationAngles{orientation[0], orientation[1], orientation[2]});
  geom.reference_position =
      Eigen::Vector3d(position[0], position[1], position[2]);
  return geom;
}

Scenario base_scenario(const ExperimentConfig& config) {
  Scenario s;
  s.wavelength = wavelength_from_ghz(config.frequency_ghz);
  const double spacing = config.spacing_wl * s.wavelength;
  s.tx_geom = build_geometry(config.tx_grid, config.tx_orientation,
                             config.tx_position, spacing);
  s.rx_geom = build_geometry(config.rx_grid, config.rx_orientation,
                             config.rx_position, spacing);
  const double distance =
      (s.tx_geom.reference_position - s.rx_geom.reference_position).norm();
  s.env_config.num_clusters = config.clusters;
  s.env_config.paths_per_cluster = config.paths_per_cluster;
  s.env_config.azimuth_spread = config.azimuth_spread;
  s.env_config.elevation_spread = config.elevation_spread;
  s.env_config.pathloss =
      path_loss(db_to_linear(config.pathloss_ref_db),
                config.pathloss_ref_distance_m, config.pathloss_exponent,
                distance);
  s.tx_bound = s.rx_bound = config.morph_range_wl * s.wavelength;
  s.power_w = dbm_to_watts(config.transmit_power_dbm);
  s.noise_w = dbm_to_watts(config.noise_dbm);
  s.bcd.max_outer_iterations = config.max_outer_iterations;
  s.bcd.convergence_threshold_db = config.convergence_threshold_db;
  s.bcd.num_random_inits = config.num_random_inits;
  s.bcd.inner.max_steps = config.inner_max_steps;
  s.bcd.inner.relative_gain_tol = config.inner_gain_tol;
  return s;
}

}  // namespace

std::vector<Scenario> build_scenarios(const ExperimentConfig& config) {
  config.validate();
  std::vector<Scenario> scenarios;
  const Scenario base = base_scenario(config);
  auto push = [&](Scenario s, const std::string& param,
                  const std::string& value) {
    s.sweep_param = param;
    s.sweep_value = value;
    scenarios.push_back(std::move(s));
  };

  switch (config.kind) {
    case SweepKind::antenna_count:
      for (double v : config.sweep_values) {
        Scenario s = base;
        const int side = static_cast<int>(v);
        s.tx_geom.counts_x = s.tx_geom.counts_y = side;
        s.rx_geom.counts_x = s.rx_geom.counts_y = side;
        push(std::move(s), "elements_per_axis", format_double(v));
      }
      break;
    case SweepKind::spacing:
      for (double v : config.sweep_values) {
        Scenario s = base;
        // Fixed lambda/2 x lambda/2 aperture; denser packing as d shrinks.
        const int side = static_cast<int>(std::floor(0.5 / v)) + 1;
        s.tx_geom.counts_x = s.tx_geom.counts_y = side;
        s.rx_geom.counts_x = s.rx_geom.counts_y = side;
        s.tx_geom.spacing_x = s.tx_geom.spacing_y = v * s.wavelength;
        s.rx_geom.spacing_x = s.rx_geom.spacing_y = v * s.wavelength;
        push(std::move(s), "spacing_wl", format_double(v));
      }
      break;
    case SweepKind::power:
      for (double v : config.sweep_values) {
        Scenario s = base;
        s.power_w = dbm_to_watts(v);
        push(std::move(s), "transmit_power_dbm", format_double(v));
      }
      break;
    case SweepKind::clusters:
      for (double v : config.sweep_values) {
        Scenario s = base;
        s.env_config.num_clusters = static_cast<int>(v);
        push(std::move(s), "clusters", format_double(v));
      }
      break;
    case SweepKind::morph_range:
      for (double v : config.sweep_values) {
        Scenario s = base;
        s.tx_bound = s.rx_bound = v * s.wavelength;
        push(std::move(s), "morph_range_wl", format_double(v));
      }
      break;
    case SweepKind::paths_spread:
      for (std::size_t i = 0; i < config.sweep_paths.size(); ++i) {
        Scenario s = base;
        s.env_config.paths_per_cluster =
            static_cast<int>(config.sweep_paths[i]);
        s.env_config.azimuth_spread = config.sweep_spreads[i];
        s.env_config.elevation_spread = config.sweep_spreads[i];
        push(std::move(s), "paths:spread",
             format_double(config.sweep_paths[i]) + ":" +
                 format_double(config.sweep_spreads[i]));
      }
      break;
    case SweepKind::csi_gain:
      for (double v : config.sweep_values) {
        Scenario s = base;
        // Relative MSE scaled by the mean per-path power beta^2/(L*G).
        s.csi_gain_mse = v * s.env_config.pathloss /
                         (s.env_config.num_clusters *
                          s.env_config.paths_per_cluster);
        push(std::move(s), "gain_mse_rel", format_double(v));
      }
      break;
    case SweepKind::csi_angle:
      for (double v : config.sweep_values) {
        Scenario s = base;
        s.csi_angle_rmse = v;
        push(std::move(s), "angle_rmse_rad", format_double(v));
      }
      break;
    case SweepKind::eigenchannel:
      push(base, "mode", "");
      break;
    case SweepKind::convergence_trace:
      push(base, "stage", "");
      break;
  }
  return scenarios;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Eigen::VectorXd eigenchannel_gains(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      H.adjoint() * H, Eigen::EigenvaluesOnly);
  Eigen::VectorXd gains = solver.eigenvalues().cwiseMax(0.0).reverse();
  return gains;
}

namespace {

struct RealizationOutput {
  std::vector<double> capacities;             // per scheme
  std::vector<Eigen::VectorXd> mode_gains;    // per scheme (eigenchannel)
};

RealizationOutput run_realization(const Scenario& scenario,
                                  const std::vector<Scheme>& schemes,
                                  std::uint64_t seed, bool want_modes) {
  const ScatteringEnvironment truth =
      sample_environment(scenario.env_config, seed);
  const bool imperfect =
      scenario.csi_gain_mse > 0.0 || scenario.csi_angle_rmse > 0.0;
  const ScatteringEnvironment observed =
      imperfect ? perturb_csi(truth, scenario.csi_gain_mse,
                              scenario.csi_angle_rmse, split_seed(seed, 2))
                : truth;

  BcdConfig bcd = scenario.bcd;
  bcd.seed = split_seed(seed, 1);

  RealizationOutput out;
  out.capacities.reserve(schemes.size());
  for (Scheme scheme : schemes) {
    const BcdReport report = run_scheme_report(
        scheme, observed, scenario.tx_geom, scenario.rx_geom,
        scenario.tx_bound, scenario.rx_bound, scenario.power_w,
        scenario.noise_w, scenario.wavelength, bcd);
    double achieved = report.final_capacity();
    Eigen::MatrixXcd H_truth;
    if (imperfect || want_modes) {
      const PathBasis basis = make_path_basis(
          truth, scenario.tx_geom, scenario.rx_geom, scenario.wavelength);
      H_truth = channel_from_basis(basis, report.tx_shape.deformations,
                                   report.rx_shape.deformations);
    }
    if (imperfect) {
      // Shapes and covariance were tuned on the estimate; the achieved rate
      // is what they deliver on the true channel.
      achieved = detail::capacity_unchecked(H_truth, report.covariance.matrix,
                                            scenario.noise_w);
    }
    out.capacities.push_back(achieved);
    if (want_modes) out.mode_gains.push_back(eigenchannel_gains(H_truth));
  }
  return out;
}

std::string gain_db_cell(double linear) {
  if (linear <= 0.0) return "-inf";
  return format_double(linear_to_db(linear));
}

std::string join_defs(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out.push_back(';');
    out += format_double(v[i]);
  }
  return out;
}

ResultTable::Meta make_meta(const ExperimentConfig& config) {
  ResultTable::Meta meta;
  std::ostringstream hash;
  hash << std::hex << fnv1a64(canonical_config_text(config));
  meta.config_hash = hash.str();
  meta.seed = config.base_seed;
  meta.experiment = sweep_kind_name(config.kind);
  return meta;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  if (config.kind == SweepKind::convergence_trace) {
    return convergence_trace_experiment(config, threads);
  }
  const bool eigen_mode = config.kind == SweepKind::eigenchannel;

  std::vector<Scheme> schemes;
  for (const auto& name : config.schemes)
    schemes.push_back(scheme_from_name(name));

  ResultTable table;
  table.meta = make_meta(config);
  if (eigen_mode) {
    table.columns = {"sweep_param", "sweep_value", "scheme",
                     "realizations", "mean_gain_db", "min_gain_db",
                     "max_gain_db"};
  } else {
    table.columns = {"sweep_param", "sweep_value", "scheme",
                     "realizations", "mean_capacity_bpshz",
                     "min_capacity_bpshz", "max_capacity_bpshz"};
    if (config.emit_per_realization) table.columns.push_back("capacities");
  }

  for (const Scenario& scenario : build_scenarios(config)) {
    std::vector<RealizationOutput> outputs(config.realizations);
    parallel_for(config.realizations, threads, [&](int r) {
      outputs[r] = run_realization(scenario, schemes,
                                   split_seed(config.base_seed, r),
                                   eigen_mode);
    });

    for (std::size_t s = 0; s < schemes.size(); ++s) {
      if (eigen_mode) {
        const Eigen::Index modes = outputs.front().mode_gains[s].size();
        for (Eigen::Index mode = 0; mode < modes; ++mode) {
          double sum = 0.0, lo = outputs[0].mode_gains[s][mode], hi = lo;
          for (const auto& out : outputs) {
            const double g = out.mode_gains[s][mode];
            sum += g;
            lo = std::min(lo, g);
            hi = std::max(hi, g);
          }
          table.cells.push_back({scenario.sweep_param,
                                 std::to_string(mode + 1),
                                 config.schemes[s],
                                 std::to_string(config.realizations),
                                 gain_db_cell(sum / config.realizations),
                                 gain_db_cell(lo), gain_db_cell(hi)});
        }
        continue;
      }
      SweepRow row;
      row.sweep_param = scenario.sweep_param;
      row.sweep_value = scenario.sweep_value;
      row.scheme = config.schemes[s];
      row.realizations = config.realizations;
      double sum = 0.0;
      row.min = row.max = outputs[0].capacities[s];
      for (const auto& out : outputs) {
        const double c = out.capacities[s];
        sum += c;
        row.min = std::min(row.min, c);
        row.max = std::max(row.max, c);
        if (config.emit_per_realization) row.per_realization.push_back(c);
      }
      row.mean = sum / config.realizations;

      std::vector<std::string> cells = {row.sweep_param,
                                        row.sweep_value,
                                        row.scheme,
                                        std::to_string(row.realizations),
                                        format_double(row.mean),
                                        format_double(row.min),
                                        format_double(row.max)};
      if (config.emit_per_realization) {
        std::string joined;
        for (std::size_t i = 0; i < row.per_realization.size(); ++i) {
          if (i) joined.push_back(';');
          joined += format_double(row.per_realization[i]);
        }
        cells.push_back(std::move(joined));
      }
      table.cells.push_back(std::move(cells));
      table.sweep_rows.push_back(std::move(row));
    }
  }
  return table;
}

ResultTable convergence_trace_experiment(const ExperimentConfig& config,
                                         int threads) {
  config.validate();
  if (config.kind != SweepKind::convergence_trace) {
    throw ConfigError(
        "convergence_trace_experiment needs experiment = "
        "\"convergence_trace\"");
  }
  const Scenario base = build_scenarios(config).front();

  struct TraceRow {
    int realization, stage, iteration;
    double bound_wl, capacity;
    Eigen::VectorXd tx_def, rx_def;
  };
  std::vector<std::vector<TraceRow>> traces(config.realizations);

  parallel_for(config.realizations, threads, [&](int r) {
    const std::uint64_t seed = split_seed(config.base_seed, r);
    const ScatteringEnvironment env =
        sample_environment(base.env_config, seed);
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> shapes;
    int iteration = 0;
    for (std::size_t stage = 0; stage < config.stage_bounds_wl.size();
         ++stage) {
      const double bound = config.stage_bounds_wl[stage] * base.wavelength;
      for (int step = 0; step < config.stage_iterations; ++step) {
        BcdConfig bcd = base.bcd;
        bcd.max_outer_iterations = 1;
        bcd.stop_on_convergence = false;
        bcd.seed = split_seed(seed, 1);
        const BcdReport report = run_bcd(
            env, base.tx_geom, base.rx_geom, bound, bound, base.power_w,
            base.noise_w, base.wavelength, bcd,
            PowerAllocation::waterfilling, shapes);
        if (!shapes.has_value()) {
          // Row 0: the initialized configuration before any update.
          traces[r].push_back({r, static_cast<int>(stage + 1), iteration,
                               config.stage_bounds_wl[stage],
                               report.capacity_trace.front(),
                               Eigen::VectorXd::Zero(0),
                               Eigen::VectorXd::Zero(0)});
        }
        ++iteration;
        shapes = {report.tx_shape.deformations, report.rx_shape.deformations};
        traces[r].push_back({r, static_cast<int>(stage + 1), iteration,
                             config.stage_bounds_wl[stage],
                             report.final_capacity(),
                             report.tx_shape.deformations,
                             report.rx_shape.deformations});
      }
    }
  });

  ResultTable table;
  table.meta = make_meta(config);
  table.columns = {"realization", "stage",  "bound_wl",
                   "outer_iteration", "capacity_bpshz", "tx_deformations_m",
                   "rx_deformations_m"};
  for (const auto& trace : traces) {
    for (const TraceRow& row : trace) {
      table.cells.push_back({std::to_string(row.realization),
                             std::to_string(row.stage),
                             format_double(row.bound_wl),
                             std::to_string(row.iteration),
                             format_double(row.capacity),
                             join_defs(row.tx_def), join_defs(row.rx_def)});
    }
  }
  return table;
}

}  // namespace fim::harness
