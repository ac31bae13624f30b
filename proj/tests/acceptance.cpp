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
//
// End-to-end acceptance suite. Each check prints one PASS/FAIL line with its
// runtime; the process exits with the number of failures. Thresholds are
// fixed here, not tunable from outside.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fim/bcd.hpp"
#include "fim/gradcheck.hpp"
#include "fim/harness/experiment.hpp"
#include "fim/harness/units.hpp"
#include "fim/rng.hpp"
#include "oracles.hpp"

using namespace fim;
using harness::ExperimentConfig;
using harness::ResultTable;
using harness::Scenario;
using harness::SweepKind;

namespace {

constexpr int kThreads = 4;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// --- 1. analytic gradients vs central finite differences ------------------

Outcome criterion_gradients() {
  const double wavelength = harness::wavelength_from_ghz(28.0);
  const double err = gradcheck_max_rel_err(2026, 50, wavelength);
  std::ostringstream detail;
  detail << "max_rel_err=" << harness::format_double(err) << " (tol 1e-5)";
  return {err <= 1e-5, detail.str()};
}

// --- 2. factored channel assembly vs explicit rank-one sum ----------------

Outcome criterion_channel_assembly() {
  const double wavelength = harness::wavelength_from_ghz(28.0);
  double worst = 0.0;
  Rng rng(4242);
  for (int i = 0; i < 100; ++i) {
    ArrayGeometry tx, rx;
    tx.counts_x = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    tx.counts_y = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    rx.counts_x = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    rx.counts_y = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    tx.spacing_x = tx.spacing_y = rx.spacing_x = rx.spacing_y =
        wavelength / 2;
    tx.frame = frame_from_angles({rng.uniform(0.0, test::kPi),
                                  rng.uniform(0.0, test::kPi),
                                  rng.uniform(0.0, 2 * test::kPi)});
    rx.frame = frame_from_angles({rng.uniform(0.0, test::kPi),
                                  rng.uniform(0.0, test::kPi),
                                  rng.uniform(0.0, 2 * test::kPi)});
    EnvironmentConfig env_config{8, 4, test::kPi / 128, test::kPi / 128, 1.0};
    const ScatteringEnvironment env =
        sample_environment(env_config, rng.next_u64());
    SurfaceShape tx_shape = SurfaceShape::flat(tx.element_count(),
                                               wavelength / 2);
    SurfaceShape rx_shape = SurfaceShape::flat(rx.element_count(),
                                               wavelength / 2);
    for (int m = 0; m < tx.element_count(); ++m)
      tx_shape.deformations[m] = rng.uniform(-tx_shape.bound, tx_shape.bound);
    for (int n = 0; n < rx.element_count(); ++n)
      rx_shape.deformations[n] = rng.uniform(-rx_shape.bound, rx_shape.bound);

    const ChannelMatrix channel =
        assemble_channel(env, tx, rx, tx_shape, rx_shape, wavelength);
    const Eigen::MatrixXcd reference =
        assemble_channel_sum(env, tx, rx, tx_shape, rx_shape, wavelength);
    worst = std::max(worst,
                     (channel.H - reference).norm() / reference.norm());
  }
  std::ostringstream detail;
  detail << "worst_rel_frobenius=" << harness::format_double(worst)
         << " (tol 1e-10, 100 instances up to 16x16)";
  return {worst <= 1e-10, detail.str()};
}

// --- 3. water-filling KKT conditions ---------------------------------------

Outcome criterion_waterfilling() {
  Rng rng(909);
  double worst_budget = 0.0, worst_slack = 0.0;
  bool dominance = true;
  for (int i = 0; i < 100; ++i) {
    const int M = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
    const int N = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
    const Eigen::MatrixXcd H = test::random_complex(N, M, rng);
    const double power = rng.uniform(0.1, 5.0);
    const double noise = rng.uniform(0.2, 2.0);
    const WaterfillResult wf = eigenmode_waterfill(H, power, noise);
    worst_budget = std::max(
        worst_budget, std::abs(wf.modes.allocations.sum() - power));
    for (int m = 0; m < M; ++m) {
      const double inverse_gain = noise / wf.modes.eigenvalues[m];
      if (wf.modes.allocations[m] > 0.0) {
        worst_slack = std::max(worst_slack,
                               std::abs(wf.modes.allocations[m] +
                                        inverse_gain - wf.modes.water_level));
      } else if (wf.modes.water_level > inverse_gain + 1e-8) {
        worst_slack = std::max(worst_slack,
                               wf.modes.water_level - inverse_gain);
      }
    }
    const double wf_cap =
        detail::capacity_unchecked(H, wf.covariance.matrix, noise);
    const double ep_cap = detail::capacity_unchecked(
        H, equal_power_covariance(M, power, noise).matrix, noise);
    dominance = dominance && wf_cap >= ep_cap - 1e-10;
  }
  std::ostringstream detail;
  detail << "budget_err=" << harness::format_double(worst_budget)
         << " kkt_err=" << harness::format_double(worst_slack)
         << " wpa>=epa=" << (dominance ? "yes" : "NO")
         << " (tol 1e-8, 100 channels)";
  return {worst_budget <= 1e-8 && worst_slack <= 1e-8 && dominance,
          detail.str()};
}

// --- 4. BCD monotonicity and FIM >= RAA dominance --------------------------

Outcome criterion_bcd_monotone_dominant() {
  const Scenario scenario = test::reference_scenario();
  const int runs = 100;
  std::vector<bool> monotone(runs, false), dominant(runs, false);
  harness::parallel_for(runs, kThreads, [&](int r) {
    const std::uint64_t seed = split_seed(20260810, r);
    const ScatteringEnvironment env =
        sample_environment(scenario.env_config, seed);
    BcdConfig config = scenario.bcd;
    config.seed = split_seed(seed, 1);
    const BcdReport fim = run_scheme_report(
        Scheme::fim_wpa, env, scenario.tx_geom, scenario.rx_geom,
        scenario.tx_bound, scenario.rx_bound, scenario.power_w,
        scenario.noise_w, scenario.wavelength, config);
    const BcdReport raa = run_scheme_report(
        Scheme::raa_wpa, env, scenario.tx_geom, scenario.rx_geom,
        scenario.tx_bound, scenario.rx_bound, scenario.power_w,
        scenario.noise_w, scenario.wavelength, config);
    bool ok = true;
    for (std::size_t i = 1; i < fim.capacity_trace.size(); ++i) {
      ok = ok && fim.capacity_trace[i] >= fim.capacity_trace[i - 1] - 1e-9;
    }
    monotone[r] = ok;
    dominant[r] = fim.final_capacity() >= raa.final_capacity() - 1e-12;
  });
  int mono_count = 0, dom_count = 0;
  for (int r = 0; r < runs; ++r) {
    mono_count += monotone[r];
    dom_count += dominant[r];
  }
  std::ostringstream detail;
  detail << "monotone=" << mono_count << "/100 fim>=raa=" << dom_count
         << "/100 (lambda/2 range, reference scenario)";
  return {mono_count == runs && dom_count == runs, detail.str()};
}

// --- 5. small-instance global optimum --------------------------------------

Outcome criterion_grid_oracle() {
  Scenario scenario = test::reference_scenario();
  scenario.tx_geom.counts_x = 2;
  scenario.tx_geom.counts_y = 1;
  scenario.rx_geom.counts_x = 2;
  scenario.rx_geom.counts_y = 1;
  EnvironmentConfig env_config = scenario.env_config;
  env_config.num_clusters = 2;
  env_config.paths_per_cluster = 1;
  const double bound = 0.25 * scenario.wavelength;

  const int seeds = 10;
  std::vector<double> ratio(seeds, 0.0);
  harness::parallel_for(seeds, kThreads, [&](int i) {
    const std::uint64_t seed = 3000 + i;
    const ScatteringEnvironment env = sample_environment(env_config, seed);
    BcdConfig config = scenario.bcd;
    config.seed = split_seed(seed, 1);
    config.num_random_inits = 128;  // dense multi-start for the tiny box
    const BcdReport report = run_bcd(
        env, scenario.tx_geom, scenario.rx_geom, bound, bound,
        scenario.power_w, scenario.noise_w, scenario.wavelength, config);
    const PathBasis basis = make_path_basis(
        env, scenario.tx_geom, scenario.rx_geom, scenario.wavelength);
    const double grid = test::waterfilled_grid_search(
        basis, bound, 21, scenario.power_w, scenario.noise_w);
    ratio[i] = report.final_capacity() / grid;
  });
  double worst = 1e9;
  for (double r : ratio) worst = std::min(worst, r);
  std::ostringstream detail;
  detail << "worst_bcd/grid=" << harness::format_double(worst)
         << " (>= 0.98 required, 10 seeds, 21^4 waterfilled grid)";
  return {worst >= 0.98, detail.str()};
}

// --- 6. morphing-range trend at desk scale ---------------------------------

Outcome criterion_range_trend() {
  ExperimentConfig config;
  config.kind = SweepKind::morph_range;
  config.schemes = {"fim-wpa", "raa-wpa"};
  config.realizations = 100;
  config.base_seed = 8106;
  // Fig-9-style operating point: the rigid waterfilled baseline sits near
  // 2.5 bps/Hz here.
  config.transmit_power_dbm = 5.0;
  config.sweep_values = {0.0, 0.1, 0.2, 0.3, 0.5};
  const ResultTable table = harness::run_experiment(config, kThreads);

  double fim_at_03 = 0.0, raa_at_03 = 0.0;
  std::vector<double> fim_means;
  for (const auto& row : table.sweep_rows) {
    if (row.scheme == "fim-wpa") fim_means.push_back(row.mean);
    if (row.sweep_value == "0.3") {
      if (row.scheme == "fim-wpa") fim_at_03 = row.mean;
      if (row.scheme == "raa-wpa") raa_at_03 = row.mean;
    }
  }
  bool non_decreasing = true;
  for (std::size_t i = 1; i < fim_means.size(); ++i) {
    non_decreasing = non_decreasing && fim_means[i] >= fim_means[i - 1] - 1e-9;
  }
  const double gain = fim_at_03 / raa_at_03 - 1.0;
  std::ostringstream detail;
  detail << "gain@0.3lambda=" << harness::format_double(100.0 * gain)
         << "% (>= 30% required), means non-decreasing="
         << (non_decreasing ? "yes" : "NO");
  return {gain >= 0.30 && non_decreasing, detail.str()};
}

// --- 7. convergence speed ---------------------------------------------------

Outcome criterion_convergence_speed() {
  const Scenario scenario = test::reference_scenario();
  const int runs = 100;
  std::vector<bool> fast(runs, false);
  harness::parallel_for(runs, kThreads, [&](int r) {
    const std::uint64_t seed = split_seed(555, r);
    const ScatteringEnvironment env =
        sample_environment(scenario.env_config, seed);
    BcdConfig config = scenario.bcd;
    config.seed = split_seed(seed, 1);
    const BcdReport report = run_scheme_report(
        Scheme::fim_wpa, env, scenario.tx_geom, scenario.rx_geom,
        scenario.tx_bound, scenario.rx_bound, scenario.power_w,
        scenario.noise_w, scenario.wavelength, config);
    const double final = report.final_capacity();
    const std::size_t probe =
        std::min<std::size_t>(10, report.capacity_trace.size() - 1);
    fast[r] = report.capacity_trace[probe] >= 0.99 * final;
  });
  int count = 0;
  for (int r = 0; r < runs; ++r) count += fast[r];
  std::ostringstream detail;
  detail << count << "/100 runs within 1% of final by outer iteration 10 "
         << "(>= 80 required)";
  return {count >= 80, detail.str()};
}

// --- 8. log-det differential identity --------------------------------------

Outcome criterion_logdet_identity() {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + (i % 5);
    worst = std::max(worst, test::logdet_identity_rel_err(n, 7000 + i));
  }
  std::ostringstream detail;
  detail << "worst_rel_err=" << harness::format_double(worst)
         << " (tol 1e-6, 50 instances)";
  return {worst <= 1e-6, detail.str()};
}

// --- 9. byte-identical reproducibility across runs and thread counts -------

Outcome criterion_reproducibility() {
#ifndef FIM_CLI_PATH
  return {false, "FIM_CLI_PATH not compiled in"};
#else
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / "fim_mimo_acceptance_repro";
  fs::create_directories(dir);
  const fs::path config_path = dir / "acceptance.toml";
  {
    std::ofstream out(config_path);
    out << "experiment = \"morph_range\"\n"
           "schemes = [\"fim-wpa\", \"raa-wpa\"]\n"
           "realizations = 6\n"
           "base_seed = 42\n"
           "tx_grid = [2, 1]\n"
           "rx_grid = [2, 1]\n"
           "clusters = 4\n"
           "paths_per_cluster = 2\n"
           "sweep_values = [0.0, 0.3]\n"
           "emit_per_realization = true\n";
  }
  auto run_cli = [&](const fs::path& out_path, int threads) {
    std::ostringstream cmd;
    cmd << '"' << FIM_CLI_PATH << '"' << " run --config " << config_path
        << " --out " << out_path << " --threads " << threads
        << " > /dev/null";
    return std::system(cmd.str().c_str());
  };
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const fs::path a = dir / "a.csv", b = dir / "b.csv", c = dir / "c.csv";
  if (run_cli(a, 1) != 0 || run_cli(b, 1) != 0 || run_cli(c, 4) != 0) {
    return {false, "CLI invocation failed"};
  }
  const std::string text_a = slurp(a);
  const bool identical = !text_a.empty() && text_a == slurp(b) &&
                         text_a == slurp(c);
  std::ostringstream detail;
  detail << "two runs + threads {1,4} byte-identical="
         << (identical ? "yes" : "NO") << " (" << text_a.size() << " bytes)";
  return {identical, detail.str()};
#endif
}

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "gradient oracle vs finite differences", 10.0,
       criterion_gradients},
      {2, "channel assembly dual-route agreement", 5.0,
       criterion_channel_assembly},
      {3, "water-filling KKT suite", 5.0, criterion_waterfilling},
      {4, "BCD monotonicity and FIM>=RAA dominance", 120.0,
       criterion_bcd_monotone_dominant},
      {5, "small-instance grid-search oracle", 300.0, criterion_grid_oracle},
      {6, "morphing-range capacity trend", 600.0, criterion_range_trend},
      {7, "convergence within 10 outer iterations", 120.0,
       criterion_convergence_speed},
      {8, "log-det differential identity", 1.0, criterion_logdet_identity},
      {9, "byte-identical reproducibility", 120.0,
       criterion_reproducibility},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& error) {
      outcome = {false, std::string("exception: ") + error.what()};
    }
    const double seconds = elapsed_seconds(start);
    const bool in_time = seconds < criterion.time_limit_s;
    const bool passed = outcome.passed && in_time;
    failures += passed ? 0 : 1;
    std::printf("[%s] criterion %d: %s — %s [%.2fs / limit %.0fs]\n",
                passed ? "PASS" : "FAIL", criterion.id,
                criterion.name.c_str(), outcome.detail.c_str(), seconds,
                criterion.time_limit_s);
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("acceptance: %d criteria FAILED\n", failures);
  }
  return failures;
}
