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

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "fim/gradcheck.hpp"
#include "fim/harness/experiment.hpp"
#include "fim/harness/units.hpp"
#include "fim/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitCheckFailure = 2;
constexpr double kGradTolerance = 1e-5;

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("FIM_MIMO_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int run_command(const std::string& config_path,
                std::optional<std::uint64_t> seed,
                std::optional<std::string> out_path,
                std::optional<std::string> format,
                std::optional<int> realizations, int threads) {
  fim::harness::ExperimentConfig config =
      fim::harness::load_experiment_config(config_path);
  if (seed) config.base_seed = *seed;
  if (out_path) config.output = *out_path;
  if (format) config.format = *format;
  if (realizations) config.realizations = *realizations;
  config.validate();

  const fim::harness::ResultTable table =
      fim::harness::run_experiment(config, resolve_threads(threads));

  if (config.output.empty()) {
    fim::harness::write_table(table, config.format, std::cout);
  } else {
    std::ofstream out(config.output, std::ios::binary);
    if (!out) {
      throw fim::harness::ConfigError("cannot open output file: " +
                                      config.output);
    }
    fim::harness::write_table(table, config.format, out);
    std::cout << "wrote " << table.cells.size() << " rows to "
              << config.output << "\n";
  }
  return kExitOk;
}

int gradcheck_command(std::uint64_t seed, int instances) {
  const double wavelength = fim::harness::wavelength_from_ghz(28.0);
  const double err = fim::gradcheck_max_rel_err(seed, instances, wavelength);
  std::cout << "max_rel_err=" << fim::harness::format_double(err) << "\n";
  if (!(err < kGradTolerance)) {
    std::cerr << "gradcheck: analytic gradients deviate from finite "
                 "differences beyond "
              << kGradTolerance << "\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}

int demo_command(std::uint64_t seed) {
  using fim::harness::format_double;
  fim::harness::ExperimentConfig config;  // reference scenario defaults
  config.kind = fim::harness::SweepKind::morph_range;
  config.sweep_values = {config.morph_range_wl};
  const fim::harness::Scenario scenario =
      fim::harness::build_scenarios(config).front();

  const fim::ScatteringEnvironment env =
      fim::sample_environment(scenario.env_config, fim::split_seed(seed, 0));
  fim::BcdConfig bcd = scenario.bcd;
  bcd.seed = fim::split_seed(fim::split_seed(seed, 0), 1);

  std::cout << "fim-mimo demo (seed " << seed << ")\n";
  std::cout << "  " << scenario.tx_geom.element_count() << "x"
            << scenario.rx_geom.element_count() << " link, "
            << env.num_clusters << " clusters x " << env.paths_per_cluster
            << " paths, morphing range "
            << format_double(config.morph_range_wl) << " wavelengths\n";

  double fim_wpa = 0.0, raa_wpa = 0.0, fim_epa = 0.0, raa_epa = 0.0;
  for (const fim::Scheme scheme :
       {fim::Scheme::fim_wpa, fim::Scheme::fim_epa, fim::Scheme::raa_wpa,
        fim::Scheme::raa_epa}) {
    const fim::BcdReport report = fim::run_scheme_report(
        scheme, env, scenario.tx_geom, scenario.rx_geom, scenario.tx_bound,
        scenario.rx_bound, scenario.power_w, scenario.noise_w,
        scenario.wavelength, bcd);
    const double capacity = report.final_capacity();
    std::cout << "  " << fim::scheme_name(scheme) << ": "
              << format_double(capacity) << " bps/Hz ("
              << report.iterations_used << " iterations)\n";
    switch (scheme) {
      case fim::Scheme::fim_wpa: fim_wpa = capacity; break;
      case fim::Scheme::fim_epa: fim_epa = capacity; break;
      case fim::Scheme::raa_wpa: raa_wpa = capacity; break;
      case fim::Scheme::raa_epa: raa_epa = capacity; break;
    }
    if (scheme == fim::Scheme::fim_wpa) {
      const fim::PathBasis basis = fim::make_path_basis(
          env, scenario.tx_geom, scenario.rx_geom, scenario.wavelength);
      const Eigen::VectorXd gains = fim::harness::eigenchannel_gains(
          fim::channel_from_basis(basis, report.tx_shape.deformations,
                                  report.rx_shape.deformations));
      std::cout << "    eigenchannel gains (dB):";
      for (Eigen::Index m = 0; m < gains.size(); ++m) {
        std::cout << ' '
                  << (gains[m] > 0.0
                          ? format_double(fim::harness::linear_to_db(gains[m]))
                          : "-inf");
      }
      std::cout << "\n";
    }
  }

  const bool wpa_ok = fim_wpa >= raa_wpa - 1e-12;
  const bool epa_ok = fim_epa >= raa_epa - 1e-12;
  std::cout << "  dominance: fim-wpa >= raa-wpa: " << (wpa_ok ? "OK" : "FAIL")
            << ", fim-epa >= raa-epa: " << (epa_ok ? "OK" : "FAIL") << "\n";
  return wpa_ok && epa_ok ? kExitOk : kExitCheckFailure;
}

int validate_command(const std::string& config_path) {
  const fim::harness::ExperimentConfig config =
      fim::harness::load_experiment_config(config_path);
  std::cout << "config OK: experiment="
            << fim::harness::sweep_kind_name(config.kind)
            << " realizations=" << config.realizations
            << " schemes=" << config.schemes.size() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fim-mimo: MIMO capacity optimization between two morphable "
               "metasurface arrays"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<std::string> format_override;
  std::optional<int> realizations_override;
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  run->add_option("--seed", seed_override, "override base_seed");
  run->add_option("--out", out_override, "output path (default from config)");
  run->add_option("--format", format_override, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--realizations", realizations_override,
                  "override realization count");
  run->add_option("--threads", threads,
                  "worker threads (default: FIM_MIMO_THREADS or hardware)");

  std::uint64_t gradcheck_seed = 7;
  int gradcheck_instances = 50;
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--seed", gradcheck_seed, "suite seed");
  gradcheck->add_option("--instances", gradcheck_instances,
                        "number of random instances")
      ->check(CLI::PositiveNumber);

  std::uint64_t demo_seed = 1;
  CLI::App* demo =
      app.add_subcommand("demo", "single-realization end-to-end summary");
  demo->add_option("--seed", demo_seed, "realization seed");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "lint a config file");
  validate->add_option("--config", validate_path, "experiment config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, seed_override, out_override,
                         format_override, realizations_override, threads);
    }
    if (gradcheck->parsed()) {
      return gradcheck_command(gradcheck_seed, gradcheck_instances);
    }
    if (demo->parsed()) {
      return demo_command(demo_seed);
    }
    if (validate->parsed()) {
      return validate_command(validate_path);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
