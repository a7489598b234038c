// SPDX-License-Identifier: Apache-2.0
//
// iscc: solve, sweep, synth-cloud and calibrate.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "iscc/commands.hpp"
#include "iscc/errors.hpp"

namespace {

iscc::ScenarioConfig load_or_default(const std::string& path) {
  return path.empty() ? iscc::ScenarioConfig{} : iscc::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor ISCC pose-estimation resource allocation simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;

  auto* solve = app.add_subcommand("solve", "Run the alternating optimization on one scenario");
  bool with_oracle = false;
  bool as_json = false;
  solve->add_option("--config", config_path, "Scenario TOML file")->required();
  solve->add_option("--seed", seed, "Channel seed (overrides channel_seed)");
  solve->add_flag("--oracle", with_oracle, "Also run the exhaustive search and report the gap");
  solve->add_flag("--json", as_json, "Emit JSON instead of text");

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write a CSV");
  std::string param, schemes_arg = "proposed,fixed_l1,fixed_prmin", out_path;
  double from = 0.0, to = 0.0;
  int steps = 0, threads = 0;
  sweep->add_option("--config", config_path, "Scenario TOML file")->required();
  sweep->add_option("--param", param, "frequency_f | sensing_t0 | p_max_avg")->required();
  sweep->add_option("--from", from, "First value (Hz, s or dBm)")->required();
  sweep->add_option("--to", to, "Last value")->required();
  sweep->add_option("--steps", steps, "Number of values, >= 2")->required();
  sweep->add_option("--schemes", schemes_arg, "Comma-separated scheme list");
  sweep->add_option("--seed", seed, "Channel seed (default: channel_seed from the config)");
  sweep->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  sweep->add_option("--out", out_path, "Output CSV")->required();

  auto* synth = app.add_subcommand("synth-cloud", "Synthesize point clouds from a skeleton trace");
  std::string skeleton_path;
  std::optional<double> power_w;
  synth->add_option("--skeleton", skeleton_path, "Skeleton CSV (frame,joint,x,y,z)")->required();
  synth->add_option("--out", out_path, "Output point-cloud CSV")->required();
  synth->add_option("--power-w", power_w, "Sensing power in W (default: solved p_r)");
  synth->add_option("--seed", seed, "Noise seed (default: channel_seed from the config)");
  synth->add_option("--config", config_path, "Scenario TOML file")->required();

  auto* calibrate = app.add_subcommand("calibrate", "Fit the error surrogate to target points");
  std::string targets_path;
  calibrate->add_option("--targets", targets_path, "Targets CSV (p_r_w,depth,mpjpe_cm)")->required();
  calibrate->add_option("--out", out_path, "Output TOML fragment")->required();
  calibrate->add_option("--config", config_path, "Base scenario (sensing constants)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : iscc::kExitConfig;
  }

  try {
    iscc::ScenarioConfig cfg = load_or_default(config_path);
    const std::uint64_t run_seed = seed.value_or(static_cast<std::uint64_t>(cfg.channel_seed));

    if (*solve) {
      cfg.channel_seed = static_cast<std::int64_t>(run_seed);
      return iscc::cmd_solve(cfg, {with_oracle, as_json}, std::cout, std::cerr);
    }
    if (*sweep) {
      iscc::SweepSpec spec;
      spec.parameter = iscc::parse_sweep_param(param);
      spec.from = from;
      spec.to = to;
      spec.steps = steps;
      spec.schemes.clear();
      for (const auto& name : CLI::detail::split(schemes_arg, ',')) {
        spec.schemes.push_back(iscc::parse_scheme(CLI::detail::trim_copy(name)));
      }
      return iscc::cmd_sweep(cfg, spec, run_seed, threads, out_path, std::cerr);
    }
    if (*synth) {
      return iscc::cmd_synth_cloud(skeleton_path, out_path, cfg, run_seed, power_w, std::cerr);
    }
    return iscc::cmd_calibrate(targets_path, out_path, cfg, std::cout, std::cerr);
  } catch (const iscc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return iscc::kExitConfig;
  }
}
