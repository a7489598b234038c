// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration: a flat TOML-compatible `key = value` file whose
// defaults reproduce the reference simulation parameters.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "iscc/optimizer.hpp"
#include "iscc/phy_array.hpp"
#include "iscc/pose_pipeline.hpp"
#include "iscc/sensing_model.hpp"

namespace iscc {

struct ScenarioConfig {
  // communication
  int num_users = 4;
  int array_nx = 4;
  int array_nz = 4;
  double spacing_over_wavelength = 0.5;
  double noise_power_comm_w = 1e-6;
  double snr_min_comm = 5.0;
  double channel_gain_db = 0.0;  // common large-scale gain applied to CN(0, 1) channels
  std::int64_t channel_seed = 1;
  double p_t_w = 1.0;
  std::string comm_energy_window = "slot";  // "slot" | "sensing"

  // sensing
  double noise_power_sense_w = 1e-6;
  double sensing_bandwidth_hz = 0.5e9;
  double speed_of_light_mps = 3e8;
  double rcs_zeta = 1.0;
  double gamma_min_det_db = -5.0;
  double reference_distance_m = 3.0;

  // slot, energy and compute
  double slot_t_s = 0.1;
  double sensing_t0_s = 0.05;
  double p_max_dbm = 28.0;
  double frequency_hz = 100e6;
  double kappa_gamma = 1e-25;
  double cycles_pointcloud = 128.0 * 256 * 8;
  double cycles_base = 384.0 * 96 * 8;
  double cycles_per_layer = 384.0 * 96 * 8 * 4;
  int l_max = 6;

  // solver
  int ao_i_max = 20;
  double ao_epsilon_w = 1e-9;
  std::string ao_order = "depth_first";  // "depth_first" | "power_first"
  int oracle_grid_points = 1001;

  // error surrogate
  double floor_a_cm = SurrogateModel{}.floor_a;
  double floor_b_cm = SurrogateModel{}.floor_b;
  double floor_rho = SurrogateModel{}.floor_rho;
  double jitter_kappa = SurrogateModel{}.jitter_kappa;

  // point-cloud synthesis
  double codebook_azimuth_min_deg = -40.0;
  double codebook_azimuth_max_deg = 40.0;
  int codebook_azimuth_count = 161;
  double codebook_elevation_min_deg = -40.0;
  double codebook_elevation_max_deg = 40.0;
  int codebook_elevation_count = 161;
  double ap_x_m = 0.0;
  double ap_y_m = 0.0;
  double ap_z_m = 0.0;
  double min_range_m = 0.01;
};

/// Names of every accepted key, in file order.
std::vector<std::string_view> config_keys();

/// Throws ConfigError naming the line and key on parse errors or unknown keys,
/// and naming the key on invariant violations.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the offending key.
void validate(const ScenarioConfig& cfg);

/// Sets one numeric key by name (as used by sweeps). Throws ConfigError for
/// unknown or non-numeric keys.
void set_numeric(ScenarioConfig& cfg, std::string_view key, double value);

/// Serializes every key; parse_config(to_toml(c)) reproduces c.
std::string to_toml(const ScenarioConfig& cfg);

ArrayGeometry make_geometry(const ScenarioConfig& cfg);
SensingParams make_sensing_params(const ScenarioConfig& cfg);
ComputeParams make_compute_params(const ScenarioConfig& cfg);
Budget make_budget(const ScenarioConfig& cfg);
SurrogateModel make_surrogate(const ScenarioConfig& cfg);
AOConfig make_ao_config(const ScenarioConfig& cfg);
ChannelSet make_channels(const ScenarioConfig& cfg);
Codebook make_codebook(const ScenarioConfig& cfg);
SynthesisOptions make_synthesis_options(const ScenarioConfig& cfg);

/// Channels, ZF precoder and reference beam derived from the config.
Problem build_problem(const ScenarioConfig& cfg);

}  // namespace iscc
