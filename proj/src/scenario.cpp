// SPDX-License-Identifier: Apache-2.0
#include "iscc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <variant>

#include "iscc/csv.hpp"
#include "iscc/errors.hpp"

namespace iscc {
namespace {

using Field = std::variant<double ScenarioConfig::*, int ScenarioConfig::*,
                           std::int64_t ScenarioConfig::*, std::string ScenarioConfig::*>;

struct KeySpec {
  std::string_view name;
  Field field;
};

const std::vector<KeySpec>& key_table() {
  using C = ScenarioConfig;
  static const std::vector<KeySpec> table{
      {"num_users", &C::num_users},
      {"array_nx", &C::array_nx},
      {"array_nz", &C::array_nz},
      {"spacing_over_wavelength", &C::spacing_over_wavelength},
      {"noise_power_comm_w", &C::noise_power_comm_w},
      {"snr_min_comm", &C::snr_min_comm},
      {"channel_gain_db", &C::channel_gain_db},
      {"channel_seed", &C::channel_seed},
      {"p_t_w", &C::p_t_w},
      {"comm_energy_window", &C::comm_energy_window},
      {"noise_power_sense_w", &C::noise_power_sense_w},
      {"sensing_bandwidth_hz", &C::sensing_bandwidth_hz},
      {"speed_of_light_mps", &C::speed_of_light_mps},
      {"rcs_zeta", &C::rcs_zeta},
      {"gamma_min_det_db", &C::gamma_min_det_db},
      {"reference_distance_m", &C::reference_distance_m},
      {"slot_t_s", &C::slot_t_s},
      {"sensing_t0_s", &C::sensing_t0_s},
      {"p_max_dbm", &C::p_max_dbm},
      {"frequency_hz", &C::frequency_hz},
      {"kappa_gamma", &C::kappa_gamma},
      {"cycles_pointcloud", &C::cycles_pointcloud},
      {"cycles_base", &C::cycles_base},
      {"cycles_per_layer", &C::cycles_per_layer},
      {"l_max", &C::l_max},
      {"ao_i_max", &C::ao_i_max},
      {"ao_epsilon_w", &C::ao_epsilon_w},
      {"ao_order", &C::ao_order},
      {"oracle_grid_points", &C::oracle_grid_points},
      {"floor_a_cm", &C::floor_a_cm},
      {"floor_b_cm", &C::floor_b_cm},
      {"floor_rho", &C::floor_rho},
      {"jitter_kappa", &C::jitter_kappa},
      {"codebook_azimuth_min_deg", &C::codebook_azimuth_min_deg},
      {"codebook_azimuth_max_deg", &C::codebook_azimuth_max_deg},
      {"codebook_azimuth_count", &C::codebook_azimuth_count},
      {"codebook_elevation_min_deg", &C::codebook_elevation_min_deg},
      {"codebook_elevation_max_deg", &C::codebook_elevation_max_deg},
      {"codebook_elevation_count", &C::codebook_elevation_count},
      {"ap_x_m", &C::ap_x_m},
      {"ap_y_m", &C::ap_y_m},
      {"ap_z_m", &C::ap_z_m},
      {"min_range_m", &C::min_range_m},
  };
  return table;
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// TOML permits underscores between digits.
std::string strip_digit_separators(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '_' && i > 0 && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

std::optional<std::int64_t> integral_value(double v) {
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  const std::string s = strip_digit_separators(text);
  if (auto i = csv::to_integer(s)) return *i;
  if (auto d = csv::to_double(s)) return integral_value(*d);
  return std::nullopt;
}

void assign_text(ScenarioConfig& cfg, const KeySpec& key, std::string_view raw,
                 const std::string& where) {
  const auto fail = [&](const char* expected) {
    throw ConfigError(where + ": key '" + std::string(key.name) + "' expects " + expected +
                      ", got '" + std::string(raw) + "'");
  };
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') fail("a quoted string");
          std::string_view inner = raw.substr(1, raw.size() - 2);
          if (inner.find_first_of("\"\\") != std::string_view::npos) fail("a plain quoted string");
          cfg.*member = std::string(inner);
        } else if constexpr (std::is_same_v<T, double>) {
          const auto v = csv::to_double(strip_digit_separators(raw));
          if (!v) fail("a number");
          cfg.*member = *v;
        } else {
          const auto v = parse_integer(raw);
          if (!v || *v < std::numeric_limits<T>::min() || *v > std::numeric_limits<T>::max()) {
            fail("an integer");
          }
          cfg.*member = static_cast<T>(*v);
        }
      },
      key.field);
}

// Drops a trailing comment, ignoring '#' inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

void require(bool ok, std::string_view key, const std::string& what) {
  if (!ok) throw ConfigError("invalid value for '" + std::string(key) + "': " + what);
}

std::vector<double> angle_grid(double min_deg, double max_deg, int count) {
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double deg =
        count == 1 ? min_deg : min_deg + (max_deg - min_deg) * (static_cast<double>(i) / (count - 1));
    grid[static_cast<std::size_t>(i)] = deg * std::numbers::pi / 180.0;
  }
  return grid;
}

}  // namespace

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> names;
  for (const auto& k : key_table()) names.push_back(k.name);
  return names;
}

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
  ScenarioConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw_line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const std::string_view line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      throw ConfigError(where + ": tables are not supported; use top-level keys only");
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + ": duplicate key '" + std::string(key) + "' (first set on line " +
                        std::to_string(it->second) + ")");
    }
    seen.emplace(std::string(key), line_no);
    if (value.empty()) throw ConfigError(where + ": key '" + std::string(key) + "' has no value");
    assign_text(cfg, *spec, value, where);
  }
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

void validate(const ScenarioConfig& c) {
  const auto finite = [](double v) { return std::isfinite(v); };
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };

  require(c.num_users >= 1, "num_users", "must be >= 1");
  require(c.array_nx >= 1, "array_nx", "must be >= 1");
  require(c.array_nz >= 1, "array_nz", "must be >= 1");
  require(c.num_users <= c.array_nx * c.array_nz, "num_users",
          "zero-forcing needs at most array_nx * array_nz users");
  require(positive(c.spacing_over_wavelength), "spacing_over_wavelength", "must be > 0");
  require(positive(c.noise_power_comm_w), "noise_power_comm_w", "must be > 0");
  require(positive(c.snr_min_comm), "snr_min_comm", "must be > 0");
  require(finite(c.channel_gain_db), "channel_gain_db", "must be finite");
  require(c.channel_seed >= 0, "channel_seed", "must be >= 0");
  require(positive(c.p_t_w), "p_t_w", "must be > 0");
  require(c.comm_energy_window == "slot" || c.comm_energy_window == "sensing",
          "comm_energy_window", "must be \"slot\" or \"sensing\"");

  require(positive(c.noise_power_sense_w), "noise_power_sense_w", "must be > 0");
  require(positive(c.sensing_bandwidth_hz), "sensing_bandwidth_hz", "must be > 0");
  require(positive(c.speed_of_light_mps), "speed_of_light_mps", "must be > 0");
  require(positive(c.rcs_zeta), "rcs_zeta", "must be > 0");
  require(finite(c.gamma_min_det_db), "gamma_min_det_db", "must be finite");
  require(positive(c.reference_distance_m), "reference_distance_m", "must be > 0");

  require(positive(c.slot_t_s), "slot_t_s", "must be > 0");
  require(positive(c.sensing_t0_s), "sensing_t0_s", "must be > 0");
  require(c.sensing_t0_s < c.slot_t_s, "sensing_t0_s", "must be shorter than slot_t_s");
  require(finite(c.p_max_dbm), "p_max_dbm", "must be finite");
  require(positive(c.frequency_hz), "frequency_hz", "must be > 0");
  require(positive(c.kappa_gamma), "kappa_gamma", "must be > 0");
  require(finite(c.cycles_pointcloud) && c.cycles_pointcloud >= 0.0, "cycles_pointcloud",
          "must be >= 0");
  require(finite(c.cycles_base) && c.cycles_base >= 0.0, "cycles_base", "must be >= 0");
  require(positive(c.cycles_per_layer), "cycles_per_layer", "must be > 0");
  require(c.l_max >= 1, "l_max", "must be >= 1");

  require(c.ao_i_max >= 1, "ao_i_max", "must be >= 1");
  require(positive(c.ao_epsilon_w), "ao_epsilon_w", "must be > 0");
  require(c.ao_order == "depth_first" || c.ao_order == "power_first", "ao_order",
          "must be \"depth_first\" or \"power_first\"");
  require(c.oracle_grid_points >= 2, "oracle_grid_points", "must be >= 2");

  require(positive(c.floor_a_cm), "floor_a_cm", "must be > 0");
  require(finite(c.floor_b_cm) && c.floor_b_cm >= 0.0, "floor_b_cm", "must be >= 0");
  require(c.floor_rho > 0.0 && c.floor_rho < 1.0, "floor_rho", "must lie in (0, 1)");
  require(finite(c.jitter_kappa) && c.jitter_kappa >= 0.0, "jitter_kappa", "must be >= 0");

  require(finite(c.codebook_azimuth_min_deg), "codebook_azimuth_min_deg", "must be finite");
  require(finite(c.codebook_azimuth_max_deg) &&
              c.codebook_azimuth_max_deg >= c.codebook_azimuth_min_deg,
          "codebook_azimuth_max_deg", "must be >= codebook_azimuth_min_deg");
  require(c.codebook_azimuth_count >= 1, "codebook_azimuth_count", "must be >= 1");
  require(finite(c.codebook_elevation_min_deg), "codebook_elevation_min_deg", "must be finite");
  require(finite(c.codebook_elevation_max_deg) &&
              c.codebook_elevation_max_deg >= c.codebook_elevation_min_deg,
          "codebook_elevation_max_deg", "must be >= codebook_elevation_min_deg");
  require(c.codebook_elevation_count >= 1, "codebook_elevation_count", "must be >= 1");
  require(finite(c.ap_x_m), "ap_x_m", "must be finite");
  require(finite(c.ap_y_m), "ap_y_m", "must be finite");
  require(finite(c.ap_z_m), "ap_z_m", "must be finite");
  require(finite(c.min_range_m) && c.min_range_m >= 0.0, "min_range_m", "must be >= 0");
}

void set_numeric(ScenarioConfig& cfg, std::string_view key, double value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw ConfigError("unknown key '" + std::string(key) + "'");
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          throw ConfigError("key '" + std::string(key) + "' is not numeric");
        } else if constexpr (std::is_same_v<T, double>) {
          cfg.*member = value;
        } else {
          const auto v = integral_value(value);
          if (!v || *v < std::numeric_limits<T>::min() || *v > std::numeric_limits<T>::max()) {
            throw ConfigError("key '" + std::string(key) + "' needs an integer value");
          }
          cfg.*member = static_cast<T>(*v);
        }
      },
      spec->field);
}

std::string to_toml(const ScenarioConfig& cfg) {
  std::ostringstream out;
  for (const auto& k : key_table()) {
    out << k.name << " = ";
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, std::string>) {
            out << '"' << cfg.*member << '"';
          } else if constexpr (std::is_same_v<T, double>) {
            std::string s = csv::format_double(cfg.*member);
            // keep floats recognizable as floats to TOML readers
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            out << s;
          } else {
            out << cfg.*member;
          }
        },
        k.field);
    out << '\n';
  }
  return out.str();
}

ArrayGeometry make_geometry(const ScenarioConfig& cfg) {
  return {cfg.array_nx, cfg.array_nz, cfg.spacing_over_wavelength};
}

SensingParams make_sensing_params(const ScenarioConfig& cfg) {
  SensingParams p;
  p.rcs_zeta = cfg.rcs_zeta;
  p.noise_power_sigma_z2 = cfg.noise_power_sense_w;
  p.bandwidth_b_r = cfg.sensing_bandwidth_hz;
  p.speed_of_light_c = cfg.speed_of_light_mps;
  return p;
}

ComputeParams make_compute_params(const ScenarioConfig& cfg) {
  ComputeParams p;
  p.cycles_pointcloud_c_pc = cfg.cycles_pointcloud;
  p.cycles_base_c_b = cfg.cycles_base;
  p.cycles_per_layer_c_l = cfg.cycles_per_layer;
  p.frequency_f = cfg.frequency_hz;
  p.kappa_gamma = cfg.kappa_gamma;
  return p;
}

Budget make_budget(const ScenarioConfig& cfg) {
  Budget b;
  b.slot_t = cfg.slot_t_s;
  b.sensing_t0 = cfg.sensing_t0_s;
  b.p_max_avg = dbm_to_watts(cfg.p_max_dbm);
  b.p_t_total = cfg.p_t_w;
  b.snr_min_comm = cfg.snr_min_comm;
  b.gamma_min_det = db_to_linear(cfg.gamma_min_det_db);
  b.l_max = cfg.l_max;
  b.comm_window = cfg.comm_energy_window == "sensing" ? CommWindow::SensingWindow
                                                      : CommWindow::FullSlot;
  return b;
}

SurrogateModel make_surrogate(const ScenarioConfig& cfg) {
  SurrogateModel m;
  m.floor_a = cfg.floor_a_cm;
  m.floor_b = cfg.floor_b_cm;
  m.floor_rho = cfg.floor_rho;
  m.jitter_kappa = cfg.jitter_kappa;
  m.reference_distance_d_o = cfg.reference_distance_m;
  m.sensing_params = make_sensing_params(cfg);
  m.l_max = cfg.l_max;
  return m;
}

AOConfig make_ao_config(const ScenarioConfig& cfg) {
  AOConfig c;
  c.i_max = cfg.ao_i_max;
  c.epsilon = cfg.ao_epsilon_w;
  c.order = cfg.ao_order == "power_first" ? UpdateOrder::PowerFirst : UpdateOrder::DepthFirst;
  return c;
}

ChannelSet make_channels(const ScenarioConfig& cfg) {
  ChannelSet raw = generate_channels(static_cast<std::uint64_t>(cfg.channel_seed), cfg.num_users,
                                     cfg.array_nx * cfg.array_nz, cfg.noise_power_comm_w);
  return apply_large_scale_gain(std::move(raw), db_to_linear(cfg.channel_gain_db));
}

Codebook make_codebook(const ScenarioConfig& cfg) {
  const auto az = angle_grid(cfg.codebook_azimuth_min_deg, cfg.codebook_azimuth_max_deg,
                             cfg.codebook_azimuth_count);
  const auto el = angle_grid(cfg.codebook_elevation_min_deg, cfg.codebook_elevation_max_deg,
                             cfg.codebook_elevation_count);
  return build_codebook(make_geometry(cfg), az, el);
}

SynthesisOptions make_synthesis_options(const ScenarioConfig& cfg) {
  SynthesisOptions o;
  o.ap_position = {cfg.ap_x_m, cfg.ap_y_m, cfg.ap_z_m};
  o.min_range_m = cfg.min_range_m;
  return o;
}

Problem build_problem(const ScenarioConfig& cfg) {
  validate(cfg);
  Problem p;
  p.system.budget = make_budget(cfg);
  p.system.compute = make_compute_params(cfg);
  p.system.channels = make_channels(cfg);
  p.system.precoder = zf_precoder(p.system.channels);
  p.system.reference_beam.distance_d_p = cfg.reference_distance_m;
  p.system.sensing = make_sensing_params(cfg);
  p.surrogate = make_surrogate(cfg);
  return p;
}

}  // namespace iscc
