// SPDX-License-Identifier: Apache-2.0
#include "iscc/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include "iscc/csv.hpp"
#include "iscc/errors.hpp"

namespace iscc {
namespace {

constexpr std::array<std::string_view, 4> kSchemeNames{"proposed", "fixed_l1", "fixed_prmin",
                                                       "oracle"};
constexpr std::array<std::string_view, 3> kParamNames{"frequency_f", "sensing_t0", "p_max_avg"};
constexpr std::array<std::string_view, 3> kParamKeys{"frequency_hz", "sensing_t0_s", "p_max_dbm"};

std::string_view config_key(SweepParam p) { return kParamKeys[static_cast<std::size_t>(p)]; }

ScenarioConfig point_config(const ScenarioConfig& base, SweepParam param, double value,
                            std::uint64_t seed) {
  ScenarioConfig cfg = base;
  cfg.channel_seed = static_cast<std::int64_t>(seed);
  set_numeric(cfg, config_key(param), value);
  return cfg;
}

// Channels and precoder do not depend on any sweepable key, so every point
// shares one draw.
struct SharedLink {
  ChannelSet channels;
  Precoder precoder;
};

Problem point_problem(const ScenarioConfig& cfg, const SharedLink& link) {
  Problem p;
  p.system.budget = make_budget(cfg);
  p.system.compute = make_compute_params(cfg);
  p.system.channels = link.channels;
  p.system.precoder = link.precoder;
  p.system.reference_beam.distance_d_p = cfg.reference_distance_m;
  p.system.sensing = make_sensing_params(cfg);
  p.surrogate = make_surrogate(cfg);
  return p;
}

SweepRow blank_row(const SweepSpec& spec, double value, Scheme s, std::string status) {
  SweepRow r;
  r.param = std::string(param_name(spec.parameter));
  r.value = value;
  r.scheme = s;
  r.status = std::move(status);
  return r;
}

std::vector<SweepRow> run_point(const ScenarioConfig& base, const SweepSpec& spec, int index,
                                std::uint64_t seed, const SharedLink& link) {
  const double value = sweep_value(spec, index);
  std::vector<Scheme> schemes = spec.schemes;
  std::sort(schemes.begin(), schemes.end());

  std::vector<SweepRow> rows;
  ScenarioConfig cfg;
  try {
    cfg = point_config(base, spec.parameter, value, seed);
    validate(cfg);
  } catch (const ConfigError&) {
    for (Scheme s : schemes) rows.push_back(blank_row(spec, value, s, "invalid"));
    return rows;
  }
  const Problem problem = point_problem(cfg, link);

  for (Scheme s : schemes) {
    SweepRow row = blank_row(spec, value, s, "ok");
    try {
      Solution sol;
      switch (s) {
        case Scheme::Proposed: {
          AOResult res = ao_solve(problem, make_ao_config(cfg));
          row.iterations = res.trace.iterations_used;
          sol = std::move(res.solution);
          break;
        }
        case Scheme::FixedL1:
          sol = baseline_fixed_l1(problem);
          break;
        case Scheme::FixedPrMin:
          sol = baseline_fixed_prmin(problem);
          break;
        case Scheme::Oracle:
          sol = brute_force_oracle(problem, cfg.oracle_grid_points);
          break;
      }
      row.mpjpe_cm = sol.mpjpe_cm;
      row.depth_l = sol.allocation.depth_l;
      row.p_r_w = sol.allocation.sensing_power_p_r;
      row.p_c_total_w = sol.allocation.total_comm_power();
    } catch (const InfeasibleError&) {
      row.status = "infeasible";
    }
    rows.push_back(std::move(row));
  }

  const auto oracle = std::find_if(rows.begin(), rows.end(), [](const SweepRow& r) {
    return r.scheme == Scheme::Oracle && r.status == "ok";
  });
  if (oracle != rows.end()) {
    const double ref = *oracle->mpjpe_cm;
    for (auto& r : rows) {
      if (r.status == "ok") r.oracle_gap_cm = *r.mpjpe_cm - ref;
    }
  }
  return rows;
}

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) {
    return csv::format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

}  // namespace

std::string_view scheme_name(Scheme s) { return kSchemeNames[static_cast<std::size_t>(s)]; }

Scheme parse_scheme(std::string_view name) {
  for (std::size_t i = 0; i < kSchemeNames.size(); ++i) {
    if (kSchemeNames[i] == name) return static_cast<Scheme>(i);
  }
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected proposed, fixed_l1, fixed_prmin or oracle)");
}

std::string_view param_name(SweepParam p) { return kParamNames[static_cast<std::size_t>(p)]; }

SweepParam parse_sweep_param(std::string_view name) {
  for (std::size_t i = 0; i < kParamNames.size(); ++i) {
    if (kParamNames[i] == name) return static_cast<SweepParam>(i);
  }
  throw ConfigError("unknown sweep parameter '" + std::string(name) +
                    "' (expected frequency_f, sensing_t0 or p_max_avg)");
}

void validate(const SweepSpec& spec) {
  if (!std::isfinite(spec.from) || !std::isfinite(spec.to) || !(spec.from < spec.to)) {
    throw ConfigError("sweep range needs finite from < to");
  }
  if (spec.steps < 2) throw ConfigError("sweep needs steps >= 2");
  if (spec.schemes.empty()) throw ConfigError("sweep needs at least one scheme");
  std::vector<Scheme> sorted = spec.schemes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("sweep scheme list contains duplicates");
  }
}

double sweep_value(const SweepSpec& spec, int index) {
  if (index == spec.steps - 1) return spec.to;
  return spec.from + (spec.to - spec.from) * (static_cast<double>(index) / (spec.steps - 1));
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec,
                                std::uint64_t seed, int threads) {
  validate(spec);
  validate(cfg);
  ScenarioConfig seeded = cfg;
  seeded.channel_seed = static_cast<std::int64_t>(seed);
  SharedLink link;
  link.channels = make_channels(seeded);
  link.precoder = zf_precoder(link.channels);

  std::vector<std::vector<SweepRow>> per_point(static_cast<std::size_t>(spec.steps));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < spec.steps && !failed; i = next.fetch_add(1)) {
      try {
        per_point[static_cast<std::size_t>(i)] = run_point(cfg, spec, i, seed, link);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, spec.steps);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (auto& point : per_point) {
    for (auto& r : point) rows.push_back(std::move(r));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.param << ',' << csv::format_double(r.value) << ',' << scheme_name(r.scheme) << ','
        << r.status << ',' << optional_field(r.mpjpe_cm) << ',' << optional_field(r.depth_l) << ','
        << optional_field(r.p_r_w) << ',' << optional_field(r.p_c_total_w) << ','
        << optional_field(r.iterations) << ',' << optional_field(r.oracle_gap_cm) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sweep CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepHeader) throw ConfigError("sweep CSV header mismatch: '" + line + "'");

  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto where = "sweep CSV line " + std::to_string(line_no);
    const auto f = csv::split_line(line);
    if (f.size() != 10) throw ConfigError(where + ": expected 10 fields");

    const auto opt_double = [&](const std::string& s, const char* col) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      auto v = csv::to_double(s);
      if (!v) throw ConfigError(where + ": bad " + col + " '" + s + "'");
      return v;
    };
    const auto opt_int = [&](const std::string& s, const char* col) -> std::optional<int> {
      if (s.empty()) return std::nullopt;
      auto v = csv::to_integer(s);
      if (!v) throw ConfigError(where + ": bad " + col + " '" + s + "'");
      return static_cast<int>(*v);
    };

    SweepRow r;
    r.param = f[0];
    parse_sweep_param(r.param);
    const auto value = opt_double(f[1], "value");
    if (!value) throw ConfigError(where + ": missing value");
    r.value = *value;
    r.scheme = parse_scheme(f[2]);
    r.status = f[3];
    if (r.status != "ok" && r.status != "infeasible" && r.status != "invalid") {
      throw ConfigError(where + ": bad status '" + r.status + "'");
    }
    r.mpjpe_cm = opt_double(f[4], "mpjpe_cm");
    r.depth_l = opt_int(f[5], "depth_l");
    r.p_r_w = opt_double(f[6], "p_r_w");
    r.p_c_total_w = opt_double(f[7], "p_c_total_w");
    r.iterations = opt_int(f[8], "iterations");
    r.oracle_gap_cm = opt_double(f[9], "oracle_gap_cm");
    if (r.status == "ok" && (!r.mpjpe_cm || !r.depth_l || !r.p_r_w || !r.p_c_total_w)) {
      throw ConfigError(where + ": ok row is missing allocation fields");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

FeasibilityReport revalidate_row(const ScenarioConfig& cfg, const SweepRow& row,
                                 std::uint64_t seed) {
  if (row.status != "ok" || !row.depth_l || !row.p_r_w || !row.p_c_total_w) {
    throw ArgumentError("revalidate_row: only complete ok rows can be revalidated");
  }
  const ScenarioConfig point = point_config(cfg, parse_sweep_param(row.param), row.value, seed);
  const Problem problem = build_problem(point);
  const auto comm = min_comm_power(problem.system.channels, problem.system.precoder,
                                   problem.system.budget.snr_min_comm,
                                   problem.system.budget.p_t_total);
  Allocation alloc;
  alloc.comm_powers_p_k = comm.per_user_w;
  alloc.sensing_power_p_r = *row.p_r_w;
  alloc.depth_l = *row.depth_l;
  FeasibilityReport report = check_feasible(alloc, problem.system);
  // The row's communication total must be the one the constraints were checked with.
  const double drift = std::abs(alloc.total_comm_power() - *row.p_c_total_w);
  report.constraints.push_back(
      {"p_c_total", kMarginTolerance * std::max(1.0, *row.p_c_total_w) - drift});
  return report;
}

}  // namespace iscc
