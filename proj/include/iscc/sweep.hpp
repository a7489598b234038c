// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iscc/scenario.hpp"

namespace iscc {

enum class Scheme { Proposed, FixedL1, FixedPrMin, Oracle };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);  // throws ConfigError

/// Sweep axis names and the config key each one drives.
enum class SweepParam { FrequencyF, SensingT0, PMaxAvg };

std::string_view param_name(SweepParam p);
SweepParam parse_sweep_param(std::string_view name);  // throws ConfigError

struct SweepSpec {
  SweepParam parameter = SweepParam::FrequencyF;
  double from = 50e6;
  double to = 250e6;
  int steps = 9;
  std::vector<Scheme> schemes{Scheme::Proposed, Scheme::FixedL1, Scheme::FixedPrMin};
};

void validate(const SweepSpec& spec);

/// The i-th of `steps` uniformly spaced values.
double sweep_value(const SweepSpec& spec, int index);

struct SweepRow {
  std::string param;
  double value = 0.0;
  Scheme scheme = Scheme::Proposed;
  std::string status;  // ok | infeasible | invalid
  std::optional<double> mpjpe_cm;
  std::optional<int> depth_l;
  std::optional<double> p_r_w;
  std::optional<double> p_c_total_w;
  std::optional<int> iterations;
  std::optional<double> oracle_gap_cm;
};

inline constexpr std::string_view kSweepHeader =
    "param,value,scheme,status,mpjpe_cm,depth_l,p_r_w,p_c_total_w,iterations,oracle_gap_cm";

/// One row per (value, scheme), ordered by value index then scheme. `threads`
/// <= 0 uses the hardware concurrency. Output does not depend on `threads`.
/// `seed` drives the channel draw shared by every sweep point.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec,
                                std::uint64_t seed, int threads = 0);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Rebuilds the sweep point's system and re-runs check_feasible on an ok row.
FeasibilityReport revalidate_row(const ScenarioConfig& cfg, const SweepRow& row,
                                 std::uint64_t seed);

}  // namespace iscc
