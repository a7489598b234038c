// SPDX-License-Identifier: Apache-2.0
//
// CLI subcommand bodies. Each returns the process exit status:
// 0 success, 1 infeasible, 2 configuration error.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "iscc/pose_pipeline.hpp"
#include "iscc/scenario.hpp"
#include "iscc/sweep.hpp"

namespace iscc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitConfig = 2;

struct SolveOptions {
  bool oracle = false;
  bool json = false;
};

int cmd_solve(const ScenarioConfig& cfg, const SolveOptions& options, std::ostream& out,
              std::ostream& err);

int cmd_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, std::uint64_t seed,
              int threads, const std::filesystem::path& out_csv, std::ostream& err);

int cmd_synth_cloud(const std::filesystem::path& skeleton_csv,
                    const std::filesystem::path& out_csv, const ScenarioConfig& cfg,
                    std::uint64_t seed, std::optional<double> power_w, std::ostream& err);

int cmd_calibrate(const std::filesystem::path& targets_csv, const std::filesystem::path& out_path,
                  const ScenarioConfig& base, std::ostream& out, std::ostream& err);

/// `frame,joint,x,y,z` with frames and joints 0-based and contiguous.
std::vector<SkeletonFrame> read_skeleton_csv(std::istream& in, std::string_view source);
std::vector<CalibrationTarget> read_targets_csv(std::istream& in, std::string_view source);
void write_point_cloud_csv(std::ostream& out, const std::vector<PointCloudFrame>& frames);

}  // namespace iscc
