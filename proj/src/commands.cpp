// SPDX-License-Identifier: Apache-2.0
#include "iscc/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include <json.hpp>

#include "iscc/csv.hpp"
#include "iscc/errors.hpp"

namespace iscc {
namespace {

using nlohmann::json;

std::string fmt(double v) { return csv::format_double(v); }

json report_json(const FeasibilityReport& r) {
  json out = json::array();
  for (const auto& c : r.constraints) {
    out.push_back({{"name", c.name}, {"margin", c.margin}, {"binding", c.binding()},
                   {"satisfied", c.satisfied()}});
  }
  return out;
}

json solution_json(const Solution& s) {
  return {{"depth_l", s.allocation.depth_l},
          {"p_r_w", s.allocation.sensing_power_p_r},
          {"p_k_w", s.allocation.comm_powers_p_k},
          {"p_c_total_w", s.allocation.total_comm_power()},
          {"mpjpe_cm", s.mpjpe_cm},
          {"constraints", report_json(s.report)}};
}

void print_solution(std::ostream& out, const Solution& s) {
  out << "  depth_l      " << s.allocation.depth_l << '\n'
      << "  p_r_w        " << fmt(s.allocation.sensing_power_p_r) << '\n'
      << "  p_c_total_w  " << fmt(s.allocation.total_comm_power()) << '\n';
  for (std::size_t k = 0; k < s.allocation.comm_powers_p_k.size(); ++k) {
    out << "  p_" << k << "_w        " << fmt(s.allocation.comm_powers_p_k[k]) << '\n';
  }
  out << "  mpjpe_cm     " << fmt(s.mpjpe_cm) << '\n' << "  constraints:\n";
  for (const auto& c : s.report.constraints) {
    out << "    " << std::left << std::setw(12) << c.name << std::right << " margin "
        << fmt(c.margin) << (c.binding() ? "  (binding)" : "")
        << (c.satisfied() ? "" : "  VIOLATED") << '\n';
  }
}

std::vector<std::string> read_header(std::istream& in, std::string_view source,
                                     std::string_view expected) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(std::string(source) + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    throw ConfigError(std::string(source) + ":1: expected header '" + std::string(expected) +
                      "', got '" + line + "'");
  }
  return csv::split_line(line);
}

}  // namespace

int cmd_solve(const ScenarioConfig& cfg, const SolveOptions& options, std::ostream& out,
              std::ostream& err) {
  Problem problem;
  try {
    problem = build_problem(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SingularError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  AOResult ao;
  try {
    ao = ao_solve(problem, make_ao_config(cfg));
  } catch (const InfeasibleError& e) {
    if (options.json) {
      out << json{{"status", "infeasible"}, {"constraint", e.constraint()}, {"reason", e.what()}}
                 .dump(2)
          << '\n';
    } else {
      out << "status: infeasible\nconstraint: " << e.constraint() << "\nreason: " << e.what()
          << '\n';
    }
    return kExitInfeasible;
  }

  std::optional<Solution> oracle;
  std::string oracle_error;
  if (options.oracle) {
    try {
      oracle = brute_force_oracle(problem, cfg.oracle_grid_points);
    } catch (const InfeasibleError& e) {
      oracle_error = e.what();
    }
  }

  if (options.json) {
    json trace = json::array();
    for (const auto& it : ao.trace.iterates) {
      trace.push_back({{"depth_l", it.depth}, {"p_r_w", it.p_r_w}, {"mpjpe_cm", it.mpjpe_cm}});
    }
    json doc{{"status", "ok"},
             {"allocation", solution_json(ao.solution)},
             {"trace",
              {{"converged", ao.trace.converged},
               {"iterations", ao.trace.iterations_used},
               {"iterates", trace}}}};
    if (oracle) {
      doc["oracle"] = solution_json(*oracle);
      doc["oracle_gap_cm"] = ao.solution.mpjpe_cm - oracle->mpjpe_cm;
    } else if (options.oracle) {
      doc["oracle_error"] = oracle_error;
    }
    out << doc.dump(2) << '\n';
    return kExitOk;
  }

  out << "status: ok\nallocation:\n";
  print_solution(out, ao.solution);
  out << "trace: " << (ao.trace.converged ? "converged" : "not converged") << " after "
      << ao.trace.iterations_used << " iteration(s)\n";
  for (std::size_t i = 0; i < ao.trace.iterates.size(); ++i) {
    const auto& it = ao.trace.iterates[i];
    out << "  [" << i << "] depth_l " << it.depth << "  p_r_w " << fmt(it.p_r_w) << "  mpjpe_cm "
        << fmt(it.mpjpe_cm) << '\n';
  }
  if (oracle) {
    out << "oracle:\n";
    print_solution(out, *oracle);
    out << "oracle_gap_cm: " << fmt(ao.solution.mpjpe_cm - oracle->mpjpe_cm) << '\n';
  } else if (options.oracle) {
    out << "oracle: failed (" << oracle_error << ")\n";
  }
  return kExitOk;
}

int cmd_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, std::uint64_t seed, int threads,
              const std::filesystem::path& out_csv, std::ostream& err) {
  std::vector<SweepRow> rows;
  try {
    rows = run_sweep(cfg, spec, seed, threads);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SingularError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ArgumentError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::ofstream out(out_csv, std::ios::binary);
  if (!out) {
    err << "config error: cannot write '" << out_csv.string() << "'\n";
    return kExitConfig;
  }
  write_sweep_csv(out, rows);
  std::size_t infeasible = 0;
  for (const auto& r : rows) infeasible += r.status != "ok";
  err << rows.size() << " rows written to " << out_csv.string();
  if (infeasible > 0) err << " (" << infeasible << " not ok)";
  err << '\n';
  return kExitOk;
}

std::vector<SkeletonFrame> read_skeleton_csv(std::istream& in, std::string_view source) {
  read_header(in, source, "frame,joint,x,y,z");
  std::map<long long, std::map<long long, Vec3>> frames;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto f = csv::split_line(line);
    if (f.size() != 5) throw ConfigError(where + ": expected 5 fields, got " + std::to_string(f.size()));
    const auto frame = csv::to_integer(f[0]);
    const auto joint = csv::to_integer(f[1]);
    const auto x = csv::to_double(f[2]);
    const auto y = csv::to_double(f[3]);
    const auto z = csv::to_double(f[4]);
    if (!frame || !joint || *frame < 0 || *joint < 0) {
      throw ConfigError(where + ": frame and joint must be non-negative integers");
    }
    if (!x || !y || !z || !std::isfinite(*x) || !std::isfinite(*y) || !std::isfinite(*z)) {
      throw ConfigError(where + ": coordinates must be finite numbers");
    }
    if (!frames[*frame].emplace(*joint, Vec3{*x, *y, *z}).second) {
      throw ConfigError(where + ": duplicate (frame, joint) pair");
    }
  }
  if (frames.empty()) throw ConfigError(std::string(source) + ": no skeleton rows");

  std::vector<SkeletonFrame> out;
  const std::size_t joints = frames.begin()->second.size();
  long long expect_frame = 0;
  for (const auto& [f, js] : frames) {
    if (f != expect_frame++) {
      throw ConfigError(std::string(source) + ": frame indices must be contiguous from 0 (missing " +
                        std::to_string(expect_frame - 1) + ")");
    }
    if (js.size() != joints || js.rbegin()->first != static_cast<long long>(joints) - 1) {
      throw ConfigError(std::string(source) + ": frame " + std::to_string(f) +
                        " does not have joints 0.." + std::to_string(joints - 1));
    }
    SkeletonFrame sf;
    for (const auto& [j, p] : js) sf.joints.push_back(p);
    out.push_back(std::move(sf));
  }
  return out;
}

std::vector<CalibrationTarget> read_targets_csv(std::istream& in, std::string_view source) {
  read_header(in, source, "p_r_w,depth,mpjpe_cm");
  std::vector<CalibrationTarget> out;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto f = csv::split_line(line);
    if (f.size() != 3) throw ConfigError(where + ": expected 3 fields");
    const auto p = csv::to_double(f[0]);
    const auto d = csv::to_integer(f[1]);
    const auto m = csv::to_double(f[2]);
    if (!p || !(*p > 0.0) || !std::isfinite(*p)) throw ConfigError(where + ": p_r_w must be > 0");
    if (!d || *d < 1) throw ConfigError(where + ": depth must be an integer >= 1");
    if (!m || !(*m > 0.0) || !std::isfinite(*m)) throw ConfigError(where + ": mpjpe_cm must be > 0");
    out.push_back({*p, static_cast<int>(*d), *m});
  }
  return out;
}

void write_point_cloud_csv(std::ostream& out, const std::vector<PointCloudFrame>& frames) {
  out << "frame,point,beam,x,y,z\n";
  for (const auto& fr : frames) {
    for (std::size_t i = 0; i < fr.points.size(); ++i) {
      const auto& p = fr.points[i];
      out << fr.frame_index << ',' << i << ',' << fr.source_beam_index[i] << ',' << fmt(p[0])
          << ',' << fmt(p[1]) << ',' << fmt(p[2]) << '\n';
    }
  }
}

int cmd_synth_cloud(const std::filesystem::path& skeleton_csv,
                    const std::filesystem::path& out_csv, const ScenarioConfig& cfg,
                    std::uint64_t seed, std::optional<double> power_w, std::ostream& err) {
  std::vector<SkeletonFrame> skeleton;
  double p_r = 0.0;
  try {
    validate(cfg);
    std::ifstream in(skeleton_csv, std::ios::binary);
    if (!in) throw ConfigError("cannot open skeleton file '" + skeleton_csv.string() + "'");
    skeleton = read_skeleton_csv(in, skeleton_csv.string());
    if (power_w) {
      if (!std::isfinite(*power_w) || !(*power_w > 0.0)) {
        throw ConfigError("--power-w must be a positive finite number");
      }
      p_r = *power_w;
    } else {
      p_r = ao_solve(build_problem(cfg), make_ao_config(cfg)).solution.allocation.sensing_power_p_r;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "infeasible (" << e.constraint() << "): " << e.what() << '\n';
    return kExitInfeasible;
  }

  std::vector<PointCloudFrame> frames;
  try {
    const DirectionIndex beams(make_codebook(cfg));
    const SensingParams sensing = make_sensing_params(cfg);
    SynthesisOptions options = make_synthesis_options(cfg);
    for (std::size_t f = 0; f < skeleton.size(); ++f) {
      RngStream rng = derive_stream(seed, f);
      options.frame_index = static_cast<int>(f);
      frames.push_back(synthesize_frame(skeleton[f].joints, beams, p_r, sensing, options, rng));
    }
  } catch (const DegenerateGeometryError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ofstream out(out_csv, std::ios::binary);
  if (!out) {
    err << "config error: cannot write '" << out_csv.string() << "'\n";
    return kExitConfig;
  }
  write_point_cloud_csv(out, frames);
  err << "synthesized " << skeleton.size() << " frame(s) at p_r = " << fmt(p_r) << " W\n";
  return kExitOk;
}

int cmd_calibrate(const std::filesystem::path& targets_csv, const std::filesystem::path& out_path,
                  const ScenarioConfig& base, std::ostream& out, std::ostream& err) {
  CalibrationResult fit;
  std::vector<CalibrationTarget> targets;
  try {
    validate(base);
    std::ifstream in(targets_csv, std::ios::binary);
    if (!in) throw ConfigError("cannot open targets file '" + targets_csv.string() + "'");
    targets = read_targets_csv(in, targets_csv.string());
    fit = calibrate_surrogate(targets, make_surrogate(base));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CalibrationError& e) {
    err << "calibration error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "config error: cannot write '" << out_path.string() << "'\n";
    return kExitConfig;
  }
  const auto& m = fit.model;
  file << "# fitted error surrogate\n"
       << "floor_a_cm = " << fmt(m.floor_a) << '\n'
       << "floor_b_cm = " << fmt(m.floor_b) << '\n'
       << "floor_rho = " << fmt(m.floor_rho) << '\n'
       << "jitter_kappa = " << fmt(m.jitter_kappa) << '\n'
       << "reference_distance_m = " << fmt(m.reference_distance_d_o) << '\n';

  out << "floor_a_cm " << fmt(m.floor_a) << "\nfloor_b_cm " << fmt(m.floor_b) << "\nfloor_rho "
      << fmt(m.floor_rho) << "\njitter_kappa " << fmt(m.jitter_kappa) << "\nresiduals:\n";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out << "  p_r_w " << fmt(targets[i].p_r_w) << "  depth " << targets[i].depth << "  target "
        << fmt(targets[i].mpjpe_cm) << "  residual_cm " << fmt(fit.residuals_cm[i]) << '\n';
  }
  return kExitOk;
}

}  // namespace iscc
