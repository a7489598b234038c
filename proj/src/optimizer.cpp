// SPDX-License-Identifier: Apache-2.0
#include "iscc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "iscc/errors.hpp"

namespace iscc {
namespace {

// Absorbs rounding when a bound lands on an integer, e.g. L_E(P_E(L)) == L.
constexpr double kFloorSlack = 1e-9;

struct Prepared {
  BoundsContext bounds;
  CommPowerSolution comm;
};

Prepared prepare(const Problem& problem) {
  const auto& sys = problem.system;
  validate(sys.budget);
  validate(sys.compute);
  validate(sys.sensing);
  validate(problem.surrogate);
  if (problem.surrogate.l_max != sys.budget.l_max) {
    throw ArgumentError("surrogate and budget disagree on L_max");
  }

  Prepared p;
  p.comm = min_comm_power(sys.channels, sys.precoder, sys.budget.snr_min_comm,
                          sys.budget.p_t_total);
  p.bounds.budget = sys.budget;
  p.bounds.compute = sys.compute;
  p.bounds.reduced = reduced_budget(p.comm.total_w, sys.budget);
  p.bounds.p_r_min_w = min_detect_power(sys.reference_beam, sys.sensing, sys.budget.gamma_min_det);
  return p;
}

Solution finalize(const Problem& problem, const CommPowerSolution& comm, double p_r, int depth,
                  const char* scheme) {
  Solution s;
  s.allocation.comm_powers_p_k = comm.per_user_w;
  s.allocation.sensing_power_p_r = p_r;
  s.allocation.depth_l = depth;
  s.report = check_feasible(s.allocation, problem.system);
  if (!s.report.feasible()) {
    const std::string v = s.report.violations();
    throw InfeasibleError(v.substr(0, v.find(',')),
                          std::string(scheme) + ": allocation violates " + v);
  }
  s.mpjpe_cm = surrogate_mpjpe(problem.surrogate, p_r, depth);
  return s;
}

}  // namespace

double l_tau_bound(const Budget& b, const ComputeParams& c) {
  return (c.frequency_f * (b.slot_t - b.sensing_t0) - c.cycles_pointcloud_c_pc -
          c.cycles_base_c_b) /
         c.cycles_per_layer_c_l;
}

double l_e_bound(double p_r_w, double e_max_tilde, const Budget& b, const ComputeParams& c) {
  const double f2 = c.frequency_f * c.frequency_f;
  return (e_max_tilde - p_r_w * b.sensing_t0 -
          c.kappa_gamma * (c.cycles_pointcloud_c_pc + c.cycles_base_c_b) * f2) /
         (c.kappa_gamma * c.cycles_per_layer_c_l * f2);
}

int l_star(double p_r_w, const BoundsContext& ctx) {
  const double bound =
      std::min({static_cast<double>(ctx.budget.l_max), l_tau_bound(ctx.budget, ctx.compute),
                l_e_bound(p_r_w, ctx.reduced.e_max_tilde, ctx.budget, ctx.compute)});
  if (!(bound >= 1.0)) return 1;  // also catches NaN
  return std::max(1, static_cast<int>(std::floor(bound + kFloorSlack)));
}

double p_e_bound(int depth, double e_max_tilde, const Budget& b, const ComputeParams& c) {
  return (e_max_tilde - e_comp(depth, c)) / b.sensing_t0;
}

double p_r_star(int depth, const BoundsContext& ctx) {
  const double p = std::min(ctx.reduced.p_t_tilde,
                            p_e_bound(depth, ctx.reduced.e_max_tilde, ctx.budget, ctx.compute));
  if (p < ctx.p_r_min_w) {
    std::ostringstream msg;
    msg << "sensing_snr: at depth " << depth << " at most " << p
        << " W is available for sensing, below the detectability floor " << ctx.p_r_min_w << " W";
    throw InfeasibleError("sensing_snr", msg.str());
  }
  return p;
}

BoundsContext make_bounds_context(const Problem& problem) { return prepare(problem).bounds; }

AOResult ao_solve(const Problem& problem, const AOConfig& config) {
  if (config.i_max < 1 || !(config.epsilon > 0.0)) {
    throw ArgumentError("AO config needs i_max >= 1 and epsilon > 0");
  }
  const Prepared prep = prepare(problem);
  const BoundsContext& ctx = prep.bounds;
  auto value = [&](double p, int l) { return surrogate_mpjpe(problem.surrogate, p, l); };

  AOTrace trace;
  int depth = 1;
  double p_r = ctx.p_r_min_w;
  trace.iterates.push_back({depth, p_r, value(p_r, depth)});

  bool cycled = false;
  for (int i = 1; i <= config.i_max; ++i) {
    int next_depth;
    double next_p;
    if (config.order == UpdateOrder::DepthFirst) {
      next_depth = l_star(p_r, ctx);
      next_p = p_r_star(next_depth, ctx);
    } else {
      next_p = p_r_star(depth, ctx);
      next_depth = l_star(next_p, ctx);
    }
    trace.iterates.push_back({next_depth, next_p, value(next_p, next_depth)});
    trace.iterations_used = i;

    if (next_depth == depth && std::abs(next_p - p_r) <= config.epsilon) {
      trace.converged = true;
      depth = next_depth;
      p_r = next_p;
      break;
    }
    for (std::size_t k = 0; k + 1 < trace.iterates.size() - 1; ++k) {
      if (trace.iterates[k].depth == next_depth && trace.iterates[k].p_r_w == next_p) {
        cycled = true;
      }
    }
    depth = next_depth;
    p_r = next_p;
    if (cycled) break;
  }

  if (!trace.converged) {
    const auto best = std::min_element(
        trace.iterates.begin(), trace.iterates.end(),
        [](const AOIterate& a, const AOIterate& b) { return a.mpjpe_cm < b.mpjpe_cm; });
    depth = best->depth;
    p_r = best->p_r_w;
  }

  return {finalize(problem, prep.comm, p_r, depth, "ao_solve"), std::move(trace)};
}

Solution brute_force_oracle(const Problem& problem, int p_r_grid_size) {
  if (p_r_grid_size < 2) throw ArgumentError("oracle grid needs at least 2 points");
  const Prepared prep = prepare(problem);
  const BoundsContext& ctx = prep.bounds;
  const double lo = ctx.p_r_min_w;
  const double hi = ctx.reduced.p_t_tilde;
  if (hi < lo) {
    throw InfeasibleError("sensing_snr", "oracle: P_t~ is below the detectability floor");
  }

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(p_r_grid_size) + ctx.budget.l_max + 1);
  for (int i = 0; i < p_r_grid_size; ++i) {
    grid.push_back(lo + (hi - lo) * (static_cast<double>(i) / (p_r_grid_size - 1)));
  }
  grid.back() = hi;
  for (int l = 1; l <= ctx.budget.l_max; ++l) {
    const double pe = p_e_bound(l, ctx.reduced.e_max_tilde, ctx.budget, ctx.compute);
    const double corner = std::min(hi, pe);
    if (corner >= lo) grid.push_back(corner);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  Allocation candidate;
  candidate.comm_powers_p_k = prep.comm.per_user_w;
  double best_m = std::numeric_limits<double>::infinity();
  int best_l = 0;
  double best_p = 0.0;
  std::vector<double> values(grid.size());
  for (int l = 1; l <= ctx.budget.l_max; ++l) {
    surrogate_mpjpe_batch(problem.surrogate, l, grid, values);
    candidate.depth_l = l;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      // strict < keeps the smaller depth, then the smaller power, on ties
      if (!(values[i] < best_m)) continue;
      candidate.sensing_power_p_r = grid[i];
      if (!check_feasible(candidate, problem.system).feasible()) continue;
      best_m = values[i];
      best_l = l;
      best_p = grid[i];
    }
  }
  if (best_l == 0) {
    throw InfeasibleError("energy", "oracle: no feasible (depth, sensing power) pair");
  }
  return finalize(problem, prep.comm, best_p, best_l, "oracle");
}

Solution baseline_fixed_l1(const Problem& problem) {
  const Prepared prep = prepare(problem);
  return finalize(problem, prep.comm, p_r_star(1, prep.bounds), 1, "fixed_l1");
}

Solution baseline_fixed_prmin(const Problem& problem) {
  const Prepared prep = prepare(problem);
  const double p = prep.bounds.p_r_min_w;
  return finalize(problem, prep.comm, p, l_star(p, prep.bounds), "fixed_prmin");
}

}  // namespace iscc
