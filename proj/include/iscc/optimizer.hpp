// SPDX-License-Identifier: Apache-2.0
//
// Closed-form depth/power updates, the alternating-optimization solver, an
// exhaustive reference search and the two fixed-policy baselines.
#pragma once

#include <vector>

#include "iscc/pose_pipeline.hpp"
#include "iscc/resource_model.hpp"

namespace iscc {

enum class UpdateOrder { DepthFirst, PowerFirst };

struct AOConfig {
  int i_max = 20;
  double epsilon = 1e-9;  // W
  UpdateOrder order = UpdateOrder::DepthFirst;
};

struct AOIterate {
  int depth;
  double p_r_w;
  double mpjpe_cm;
};

struct AOTrace {
  std::vector<AOIterate> iterates;  // iterates[0] is the initialization
  bool converged = false;
  int iterations_used = 0;
};

/// Quantities shared by every update step once P_c^min is known.
struct BoundsContext {
  Budget budget;
  ComputeParams compute;
  ReducedBudget reduced;
  double p_r_min_w;
};

/// The full problem: system model plus the error surrogate being minimized.
struct Problem {
  SystemContext system;
  SurrogateModel surrogate;
};

struct Solution {
  Allocation allocation;
  double mpjpe_cm;
  FeasibilityReport report;
};

struct AOResult {
  Solution solution;
  AOTrace trace;
};

/// Real-valued depth bound from the latency constraint (not floored).
double l_tau_bound(const Budget& budget, const ComputeParams& compute);

/// Real-valued depth bound from the reduced energy constraint at sensing power p_r.
double l_e_bound(double p_r_w, double e_max_tilde, const Budget& budget,
                 const ComputeParams& compute);

/// max{1, floor(min{L_max, L_tau, L_E(p_r)})}
int l_star(double p_r_w, const BoundsContext& ctx);

/// Sensing power bound from the reduced energy constraint at depth L.
double p_e_bound(int depth, double e_max_tilde, const Budget& budget,
                 const ComputeParams& compute);

/// min{P_t~, P_E(L)}; throws InfeasibleError when it falls below P_r^min.
double p_r_star(int depth, const BoundsContext& ctx);

/// Minimum communication power, reduced budget and detectability floor for a problem.
BoundsContext make_bounds_context(const Problem& problem);

AOResult ao_solve(const Problem& problem, const AOConfig& config = {});

/// Exhaustive search over every depth and a uniform p_r grid on [P_r^min, P_t~]
/// augmented with the closed-form corner points.
Solution brute_force_oracle(const Problem& problem, int p_r_grid_size);

Solution baseline_fixed_l1(const Problem& problem);
Solution baseline_fixed_prmin(const Problem& problem);

}  // namespace iscc
