// SPDX-License-Identifier: Apache-2.0
//
// Compute latency/energy model and constraint checking for full allocations.
#pragma once

#include <string>
#include <vector>

#include "iscc/geometry.hpp"
#include "iscc/phy_array.hpp"
#include "iscc/sensing_model.hpp"

namespace iscc {

struct ComputeParams {
  double cycles_pointcloud_c_pc = 128.0 * 256 * 8;
  double cycles_base_c_b = 384.0 * 96 * 8;
  double cycles_per_layer_c_l = 384.0 * 96 * 8 * 4;
  double frequency_f = 100e6;  // Hz
  double kappa_gamma = 1e-25;  // effective switched capacitance
};

void validate(const ComputeParams& params);

/// Which part of the slot the downlink transmits in when accounting energy.
enum class CommWindow { FullSlot, SensingWindow };

struct Budget {
  double slot_t = 0.1;           // s
  double sensing_t0 = 0.05;      // s
  double p_max_avg = dbm_to_watts(28.0);  // W
  double p_t_total = 1.0;        // W
  double snr_min_comm = 5.0;
  double gamma_min_det = db_to_linear(-5.0);
  int l_max = 6;
  CommWindow comm_window = CommWindow::FullSlot;
};

void validate(const Budget& budget);

struct Allocation {
  std::vector<double> comm_powers_p_k;
  double sensing_power_p_r = 0.0;
  int depth_l = 1;

  double total_comm_power() const;
};

double tau_comp(int depth, const ComputeParams& params);
double e_comp(int depth, const ComputeParams& params);
double comm_energy(double total_comm_power_w, const Budget& budget);

struct ReducedBudget {
  double p_t_tilde;    // W available for sensing
  double e_max_tilde;  // J available for sensing and compute
};

/// Budget left after reserving the minimum communication power.
ReducedBudget reduced_budget(double p_c_min_w, const Budget& budget);

/// Margins at or above -kMarginTolerance count as satisfied.
inline constexpr double kMarginTolerance = 1e-12;

struct ConstraintMargin {
  std::string name;
  double margin;  // >= 0 satisfied; units depend on the constraint

  bool satisfied() const { return margin >= -kMarginTolerance; }
  bool binding() const { return margin >= -kMarginTolerance && margin <= kMarginTolerance; }
};

struct FeasibilityReport {
  std::vector<ConstraintMargin> constraints;

  bool feasible() const;
  /// Names of violated constraints, comma separated.
  std::string violations() const;
  const ConstraintMargin& at(const std::string& name) const;
};

/// Everything check_feasible needs besides the allocation.
struct SystemContext {
  Budget budget;
  ComputeParams compute;
  ChannelSet channels;
  Precoder precoder;
  SensingBeam reference_beam;  // target center, governs detectability
  SensingParams sensing;
};

/// Evaluates the six constraints of the joint problem: latency, energy, per-user
/// communication SNR, sensing detectability, depth range and total transmit power.
FeasibilityReport check_feasible(const Allocation& alloc, const SystemContext& ctx);

}  // namespace iscc
