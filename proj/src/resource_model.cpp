// SPDX-License-Identifier: Apache-2.0
#include "iscc/resource_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "iscc/errors.hpp"

namespace iscc {

void validate(const ComputeParams& p) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(p.cycles_pointcloud_c_pc) || !positive(p.cycles_base_c_b) ||
      !positive(p.cycles_per_layer_c_l) || !positive(p.frequency_f) || !positive(p.kappa_gamma)) {
    throw ArgumentError("compute parameters must all be positive and finite");
  }
}

void validate(const Budget& b) {
  if (!(b.slot_t > 0.0) || !(b.sensing_t0 > 0.0) || !(b.sensing_t0 < b.slot_t)) {
    throw ArgumentError("budget needs 0 < T0 < T");
  }
  if (!(b.p_max_avg > 0.0) || !(b.p_t_total > 0.0)) {
    throw ArgumentError("budget powers P_max and P_t must be positive");
  }
  if (!(b.snr_min_comm > 0.0) || !(b.gamma_min_det > 0.0)) {
    throw ArgumentError("SNR thresholds must be positive");
  }
  if (b.l_max < 1) throw ArgumentError("budget needs L_max >= 1");
}

double Allocation::total_comm_power() const {
  return std::accumulate(comm_powers_p_k.begin(), comm_powers_p_k.end(), 0.0);
}

double tau_comp(int depth, const ComputeParams& p) {
  if (depth < 1) throw ArgumentError("tau_comp: depth must be >= 1");
  return (p.cycles_pointcloud_c_pc + p.cycles_base_c_b + depth * p.cycles_per_layer_c_l) /
         p.frequency_f;
}

double e_comp(int depth, const ComputeParams& p) {
  if (depth < 1) throw ArgumentError("e_comp: depth must be >= 1");
  return p.kappa_gamma *
         (p.cycles_pointcloud_c_pc + p.cycles_base_c_b + depth * p.cycles_per_layer_c_l) *
         (p.frequency_f * p.frequency_f);
}

double comm_energy(double total_comm_power_w, const Budget& budget) {
  if (total_comm_power_w < 0.0) throw ArgumentError("comm_energy: negative power");
  const double window =
      budget.comm_window == CommWindow::FullSlot ? budget.slot_t : budget.sensing_t0;
  return total_comm_power_w * window;
}

ReducedBudget reduced_budget(double p_c_min_w, const Budget& budget) {
  if (p_c_min_w > budget.p_t_total) {
    throw InfeasibleError("total_power", "minimum communication power exceeds P_t");
  }
  if (p_c_min_w > budget.p_max_avg) {
    throw InfeasibleError("energy", "minimum communication power exceeds P_max");
  }
  return {budget.p_t_total - p_c_min_w,
          budget.p_max_avg * budget.slot_t - comm_energy(p_c_min_w, budget)};
}

bool FeasibilityReport::feasible() const {
  for (const auto& c : constraints) {
    if (!c.satisfied()) return false;
  }
  return true;
}

std::string FeasibilityReport::violations() const {
  std::string s;
  for (const auto& c : constraints) {
    if (c.satisfied()) continue;
    if (!s.empty()) s += ", ";
    s += c.name;
  }
  return s;
}

const ConstraintMargin& FeasibilityReport::at(const std::string& name) const {
  for (const auto& c : constraints) {
    if (c.name == name) return c;
  }
  throw ArgumentError("no constraint named '" + name + "'");
}

FeasibilityReport check_feasible(const Allocation& alloc, const SystemContext& ctx) {
  const Budget& b = ctx.budget;
  if (alloc.comm_powers_p_k.size() != ctx.channels.num_users()) {
    throw ArgumentError("check_feasible: one communication power per user required");
  }
  FeasibilityReport rep;
  const int depth = alloc.depth_l;
  const bool depth_ok = depth >= 1;
  const double p_c = alloc.total_comm_power();

  // latency and compute energy are undefined below depth 1; charge depth 1 and
  // let the depth constraint report the violation
  const int charged = depth_ok ? depth : 1;
  rep.constraints.push_back({"latency", b.slot_t - (b.sensing_t0 + tau_comp(charged, ctx.compute))});
  rep.constraints.push_back(
      {"energy", b.p_max_avg * b.slot_t -
                     (comm_energy(p_c, b) + alloc.sensing_power_p_r * b.sensing_t0 +
                      e_comp(charged, ctx.compute))});

  std::vector<double> clamped(alloc.comm_powers_p_k.size());
  for (std::size_t k = 0; k < clamped.size(); ++k) {
    clamped[k] = std::max(alloc.comm_powers_p_k[k], 0.0);
  }
  const auto snr = comm_snr(ctx.channels, ctx.precoder, clamped);
  for (std::size_t k = 0; k < snr.size(); ++k) {
    rep.constraints.push_back({"comm_snr[" + std::to_string(k) + "]", snr[k] - b.snr_min_comm});
  }

  const double snr_o = echo_snr(std::max(alloc.sensing_power_p_r, 0.0), ctx.reference_beam,
                                ctx.sensing);
  rep.constraints.push_back({"sensing_snr", snr_o - b.gamma_min_det});
  rep.constraints.push_back(
      {"depth", std::min<double>(depth - 1, b.l_max - depth)});

  const double total = alloc.sensing_power_p_r + p_c;
  double nonneg = alloc.sensing_power_p_r;
  for (double p : alloc.comm_powers_p_k) nonneg = std::min(nonneg, p);
  rep.constraints.push_back({"total_power", std::min(b.p_t_total - total, nonneg)});
  return rep;
}

}  // namespace iscc
