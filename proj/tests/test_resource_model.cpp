// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "iscc/errors.hpp"
#include "iscc/resource_model.hpp"
#include "iscc/scenario.hpp"

using namespace iscc;

TEST_CASE("compute latency") {
  const ComputeParams c;
  CHECK(c.cycles_pointcloud_c_pc == 262144.0);
  CHECK(c.cycles_base_c_b == 294912.0);
  CHECK(c.cycles_per_layer_c_l == 1179648.0);
  CHECK(tau_comp(3, c) == doctest::Approx(0.04096).epsilon(1e-14));
  CHECK(tau_comp(1, c) == doctest::Approx(1736704.0 / 1e8).epsilon(1e-14));
  for (int l = 1; l < 6; ++l) {
    CHECK(tau_comp(l + 1, c) - tau_comp(l, c) == doctest::Approx(c.cycles_per_layer_c_l / 1e8).epsilon(1e-12));
    CHECK(tau_comp(l + 1, c) > tau_comp(l, c));
  }
  CHECK_THROWS_AS(tau_comp(0, c), ArgumentError);
}

TEST_CASE("compute energy") {
  const ComputeParams c;
  CHECK(e_comp(3, c) == doctest::Approx(4.096e-3).epsilon(1e-12));
  const double slope = c.kappa_gamma * c.cycles_per_layer_c_l * 1e16;
  for (int l = 1; l <= 6; ++l) {
    CHECK(e_comp(l, c) == doctest::Approx(c.kappa_gamma * 1e24 * tau_comp(l, c)).epsilon(1e-13));
    if (l < 6) CHECK(e_comp(l + 1, c) - e_comp(l, c) == doctest::Approx(slope).epsilon(1e-12));
  }
  ComputeParams fast = c;
  fast.frequency_f = 2.37e8;
  for (int l = 1; l <= 6; ++l) {
    const double f3 = fast.frequency_f * fast.frequency_f * fast.frequency_f;
    CHECK(e_comp(l, fast) == doctest::Approx(fast.kappa_gamma * f3 * tau_comp(l, fast)).epsilon(1e-13));
  }
}

TEST_CASE("communication energy and budget reduction") {
  Budget b;
  CHECK(comm_energy(0.0, b) == 0.0);
  CHECK(comm_energy(0.05, b) == doctest::Approx(5e-3).epsilon(1e-15));
  CHECK(comm_energy(0.1, b) == doctest::Approx(2 * comm_energy(0.05, b)).epsilon(1e-15));
  b.comm_window = CommWindow::SensingWindow;
  CHECK(comm_energy(0.05, b) == doctest::Approx(2.5e-3).epsilon(1e-15));

  const Budget d;
  const auto r0 = reduced_budget(0.0, d);
  CHECK(r0.p_t_tilde == 1.0);
  CHECK(r0.e_max_tilde == doctest::Approx(d.p_max_avg * 0.1).epsilon(1e-15));
  const auto r = reduced_budget(0.031, d);
  CHECK(r.p_t_tilde == doctest::Approx(0.969).epsilon(1e-15));
  CHECK(r.e_max_tilde == doctest::Approx(0.0600).epsilon(2e-3));
  try {
    reduced_budget(1.5, d);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.constraint() == "total_power");
  }
}

namespace {

SystemContext default_system() { return build_problem(ScenarioConfig{}).system; }

Allocation min_power_allocation(const SystemContext& s, double p_r, int depth) {
  const auto comm = min_comm_power(s.channels, s.precoder, s.budget.snr_min_comm, s.budget.p_t_total);
  Allocation a;
  a.comm_powers_p_k = comm.per_user_w;
  a.sensing_power_p_r = p_r;
  a.depth_l = depth;
  return a;
}

}  // namespace

TEST_CASE("feasibility with zero powers violates only the SNR constraints") {
  SystemContext s = default_system();
  s.budget.p_max_avg = 100.0;
  s.budget.slot_t = 10.0;
  Allocation a;
  a.comm_powers_p_k.assign(4, 0.0);
  a.depth_l = 1;
  const auto rep = check_feasible(a, s);
  CHECK_FALSE(rep.feasible());
  for (const auto& c : rep.constraints) {
    const bool is_snr = c.name.rfind("comm_snr", 0) == 0 || c.name == "sensing_snr";
    CHECK(c.satisfied() == !is_snr);
  }
  CHECK(rep.violations() == "comm_snr[0], comm_snr[1], comm_snr[2], comm_snr[3], sensing_snr");
}

TEST_CASE("depth 4 at 100 MHz breaks latency") {
  const SystemContext s = default_system();
  const auto rep = check_feasible(min_power_allocation(s, 0.1, 4), s);
  CHECK_FALSE(rep.at("latency").satisfied());
  CHECK(rep.at("latency").margin == doctest::Approx(0.05 - 0.05275648).epsilon(1e-9));
  CHECK(check_feasible(min_power_allocation(s, 0.1, 3), s).feasible());
}

TEST_CASE("feasibility is monotone in sensing power and depth for budget constraints") {
  const SystemContext s = default_system();
  for (double p = 1e-3; p < 1.0; p += 0.05) {
    for (int l = 1; l <= 6; ++l) {
      const auto hi = check_feasible(min_power_allocation(s, p, l), s);
      for (const auto& [dp, dl] : {std::pair{0.9, 0}, std::pair{1.0, -1}}) {
        if (l + dl < 1) continue;
        const auto lo = check_feasible(min_power_allocation(s, p * dp, l + dl), s);
        for (const char* name : {"latency", "energy", "total_power"}) {
          if (hi.at(name).satisfied()) CHECK(lo.at(name).satisfied());
        }
      }
    }
  }
}

TEST_CASE("reduced problem feasibility carries over to the full problem") {
  const SystemContext s = default_system();
  const auto comm = min_comm_power(s.channels, s.precoder, s.budget.snr_min_comm, s.budget.p_t_total);
  const auto red = reduced_budget(comm.total_w, s.budget);
  for (int l = 1; l <= 6; ++l) {
    for (double p = 1.1e-4; p <= red.p_t_tilde; p += 0.013) {
      const bool reduced_ok = tau_comp(l, s.compute) <= s.budget.slot_t - s.budget.sensing_t0 &&
                              p * s.budget.sensing_t0 + e_comp(l, s.compute) <= red.e_max_tilde;
      if (!reduced_ok) continue;
      const auto rep = check_feasible(min_power_allocation(s, p, l), s);
      for (const auto& c : rep.constraints) CHECK(c.margin >= -1e-12);
    }
  }
}

TEST_CASE("negative powers and bad depth are reported") {
  const SystemContext s = default_system();
  Allocation a = min_power_allocation(s, 0.1, 0);
  auto rep = check_feasible(a, s);
  CHECK_FALSE(rep.at("depth").satisfied());
  a.depth_l = 7;
  CHECK_FALSE(check_feasible(a, s).at("depth").satisfied());
  a.depth_l = 2;
  a.sensing_power_p_r = -0.1;
  CHECK_FALSE(check_feasible(a, s).at("total_power").satisfied());
  CHECK_THROWS_AS(check_feasible(a, s).at("nope"), ArgumentError);
}
