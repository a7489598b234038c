// SPDX-License-Identifier: Apache-2.0
//
// Randomized invariant checks across modules.
#include <doctest.h>

#include <algorithm>
#include <random>

#include "iscc/errors.hpp"
#include "iscc/kernels.hpp"
#include "iscc/optimizer.hpp"
#include "iscc/scenario.hpp"
#include "iscc/sweep.hpp"

using namespace iscc;

namespace {

ScenarioConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScenarioConfig cfg;
  cfg.frequency_hz = 5e7 + 2.5e8 * u(rng);
  cfg.sensing_t0_s = 0.02 + 0.06 * u(rng);
  cfg.p_max_dbm = 25.0 + 6.0 * u(rng);
  cfg.channel_gain_db = -56.0 * u(rng);
  cfg.channel_seed = static_cast<std::int64_t>(rng() % 10000);
  return cfg;
}

}  // namespace

TEST_CASE("l_star is non-decreasing in slot length") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    ScenarioConfig cfg = random_config(rng);
    BoundsContext ctx;
    try {
      ctx = make_bounds_context(build_problem(cfg));
    } catch (const InfeasibleError&) {
      continue;
    }
    int prev = 0;
    for (double t = ctx.budget.sensing_t0 + 0.005; t < 0.3; t += 0.005) {
      BoundsContext c = ctx;
      c.budget.slot_t = t;
      // keep the reduced budget consistent with the longer slot
      c.reduced.e_max_tilde = ctx.reduced.e_max_tilde + ctx.budget.p_max_avg * (t - ctx.budget.slot_t);
      const int l = l_star(ctx.p_r_min_w, c);
      CHECK(l >= prev);
      prev = l;
    }
  }
}

TEST_CASE("energy depth bound is non-increasing in sensing power") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const ScenarioConfig cfg = random_config(rng);
    const Budget b = make_budget(cfg);
    const ComputeParams c = make_compute_params(cfg);
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 0.0; p < 1.0; p += 0.01) {
      const double v = l_e_bound(p, 0.05, b, c);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("solutions are ordered: oracle <= AO, and every returned allocation is feasible") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const ScenarioConfig cfg = random_config(rng);
    const Problem pr = build_problem(cfg);
    std::vector<Solution> sols;
    try {
      sols.push_back(ao_solve(pr, make_ao_config(cfg)).solution);
    } catch (const InfeasibleError&) {
      continue;
    }
    const Solution oracle = brute_force_oracle(pr, 501);
    CHECK(oracle.mpjpe_cm <= sols.front().mpjpe_cm);
    for (auto f : {&baseline_fixed_l1, &baseline_fixed_prmin}) {
      try {
        sols.push_back(f(pr));
      } catch (const InfeasibleError&) {
      }
    }
    for (const auto& s : sols) {
      CHECK(oracle.mpjpe_cm <= s.mpjpe_cm);
      for (const auto& c : check_feasible(s.allocation, pr.system).constraints) {
        CHECK(c.margin >= -kMarginTolerance);
      }
    }
  }
}

TEST_CASE("AO falls back to the best iterate when it runs out of iterations") {
  const Problem pr = build_problem(ScenarioConfig{});
  AOConfig cfg;
  cfg.i_max = 1;
  const AOResult res = ao_solve(pr, cfg);
  CHECK_FALSE(res.trace.converged);
  CHECK(res.trace.iterations_used == 1);
  REQUIRE(res.trace.iterates.size() == 2);
  const auto best = std::min_element(
      res.trace.iterates.begin(), res.trace.iterates.end(),
      [](const AOIterate& a, const AOIterate& b) { return a.mpjpe_cm < b.mpjpe_cm; });
  CHECK(res.solution.allocation.depth_l == best->depth);
  CHECK(res.solution.allocation.sensing_power_p_r == best->p_r_w);
}

TEST_CASE("AO iteration count does not depend on oracle grid or other sizes") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    ScenarioConfig cfg = random_config(rng);
    const Problem pr = build_problem(cfg);
    try {
      const AOResult a = ao_solve(pr, make_ao_config(cfg));
      CHECK(a.trace.iterations_used <= cfg.ao_i_max);
      CHECK(a.trace.iterates.size() == static_cast<std::size_t>(a.trace.iterations_used) + 1);
    } catch (const InfeasibleError&) {
    }
  }
}

TEST_CASE("solver output does not depend on the kernel variant") {
  const Problem pr = build_problem(ScenarioConfig{});
  kernels::force(kernels::Isa::Scalar);
  const Solution a = brute_force_oracle(pr, 1001);
  kernels::reset();
  const Solution b = brute_force_oracle(pr, 1001);
  CHECK(a.mpjpe_cm == b.mpjpe_cm);
  CHECK(a.allocation.sensing_power_p_r == b.allocation.sensing_power_p_r);
  CHECK(a.allocation.depth_l == b.allocation.depth_l);
}

TEST_CASE("sweep rows are independent of the scheme list order") {
  SweepSpec s;
  s.steps = 4;
  s.schemes = {Scheme::Oracle, Scheme::FixedPrMin, Scheme::Proposed};
  std::ostringstream a, b;
  write_sweep_csv(a, run_sweep(ScenarioConfig{}, s, 1, 2));
  std::reverse(s.schemes.begin(), s.schemes.end());
  write_sweep_csv(b, run_sweep(ScenarioConfig{}, s, 1, 3));
  CHECK(a.str() == b.str());
}
