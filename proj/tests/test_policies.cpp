/*
 * Copyright 2026-present the regsim authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "regsim/filters.hpp"
#include "regsim/policies.hpp"

using namespace regsim;

TEST_CASE("rtd_base_point: dead-band and correction cases") {
  EssSpec spec{20.0, 10.0, 1.0, 1.0, 0.5};
  RtdConfig cfg;
  cfg.deadband_halfwidth = 0.1;
  cfg.gain_mw_per_soc = 50.0;

  SUBCASE("inside the dead-band: zero base point, full capacity") {
    const auto bp = rtd_base_point(0.5, 20.0, spec, cfg);
    CHECK(bp.base_point_mw == 0.0);
    CHECK(bp.available_capacity_mw == 20.0);
  }
  SUBCASE("the boundary belongs to the dead-band") {
    const auto bp = rtd_base_point(0.6, 20.0, spec, cfg);
    CHECK(bp.base_point_mw == 0.0);
    CHECK(bp.available_capacity_mw == 20.0);
  }
  SUBCASE("high SoC: discharge clipped to rated power, no capacity left") {
    const auto bp = rtd_base_point(0.9, 20.0, spec, cfg);
    CHECK(bp.base_point_mw == doctest::Approx(-20.0));
    CHECK(bp.available_capacity_mw == 0.0);
  }
  SUBCASE("low SoC: charging base point, reduced capacity") {
    const auto bp = rtd_base_point(0.2, 20.0, spec, cfg);
    CHECK(bp.base_point_mw == doctest::Approx(15.0));  // -50 * (-0.3)
    CHECK(bp.available_capacity_mw == doctest::Approx(5.0));
  }
  SUBCASE("emergency: full discharge, zero capacity") {
    const auto bp = rtd_base_point(0.5, 20.0, spec, cfg, /*emergency=*/true);
    CHECK(bp.base_point_mw == -20.0);
    CHECK(bp.available_capacity_mw == 0.0);
  }
}

TEST_CASE("rtd_base_point: default gain attempts a one-interval correction") {
  EssSpec spec{100.0, 2.0, 1.0, 1.0, 0.5};
  RtdConfig cfg;  // gain empty: E_cap / interval = 2 * 12 = 24 MW per SoC
  CHECK(resolved_rtd_gain(cfg, spec) == doctest::Approx(24.0));
  const auto bp = rtd_base_point(0.7, 50.0, spec, cfg);
  CHECK(bp.base_point_mw == doctest::Approx(-24.0 * 0.2));
}

TEST_CASE("rtd_base_point: rejected inputs") {
  EssSpec spec{20.0, 10.0, 1.0, 1.0, 0.5};
  RtdConfig cfg;
  CHECK_THROWS_AS(rtd_base_point(1.2, 20.0, spec, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(rtd_base_point(0.5, 25.0, spec, cfg),
                  std::invalid_argument);
  RtdConfig bad;
  bad.deadband_halfwidth = 0.5;
  CHECK_THROWS_AS(rtd_base_point(0.5, 20.0, spec, bad),
                  std::invalid_argument);
}

TEST_CASE("rem_energy_dispatch: restoration energy accounts for "
          "efficiency") {
  RemConfig cfg;  // set point 0.5, 5-minute interval
  SUBCASE("at the set point") {
    EssSpec spec{100.0, 10.0, 0.9, 0.9, 0.5};
    CHECK(rem_energy_dispatch(0.5, cfg, spec) == 0.0);
  }
  SUBCASE("below: grid charge inflated by charge efficiency") {
    EssSpec spec{100.0, 10.0, 0.9, 1.0, 0.5};
    CHECK(rem_energy_dispatch(0.4, cfg, spec) ==
          doctest::Approx(1.0 / 0.9).epsilon(1e-12));
  }
  SUBCASE("above: grid discharge shrunk by discharge efficiency") {
    EssSpec spec{100.0, 10.0, 1.0, 0.9, 0.5};
    CHECK(rem_energy_dispatch(0.6, cfg, spec) ==
          doctest::Approx(-0.9).epsilon(1e-12));
  }
  SUBCASE("clipped by rated power over the interval") {
    EssSpec spec{1.0, 10.0, 1.0, 1.0, 0.5};
    CHECK(rem_energy_dispatch(0.0, cfg, spec) ==
          doctest::Approx(1.0 / 12.0));
    CHECK(rem_energy_dispatch(1.0, cfg, spec) ==
          doctest::Approx(-1.0 / 12.0));
  }
  SUBCASE("soc out of range is rejected") {
    EssSpec spec{1.0, 10.0, 1.0, 1.0, 0.5};
    CHECK_THROWS_AS(rem_energy_dispatch(-0.1, cfg, spec),
                    std::invalid_argument);
  }
}

TEST_CASE("ent_group_dispatch: full rated power or nothing") {
  const std::vector<EssSpec> units = {{2.0, 1.0, 1.0, 1.0, 0.5},
                                      {5.0, 2.0, 1.0, 1.0, 0.5}};
  CHECK(ent_group_dispatch(0, units) == std::vector<double>{0.0, 0.0});
  CHECK(ent_group_dispatch(1, units) == std::vector<double>{2.0, 5.0});
  CHECK(ent_group_dispatch(-1, {{4.0, 1.0, 1.0, 1.0, 0.5}}) ==
        std::vector<double>{-4.0});
  CHECK_THROWS_AS(ent_group_dispatch(2, units), std::invalid_argument);
}

TEST_CASE("ent_group_dispatch: magnitudes are rated power or zero") {
  oracle::TestRng rng(111);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EssSpec> units;
    for (int u = 0; u < rng.uniform_int(1, 5); ++u) {
      units.push_back({rng.uniform(0.5, 8.0), 1.0, 1.0, 1.0, 0.5});
    }
    const int value = rng.uniform_int(-1, 1);
    const auto commands = ent_group_dispatch(value, units);
    for (std::size_t u = 0; u < units.size(); ++u) {
      const double mag = std::abs(commands[u]);
      CHECK((mag == 0.0 || mag == units[u].power_capacity_mw));
    }
  }
}

TEST_CASE("agc_enhanced_allocation: fast group deploys first") {
  const DeploymentGroups groups{5.0, 10.0};
  SUBCASE("under fast capacity") {
    const auto a = agc_enhanced_allocation(3.0, groups);
    CHECK(a.fast_mw == 3.0);
    CHECK(a.slow_mw == 0.0);
  }
  SUBCASE("fast saturates, remainder to slow") {
    const auto a = agc_enhanced_allocation(8.0, groups);
    CHECK(a.fast_mw == 5.0);
    CHECK(a.slow_mw == 3.0);
  }
  SUBCASE("zero requirement") {
    const auto a = agc_enhanced_allocation(0.0, groups);
    CHECK(a.fast_mw == 0.0);
    CHECK(a.slow_mw == 0.0);
  }
  SUBCASE("negative requirement mirrors") {
    const auto a = agc_enhanced_allocation(-8.0, groups);
    CHECK(a.fast_mw == -5.0);
    CHECK(a.slow_mw == -3.0);
  }
  SUBCASE("infeasible requirement is rejected") {
    CHECK_THROWS_AS(agc_enhanced_allocation(15.1, groups),
                    std::invalid_argument);
  }
  SUBCASE("group validation") {
    CHECK_THROWS_AS(agc_enhanced_allocation(0.0, DeploymentGroups{0.0, 0.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("agc_enhanced_allocation: un-deployment reduces fast first") {
  const DeploymentGroups groups{5.0, 10.0};
  const GroupAllocation deployed{5.0, 3.0};
  SUBCASE("requirement moves toward zero") {
    const auto a = agc_enhanced_allocation(6.0, groups, deployed);
    CHECK(a.fast_mw == 3.0);
    CHECK(a.slow_mw == 3.0);
  }
  SUBCASE("fast empties before slow") {
    const auto a = agc_enhanced_allocation(2.0, groups, deployed);
    CHECK(a.fast_mw == 0.0);
    CHECK(a.slow_mw == 2.0);
  }
  SUBCASE("further deployment still goes to fast") {
    const auto a = agc_enhanced_allocation(9.0, groups, {3.0, 0.0});
    CHECK(a.fast_mw == 5.0);
    CHECK(a.slow_mw == 4.0);
  }
  SUBCASE("sign crossing re-deploys fast first") {
    const auto a = agc_enhanced_allocation(-4.0, groups, deployed);
    CHECK(a.fast_mw == -4.0);
    CHECK(a.slow_mw == 0.0);
  }
}

TEST_CASE("agc_enhanced_allocation: conserves the requirement exactly") {
  oracle::TestRng rng(222);
  for (int trial = 0; trial < 500; ++trial) {
    const DeploymentGroups groups{rng.uniform(0.1, 10.0),
                                  rng.uniform(0.1, 10.0)};
    const double total = groups.fast_capacity_mw + groups.slow_capacity_mw;
    const double prev_required = rng.uniform(-total, total);
    const auto prev = agc_enhanced_allocation(prev_required, groups);
    CHECK(prev.fast_mw + prev.slow_mw ==
          doctest::Approx(prev_required).epsilon(1e-15));
    const double required = rng.uniform(-total, total);
    const auto a = agc_enhanced_allocation(required, groups, prev);
    CHECK(a.fast_mw + a.slow_mw ==
          doctest::Approx(required).epsilon(1e-15));
    CHECK(std::abs(a.fast_mw) <= groups.fast_capacity_mw + 1e-12);
    CHECK(std::abs(a.slow_mw) <= groups.slow_capacity_mw + 1e-12);
  }
}

TEST_CASE("run_policy_simulation: no policy equals plain signal following") {
  EssSpec spec{1.0, 0.5, 0.9, 0.9, 0.6};
  const auto signal = synthesize_ace(23, 2);
  PolicyConfig policy;
  policy.offered_capacity_mw = 1.0;
  const auto result = run_policy_simulation(spec, signal, policy);
  const auto direct = follow_signal(spec, signal, 1.0);
  CHECK(result.trajectory.soc == direct.soc);
  CHECK(result.trajectory.actual_power_mw == direct.actual_power_mw);
  CHECK(result.events.empty());
}

TEST_CASE("run_policy_simulation: RTD holds a balanced unit in the "
          "dead-band") {
  EssSpec spec{1.0, 1.0, 1.0, 1.0, 0.5};
  const auto ace = synthesize_ace(29, 4);
  const auto fast = split_fast_slow(ace).fast;
  PolicyConfig policy;
  policy.kind = PolicyKind::rtd;
  policy.offered_capacity_mw = 1.0;
  const auto result = run_policy_simulation(spec, fast, policy);
  for (const auto& event : result.events) {
    CHECK(event.action == "base_point");
    CHECK(event.base_point_mw == 0.0);
    CHECK(std::abs(event.soc_after - 0.5) <=
          policy.rtd.deadband_halfwidth);
  }
}

TEST_CASE("run_policy_simulation: RTD converges from a high SoC") {
  EssSpec spec{2.0, 0.5, 1.0, 1.0, 0.9};
  const auto fast = split_fast_slow(synthesize_ace(31, 4)).fast;
  PolicyConfig policy;
  policy.kind = PolicyKind::rtd;
  policy.offered_capacity_mw = 1.0;
  const auto result = run_policy_simulation(spec, fast, policy);
  // Whenever an interval starts outside the dead-band with an unsaturated
  // base point, the deviation from 50% shrinks over the interval.
  const double gain = resolved_rtd_gain(policy.rtd, spec);
  for (const auto& event : result.events) {
    const double before = std::abs(event.soc_before - 0.5);
    if (before > policy.rtd.deadband_halfwidth &&
        gain * before < spec.power_capacity_mw) {
      CHECK(std::abs(event.soc_after - 0.5) < before);
    }
  }
  CHECK(std::abs(result.trajectory.soc.back() - 0.5) < 0.2);
}

TEST_CASE("run_policy_simulation: RTD-CAM discharges at full power") {
  EssSpec spec{1.0, 2.0, 1.0, 1.0, 0.8};
  const auto fast = split_fast_slow(synthesize_ace(37, 1)).fast;
  PolicyConfig policy;
  policy.kind = PolicyKind::rtd;
  policy.offered_capacity_mw = 1.0;
  policy.emergency_intervals = {1, 2};
  const auto result = run_policy_simulation(spec, fast, policy);
  const std::size_t per = fast.size() / result.events.size();
  for (std::size_t k : policy.emergency_intervals) {
    CHECK(result.events[k].action == "rtd_cam");
    CHECK(result.events[k].base_point_mw == -spec.power_capacity_mw);
    for (std::size_t i = k * per; i < (k + 1) * per; ++i) {
      CHECK(result.trajectory.commanded_power_mw[i] ==
            -spec.power_capacity_mw);
    }
  }
}

TEST_CASE("run_policy_simulation: REM restores the set point each "
          "interval") {
  SUBCASE("lossless, biased charging signal") {
    EssSpec spec{5.0, 1.0, 1.0, 1.0, 0.5};
    const RegulationSignal biased(
        0.25, std::vector<double>(8, 0.6));  // constant charge
    PolicyConfig policy;
    policy.kind = PolicyKind::rem;
    policy.offered_capacity_mw = 1.0;
    policy.rem.dispatch_interval_hours = 0.5;
    const auto result = run_policy_simulation(spec, biased, policy);
    REQUIRE(result.events.size() == 4);
    for (const auto& event : result.events) {
      CHECK(event.action == "rem_dispatch");
      CHECK(event.soc_after == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(event.energy_mwh < 0.0);  // discharging the surplus
    }
    CHECK(result.trajectory.soc.back() == doctest::Approx(0.5));
  }
  SUBCASE("lossy unit still lands on the set point") {
    EssSpec spec{5.0, 1.0, 0.9, 0.9, 0.5};
    const auto fast = split_fast_slow(synthesize_ace(41, 1)).fast;
    PolicyConfig policy;
    policy.kind = PolicyKind::rem;
    policy.offered_capacity_mw = 1.0;
    const auto result = run_policy_simulation(spec, fast, policy);
    for (const auto& event : result.events) {
      CHECK(std::abs(event.soc_after - 0.5) <= 1e-9);
    }
  }
}

TEST_CASE("run_policy_simulation: interval must divide the signal") {
  EssSpec spec{1.0, 1.0, 1.0, 1.0, 0.5};
  const auto signal = synthesize_ace(43, 1);
  PolicyConfig policy;
  policy.kind = PolicyKind::rtd;
  policy.rtd.interval_hours = 7.0 / 60.0;
  CHECK_THROWS_AS(run_policy_simulation(spec, signal, policy),
                  std::invalid_argument);
}
