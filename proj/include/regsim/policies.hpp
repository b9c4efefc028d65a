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
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regsim/ess.hpp"
#include "regsim/signal.hpp"

namespace regsim {

// NYISO-style real-time-dispatch SoC management: base points assigned per
// interval from the SoC alone, driving it toward 50%.
struct RtdConfig {
  double deadband_halfwidth = 0.1;      // SoC fraction around 50%
  double interval_hours = 1.0 / 12.0;   // 5 minutes
  // MW per unit of SoC deviation. Empty selects E_cap/interval, which
  // attempts a full correction in one interval subject to power limits.
  std::optional<double> gain_mw_per_soc;
};

inline void validate(const RtdConfig& cfg) {
  if (!(cfg.deadband_halfwidth > 0.0 && cfg.deadband_halfwidth < 0.5)) {
    throw std::invalid_argument("RtdConfig: dead-band halfwidth in (0, 0.5)");
  }
  if (!(cfg.interval_hours > 0.0)) {
    throw std::invalid_argument("RtdConfig: interval must be > 0");
  }
  if (cfg.gain_mw_per_soc && !(*cfg.gain_mw_per_soc >= 0.0)) {
    throw std::invalid_argument("RtdConfig: gain must be >= 0");
  }
}

inline double resolved_rtd_gain(const RtdConfig& cfg, const EssSpec& spec) {
  return cfg.gain_mw_per_soc
             ? *cfg.gain_mw_per_soc
             : spec.energy_capacity_mwh / cfg.interval_hours;
}

// CAISO-style regulation energy management: the operator restores a
// preferred SoC set-point each dispatch interval.
struct RemConfig {
  double soc_set_point = 0.5;
  double dispatch_interval_hours = 1.0 / 12.0;
};

inline void validate(const RemConfig& cfg) {
  if (!(cfg.soc_set_point >= 0.0 && cfg.soc_set_point <= 1.0)) {
    throw std::invalid_argument("RemConfig: set point must be in [0,1]");
  }
  if (!(cfg.dispatch_interval_hours > 0.0)) {
    throw std::invalid_argument("RemConfig: dispatch interval must be > 0");
  }
}

// MISO-style deployment groups for AGC enhancement.
struct DeploymentGroups {
  double fast_capacity_mw = 0.0;
  double slow_capacity_mw = 0.0;
};

inline void validate(const DeploymentGroups& groups) {
  if (!(groups.fast_capacity_mw >= 0.0) ||
      !(groups.slow_capacity_mw >= 0.0) ||
      (groups.fast_capacity_mw == 0.0 && groups.slow_capacity_mw == 0.0)) {
    throw std::invalid_argument(
        "DeploymentGroups: capacities must be >= 0 and not both zero");
  }
}

struct RtdBasePoint {
  double base_point_mw = 0.0;         // charging-positive
  double available_capacity_mw = 0.0;  // regulation capacity left
};

// Base point for one dispatch interval. Inside the dead-band the unit
// regulates at full offered capacity around a zero base point. Outside it,
// the base point pushes the SoC back toward 50% (discharging when high,
// charging when low) and the offered capacity is reduced by the base-point
// magnitude. In emergency (corrective action mode) the unit discharges at
// full power and provides no regulation.
inline RtdBasePoint rtd_base_point(double soc, double offered_capacity_mw,
                                   const EssSpec& spec, const RtdConfig& cfg,
                                   bool emergency = false) {
  validate(spec);
  validate(cfg);
  if (!(soc >= 0.0 && soc <= 1.0)) {
    throw std::invalid_argument("rtd_base_point: soc must be in [0,1]");
  }
  if (!(offered_capacity_mw >= 0.0) ||
      offered_capacity_mw > spec.power_capacity_mw) {
    throw std::invalid_argument(
        "rtd_base_point: offered capacity must be in [0, power_capacity]");
  }
  if (emergency) {
    return {-spec.power_capacity_mw, 0.0};
  }
  const double deviation = soc - 0.5;
  if (std::abs(deviation) <= cfg.deadband_halfwidth) {
    return {0.0, offered_capacity_mw};
  }
  const double gain = resolved_rtd_gain(cfg, spec);
  const double base = std::clamp(-gain * deviation, -spec.power_capacity_mw,
                                 spec.power_capacity_mw);
  return {base, std::max(0.0, offered_capacity_mw - std::abs(base))};
}

// Grid-side balancing energy (MWh, charging-positive) that restores the SoC
// to the set point over one dispatch interval, accounting for the unit's
// efficiency and clipped to what the power rating allows.
inline double rem_energy_dispatch(double soc, const RemConfig& cfg,
                                  const EssSpec& spec) {
  validate(spec);
  validate(cfg);
  if (!(soc >= 0.0 && soc <= 1.0)) {
    throw std::invalid_argument("rem_energy_dispatch: soc must be in [0,1]");
  }
  const double deficit_mwh =
      (cfg.soc_set_point - soc) * spec.energy_capacity_mwh;
  double grid_energy = deficit_mwh > 0.0
                           ? deficit_mwh / spec.charge_efficiency
                           : deficit_mwh * spec.discharge_efficiency;
  const double limit =
      spec.power_capacity_mw * cfg.dispatch_interval_hours;
  return std::clamp(grid_energy, -limit, limit);
}

// ISO-NE trinary group dispatch: every unit in the group runs at its full
// rated power in the commanded direction, or at zero. Never partial.
inline std::vector<double> ent_group_dispatch(
    int trinary_value, const std::vector<EssSpec>& units) {
  if (trinary_value < -1 || trinary_value > 1) {
    throw std::invalid_argument("ent_group_dispatch: value must be -1, 0, 1");
  }
  std::vector<double> commands;
  commands.reserve(units.size());
  for (const auto& unit : units) {
    validate(unit);
    commands.push_back(trinary_value * unit.power_capacity_mw);
  }
  return commands;
}

struct GroupAllocation {
  double fast_mw = 0.0;
  double slow_mw = 0.0;
};

// MISO AGC-enhancement allocation: the fast ramping group absorbs the
// requirement first, up to its capacity; the remainder goes to the slow
// group. When a previous allocation is given and the requirement moves
// toward zero, the fast group is un-deployed first. fast + slow always
// equals the requirement exactly.
inline GroupAllocation agc_enhanced_allocation(
    double required_mw, const DeploymentGroups& groups,
    const GroupAllocation& previous = {}) {
  validate(groups);
  const double total_capacity =
      groups.fast_capacity_mw + groups.slow_capacity_mw;
  if (std::abs(required_mw) > total_capacity) {
    throw std::invalid_argument(
        "agc_enhanced_allocation: requirement exceeds group capacity");
  }
  const double prev_total = previous.fast_mw + previous.slow_mw;
  GroupAllocation alloc;
  const bool deploying =
      prev_total == 0.0 || (required_mw != 0.0 &&
                            std::signbit(required_mw) ==
                                std::signbit(prev_total) &&
                            std::abs(required_mw) >= std::abs(prev_total));
  if (deploying) {
    const double delta = required_mw - prev_total;
    alloc.fast_mw = std::clamp(previous.fast_mw + delta,
                               -groups.fast_capacity_mw,
                               groups.fast_capacity_mw);
  } else if (required_mw != 0.0 &&
             std::signbit(required_mw) == std::signbit(prev_total)) {
    // Un-deploying within the same direction: take it out of fast first.
    const double reduction = std::abs(prev_total) - std::abs(required_mw);
    const double fast_mag =
        std::max(0.0, std::abs(previous.fast_mw) - reduction);
    alloc.fast_mw = std::copysign(fast_mag, previous.fast_mw);
  } else {
    // Crossed zero (or landed on it): fresh fast-first deployment.
    alloc.fast_mw = std::clamp(required_mw, -groups.fast_capacity_mw,
                               groups.fast_capacity_mw);
  }
  alloc.slow_mw = required_mw - alloc.fast_mw;
  return alloc;
}

enum class PolicyKind { none, rtd, rem };

inline const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::rtd: return "rtd";
    case PolicyKind::rem: return "rem";
    case PolicyKind::none: break;
  }
  return "none";
}

struct PolicyConfig {
  PolicyKind kind = PolicyKind::none;
  double offered_capacity_mw = 1.0;
  RtdConfig rtd;
  RemConfig rem;
  // RTD corrective-action-mode intervals (scenario inputs, 0-based).
  std::vector<std::size_t> emergency_intervals;
};

struct PolicyEvent {
  std::size_t step = 0;  // first affected signal step
  PolicyKind policy = PolicyKind::none;
  std::string action;
  double base_point_mw = 0.0;
  double energy_mwh = 0.0;
  double soc_before = 0.0;
  double soc_after = 0.0;
};

struct PolicyRunResult {
  SocTrajectory trajectory;
  std::vector<PolicyEvent> events;
};

namespace detail {

inline std::size_t interval_steps_or_throw(const RegulationSignal& signal,
                                           double interval_hours,
                                           const char* what) {
  const double steps = interval_hours / signal.step_size_hours();
  const double rounded = std::round(steps);
  if (rounded < 1.0 || std::abs(steps - rounded) > 1e-6 ||
      signal.size() % static_cast<std::size_t>(rounded) != 0) {
    throw std::invalid_argument(
        std::string(what) +
        ": policy interval must be a whole number of signal steps and divide "
        "the signal evenly");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace detail

// Interleave signal following with an ISO SoC-management policy. With
// PolicyKind::none this is exactly follow_signal at the offered capacity.
inline PolicyRunResult run_policy_simulation(const EssSpec& spec,
                                             const RegulationSignal& signal,
                                             const PolicyConfig& policy) {
  validate(spec);
  if (!(policy.offered_capacity_mw >= 0.0) ||
      policy.offered_capacity_mw > spec.power_capacity_mw) {
    throw std::invalid_argument(
        "run_policy_simulation: offered capacity must be in "
        "[0, power_capacity]");
  }

  PolicyRunResult result;
  if (policy.kind == PolicyKind::none) {
    result.trajectory =
        follow_signal(spec, signal, policy.offered_capacity_mw);
    return result;
  }

  const double ts = signal.step_size_hours();
  SocTrajectory traj;
  traj.step_size_hours = ts;
  traj.initial_soc = spec.initial_soc;
  traj.soc.reserve(signal.size());
  traj.actual_power_mw.reserve(signal.size());
  traj.commanded_power_mw.reserve(signal.size());
  double soc = spec.initial_soc;

  auto run_step = [&](std::size_t i, double capacity_mw, double base_mw) {
    const double commanded = signal.values()[i] * capacity_mw + base_mw;
    const double actual = detail::clip_power_for_step(commanded, soc, spec, ts);
    soc = detail::soc_after_step(soc, actual, spec, ts);
    traj.commanded_power_mw.push_back(commanded);
    traj.actual_power_mw.push_back(actual);
    traj.soc.push_back(soc);
  };

  if (policy.kind == PolicyKind::rtd) {
    validate(policy.rtd);
    const std::size_t interval_steps = detail::interval_steps_or_throw(
        signal, policy.rtd.interval_hours, "rtd");
    const std::size_t n_intervals = signal.size() / interval_steps;
    for (std::size_t k = 0; k < n_intervals; ++k) {
      const bool emergency =
          std::find(policy.emergency_intervals.begin(),
                    policy.emergency_intervals.end(),
                    k) != policy.emergency_intervals.end();
      const double soc_before = soc;
      const auto bp = rtd_base_point(soc, policy.offered_capacity_mw, spec,
                                     policy.rtd, emergency);
      for (std::size_t i = k * interval_steps; i < (k + 1) * interval_steps;
           ++i) {
        run_step(i, bp.available_capacity_mw, bp.base_point_mw);
      }
      result.events.push_back(PolicyEvent{
          k * interval_steps, PolicyKind::rtd,
          emergency ? "rtd_cam" : "base_point", bp.base_point_mw,
          bp.base_point_mw * policy.rtd.interval_hours, soc_before, soc});
    }
  } else {  // PolicyKind::rem
    validate(policy.rem);
    const std::size_t interval_steps = detail::interval_steps_or_throw(
        signal, policy.rem.dispatch_interval_hours, "rem");
    for (std::size_t i = 0; i < signal.size(); ++i) {
      run_step(i, policy.offered_capacity_mw, 0.0);
      if ((i + 1) % interval_steps == 0) {
        const double soc_before = soc;
        const double grid_mwh = rem_energy_dispatch(soc, policy.rem, spec);
        // Applied as an instantaneous SoC correction at the boundary.
        const double stored_mwh =
            grid_mwh > 0.0 ? grid_mwh * spec.charge_efficiency
                           : grid_mwh / spec.discharge_efficiency;
        soc = std::clamp(soc + stored_mwh / spec.energy_capacity_mwh, 0.0,
                         1.0);
        traj.soc.back() = soc;
        result.events.push_back(PolicyEvent{i, PolicyKind::rem,
                                            "rem_dispatch", 0.0, grid_mwh,
                                            soc_before, soc});
      }
    }
  }
  result.trajectory = std::move(traj);
  return result;
}

}  // namespace regsim
