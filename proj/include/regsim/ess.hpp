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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "regsim/signal.hpp"

namespace regsim {

// Storage ratings. Power is charging-positive throughout: positive power
// absorbs energy from the grid, negative power injects.
struct EssSpec {
  double power_capacity_mw = 1.0;
  double energy_capacity_mwh = 1.0;
  double charge_efficiency = 1.0;
  double discharge_efficiency = 1.0;
  double initial_soc = 0.5;
};

inline void validate(const EssSpec& spec) {
  if (!(spec.power_capacity_mw > 0.0)) {
    throw std::invalid_argument("EssSpec: power capacity must be > 0");
  }
  if (!(spec.energy_capacity_mwh > 0.0)) {
    throw std::invalid_argument("EssSpec: energy capacity must be > 0");
  }
  if (!(spec.charge_efficiency > 0.0 && spec.charge_efficiency <= 1.0)) {
    throw std::invalid_argument("EssSpec: charge efficiency must be in (0,1]");
  }
  if (!(spec.discharge_efficiency > 0.0 && spec.discharge_efficiency <= 1.0)) {
    throw std::invalid_argument(
        "EssSpec: discharge efficiency must be in (0,1]");
  }
  if (!(spec.initial_soc >= 0.0 && spec.initial_soc <= 1.0)) {
    throw std::invalid_argument("EssSpec: initial SoC must be in [0,1]");
  }
}

// Simulated dispatch path. soc[i] is the state of charge after step i;
// power follows the charging-positive convention. The SoC recurrence
//   soc[i+1] = soc[i] + T_s * (eta_c * charge - discharge / eta_d) / E_cap
// holds for every step.
struct SocTrajectory {
  double step_size_hours = 0.0;
  double initial_soc = 0.0;
  std::vector<double> soc;
  std::vector<double> actual_power_mw;
  std::vector<double> commanded_power_mw;

  std::size_t size() const { return soc.size(); }
};

namespace detail {

// Largest feasible constant power for one step given the SoC headroom; the
// commanded power is reduced, never reshaped within the step.
inline double clip_power_for_step(double power_mw, double soc,
                                  const EssSpec& spec, double step_hours) {
  double p = std::clamp(power_mw, -spec.power_capacity_mw,
                        spec.power_capacity_mw);
  if (p > 0.0) {
    const double max_charge = (1.0 - soc) * spec.energy_capacity_mwh /
                              (step_hours * spec.charge_efficiency);
    p = std::min(p, std::max(0.0, max_charge));
  } else if (p < 0.0) {
    const double max_discharge = soc * spec.energy_capacity_mwh *
                                 spec.discharge_efficiency / step_hours;
    p = std::max(p, -std::max(0.0, max_discharge));
  }
  return p;
}

inline double soc_after_step(double soc, double power_mw, const EssSpec& spec,
                             double step_hours) {
  const double charge = std::max(power_mw, 0.0);
  const double discharge = std::max(-power_mw, 0.0);
  const double next =
      soc + step_hours *
                (spec.charge_efficiency * charge -
                 discharge / spec.discharge_efficiency) /
                spec.energy_capacity_mwh;
  return std::clamp(next, 0.0, 1.0);
}

}  // namespace detail

// Simulate the storage following a regulation signal scaled by the awarded
// capacity, plus an optional per-step base point. Commanded power is clipped
// to the power rating first, then to what keeps the SoC inside [0, 1] over
// the step.
inline SocTrajectory follow_signal(const EssSpec& spec,
                                   const RegulationSignal& signal,
                                   double capacity_mw,
                                   std::span<const double> base_points_mw = {}) {
  validate(spec);
  if (!(capacity_mw >= 0.0) || capacity_mw > spec.power_capacity_mw) {
    throw std::invalid_argument(
        "follow_signal: capacity must be in [0, power_capacity]");
  }
  if (!base_points_mw.empty() && base_points_mw.size() != signal.size()) {
    throw std::invalid_argument(
        "follow_signal: base points must match the signal length");
  }
  SocTrajectory traj;
  traj.step_size_hours = signal.step_size_hours();
  traj.initial_soc = spec.initial_soc;
  traj.soc.reserve(signal.size());
  traj.actual_power_mw.reserve(signal.size());
  traj.commanded_power_mw.reserve(signal.size());

  double soc = spec.initial_soc;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double base = base_points_mw.empty() ? 0.0 : base_points_mw[i];
    const double commanded = signal.values()[i] * capacity_mw + base;
    const double actual =
        detail::clip_power_for_step(commanded, soc, spec,
                                    signal.step_size_hours());
    soc = detail::soc_after_step(soc, actual, spec, signal.step_size_hours());
    traj.commanded_power_mw.push_back(commanded);
    traj.actual_power_mw.push_back(actual);
    traj.soc.push_back(soc);
  }
  return traj;
}

enum class ScoreMethod { accuracy, composite };

// Signal-following performance factor, a score in [0, 1].
struct PerformanceScore {
  double value = 0.0;
  ScoreMethod method = ScoreMethod::accuracy;
};

// Accuracy in signal following: one minus the normalized integral of
// absolute errors, floored at zero. A flat signal followed by zero output
// scores 1 (the unit was asked to do nothing and did nothing).
inline PerformanceScore accuracy_score(const SocTrajectory& trajectory,
                                       const RegulationSignal& signal,
                                       double capacity_mw) {
  if (trajectory.size() != signal.size()) {
    throw std::invalid_argument("accuracy_score: lengths must match");
  }
  double abs_error = 0.0;
  double abs_signal = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double target = signal.values()[i] * capacity_mw;
    abs_error += std::abs(trajectory.actual_power_mw[i] - target);
    abs_signal += std::abs(target);
  }
  double rho;
  if (abs_signal == 0.0) {
    rho = abs_error == 0.0 ? 1.0 : 0.0;
  } else {
    rho = std::max(0.0, 1.0 - abs_error / abs_signal);
  }
  return {rho, ScoreMethod::accuracy};
}

// Subscores behind a composite performance score.
struct CompositeBreakdown {
  double precision = 0.0;    // accuracy at the best lag
  double correlation = 0.0;  // max Pearson correlation over lags, clipped
  double delay = 0.0;        // 1 - best_lag / max_lag
  std::size_t best_lag = 0;
  bool correlation_defined = true;
  double score = 0.0;
};

namespace detail {

// Pearson correlation of actual[lag..] against target[0..n-lag). Returns
// false when either slice is constant.
inline bool lagged_correlation(const SocTrajectory& trajectory,
                               const RegulationSignal& signal,
                               double capacity_mw, std::size_t lag,
                               double* out) {
  const std::size_t n = signal.size() - lag;
  double mean_a = 0.0, mean_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += trajectory.actual_power_mw[i + lag];
    mean_t += signal.values()[i] * capacity_mw;
  }
  mean_a /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  double saa = 0.0, stt = 0.0, sat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = trajectory.actual_power_mw[i + lag] - mean_a;
    const double dt = signal.values()[i] * capacity_mw - mean_t;
    saa += da * da;
    stt += dt * dt;
    sat += da * dt;
  }
  if (saa == 0.0 || stt == 0.0) {
    return false;
  }
  *out = sat / std::sqrt(saa * stt);
  return true;
}

inline double lagged_accuracy(const SocTrajectory& trajectory,
                              const RegulationSignal& signal,
                              double capacity_mw, std::size_t lag) {
  const std::size_t n = signal.size() - lag;
  double abs_error = 0.0, abs_signal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = signal.values()[i] * capacity_mw;
    abs_error += std::abs(trajectory.actual_power_mw[i + lag] - target);
    abs_signal += std::abs(target);
  }
  if (abs_signal == 0.0) {
    return abs_error == 0.0 ? 1.0 : 0.0;
  }
  return std::max(0.0, 1.0 - abs_error / abs_signal);
}

}  // namespace detail

// PJM-style composite score: equal-weight mean of precision (accuracy at
// the best lag), correlation (max Pearson over lags 0..max_lag, clipped to
// [0,1]) and delay (1 - best_lag/max_lag). Falls back to a precision-only
// score when the signal is constant and correlation is undefined.
inline CompositeBreakdown composite_breakdown(const SocTrajectory& trajectory,
                                              const RegulationSignal& signal,
                                              double capacity_mw,
                                              std::size_t max_lag_steps) {
  if (trajectory.size() != signal.size()) {
    throw std::invalid_argument("composite_score: lengths must match");
  }
  if (max_lag_steps >= signal.size()) {
    throw std::invalid_argument(
        "composite_score: max lag must be smaller than the signal length");
  }
  CompositeBreakdown b;
  double best_corr = -2.0;
  bool any_defined = false;
  for (std::size_t lag = 0; lag <= max_lag_steps; ++lag) {
    double corr;
    if (detail::lagged_correlation(trajectory, signal, capacity_mw, lag,
                                   &corr)) {
      any_defined = true;
      if (corr > best_corr) {
        best_corr = corr;
        b.best_lag = lag;
      }
    }
  }
  if (!any_defined) {
    b.correlation_defined = false;
    b.precision = detail::lagged_accuracy(trajectory, signal, capacity_mw, 0);
    b.score = b.precision;
    return b;
  }
  b.precision =
      detail::lagged_accuracy(trajectory, signal, capacity_mw, b.best_lag);
  b.correlation = std::clamp(best_corr, 0.0, 1.0);
  b.delay = max_lag_steps == 0
                ? 1.0
                : 1.0 - static_cast<double>(b.best_lag) /
                            static_cast<double>(max_lag_steps);
  b.score = std::clamp((b.precision + b.correlation + b.delay) / 3.0, 0.0,
                       1.0);
  return b;
}

inline PerformanceScore composite_score(const SocTrajectory& trajectory,
                                        const RegulationSignal& signal,
                                        double capacity_mw,
                                        std::size_t max_lag_steps) {
  const auto b =
      composite_breakdown(trajectory, signal, capacity_mw, max_lag_steps);
  return {b.score, ScoreMethod::composite};
}

// Grid-side energy absorbed and injected over the trajectory, in MWh.
struct EnergyTotals {
  double charged_mwh = 0.0;
  double discharged_mwh = 0.0;
};

inline EnergyTotals energy_totals(const SocTrajectory& trajectory) {
  EnergyTotals totals;
  for (double p : trajectory.actual_power_mw) {
    if (p > 0.0) {
      totals.charged_mwh += p * trajectory.step_size_hours;
    } else {
      totals.discharged_mwh += -p * trajectory.step_size_hours;
    }
  }
  return totals;
}

}  // namespace regsim
