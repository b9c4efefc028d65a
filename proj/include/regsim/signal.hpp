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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace regsim {

// A fixed-step normalized regulation control signal. Values are dimensionless
// levels in [-1, 1] (delta-MW per MW of regulation capacity), charging-positive.
// The signal spans one or more whole hours at a uniform step size.
class RegulationSignal {
 public:
  RegulationSignal(double step_size_hours, std::vector<double> values,
                   int start_hour = 0)
      : step_size_hours_(step_size_hours),
        values_(std::move(values)),
        start_hour_(start_hour) {
    if (!(step_size_hours_ > 0.0)) {
      throw std::invalid_argument("RegulationSignal: step size must be > 0");
    }
    const double steps = 1.0 / step_size_hours_;
    const double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-6) {
      throw std::invalid_argument(
          "RegulationSignal: steps per hour (1/step_size) must be a positive "
          "integer");
    }
    steps_per_hour_ = static_cast<int>(rounded);
    if (values_.empty()) {
      throw std::invalid_argument("RegulationSignal: values must be nonempty");
    }
    if (values_.size() % static_cast<std::size_t>(steps_per_hour_) != 0) {
      throw std::invalid_argument(
          "RegulationSignal: length must be a whole number of hours");
    }
    for (double v : values_) {
      if (!(std::abs(v) <= 1.0)) {  // also rejects NaN
        throw std::invalid_argument(
            "RegulationSignal: every value must satisfy |value| <= 1");
      }
    }
  }

  static RegulationSignal from_steps_per_hour(int steps_per_hour,
                                              std::vector<double> values,
                                              int start_hour = 0) {
    if (steps_per_hour < 1) {
      throw std::invalid_argument("steps_per_hour must be >= 1");
    }
    return RegulationSignal(1.0 / steps_per_hour, std::move(values),
                            start_hour);
  }

  double step_size_hours() const { return step_size_hours_; }
  int steps_per_hour() const { return steps_per_hour_; }
  int start_hour() const { return start_hour_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  int hours() const {
    return static_cast<int>(values_.size()) / steps_per_hour_;
  }

  std::span<const double> hour_values(int hour_index) const {
    check_hour(hour_index);
    const auto n = static_cast<std::size_t>(steps_per_hour_);
    return std::span<const double>(values_).subspan(
        static_cast<std::size_t>(hour_index) * n, n);
  }

  // One-hour slice as a standalone signal; hourly metrics are computed
  // segment by segment.
  RegulationSignal hour_segment(int hour_index) const {
    auto v = hour_values(hour_index);
    return RegulationSignal(step_size_hours_,
                            std::vector<double>(v.begin(), v.end()),
                            start_hour_ + hour_index);
  }

 private:
  void check_hour(int hour_index) const {
    if (hour_index < 0 || hour_index >= hours()) {
      throw std::out_of_range("RegulationSignal: hour index out of range");
    }
  }

  double step_size_hours_;
  std::vector<double> values_;
  int start_hour_;
  int steps_per_hour_ = 0;
};

// Regulation mileage of a power trajectory: sum of absolute movements per MW
// of capacity. The step before the first sample is an explicit parameter,
// zero by default.
inline double mileage(std::span<const double> trajectory_mw, double p_max_mw,
                      double p_initial_mw = 0.0) {
  if (!(p_max_mw > 0.0)) {
    throw std::invalid_argument("mileage: p_max must be > 0");
  }
  if (trajectory_mw.empty()) {
    throw std::invalid_argument("mileage: trajectory must be nonempty");
  }
  double total = 0.0;
  double prev = p_initial_mw;
  for (double p : trajectory_mw) {
    if (!(std::abs(p) <= p_max_mw)) {
      throw std::invalid_argument("mileage: |P_i| exceeds p_max");
    }
    total += std::abs(p - prev);
    prev = p;
  }
  return total / p_max_mw;
}

inline double mileage(const std::vector<double>& trajectory_mw,
                      double p_max_mw, double p_initial_mw = 0.0) {
  return mileage(std::span<const double>(trajectory_mw), p_max_mw,
                 p_initial_mw);
}

namespace detail {

struct CumulativeSpan {
  double max_sum;  // max over j >= 1 of sum_{i<=j} T_s * S_i
  double min_sum;  // min over j >= 1 of the same partial sums
};

inline CumulativeSpan cumulative_span(const RegulationSignal& signal) {
  double running = 0.0;
  double max_sum = -std::numeric_limits<double>::infinity();
  double min_sum = std::numeric_limits<double>::infinity();
  for (double s : signal.values()) {
    running += signal.step_size_hours() * s;
    max_sum = std::max(max_sum, running);
    min_sum = std::min(min_sum, running);
  }
  return {max_sum, min_sum};
}

inline void require_single_hour(const RegulationSignal& signal,
                                const char* op) {
  if (signal.hours() != 1) {
    throw std::invalid_argument(std::string(op) +
                                ": signal must cover exactly one hour "
                                "(analyze multi-hour signals hour by hour)");
  }
}

}  // namespace detail

// Hourly energy requirement in MWh per MW of capacity: the span of the
// cumulative energy path of a one-hour signal. This is the minimum energy
// capacity needed to follow the signal perfectly, ignoring efficiency and
// SoC limits.
inline double energy_requirement(const RegulationSignal& signal) {
  detail::require_single_hour(signal, "energy_requirement");
  const auto span = detail::cumulative_span(signal);
  return span.max_sum - span.min_sum;
}

// Energy balance of a one-hour signal: the initial SoC fraction that lets a
// storage with exactly the minimum energy capacity follow the signal
// perfectly. Can fall outside [0, 1] when the cumulative sum never crosses
// zero; callers that care should flag such values (see SignalAnalytics).
inline double energy_balance(const RegulationSignal& signal) {
  detail::require_single_hour(signal, "energy_balance");
  const auto span = detail::cumulative_span(signal);
  const double e = span.max_sum - span.min_sum;
  if (e == 0.0) {
    throw std::domain_error(
        "energy_balance: undefined for a flat signal (zero energy "
        "requirement)");
  }
  return -span.min_sum / e;
}

// Per-hour metrics of a (possibly multi-hour) signal. energy_balance is
// absent for flat hours, where it is undefined.
struct SignalAnalytics {
  double mileage = 0.0;
  double energy_requirement_mwh_per_mw = 0.0;
  std::optional<double> energy_balance;

  bool balance_out_of_range() const {
    return energy_balance &&
           (*energy_balance < 0.0 || *energy_balance > 1.0);
  }
};

// Hourly analytics for each one-hour segment. Mileage chains across hours:
// hour h starts from the last level of hour h-1 (the first hour starts from
// zero).
inline std::vector<SignalAnalytics> analyze_hours(
    const RegulationSignal& signal) {
  std::vector<SignalAnalytics> out;
  out.reserve(static_cast<std::size_t>(signal.hours()));
  double prev_level = 0.0;
  for (int h = 0; h < signal.hours(); ++h) {
    const RegulationSignal seg = signal.hour_segment(h);
    SignalAnalytics a;
    a.mileage = mileage(seg.values(), 1.0, prev_level);
    a.energy_requirement_mwh_per_mw = energy_requirement(seg);
    if (a.energy_requirement_mwh_per_mw > 0.0) {
      a.energy_balance = energy_balance(seg);
    }
    prev_level = seg.values().back();
    out.push_back(a);
  }
  return out;
}

}  // namespace regsim
