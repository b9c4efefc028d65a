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
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "regsim/signal.hpp"

namespace regsim {

// Defaults are tuned together and frozen: with these parameters the
// fast/slow mileage ratio of a synthesized signal lands near 3 and the fast
// component stays energy-light (hourly requirement mostly under 0.25 MWh
// per MW).
inline constexpr double kDefaultStepHours = 1.0 / 900.0;  // 4-second steps
inline constexpr double kDefaultMeanReversion = 10.0;     // per hour
inline constexpr double kDefaultVolatility = 1.0;         // unitless scale
inline constexpr double kDefaultSmoothingHours = 0.05;    // low-pass EMA
inline constexpr double kDefaultZeroMeanWindowHours = 0.25;
inline constexpr double kDefaultEnterThreshold = 0.25;
inline constexpr double kDefaultExitThreshold = 0.10;

namespace detail {

// Internal shape of the synthesized control signal (see synthesize_ace):
// the signal is driven through a mean-reverting velocity so its movement
// concentrates at the tens-of-seconds scale a real control error has.
inline constexpr double kVelocityReversion = 100.0;  // per hour
inline constexpr double kVelocityScale = 220.0;

// Deterministic standard-normal stream. Box-Muller on top of mt19937_64 so
// that identical seeds produce identical signals on every platform (the
// distributions in <random> do not guarantee that).
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : state_(seed) {}

  double next() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  // Uniform in (0, 1), 53-bit resolution, never exactly 0.
  double next_unit() {
    const std::uint64_t bits = state_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 state_;
};

}  // namespace detail

// Deterministic mean-reverting random walk clipped to [-1, 1], standing in
// for an area-control-error driven AGC signal. The level is pulled toward
// zero at mean_reversion (1/h) and driven through a mean-reverting velocity
// rather than directly by noise, so the walk is smooth at the step scale
// and its movement concentrates at the tens-of-seconds scale of a real
// control error. volatility scales the amplitude (0 gives an all-zero
// signal). Identical seeds produce identical signals.
inline RegulationSignal synthesize_ace(
    std::uint64_t seed, int hours,
    double step_size_hours = kDefaultStepHours,
    double mean_reversion = kDefaultMeanReversion,
    double volatility = kDefaultVolatility) {
  if (hours < 1) {
    throw std::invalid_argument("synthesize_ace: hours must be >= 1");
  }
  if (!(volatility >= 0.0)) {
    throw std::invalid_argument("synthesize_ace: volatility must be >= 0");
  }
  if (!(mean_reversion >= 0.0)) {
    throw std::invalid_argument("synthesize_ace: mean_reversion must be >= 0");
  }
  detail::GaussianRng rng(seed);
  const double ts = step_size_hours;  // validated by the result constructor
  // Exact discretization of the velocity process, stable for any step size.
  const double velocity_decay = std::exp(-detail::kVelocityReversion * ts);
  const double velocity_noise =
      volatility * detail::kVelocityScale *
      std::sqrt((1.0 - velocity_decay * velocity_decay) /
                (2.0 * detail::kVelocityReversion));
  const double level_decay = std::exp(-mean_reversion * ts);
  const double level_gain =
      mean_reversion > 0.0 ? (1.0 - level_decay) / mean_reversion : ts;
  const double n_steps_d = std::round(1.0 / ts);
  const auto total =
      static_cast<std::size_t>(n_steps_d) * static_cast<std::size_t>(hours);
  std::vector<double> values;
  values.reserve(total);
  double level = 0.0;
  double velocity = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    velocity = velocity * velocity_decay + velocity_noise * rng.next();
    level = level * level_decay + velocity * level_gain;
    values.push_back(std::clamp(level, -1.0, 1.0));
  }
  return RegulationSignal(step_size_hours, std::move(values));
}

struct FastSlowSplit {
  RegulationSignal slow;
  RegulationSignal fast;
};

// Low-pass / high-pass decomposition of a regulation signal. The slow part
// is a single-pole exponential moving average seeded at the first sample;
// the fast part is the residual, conditioned to be zero-mean within each
// aligned zero_mean_window (its mean over every such window is subtracted),
// then clipped to [-1, 1]. zero_mean_window_hours must divide the hour
// evenly; 0 disables conditioning (slow + fast then reconstructs the input
// exactly wherever the clip does not bind).
inline FastSlowSplit split_fast_slow(
    const RegulationSignal& ace,
    double smoothing_time_constant_hours = kDefaultSmoothingHours,
    double zero_mean_window_hours = kDefaultZeroMeanWindowHours) {
  if (!(smoothing_time_constant_hours >= 0.0)) {
    throw std::invalid_argument(
        "split_fast_slow: smoothing time constant must be >= 0");
  }
  const double ts = ace.step_size_hours();
  std::size_t window_steps = 0;
  if (zero_mean_window_hours != 0.0) {
    const double w = zero_mean_window_hours / ts;
    const double wr = std::round(w);
    if (!(zero_mean_window_hours > 0.0) || wr < 1.0 ||
        std::abs(w - wr) > 1e-6 ||
        ace.steps_per_hour() % static_cast<int>(wr) != 0) {
      throw std::invalid_argument(
          "split_fast_slow: zero-mean window must divide the hour evenly");
    }
    window_steps = static_cast<std::size_t>(wr);
  }

  const double alpha =
      smoothing_time_constant_hours == 0.0
          ? 1.0
          : 1.0 - std::exp(-ts / smoothing_time_constant_hours);

  const auto& x = ace.values();
  std::vector<double> slow(x.size());
  std::vector<double> fast_raw(x.size());
  double ema = x.front();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) {
      // alpha == 1 must pass the signal through bit-exactly.
      ema = alpha == 1.0 ? x[i] : ema + alpha * (x[i] - ema);
    }
    slow[i] = ema;
    fast_raw[i] = x[i] - ema;
  }

  std::vector<double> fast(x.size());
  if (window_steps == 0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      fast[i] = std::clamp(fast_raw[i], -1.0, 1.0);
    }
  } else {
    for (std::size_t begin = 0; begin < x.size(); begin += window_steps) {
      const std::size_t end = std::min(begin + window_steps, x.size());
      double sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        sum += fast_raw[i];
      }
      const double mean = sum / static_cast<double>(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        fast[i] = std::clamp(fast_raw[i] - mean, -1.0, 1.0);
      }
    }
  }

  return FastSlowSplit{
      RegulationSignal(ts, std::move(slow), ace.start_hour()),
      RegulationSignal(ts, std::move(fast), ace.start_hour())};
}

// Trinary quantization with hysteresis: a nonzero state is entered when
// |value| >= enter_threshold and released when |value| <= exit_threshold;
// between the two thresholds the previous state holds.
inline RegulationSignal trinary_quantize(
    const RegulationSignal& fast,
    double enter_threshold = kDefaultEnterThreshold,
    double exit_threshold = kDefaultExitThreshold) {
  if (!(exit_threshold >= 0.0 && exit_threshold < enter_threshold &&
        enter_threshold <= 1.0)) {
    throw std::invalid_argument(
        "trinary_quantize: need 0 <= exit < enter <= 1");
  }
  std::vector<double> out(fast.size());
  double state = 0.0;
  for (std::size_t i = 0; i < fast.size(); ++i) {
    const double s = fast.values()[i];
    const double mag = std::abs(s);
    if (mag <= exit_threshold) {
      state = 0.0;
    } else if (mag >= enter_threshold) {
      state = s > 0.0 ? 1.0 : -1.0;
    }
    out[i] = state;
  }
  return RegulationSignal(fast.step_size_hours(), std::move(out),
                          fast.start_hour());
}

// Means of consecutive aligned windows (e.g. the 15-minute block means used
// to check zero-mean conditioning). window_hours must divide the hour
// evenly.
inline std::vector<double> aligned_window_means(const RegulationSignal& signal,
                                                double window_hours) {
  const double w = window_hours / signal.step_size_hours();
  const double wr = std::round(w);
  if (!(window_hours > 0.0) || wr < 1.0 || std::abs(w - wr) > 1e-6 ||
      signal.steps_per_hour() % static_cast<int>(wr) != 0) {
    throw std::invalid_argument(
        "aligned_window_means: window must divide the hour evenly");
  }
  const auto window_steps = static_cast<std::size_t>(wr);
  std::vector<double> means;
  means.reserve(signal.size() / window_steps);
  const auto& v = signal.values();
  for (std::size_t begin = 0; begin + window_steps <= v.size();
       begin += window_steps) {
    double sum = 0.0;
    for (std::size_t i = begin; i < begin + window_steps; ++i) {
      sum += v[i];
    }
    means.push_back(sum / static_cast<double>(window_steps));
  }
  return means;
}

}  // namespace regsim
