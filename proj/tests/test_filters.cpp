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
#include "regsim/signal.hpp"

using namespace regsim;

TEST_CASE("synthesize_ace: zero volatility gives an all-zero signal") {
  const auto signal = synthesize_ace(42, 2, 1.0 / 900.0, 10.0, 0.0);
  for (double v : signal.values()) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("synthesize_ace: deterministic for a given seed") {
  const auto a = synthesize_ace(7, 3);
  const auto b = synthesize_ace(7, 3);
  CHECK(a.values() == b.values());
  const auto c = synthesize_ace(8, 3);
  CHECK(a.values() != c.values());
}

TEST_CASE("synthesize_ace: output stays within [-1, 1]") {
  const auto signal = synthesize_ace(1, 24, 1.0 / 900.0);
  REQUIRE(signal.size() == 24u * 900u);
  for (double v : signal.values()) {
    CHECK(std::abs(v) <= 1.0);
  }
}

TEST_CASE("synthesize_ace: stable at coarse step sizes") {
  const auto signal = synthesize_ace(5, 2, 0.25);
  REQUIRE(signal.size() == 8);
  for (double v : signal.values()) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) <= 1.0);
  }
}

TEST_CASE("synthesize_ace: rejects bad parameters") {
  CHECK_THROWS_AS(synthesize_ace(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_ace(1, 1, 1.0 / 900.0, 10.0, -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(synthesize_ace(1, 1, 1.0 / 900.0, -1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("split_fast_slow: constant signal has no fast component") {
  const RegulationSignal ace(0.25, std::vector<double>(8, 0.4));
  const auto split = split_fast_slow(ace, 0.05, 0.25);
  for (std::size_t i = 0; i < ace.size(); ++i) {
    CHECK(split.slow.values()[i] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(split.fast.values()[i] == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("split_fast_slow: zero time constant passes the signal through") {
  const auto ace = synthesize_ace(3, 1);
  const auto split = split_fast_slow(ace, 0.0, 0.25);
  CHECK(split.slow.values() == ace.values());
  for (double v : split.fast.values()) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("split_fast_slow: slow + fast reconstructs the input before "
          "conditioning") {
  // Half-scale signal keeps the residual away from the clip.
  const auto ace = synthesize_ace(11, 2, 1.0 / 900.0, 10.0, 0.5);
  const auto split = split_fast_slow(ace, 0.05, 0.0);  // no conditioning
  for (std::size_t i = 0; i < ace.size(); ++i) {
    CHECK(split.slow.values()[i] + split.fast.values()[i] ==
          doctest::Approx(ace.values()[i]).epsilon(1e-14));
  }
}

TEST_CASE("split_fast_slow: conditioned fast signal is zero-mean per "
          "window") {
  const auto ace = synthesize_ace(13, 6);
  const auto split = split_fast_slow(ace, 0.05, 0.25);
  for (double mean : aligned_window_means(split.fast, 0.25)) {
    CHECK(std::abs(mean) < 0.01);
  }
}

TEST_CASE("split_fast_slow: window must divide the hour evenly") {
  const auto ace = synthesize_ace(1, 1);
  CHECK_THROWS_AS(split_fast_slow(ace, 0.05, 0.26), std::invalid_argument);
  CHECK_THROWS_AS(split_fast_slow(ace, 0.05, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(split_fast_slow(ace, -0.01, 0.25), std::invalid_argument);
}

TEST_CASE("trinary_quantize: hand-evaluated cases") {
  const auto quantize = [](std::vector<double> values, double enter,
                           double exit) {
    const int n = static_cast<int>(values.size());
    return trinary_quantize(
               RegulationSignal::from_steps_per_hour(n, std::move(values)),
               enter, exit)
        .values();
  };
  CHECK(quantize({0.5}, 0.3, 0.1) == std::vector<double>{1});
  CHECK(quantize({0, 0}, 0.3, 0.1) == std::vector<double>{0, 0});
  CHECK(quantize({0.4, 0.2, 0.05}, 0.3, 0.1) ==
        std::vector<double>{1, 1, 0});
  CHECK(quantize({-0.4, -0.2, -0.05}, 0.3, 0.1) ==
        std::vector<double>{-1, -1, 0});
  // Sign flip through the hysteresis band holds the previous state until
  // the magnitude re-enters.
  CHECK(quantize({0.4, -0.2, -0.35}, 0.3, 0.1) ==
        std::vector<double>{1, 1, -1});
}

TEST_CASE("trinary_quantize: threshold validation") {
  const RegulationSignal fast(0.5, {0.5, 0.5});
  CHECK_THROWS_AS(trinary_quantize(fast, 0.1, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(trinary_quantize(fast, 1.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(trinary_quantize(fast, 0.25, -0.1), std::invalid_argument);
}

TEST_CASE("fast component carries less energy than the input on nearly "
          "every hour") {
  const auto ace = synthesize_ace(17, 50);
  const auto split = split_fast_slow(ace);
  const auto hours_ace = analyze_hours(ace);
  const auto hours_fast = analyze_hours(split.fast);
  int below = 0;
  for (std::size_t h = 0; h < hours_ace.size(); ++h) {
    if (hours_fast[h].energy_requirement_mwh_per_mw <=
        hours_ace[h].energy_requirement_mwh_per_mw) {
      ++below;
    }
  }
  CHECK(below >= static_cast<int>(0.9 * hours_ace.size()));
}

TEST_CASE("trinary mileage stays within 2x of the fast-signal mileage on "
          "average") {
  const auto ace = synthesize_ace(19, 50);
  const auto split = split_fast_slow(ace);
  const auto trinary = trinary_quantize(split.fast);
  double fast_mileage = 0.0;
  double trinary_mileage = 0.0;
  for (const auto& h : analyze_hours(split.fast)) {
    fast_mileage += h.mileage;
  }
  for (const auto& h : analyze_hours(trinary)) {
    trinary_mileage += h.mileage;
  }
  const double ratio = trinary_mileage / fast_mileage;
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 2.0);
}

TEST_CASE("aligned_window_means: window validation and values") {
  const RegulationSignal signal(0.25, {1, 1, -1, -1});
  const auto means = aligned_window_means(signal, 0.5);
  REQUIRE(means.size() == 2);
  CHECK(means[0] == doctest::Approx(1.0));
  CHECK(means[1] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(aligned_window_means(signal, 0.3), std::invalid_argument);
}
