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
#include "regsim/signal.hpp"

using namespace regsim;

TEST_CASE("mileage: hand-evaluated cases") {
  CHECK(mileage(std::vector<double>{0, 0, 0}, 1.0) == 0.0);
  CHECK(mileage(std::vector<double>{1, -1, 1, -1}, 1.0) == 7.0);
  CHECK(mileage(std::vector<double>{0.5, 0.5}, 2.0) == doctest::Approx(0.25));
}

TEST_CASE("mileage: explicit initial power") {
  CHECK(mileage(std::vector<double>{1.0}, 1.0, 1.0) == 0.0);
  CHECK(mileage(std::vector<double>{1.0}, 1.0, -1.0) == 2.0);
}

TEST_CASE("mileage: rejected inputs") {
  CHECK_THROWS_AS(mileage(std::vector<double>{0.5}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mileage(std::vector<double>{0.5}, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mileage(std::vector<double>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mileage(std::vector<double>{1.5}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("mileage: equals brute-force summation on random signals") {
  oracle::TestRng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto signal = oracle::random_signal(rng, rng.uniform_int(2, 60));
    const double expected = oracle::mileage(signal.values(), 1.0, 0.0);
    CHECK(mileage(signal.values(), 1.0, 0.0) == expected);
  }
}

TEST_CASE("energy_requirement: hand-evaluated cases") {
  const double ts = 0.25;
  CHECK(energy_requirement(RegulationSignal(ts, {1, 1, -1, -1})) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(energy_requirement(RegulationSignal(ts, {0, 0, 0, 0})) == 0.0);
  CHECK(energy_requirement(RegulationSignal(ts, {1, 1, 1, 1})) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("energy_requirement: multi-hour signals are rejected") {
  const RegulationSignal two_hours(0.5, {1, -1, 1, -1});
  REQUIRE(two_hours.hours() == 2);
  CHECK_THROWS_AS(energy_requirement(two_hours), std::invalid_argument);
  CHECK_THROWS_AS(energy_balance(two_hours), std::invalid_argument);
}

TEST_CASE("energy_balance: hand-evaluated cases") {
  CHECK(energy_balance(RegulationSignal(0.5, {-1, 1})) == doctest::Approx(1.0));
  CHECK(energy_balance(RegulationSignal(0.5, {1, -1})) == doctest::Approx(0.0));
  CHECK(energy_balance(RegulationSignal(0.25, {1, -1, -1, 1})) ==
        doctest::Approx(0.5));
}

TEST_CASE("energy_balance: flat signal is undefined") {
  CHECK_THROWS_AS(energy_balance(RegulationSignal(0.5, {0, 0})),
                  std::domain_error);
}

TEST_CASE("energy_balance: falls outside [0,1] when the cumulative sum "
          "never crosses zero") {
  // All-charging hour: min partial sum is positive, so sigma < 0.
  const RegulationSignal charging(0.25, {1, 1, 1, 1});
  CHECK(energy_balance(charging) < 0.0);
  const auto hours = analyze_hours(charging);
  REQUIRE(hours.size() == 1);
  CHECK(hours[0].balance_out_of_range());
}

TEST_CASE("cumulative-sum metrics match the brute-force oracle") {
  oracle::TestRng rng(202);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto signal = oracle::random_signal(rng, rng.uniform_int(2, 48));
    const double e = energy_requirement(signal);
    CHECK(e == doctest::Approx(oracle::energy_requirement(signal))
                   .epsilon(1e-12));
    if (e > 0.0) {
      CHECK(energy_balance(signal) ==
            doctest::Approx(oracle::energy_balance(signal)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sign flip: energy invariant, balance maps to 1 - sigma") {
  oracle::TestRng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const auto signal = oracle::random_signal(rng, 24);
    std::vector<double> flipped;
    for (double v : signal.values()) {
      flipped.push_back(-v);
    }
    const RegulationSignal mirror(signal.step_size_hours(), flipped);
    CHECK(energy_requirement(mirror) ==
          doctest::Approx(energy_requirement(signal)).epsilon(1e-12));
    if (energy_requirement(signal) > 0.0) {
      CHECK(energy_balance(mirror) ==
            doctest::Approx(1.0 - energy_balance(signal)).epsilon(1e-9));
    }
  }
}

TEST_CASE("RegulationSignal: invariant violations are rejected") {
  CHECK_THROWS_AS(RegulationSignal(0.0, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(RegulationSignal(-0.25, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(RegulationSignal(0.25, {}), std::invalid_argument);
  CHECK_THROWS_AS(RegulationSignal(0.25, {1.0001}), std::invalid_argument);
  CHECK_THROWS_AS(RegulationSignal(0.25, {std::nan("")}),
                  std::invalid_argument);
  // 1/0.3 is not an integer number of steps per hour.
  CHECK_THROWS_AS(RegulationSignal(0.3, {0.5}), std::invalid_argument);
  // Three samples do not fill an hour at four steps per hour.
  CHECK_THROWS_AS(RegulationSignal(0.25, {0.5, 0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(RegulationSignal::from_steps_per_hour(0, {0.5}),
                  std::invalid_argument);
}

TEST_CASE("RegulationSignal: hour segmentation") {
  const RegulationSignal signal(0.5, {0.1, 0.2, 0.3, 0.4}, 7);
  REQUIRE(signal.hours() == 2);
  const auto seg = signal.hour_segment(1);
  CHECK(seg.start_hour() == 8);
  CHECK(seg.values() == std::vector<double>{0.3, 0.4});
  CHECK_THROWS_AS(signal.hour_segment(2), std::out_of_range);
}

TEST_CASE("analyze_hours chains the initial power level across hours") {
  // Hour 0 ends at 1.0; hour 1 opens at 1.0, so its first movement is
  // |0.5 - 1.0| rather than |0.5 - 0|.
  const RegulationSignal signal(0.5, {0.0, 1.0, 0.5, 0.5});
  const auto hours = analyze_hours(signal);
  REQUIRE(hours.size() == 2);
  CHECK(hours[0].mileage == doctest::Approx(1.0));
  CHECK(hours[1].mileage == doctest::Approx(0.5));
}
