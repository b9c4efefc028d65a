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

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "regsim/ess.hpp"

namespace regsim {

enum class Market { pjm, nyiso, miso, isone, caiso };

inline const char* to_string(Market market) {
  switch (market) {
    case Market::pjm: return "PJM";
    case Market::nyiso: return "NYISO";
    case Market::miso: return "MISO";
    case Market::isone: return "ISONE";
    case Market::caiso: return "CAISO";
  }
  return "?";
}

inline std::optional<Market> parse_market(std::string_view name) {
  if (name == "PJM") return Market::pjm;
  if (name == "NYISO") return Market::nyiso;
  if (name == "MISO") return Market::miso;
  if (name == "ISONE") return Market::isone;
  if (name == "CAISO") return Market::caiso;
  return std::nullopt;
}

// One market-hour of clearing prices. CAISO may split the capacity price
// into regulation-up and regulation-down components; markets without a
// mileage product simply omit the mileage price.
struct PriceRecord {
  Market market = Market::pjm;
  std::string hour_utc;  // "YYYY-MM-DDTHH"
  double capacity_price = 0.0;
  std::optional<double> mileage_price;
  std::optional<double> lmp;
  std::optional<double> reg_up_capacity_price;
  std::optional<double> reg_down_capacity_price;
};

// One unit-hour of regulation participation.
struct AwardRecord {
  double capacity_mw = 0.0;
  double mileage = 0.0;
  std::optional<double> reference_mileage;  // traditional-signal mileage (PJM)
  PerformanceScore performance{1.0, ScoreMethod::accuracy};
};

// Credits in dollars. total is exactly the sum of the components; rounding
// to cents happens at the reporting boundary (see round_cents and the
// settlement CSV writer), not here, so credits stay linear and composable.
struct CreditResult {
  double capacity_credit = 0.0;
  double mileage_credit = 0.0;
  double energy_settlement = 0.0;
  double total = 0.0;
};

inline double round_cents(double dollars) {
  return std::round(dollars * 100.0) / 100.0;
}

inline constexpr double kMisoFullCreditThreshold = 0.70;
inline constexpr int kMisoIntervalsPerHour = 12;

namespace detail {

inline void validate_award(const AwardRecord& award) {
  if (!(award.capacity_mw >= 0.0)) {
    throw std::invalid_argument("AwardRecord: capacity must be >= 0");
  }
  if (!(award.mileage >= 0.0)) {
    throw std::invalid_argument("AwardRecord: mileage must be >= 0");
  }
  if (!(award.performance.value >= 0.0 && award.performance.value <= 1.0)) {
    throw std::invalid_argument("AwardRecord: performance must be in [0,1]");
  }
}

inline void validate_price(const PriceRecord& price) {
  const auto finite = [](const std::optional<double>& v) {
    return !v || std::isfinite(*v);
  };
  if (!std::isfinite(price.capacity_price) || !finite(price.mileage_price) ||
      !finite(price.lmp) || !finite(price.reg_up_capacity_price) ||
      !finite(price.reg_down_capacity_price)) {
    throw std::invalid_argument("PriceRecord: prices must be finite");
  }
  if (price.reg_up_capacity_price.has_value() !=
      price.reg_down_capacity_price.has_value()) {
    throw std::invalid_argument(
        "PriceRecord: split records need both up and down capacity prices");
  }
}

// Effective capacity price: the up/down split (when present) settles as two
// evaluations on the same capacity, which sums the component prices.
inline double capacity_rate(const PriceRecord& price) {
  if (price.reg_up_capacity_price) {
    return *price.reg_up_capacity_price + *price.reg_down_capacity_price;
  }
  return price.capacity_price;
}

inline double mileage_rate_or_throw(const AwardRecord& award,
                                    const PriceRecord& price) {
  if (award.mileage == 0.0) {
    return price.mileage_price.value_or(0.0);
  }
  if (!price.mileage_price) {
    throw std::invalid_argument(
        "settlement: mileage price missing for an award with mileage > 0");
  }
  return *price.mileage_price;
}

inline CreditResult make_credit(double capacity_credit, double mileage_credit,
                                double energy_settlement = 0.0) {
  CreditResult r;
  r.capacity_credit = capacity_credit;
  r.mileage_credit = mileage_credit;
  r.energy_settlement = energy_settlement;
  r.total = r.capacity_credit + r.mileage_credit + r.energy_settlement;
  return r;
}

}  // namespace detail

// Generic pay-for-performance credit: C * (lambda_C + rho * M * lambda_M).
// Applies to CAISO and the NYISO real-time market; the performance factor
// scales the mileage term only.
inline CreditResult credit_generic(const AwardRecord& award,
                                   const PriceRecord& price) {
  detail::validate_award(award);
  detail::validate_price(price);
  const double lambda_m = detail::mileage_rate_or_throw(award, price);
  const double c = award.capacity_mw;
  const double rho = award.performance.value;
  return detail::make_credit(c * detail::capacity_rate(price),
                             c * rho * award.mileage * lambda_m);
}

// ISO-NE credit: rho * C * (lambda_C + M * lambda_M). The performance
// factor discounts the capacity payment as well.
inline CreditResult credit_isone(const AwardRecord& award,
                                 const PriceRecord& price) {
  detail::validate_award(award);
  detail::validate_price(price);
  const double lambda_m = detail::mileage_rate_or_throw(award, price);
  const double c = award.capacity_mw;
  const double rho = award.performance.value;
  return detail::make_credit(rho * c * detail::capacity_rate(price),
                             rho * c * award.mileage * lambda_m);
}

// PJM credit: rho * C * (lambda_C + (M / M_RegA) * lambda_M), where M_RegA
// is the mileage of the traditional regulation signal.
inline CreditResult credit_pjm(const AwardRecord& award,
                               const PriceRecord& price) {
  detail::validate_award(award);
  detail::validate_price(price);
  if (!award.reference_mileage || !(*award.reference_mileage > 0.0)) {
    throw std::invalid_argument(
        "credit_pjm: reference mileage (M_RegA) must be present and > 0");
  }
  const double lambda_m = detail::mileage_rate_or_throw(award, price);
  const double c = award.capacity_mw;
  const double rho = award.performance.value;
  const double ratio = award.mileage / *award.reference_mileage;
  return detail::make_credit(rho * c * detail::capacity_rate(price),
                             rho * c * ratio * lambda_m);
}

// MISO credit: evaluated per 5-minute performance test interval, weighted
// 1/12 each. An interval at or above the 70% threshold receives full credit
// (performance treated as 1); below it, the actual score applies.
inline CreditResult credit_miso(const AwardRecord& award,
                                const PriceRecord& price,
                                std::span<const double> interval_scores) {
  detail::validate_award(award);
  detail::validate_price(price);
  if (interval_scores.size() != kMisoIntervalsPerHour) {
    throw std::invalid_argument(
        "credit_miso: expected one score per 5-minute interval (12)");
  }
  for (double s : interval_scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument(
          "credit_miso: interval scores must be in [0,1]");
    }
  }
  const double lambda_m = detail::mileage_rate_or_throw(award, price);
  const double c = award.capacity_mw;
  const double weight = 1.0 / kMisoIntervalsPerHour;
  double mileage_credit = 0.0;
  for (double s : interval_scores) {
    const double rho_eff = s >= kMisoFullCreditThreshold ? 1.0 : s;
    mileage_credit += weight * c * rho_eff * award.mileage * lambda_m;
  }
  return detail::make_credit(c * detail::capacity_rate(price),
                             mileage_credit);
}

// CAISO regulation-energy settlement at the locational marginal price:
// charged and discharged regulation energy and the dispatched balancing
// energy all settle at the LMP. Under REM (which restores the SoC) the net
// is minus the losses, so the unit pays for them.
inline double caiso_energy_settlement(double charged_mwh,
                                      double discharged_mwh,
                                      double rem_dispatch_mwh, double lmp) {
  if (!(charged_mwh >= 0.0) || !(discharged_mwh >= 0.0)) {
    throw std::invalid_argument(
        "caiso_energy_settlement: energies must be >= 0");
  }
  if (!std::isfinite(lmp) || !std::isfinite(rem_dispatch_mwh)) {
    throw std::invalid_argument(
        "caiso_energy_settlement: inputs must be finite");
  }
  return (discharged_mwh - charged_mwh - rem_dispatch_mwh) * lmp;
}

// Credit under the market's own rule. MISO uses the per-interval scores
// when given, otherwise the award's performance uniformly.
inline CreditResult credit_for_market(Market market, const AwardRecord& award,
                                      const PriceRecord& price,
                                      std::span<const double> interval_scores =
                                          {}) {
  switch (market) {
    case Market::pjm:
      return credit_pjm(award, price);
    case Market::isone:
      return credit_isone(award, price);
    case Market::miso: {
      if (!interval_scores.empty()) {
        return credit_miso(award, price, interval_scores);
      }
      const std::vector<double> uniform(kMisoIntervalsPerHour,
                                        award.performance.value);
      return credit_miso(award, price, uniform);
    }
    case Market::nyiso:
    case Market::caiso:
      return credit_generic(award, price);
  }
  throw std::logic_error("credit_for_market: unknown market");
}

}  // namespace regsim
