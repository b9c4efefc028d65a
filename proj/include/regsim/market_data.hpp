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
#include <cctype>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "regsim/csv.hpp"
#include "regsim/settlement.hpp"

namespace regsim {

// Normalized price CSV schema shared by all markets; fields a market lacks
// stay empty.
inline constexpr std::string_view kPriceCsvHeader =
    "market,hour_utc,capacity_price,mileage_price,lmp,"
    "reg_up_capacity_price,reg_down_capacity_price";

struct PriceSeries {
  Market market = Market::pjm;
  std::vector<PriceRecord> records;  // strictly increasing hour_utc
};

struct RowDiagnostic {
  std::size_t line = 0;  // 1-based line number in the file
  std::string message;
};

struct PriceLoadResult {
  PriceSeries series;
  std::vector<RowDiagnostic> diagnostics;
  std::size_t rows_loaded = 0;
};

namespace detail {

inline bool valid_hour_utc(std::string_view ts) {
  // "YYYY-MM-DDTHH"
  if (ts.size() != 13 || ts[4] != '-' || ts[7] != '-' || ts[10] != 'T') {
    return false;
  }
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u}) {
    if (!std::isdigit(static_cast<unsigned char>(ts[i]))) {
      return false;
    }
  }
  const int month = (ts[5] - '0') * 10 + (ts[6] - '0');
  const int day = (ts[8] - '0') * 10 + (ts[9] - '0');
  const int hour = (ts[11] - '0') * 10 + (ts[12] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31 && hour <= 23;
}

inline bool parse_optional_price(std::string_view field, const char* column,
                                 std::size_t line,
                                 std::optional<double>* out,
                                 std::vector<RowDiagnostic>* diagnostics) {
  if (field.empty()) {
    out->reset();
    return true;
  }
  const auto value = csv::parse_double(field);
  if (!value) {
    diagnostics->push_back(
        {line, std::string("column ") + column + ": unparseable or "
                                                 "non-finite number '" +
                   std::string(field) + "'"});
    return false;
  }
  *out = *value;
  return true;
}

}  // namespace detail

// Parse the normalized price CSV. The header must match the schema exactly
// (hard failure otherwise); malformed rows are reported with their line
// numbers and skipped, valid rows are kept and time-sorted.
inline PriceLoadResult load_prices(std::istream& in, Market market) {
  PriceLoadResult result;
  result.series.market = market;

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("price CSV: missing header");
  }
  if (csv::strip_cr(line) != kPriceCsvHeader) {
    throw std::runtime_error(std::string("price CSV: header mismatch, "
                                         "expected '") +
                             std::string(kPriceCsvHeader) + "'");
  }

  std::size_t line_no = 1;
  std::unordered_set<std::string> seen_hours;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = csv::strip_cr(line);
    if (row.empty()) {
      continue;
    }
    const auto fields = csv::split(row);
    if (fields.size() != 7) {
      result.diagnostics.push_back(
          {line_no, "expected 7 columns, got " +
                        std::to_string(fields.size())});
      continue;
    }
    PriceRecord rec;
    const auto row_market = parse_market(fields[0]);
    if (!row_market) {
      result.diagnostics.push_back(
          {line_no, "column market: unknown market '" +
                        std::string(fields[0]) + "'"});
      continue;
    }
    if (*row_market != market) {
      result.diagnostics.push_back(
          {line_no, std::string("column market: expected ") +
                        to_string(market) + ", got " +
                        std::string(fields[0])});
      continue;
    }
    rec.market = *row_market;
    if (!detail::valid_hour_utc(fields[1])) {
      result.diagnostics.push_back(
          {line_no, "column hour_utc: expected YYYY-MM-DDTHH, got '" +
                        std::string(fields[1]) + "'"});
      continue;
    }
    rec.hour_utc = std::string(fields[1]);
    const auto capacity = csv::parse_double(fields[2]);
    if (!capacity) {
      result.diagnostics.push_back(
          {line_no, "column capacity_price: unparseable or non-finite "
                    "number '" +
                        std::string(fields[2]) + "'"});
      continue;
    }
    rec.capacity_price = *capacity;
    if (!detail::parse_optional_price(fields[3], "mileage_price", line_no,
                                      &rec.mileage_price,
                                      &result.diagnostics) ||
        !detail::parse_optional_price(fields[4], "lmp", line_no, &rec.lmp,
                                      &result.diagnostics) ||
        !detail::parse_optional_price(fields[5], "reg_up_capacity_price",
                                      line_no, &rec.reg_up_capacity_price,
                                      &result.diagnostics) ||
        !detail::parse_optional_price(fields[6], "reg_down_capacity_price",
                                      line_no, &rec.reg_down_capacity_price,
                                      &result.diagnostics)) {
      continue;
    }
    if (rec.reg_up_capacity_price.has_value() !=
        rec.reg_down_capacity_price.has_value()) {
      result.diagnostics.push_back(
          {line_no, "split capacity prices need both reg_up and reg_down"});
      continue;
    }
    if (!seen_hours.insert(rec.hour_utc).second) {
      result.diagnostics.push_back(
          {line_no, "duplicate timestamp " + rec.hour_utc});
      continue;
    }
    result.series.records.push_back(std::move(rec));
  }
  std::sort(result.series.records.begin(), result.series.records.end(),
            [](const PriceRecord& a, const PriceRecord& b) {
              return a.hour_utc < b.hour_utc;
            });
  result.rows_loaded = result.series.records.size();
  return result;
}

inline PriceLoadResult load_prices(const std::string& path, Market market) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("price CSV: cannot open " + path);
  }
  return load_prices(in, market);
}

inline void write_prices(const PriceSeries& series, std::ostream& out) {
  out << kPriceCsvHeader << '\n';
  auto opt = [](const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
  };
  for (const auto& rec : series.records) {
    out << to_string(rec.market) << ',' << rec.hour_utc << ','
        << csv::format_double(rec.capacity_price) << ','
        << opt(rec.mileage_price) << ',' << opt(rec.lmp) << ','
        << opt(rec.reg_up_capacity_price) << ','
        << opt(rec.reg_down_capacity_price) << '\n';
  }
}

// Box-plot statistics of a value series: quartiles by the inclusive
// linear-interpolation method, Tukey fences at 1.5 IQR. With
// exclude_outliers the reported min/max are the whisker ends (the extreme
// values inside the fences).
struct QuantileSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  std::size_t outlier_count = 0;
};

inline QuantileSummary boxplot_stats(std::span<const double> values,
                                     bool exclude_outliers = false) {
  if (values.empty()) {
    throw std::invalid_argument("boxplot_stats: values must be nonempty");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  };
  QuantileSummary s;
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  const double iqr = s.q3 - s.q1;
  s.lower_fence = s.q1 - 1.5 * iqr;
  s.upper_fence = s.q3 + 1.5 * iqr;
  s.min = sorted.front();
  s.max = sorted.back();
  for (double v : sorted) {
    if (v < s.lower_fence || v > s.upper_fence) {
      ++s.outlier_count;
    }
  }
  if (exclude_outliers && s.outlier_count > 0) {
    for (double v : sorted) {
      if (v >= s.lower_fence) {
        s.min = v;
        break;
      }
    }
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
      if (*it <= s.upper_fence) {
        s.max = *it;
        break;
      }
    }
  }
  return s;
}

// Hourly payments for one award template under a market's credit rule,
// plus their distribution. Mirrors the day-ahead payment methodology: the
// performance factor defaults to an ideal 100% unless the template carries
// another value.
struct PaymentDistribution {
  std::vector<double> hourly_payments;
  QuantileSummary summary;
  double mean = 0.0;
};

inline PaymentDistribution payment_distribution(
    const PriceSeries& series, const AwardRecord& award_template) {
  if (series.records.empty()) {
    throw std::invalid_argument("payment_distribution: empty price series");
  }
  PaymentDistribution dist;
  dist.hourly_payments.reserve(series.records.size());
  double sum = 0.0;
  for (const auto& rec : series.records) {
    AwardRecord award = award_template;
    if (!rec.mileage_price) {
      // Capacity-only market hour: the mileage term does not settle.
      award.mileage = 0.0;
    }
    const CreditResult credit =
        credit_for_market(series.market, award, rec);
    dist.hourly_payments.push_back(credit.total);
    sum += credit.total;
  }
  dist.summary = boxplot_stats(dist.hourly_payments);
  dist.mean = sum / static_cast<double>(dist.hourly_payments.size());
  return dist;
}

}  // namespace regsim
