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
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "regsim/csv.hpp"
#include "regsim/ess.hpp"
#include "regsim/market_data.hpp"
#include "regsim/policies.hpp"
#include "regsim/signal.hpp"

namespace regsim {

inline constexpr std::string_view kSignalCsvHeader = "hour,step,value";
inline constexpr std::string_view kTrajectoryCsvHeader =
    "step,commanded_mw,actual_mw,soc";
inline constexpr std::string_view kEventsCsvHeader =
    "step,policy,action,base_point_mw,energy_mwh,soc_before,soc_after";
inline constexpr std::string_view kSummaryCsvHeader =
    "metric,min,lower_fence,q1,median,q3,upper_fence,max,outliers";
inline constexpr std::string_view kSettlementCsvHeader =
    "market,hour,capacity_credit,mileage_credit,energy_settlement,total";

inline void write_signal_csv(const RegulationSignal& signal,
                             std::ostream& out) {
  out << kSignalCsvHeader << '\n';
  const int n = signal.steps_per_hour();
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const int hour = signal.start_hour() + static_cast<int>(i) / n;
    const int step = static_cast<int>(i) % n;
    out << hour << ',' << step << ','
        << csv::format_double(signal.values()[i]) << '\n';
  }
}

// Read a signal CSV (`hour,step,value`). Rows may arrive in any order but
// must cover every step of every hour exactly once, over contiguous hours,
// with |value| <= 1.
inline RegulationSignal read_signal_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::strip_cr(line) != kSignalCsvHeader) {
    throw std::runtime_error("signal CSV: header mismatch, expected '" +
                             std::string(kSignalCsvHeader) + "'");
  }
  struct Row {
    long long hour;
    long long step;
    double value;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  long long max_step = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = csv::strip_cr(line);
    if (row.empty()) {
      continue;
    }
    const auto fields = csv::split(row);
    if (fields.size() != 3) {
      throw std::runtime_error("signal CSV line " + std::to_string(line_no) +
                               ": expected 3 columns");
    }
    const auto hour = csv::parse_int(fields[0]);
    const auto step = csv::parse_int(fields[1]);
    const auto value = csv::parse_double(fields[2]);
    if (!hour || !step || step < 0) {
      throw std::runtime_error("signal CSV line " + std::to_string(line_no) +
                               ": bad hour/step index");
    }
    if (!value || std::abs(*value) > 1.0) {
      throw std::runtime_error("signal CSV line " + std::to_string(line_no) +
                               ": value must be a number in [-1,1]");
    }
    rows.push_back({*hour, *step, *value});
    max_step = std::max(max_step, *step);
  }
  if (rows.empty()) {
    throw std::runtime_error("signal CSV: no data rows");
  }
  const long long steps_per_hour = max_step + 1;
  long long min_hour = rows.front().hour;
  long long max_hour = rows.front().hour;
  for (const auto& r : rows) {
    min_hour = std::min(min_hour, r.hour);
    max_hour = std::max(max_hour, r.hour);
  }
  const auto hours = static_cast<std::size_t>(max_hour - min_hour + 1);
  const auto total = hours * static_cast<std::size_t>(steps_per_hour);
  if (rows.size() != total) {
    throw std::runtime_error(
        "signal CSV: expected " + std::to_string(total) +
        " rows covering every step of hours " + std::to_string(min_hour) +
        ".." + std::to_string(max_hour) + ", got " +
        std::to_string(rows.size()));
  }
  std::vector<double> values(total);
  std::vector<bool> seen(total, false);
  for (const auto& r : rows) {
    if (r.step >= steps_per_hour) {
      throw std::runtime_error("signal CSV: step index out of range");
    }
    const auto idx = static_cast<std::size_t>(
        (r.hour - min_hour) * steps_per_hour + r.step);
    if (seen[idx]) {
      throw std::runtime_error("signal CSV: duplicate entry for hour " +
                               std::to_string(r.hour) + " step " +
                               std::to_string(r.step));
    }
    seen[idx] = true;
    values[idx] = r.value;
  }
  return RegulationSignal::from_steps_per_hour(
      static_cast<int>(steps_per_hour), std::move(values),
      static_cast<int>(min_hour));
}

inline RegulationSignal read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("signal CSV: cannot open " + path);
  }
  return read_signal_csv(in);
}

inline void write_trajectory_csv(const SocTrajectory& trajectory,
                                 std::ostream& out) {
  out << kTrajectoryCsvHeader << '\n';
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << i << ',' << csv::format_double(trajectory.commanded_power_mw[i])
        << ',' << csv::format_double(trajectory.actual_power_mw[i]) << ','
        << csv::format_double(trajectory.soc[i]) << '\n';
  }
}

inline void write_events_csv(const std::vector<PolicyEvent>& events,
                             std::ostream& out) {
  out << kEventsCsvHeader << '\n';
  for (const auto& e : events) {
    out << e.step << ',' << to_string(e.policy) << ',' << e.action << ','
        << csv::format_double(e.base_point_mw) << ','
        << csv::format_double(e.energy_mwh) << ','
        << csv::format_double(e.soc_before) << ','
        << csv::format_double(e.soc_after) << '\n';
  }
}

inline void write_summary_row(std::string_view metric,
                              const QuantileSummary& s, std::ostream& out) {
  out << metric << ',' << csv::format_double(s.min) << ','
      << csv::format_double(s.lower_fence) << ',' << csv::format_double(s.q1)
      << ',' << csv::format_double(s.median) << ','
      << csv::format_double(s.q3) << ',' << csv::format_double(s.upper_fence)
      << ',' << csv::format_double(s.max) << ',' << s.outlier_count << '\n';
}

struct SettlementRow {
  Market market = Market::pjm;
  std::string hour;
  CreditResult credit;
};

inline void write_settlement_csv(const std::vector<SettlementRow>& rows,
                                 std::ostream& out) {
  out << kSettlementCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.market) << ',' << r.hour << ','
        << csv::format_money(r.credit.capacity_credit) << ','
        << csv::format_money(r.credit.mileage_credit) << ','
        << csv::format_money(r.credit.energy_settlement) << ','
        << csv::format_money(r.credit.total) << '\n';
  }
}

}  // namespace regsim
