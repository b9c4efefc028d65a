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

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "regsim/csv.hpp"
#include "regsim/ess.hpp"
#include "regsim/filters.hpp"
#include "regsim/policies.hpp"
#include "regsim/settlement.hpp"

namespace regsim {

// Configuration errors name the offending field as [section].key.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& message)
      : std::runtime_error("scenario: " + message) {}
};

enum class SignalSource { synthesize, csv };
enum class SignalProduct { ace, rega, regd, enc, ent };
enum class PerformanceMode { ideal, simulated };

inline const char* to_string(SignalProduct product) {
  switch (product) {
    case SignalProduct::ace: return "ace";
    case SignalProduct::rega: return "rega";
    case SignalProduct::regd: return "regd";
    case SignalProduct::enc: return "enc";
    case SignalProduct::ent: return "ent";
  }
  return "?";
}

struct SignalSection {
  SignalSource source = SignalSource::synthesize;
  std::uint64_t seed = 1;
  int hours = 24;
  int steps_per_hour = 900;
  double mean_reversion = kDefaultMeanReversion;
  double volatility = kDefaultVolatility;
  std::string path;  // csv source
  SignalProduct product = SignalProduct::ace;
  double smoothing_hours = kDefaultSmoothingHours;
  double zero_mean_window_hours = kDefaultZeroMeanWindowHours;
  double enter_threshold = kDefaultEnterThreshold;
  double exit_threshold = kDefaultExitThreshold;
};

struct MarketSection {
  std::optional<Market> name;
  std::string price_csv;
};

struct AwardSection {
  double capacity_mw = 1.0;
  std::optional<double> mileage;            // empty: from the followed signal
  std::optional<double> reference_mileage;  // PJM M_RegA
  PerformanceMode performance = PerformanceMode::ideal;
};

struct RunSection {
  std::string out_dir;
};

struct ScenarioConfig {
  SignalSection signal;
  EssSpec ess;
  MarketSection market;
  PolicyConfig policy;
  AwardSection award;
  RunSection run;
  std::vector<Market> compare_markets;
  std::map<Market, std::string> price_paths;
};

// Command-line flags that override file values.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> market;
  std::optional<std::string> policy;
};

namespace detail {

using RawSections = std::map<std::string, std::map<std::string, std::string>>;

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline RawSections parse_raw_scenario(std::istream& in) {
  RawSections sections;
  std::string line;
  std::string current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';') {
      continue;
    }
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ScenarioError("line " + std::to_string(line_no) +
                            ": malformed section header");
      }
      current = std::string(trim(text.substr(1, text.size() - 2)));
      sections.try_emplace(current);
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError("line " + std::to_string(line_no) +
                          ": expected key = value");
    }
    if (current.empty()) {
      throw ScenarioError("line " + std::to_string(line_no) +
                          ": key outside any [section]");
    }
    const auto key = std::string(trim(text.substr(0, eq)));
    const auto value = std::string(trim(text.substr(eq + 1)));
    if (key.empty()) {
      throw ScenarioError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!sections[current].emplace(key, value).second) {
      throw ScenarioError("[" + current + "]." + key + " set twice");
    }
  }
  return sections;
}

// Typed reader over one raw section; tracks consumed keys so unknown ones
// can be reported by name.
class SectionReader {
 public:
  SectionReader(const RawSections& raw, std::string name)
      : name_(std::move(name)) {
    const auto it = raw.find(name_);
    if (it != raw.end()) {
      values_ = &it->second;
    }
  }

  std::optional<std::string> get(const std::string& key) {
    consumed_.insert(key);
    if (values_ == nullptr) {
      return std::nullopt;
    }
    const auto it = values_->find(key);
    if (it == values_->end() || it->second.empty()) {
      return std::nullopt;
    }
    return it->second;
  }

  double number(const std::string& key, double fallback) {
    const auto raw = get(key);
    if (!raw) {
      return fallback;
    }
    const auto value = csv::parse_double(*raw);
    if (!value) {
      throw ScenarioError(field(key) + ": expected a number, got '" + *raw +
                          "'");
    }
    return *value;
  }

  std::optional<double> optional_number(const std::string& key) {
    const auto raw = get(key);
    if (!raw) {
      return std::nullopt;
    }
    const auto value = csv::parse_double(*raw);
    if (!value) {
      throw ScenarioError(field(key) + ": expected a number, got '" + *raw +
                          "'");
    }
    return value;
  }

  long long integer(const std::string& key, long long fallback) {
    const auto raw = get(key);
    if (!raw) {
      return fallback;
    }
    const auto value = csv::parse_int(*raw);
    if (!value) {
      throw ScenarioError(field(key) + ": expected an integer, got '" + *raw +
                          "'");
    }
    return *value;
  }

  std::string text(const std::string& key, std::string fallback) {
    return get(key).value_or(std::move(fallback));
  }

  std::string field(const std::string& key) const {
    return "[" + name_ + "]." + key;
  }

  void reject_unknown_keys() const {
    if (values_ == nullptr) {
      return;
    }
    for (const auto& [key, value] : *values_) {
      if (!consumed_.contains(key)) {
        throw ScenarioError(field(key) + ": unknown key");
      }
    }
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* values_ = nullptr;
  std::set<std::string> consumed_;
};

inline Market parse_market_or_throw(const std::string& value,
                                    const std::string& field) {
  const auto market = parse_market(value);
  if (!market) {
    throw ScenarioError(field + ": unknown market '" + value +
                        "' (PJM, NYISO, MISO, ISONE, CAISO)");
  }
  return *market;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(std::istream& in) {
  const auto raw = detail::parse_raw_scenario(in);
  for (const auto& [section, keys] : raw) {
    if (section != "signal" && section != "ess" && section != "market" &&
        section != "policy" && section != "award" && section != "run" &&
        section != "compare" && section != "prices") {
      throw ScenarioError("[" + section + "]: unknown section");
    }
  }
  ScenarioConfig cfg;

  detail::SectionReader signal(raw, "signal");
  if (const auto source = signal.get("source")) {
    if (*source == "synthesize") {
      cfg.signal.source = SignalSource::synthesize;
    } else if (*source == "csv") {
      cfg.signal.source = SignalSource::csv;
    } else {
      throw ScenarioError(signal.field("source") +
                          ": expected synthesize or csv");
    }
  }
  cfg.signal.seed =
      static_cast<std::uint64_t>(signal.integer("seed", cfg.signal.seed));
  cfg.signal.hours = static_cast<int>(signal.integer("hours", 24));
  cfg.signal.steps_per_hour =
      static_cast<int>(signal.integer("steps_per_hour", 900));
  cfg.signal.mean_reversion =
      signal.number("mean_reversion", cfg.signal.mean_reversion);
  cfg.signal.volatility = signal.number("volatility", cfg.signal.volatility);
  cfg.signal.path = signal.text("path", "");
  if (const auto product = signal.get("product")) {
    if (*product == "ace") {
      cfg.signal.product = SignalProduct::ace;
    } else if (*product == "rega") {
      cfg.signal.product = SignalProduct::rega;
    } else if (*product == "regd") {
      cfg.signal.product = SignalProduct::regd;
    } else if (*product == "enc") {
      cfg.signal.product = SignalProduct::enc;
    } else if (*product == "ent") {
      cfg.signal.product = SignalProduct::ent;
    } else {
      throw ScenarioError(signal.field("product") +
                          ": expected ace, rega, regd, enc or ent");
    }
  }
  cfg.signal.smoothing_hours =
      signal.number("smoothing_hours", cfg.signal.smoothing_hours);
  cfg.signal.zero_mean_window_hours = signal.number(
      "zero_mean_window_hours", cfg.signal.zero_mean_window_hours);
  cfg.signal.enter_threshold =
      signal.number("enter_threshold", cfg.signal.enter_threshold);
  cfg.signal.exit_threshold =
      signal.number("exit_threshold", cfg.signal.exit_threshold);
  signal.reject_unknown_keys();

  detail::SectionReader ess(raw, "ess");
  cfg.ess.power_capacity_mw = ess.number("power_mw", 1.0);
  cfg.ess.energy_capacity_mwh = ess.number("energy_mwh", 1.0);
  cfg.ess.charge_efficiency = ess.number("charge_efficiency", 1.0);
  cfg.ess.discharge_efficiency = ess.number("discharge_efficiency", 1.0);
  cfg.ess.initial_soc = ess.number("initial_soc", 0.5);
  ess.reject_unknown_keys();

  detail::SectionReader market(raw, "market");
  if (const auto name = market.get("name")) {
    cfg.market.name = detail::parse_market_or_throw(*name,
                                                    market.field("name"));
  }
  cfg.market.price_csv = market.text("price_csv", "");
  market.reject_unknown_keys();

  detail::SectionReader policy(raw, "policy");
  if (const auto type = policy.get("type")) {
    if (*type == "none") {
      cfg.policy.kind = PolicyKind::none;
    } else if (*type == "rtd") {
      cfg.policy.kind = PolicyKind::rtd;
    } else if (*type == "rem") {
      cfg.policy.kind = PolicyKind::rem;
    } else {
      throw ScenarioError(policy.field("type") +
                          ": expected none, rtd or rem");
    }
  }
  cfg.policy.offered_capacity_mw = policy.number("offered_capacity_mw", 1.0);
  cfg.policy.rtd.deadband_halfwidth = policy.number("deadband_halfwidth",
                                                    0.1);
  const double interval_minutes = policy.number("interval_minutes", 5.0);
  if (!(interval_minutes > 0.0)) {
    throw ScenarioError(policy.field("interval_minutes") + ": must be > 0");
  }
  cfg.policy.rtd.interval_hours = interval_minutes / 60.0;
  cfg.policy.rem.dispatch_interval_hours = interval_minutes / 60.0;
  cfg.policy.rtd.gain_mw_per_soc = policy.optional_number("gain_mw_per_soc");
  cfg.policy.rem.soc_set_point = policy.number("set_point", 0.5);
  if (const auto list = policy.get("emergency_intervals")) {
    for (const auto part : csv::split(*list)) {
      const auto idx = csv::parse_int(detail::trim(part));
      if (!idx || *idx < 0) {
        throw ScenarioError(policy.field("emergency_intervals") +
                            ": expected a comma-separated list of interval "
                            "indices");
      }
      cfg.policy.emergency_intervals.push_back(
          static_cast<std::size_t>(*idx));
    }
  }
  policy.reject_unknown_keys();

  detail::SectionReader award(raw, "award");
  cfg.award.capacity_mw = award.number("capacity_mw", 1.0);
  cfg.award.mileage = award.optional_number("mileage");
  cfg.award.reference_mileage = award.optional_number("reference_mileage");
  if (const auto mode = award.get("performance")) {
    if (*mode == "ideal") {
      cfg.award.performance = PerformanceMode::ideal;
    } else if (*mode == "simulated") {
      cfg.award.performance = PerformanceMode::simulated;
    } else {
      throw ScenarioError(award.field("performance") +
                          ": expected ideal or simulated");
    }
  }
  award.reject_unknown_keys();

  detail::SectionReader run(raw, "run");
  cfg.run.out_dir = run.text("out_dir", "");
  run.reject_unknown_keys();

  detail::SectionReader compare(raw, "compare");
  if (const auto markets = compare.get("markets")) {
    for (const auto part : csv::split(*markets)) {
      cfg.compare_markets.push_back(detail::parse_market_or_throw(
          std::string(detail::trim(part)), compare.field("markets")));
    }
  }
  compare.reject_unknown_keys();

  if (const auto it = raw.find("prices"); it != raw.end()) {
    for (const auto& [key, value] : it->second) {
      const Market m = detail::parse_market_or_throw(key, "[prices]." + key);
      cfg.price_paths[m] = value;
    }
  }

  return cfg;
}

inline ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open config file " + path);
  }
  return parse_scenario(in);
}

inline void apply_overrides(ScenarioConfig& cfg,
                            const ScenarioOverrides& overrides) {
  if (overrides.seed) {
    cfg.signal.seed = *overrides.seed;
  }
  if (overrides.out_dir) {
    cfg.run.out_dir = *overrides.out_dir;
  }
  if (overrides.market) {
    cfg.market.name =
        detail::parse_market_or_throw(*overrides.market, "--market");
  }
  if (overrides.policy) {
    if (*overrides.policy == "none") {
      cfg.policy.kind = PolicyKind::none;
    } else if (*overrides.policy == "rtd") {
      cfg.policy.kind = PolicyKind::rtd;
    } else if (*overrides.policy == "rem") {
      cfg.policy.kind = PolicyKind::rem;
    } else {
      throw ScenarioError("--policy: expected none, rtd or rem");
    }
  }
}

// Cross-field checks shared by every command that simulates or settles.
inline void validate_scenario(const ScenarioConfig& cfg, bool needs_market) {
  if (cfg.signal.source == SignalSource::csv && cfg.signal.path.empty()) {
    throw ScenarioError("[signal].path: required when source = csv");
  }
  if (cfg.signal.source == SignalSource::synthesize &&
      !cfg.signal.path.empty()) {
    throw ScenarioError(
        "[signal].path: only valid when source = csv (one signal source)");
  }
  if (cfg.signal.source == SignalSource::synthesize && cfg.signal.hours < 1) {
    throw ScenarioError("[signal].hours: must be >= 1");
  }
  if (cfg.signal.steps_per_hour < 1) {
    throw ScenarioError("[signal].steps_per_hour: must be >= 1");
  }
  validate(cfg.ess);

  if (cfg.policy.kind == PolicyKind::rem &&
      cfg.market.name != Market::caiso) {
    throw ScenarioError(
        "[policy].type: rem (regulation energy management) requires "
        "[market].name = CAISO");
  }
  if (cfg.policy.kind == PolicyKind::rtd &&
      cfg.market.name != Market::nyiso) {
    throw ScenarioError(
        "[policy].type: rtd (real-time dispatch) requires [market].name = "
        "NYISO");
  }
  if (cfg.market.name) {
    const Market m = *cfg.market.name;
    const SignalProduct p = cfg.signal.product;
    if ((p == SignalProduct::rega || p == SignalProduct::regd) &&
        m != Market::pjm) {
      throw ScenarioError(std::string("[signal].product: ") + to_string(p) +
                          " is a PJM product");
    }
    if ((p == SignalProduct::enc || p == SignalProduct::ent) &&
        m != Market::isone) {
      throw ScenarioError(std::string("[signal].product: ") + to_string(p) +
                          " is an ISO-NE product");
    }
  }
  if (needs_market) {
    if (!cfg.market.name) {
      throw ScenarioError("[market].name: required for this command");
    }
    if (cfg.market.price_csv.empty()) {
      throw ScenarioError("[market].price_csv: required for this command");
    }
  }
}

}  // namespace regsim
