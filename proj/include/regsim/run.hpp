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

#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "regsim/ess.hpp"
#include "regsim/filters.hpp"
#include "regsim/io.hpp"
#include "regsim/market_data.hpp"
#include "regsim/policies.hpp"
#include "regsim/scenario.hpp"
#include "regsim/settlement.hpp"
#include "regsim/signal.hpp"
#include "regsim/version.hpp"

namespace regsim {

// The four derived views of the configured control signal.
struct BuiltSignals {
  RegulationSignal ace;
  RegulationSignal slow;
  RegulationSignal fast;
  RegulationSignal trinary;
};

inline BuiltSignals build_signals(const ScenarioConfig& cfg) {
  RegulationSignal ace =
      cfg.signal.source == SignalSource::csv
          ? read_signal_csv(cfg.signal.path)
          : synthesize_ace(cfg.signal.seed, cfg.signal.hours,
                           1.0 / cfg.signal.steps_per_hour,
                           cfg.signal.mean_reversion, cfg.signal.volatility);
  FastSlowSplit split = split_fast_slow(ace, cfg.signal.smoothing_hours,
                                        cfg.signal.zero_mean_window_hours);
  RegulationSignal trinary = trinary_quantize(
      split.fast, cfg.signal.enter_threshold, cfg.signal.exit_threshold);
  return BuiltSignals{std::move(ace), std::move(split.slow),
                      std::move(split.fast), std::move(trinary)};
}

inline const RegulationSignal& followed_signal(const BuiltSignals& built,
                                               SignalProduct product) {
  switch (product) {
    case SignalProduct::rega: return built.slow;
    case SignalProduct::regd:
    case SignalProduct::enc: return built.fast;
    case SignalProduct::ent: return built.trinary;
    case SignalProduct::ace: break;
  }
  return built.ace;
}

// ---------------------------------------------------------------------------
// analyze-signal

struct SignalMetrics {
  std::string name;
  std::vector<SignalAnalytics> hours;
  QuantileSummary mileage_summary;
  QuantileSummary energy_summary;
  std::optional<QuantileSummary> balance_summary;
};

struct AnalyzeResult {
  BuiltSignals signals;
  std::vector<SignalMetrics> metrics;
};

namespace detail {

inline SignalMetrics summarize_signal(std::string name,
                                      const RegulationSignal& signal) {
  SignalMetrics m;
  m.name = std::move(name);
  m.hours = analyze_hours(signal);
  std::vector<double> mileages, energies, balances;
  for (const auto& h : m.hours) {
    mileages.push_back(h.mileage);
    energies.push_back(h.energy_requirement_mwh_per_mw);
    if (h.energy_balance) {
      balances.push_back(*h.energy_balance);
    }
  }
  m.mileage_summary = boxplot_stats(mileages);
  m.energy_summary = boxplot_stats(energies);
  if (!balances.empty()) {
    m.balance_summary = boxplot_stats(balances);
  }
  return m;
}

}  // namespace detail

inline AnalyzeResult run_analyze_signal(const ScenarioConfig& cfg) {
  validate_scenario(cfg, /*needs_market=*/false);
  AnalyzeResult result{build_signals(cfg), {}};
  result.metrics.push_back(detail::summarize_signal("ace", result.signals.ace));
  result.metrics.push_back(
      detail::summarize_signal("slow", result.signals.slow));
  result.metrics.push_back(
      detail::summarize_signal("fast", result.signals.fast));
  result.metrics.push_back(
      detail::summarize_signal("trinary", result.signals.trinary));
  return result;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateResult {
  PolicyRunResult run;
  PerformanceScore score;
  double terminal_soc = 0.0;
  EnergyTotals totals;
  double rem_dispatch_mwh = 0.0;  // net grid-side balancing energy
};

inline SimulateResult run_simulate(const ScenarioConfig& cfg) {
  validate_scenario(cfg, /*needs_market=*/false);
  const BuiltSignals built = build_signals(cfg);
  const RegulationSignal& signal = followed_signal(built, cfg.signal.product);
  SimulateResult result;
  result.run = run_policy_simulation(cfg.ess, signal, cfg.policy);
  result.score = accuracy_score(result.run.trajectory, signal,
                                cfg.policy.offered_capacity_mw);
  result.terminal_soc = result.run.trajectory.soc.empty()
                            ? cfg.ess.initial_soc
                            : result.run.trajectory.soc.back();
  result.totals = energy_totals(result.run.trajectory);
  for (const auto& event : result.run.events) {
    if (event.action == "rem_dispatch") {
      result.rem_dispatch_mwh += event.energy_mwh;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// settle

struct SettleResult {
  std::vector<SettlementRow> rows;
  double total = 0.0;
  std::vector<RowDiagnostic> price_diagnostics;
};

namespace detail {

inline double span_accuracy(std::span<const double> actual_mw,
                            std::span<const double> signal_values,
                            double capacity_mw) {
  double abs_error = 0.0, abs_signal = 0.0;
  for (std::size_t i = 0; i < signal_values.size(); ++i) {
    const double target = signal_values[i] * capacity_mw;
    abs_error += std::abs(actual_mw[i] - target);
    abs_signal += std::abs(target);
  }
  if (abs_signal == 0.0) {
    return abs_error == 0.0 ? 1.0 : 0.0;
  }
  return std::max(0.0, 1.0 - abs_error / abs_signal);
}

}  // namespace detail

inline SettleResult run_settle(const ScenarioConfig& cfg) {
  validate_scenario(cfg, /*needs_market=*/true);
  const Market market = *cfg.market.name;
  auto loaded = load_prices(cfg.market.price_csv, market);

  SettleResult result;
  result.price_diagnostics = std::move(loaded.diagnostics);
  const auto& records = loaded.series.records;
  if (records.empty()) {
    return result;
  }

  const bool simulated =
      cfg.award.performance == PerformanceMode::simulated;

  std::optional<BuiltSignals> built;
  std::optional<SimulateResult> sim;
  std::vector<SignalAnalytics> followed_hours;
  std::vector<SignalAnalytics> slow_hours;
  if (simulated) {
    built = build_signals(cfg);
    const RegulationSignal& signal =
        followed_signal(*built, cfg.signal.product);
    SimulateResult s;
    s.run = run_policy_simulation(cfg.ess, signal, cfg.policy);
    s.totals = energy_totals(s.run.trajectory);
    sim = std::move(s);
    followed_hours = analyze_hours(signal);
    slow_hours = analyze_hours(built->slow);
  }

  const auto hours_available =
      simulated ? followed_hours.size() : records.size();
  const std::size_t n = std::min(records.size(), hours_available);

  for (std::size_t k = 0; k < n; ++k) {
    const PriceRecord& price = records[k];
    AwardRecord award;
    award.capacity_mw = cfg.award.capacity_mw;
    award.reference_mileage = cfg.award.reference_mileage;

    CreditResult credit;
    if (!simulated) {
      award.mileage = cfg.award.mileage.value_or(0.0);
      award.performance = {1.0, ScoreMethod::accuracy};
      credit = credit_for_market(market, award, price);
    } else {
      const RegulationSignal& signal =
          followed_signal(*built, cfg.signal.product);
      const auto signal_hour = signal.hour_values(static_cast<int>(k));
      const int steps = signal.steps_per_hour();
      const auto actual =
          std::span<const double>(sim->run.trajectory.actual_power_mw)
              .subspan(k * static_cast<std::size_t>(steps),
                       static_cast<std::size_t>(steps));
      // Hours without a mileage clearing price settle capacity only; the
      // performed mileage is not billable there.
      const double measured =
          price.mileage_price ? followed_hours[k].mileage : 0.0;
      award.mileage = cfg.award.mileage.value_or(measured);
      if (market == Market::pjm && !award.reference_mileage) {
        award.reference_mileage = slow_hours[k].mileage;
      }
      const double rho = detail::span_accuracy(
          actual, signal_hour, cfg.policy.offered_capacity_mw);
      award.performance = {rho, ScoreMethod::accuracy};

      if (market == Market::miso) {
        if (steps % kMisoIntervalsPerHour != 0) {
          throw ScenarioError(
              "[signal].steps_per_hour: MISO settlement needs 5-minute "
              "interval scores; steps per hour must divide by 12");
        }
        const std::size_t per = static_cast<std::size_t>(steps) /
                                kMisoIntervalsPerHour;
        std::vector<double> scores;
        scores.reserve(kMisoIntervalsPerHour);
        for (int j = 0; j < kMisoIntervalsPerHour; ++j) {
          scores.push_back(detail::span_accuracy(
              actual.subspan(j * per, per), signal_hour.subspan(j * per, per),
              cfg.policy.offered_capacity_mw));
        }
        credit = credit_miso(award, price, scores);
      } else {
        credit = credit_for_market(market, award, price);
      }

      if (market == Market::caiso && price.lmp) {
        double charged = 0.0, discharged = 0.0;
        for (double p : actual) {
          if (p > 0.0) {
            charged += p * signal.step_size_hours();
          } else {
            discharged += -p * signal.step_size_hours();
          }
        }
        double rem_mwh = 0.0;
        for (const auto& event : sim->run.events) {
          if (event.action == "rem_dispatch" &&
              event.step / static_cast<std::size_t>(steps) == k) {
            rem_mwh += event.energy_mwh;
          }
        }
        credit.energy_settlement =
            caiso_energy_settlement(charged, discharged, rem_mwh, *price.lmp);
        credit.total = credit.capacity_credit + credit.mileage_credit +
                       credit.energy_settlement;
      }
    }
    result.rows.push_back(SettlementRow{market, price.hour_utc, credit});
    result.total += credit.total;
  }
  result.total = round_cents(result.total);
  return result;
}

// ---------------------------------------------------------------------------
// compare-markets

struct MarketComparisonRow {
  Market market = Market::pjm;
  PaymentDistribution distribution;
};

struct CompareResult {
  std::vector<MarketComparisonRow> rows;
};

// Cross-market payment comparison at an ideal 100% performance factor.
inline CompareResult run_compare_markets(const ScenarioConfig& cfg) {
  if (cfg.compare_markets.empty()) {
    throw ScenarioError("[compare].markets: required for compare-markets");
  }
  CompareResult result;
  for (Market market : cfg.compare_markets) {
    const auto it = cfg.price_paths.find(market);
    if (it == cfg.price_paths.end()) {
      throw ScenarioError(std::string("[prices].") + to_string(market) +
                          ": price CSV required for compare-markets");
    }
    const auto loaded = load_prices(it->second, market);
    AwardRecord award;
    award.capacity_mw = cfg.award.capacity_mw;
    award.mileage = cfg.award.mileage.value_or(0.0);
    award.reference_mileage = cfg.award.reference_mileage;
    award.performance = {1.0, ScoreMethod::accuracy};
    result.rows.push_back(
        MarketComparisonRow{market, payment_distribution(loaded.series,
                                                         award)});
  }
  return result;
}

// ---------------------------------------------------------------------------
// output writing

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir,
                                 const std::string& name) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + (dir / name).string());
  }
  return out;
}

inline nlohmann::ordered_json scenario_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["signal"] = {
      {"source",
       cfg.signal.source == SignalSource::csv ? "csv" : "synthesize"},
      {"seed", cfg.signal.seed},
      {"hours", cfg.signal.hours},
      {"steps_per_hour", cfg.signal.steps_per_hour},
      {"mean_reversion", cfg.signal.mean_reversion},
      {"volatility", cfg.signal.volatility},
      {"path", cfg.signal.path},
      {"product", to_string(cfg.signal.product)},
      {"smoothing_hours", cfg.signal.smoothing_hours},
      {"zero_mean_window_hours", cfg.signal.zero_mean_window_hours},
      {"enter_threshold", cfg.signal.enter_threshold},
      {"exit_threshold", cfg.signal.exit_threshold}};
  j["ess"] = {{"power_mw", cfg.ess.power_capacity_mw},
              {"energy_mwh", cfg.ess.energy_capacity_mwh},
              {"charge_efficiency", cfg.ess.charge_efficiency},
              {"discharge_efficiency", cfg.ess.discharge_efficiency},
              {"initial_soc", cfg.ess.initial_soc}};
  j["market"] = {{"name", cfg.market.name ? to_string(*cfg.market.name) : ""},
                 {"price_csv", cfg.market.price_csv}};
  j["policy"] = {{"type", to_string(cfg.policy.kind)},
                 {"offered_capacity_mw", cfg.policy.offered_capacity_mw}};
  j["award"] = {
      {"capacity_mw", cfg.award.capacity_mw},
      {"performance",
       cfg.award.performance == PerformanceMode::ideal ? "ideal"
                                                       : "simulated"}};
  return j;
}

inline void write_manifest(const std::filesystem::path& dir,
                           const std::string& command,
                           const ScenarioConfig& cfg,
                           const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["seed"] = cfg.signal.seed;
  j["scenario"] = scenario_json(cfg);
  j["outputs"] = outputs;
  auto out = open_output(dir, "manifest.json");
  out << j.dump(2) << '\n';
}

inline void write_analytics_csv(const AnalyzeResult& result,
                                std::ostream& out) {
  out << "hour,signal,mileage,energy_mwh_per_mw,energy_balance,balance_flag"
      << '\n';
  for (const auto& metrics : result.metrics) {
    for (std::size_t h = 0; h < metrics.hours.size(); ++h) {
      const auto& a = metrics.hours[h];
      out << h << ',' << metrics.name << ',' << csv::format_double(a.mileage)
          << ',' << csv::format_double(a.energy_requirement_mwh_per_mw)
          << ',';
      if (a.energy_balance) {
        out << csv::format_double(*a.energy_balance);
      }
      out << ',';
      if (!a.energy_balance) {
        out << "undefined";
      } else if (a.balance_out_of_range()) {
        out << "out_of_range";
      }
      out << '\n';
    }
  }
}

}  // namespace detail

inline std::filesystem::path resolve_out_dir(const ScenarioConfig& cfg) {
  if (!cfg.run.out_dir.empty()) {
    return cfg.run.out_dir;
  }
  if (const char* env = std::getenv("REGSIM_OUT")) {
    if (*env != '\0') {
      return env;
    }
  }
  return "out";
}

inline std::vector<std::string> write_analyze_outputs(
    const AnalyzeResult& result, const ScenarioConfig& cfg,
    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir, "analytics.csv");
    detail::write_analytics_csv(result, out);
  }
  {
    auto out = detail::open_output(dir, "summary.csv");
    out << kSummaryCsvHeader << '\n';
    for (const auto& metrics : result.metrics) {
      write_summary_row(metrics.name + ".mileage", metrics.mileage_summary,
                        out);
      write_summary_row(metrics.name + ".energy_mwh_per_mw",
                        metrics.energy_summary, out);
      if (metrics.balance_summary) {
        write_summary_row(metrics.name + ".energy_balance",
                          *metrics.balance_summary, out);
      }
    }
  }
  const std::pair<const char*, const RegulationSignal*> exports[] = {
      {"ace.csv", &result.signals.ace},
      {"slow.csv", &result.signals.slow},
      {"fast.csv", &result.signals.fast},
      {"trinary.csv", &result.signals.trinary}};
  std::vector<std::string> outputs = {"analytics.csv", "summary.csv"};
  for (const auto& [name, signal] : exports) {
    auto out = detail::open_output(dir, name);
    write_signal_csv(*signal, out);
    outputs.push_back(name);
  }
  detail::write_manifest(dir, "analyze-signal", cfg, outputs);
  return outputs;
}

inline std::vector<std::string> write_simulate_outputs(
    const SimulateResult& result, const ScenarioConfig& cfg,
    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir, "trajectory.csv");
    write_trajectory_csv(result.run.trajectory, out);
  }
  {
    auto out = detail::open_output(dir, "events.csv");
    write_events_csv(result.run.events, out);
  }
  {
    auto out = detail::open_output(dir, "performance.csv");
    out << "metric,value\n";
    out << "performance," << csv::format_double(result.score.value) << '\n';
    out << "terminal_soc," << csv::format_double(result.terminal_soc) << '\n';
    out << "charged_mwh," << csv::format_double(result.totals.charged_mwh)
        << '\n';
    out << "discharged_mwh,"
        << csv::format_double(result.totals.discharged_mwh) << '\n';
    out << "rem_dispatch_mwh," << csv::format_double(result.rem_dispatch_mwh)
        << '\n';
  }
  const std::vector<std::string> outputs = {"trajectory.csv", "events.csv",
                                            "performance.csv"};
  detail::write_manifest(dir, "simulate", cfg, outputs);
  return outputs;
}

inline std::vector<std::string> write_settle_outputs(
    const SettleResult& result, const ScenarioConfig& cfg,
    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir, "settlement.csv");
    write_settlement_csv(result.rows, out);
  }
  const std::vector<std::string> outputs = {"settlement.csv"};
  detail::write_manifest(dir, "settle", cfg, outputs);
  return outputs;
}

inline std::vector<std::string> write_compare_outputs(
    const CompareResult& result, const ScenarioConfig& cfg,
    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir, "compare.csv");
    out << "market,mean,min,lower_fence,q1,median,q3,upper_fence,max,"
           "outliers\n";
    for (const auto& row : result.rows) {
      const auto& s = row.distribution.summary;
      out << to_string(row.market) << ','
          << csv::format_double(row.distribution.mean) << ','
          << csv::format_double(s.min) << ','
          << csv::format_double(s.lower_fence) << ','
          << csv::format_double(s.q1) << ',' << csv::format_double(s.median)
          << ',' << csv::format_double(s.q3) << ','
          << csv::format_double(s.upper_fence) << ','
          << csv::format_double(s.max) << ',' << s.outlier_count << '\n';
    }
  }
  const std::vector<std::string> outputs = {"compare.csv"};
  detail::write_manifest(dir, "compare-markets", cfg, outputs);
  return outputs;
}

}  // namespace regsim
