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
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "regsim/regsim.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  regsim::ScenarioOverrides overrides;
};

void add_common_options(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "scenario config file")
      ->required();
  cmd->add_option("--seed", args->overrides.seed,
                  "override [signal].seed");
  cmd->add_option("--out", args->overrides.out_dir,
                  "override [run].out_dir (default: $REGSIM_OUT or ./out)");
  cmd->add_option("--market", args->overrides.market,
                  "override [market].name");
  cmd->add_option("--policy", args->overrides.policy,
                  "override [policy].type (none|rtd|rem)");
}

regsim::ScenarioConfig load_config(const CommonArgs& args) {
  auto cfg = regsim::parse_scenario_file(args.config_path);
  regsim::apply_overrides(cfg, args.overrides);
  return cfg;
}

void print_diagnostics(const std::vector<regsim::RowDiagnostic>& diagnostics,
                       const std::string& path) {
  for (const auto& d : diagnostics) {
    std::fprintf(stderr, "%s:%zu: %s\n", path.c_str(), d.line,
                 d.message.c_str());
  }
}

int cmd_analyze_signal(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto result = regsim::run_analyze_signal(cfg);
  const auto dir = regsim::resolve_out_dir(cfg);
  regsim::write_analyze_outputs(result, cfg, dir);
  for (const auto& metrics : result.metrics) {
    std::printf("%-8s hours=%zu mean_mileage=%.3f median_energy=%.4f\n",
                metrics.name.c_str(), metrics.hours.size(),
                [&] {
                  double sum = 0.0;
                  for (const auto& h : metrics.hours) sum += h.mileage;
                  return sum / static_cast<double>(metrics.hours.size());
                }(),
                metrics.energy_summary.median);
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto result = regsim::run_simulate(cfg);
  const auto dir = regsim::resolve_out_dir(cfg);
  regsim::write_simulate_outputs(result, cfg, dir);
  std::printf("performance=%.6f terminal_soc=%.6f events=%zu\n",
              result.score.value, result.terminal_soc,
              result.run.events.size());
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int cmd_settle(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto result = regsim::run_settle(cfg);
  print_diagnostics(result.price_diagnostics, cfg.market.price_csv);
  const auto dir = regsim::resolve_out_dir(cfg);
  regsim::write_settle_outputs(result, cfg, dir);
  std::printf("hours=%zu total=%.2f\n", result.rows.size(), result.total);
  std::printf("wrote %s\n", dir.string().c_str());
  return result.price_diagnostics.empty() ? 0 : 3;
}

int cmd_compare_markets(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto result = regsim::run_compare_markets(cfg);
  const auto dir = regsim::resolve_out_dir(cfg);
  regsim::write_compare_outputs(result, cfg, dir);
  std::printf("%-6s %10s %10s %10s %10s\n", "market", "mean", "q1", "median",
              "q3");
  for (const auto& row : result.rows) {
    std::printf("%-6s %10.2f %10.2f %10.2f %10.2f\n",
                regsim::to_string(row.market), row.distribution.mean,
                row.distribution.summary.q1, row.distribution.summary.median,
                row.distribution.summary.q3);
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regulation market simulator and settlement engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", regsim::kVersion);

  CommonArgs analyze_args, simulate_args, settle_args, compare_args;
  auto* analyze = app.add_subcommand(
      "analyze-signal", "signal decomposition and hourly analytics");
  add_common_options(analyze, &analyze_args);
  auto* simulate = app.add_subcommand(
      "simulate", "storage following a signal under an ISO policy");
  add_common_options(simulate, &simulate_args);
  auto* settle = app.add_subcommand(
      "settle", "per-hour regulation credits from a price CSV");
  add_common_options(settle, &settle_args);
  auto* compare = app.add_subcommand(
      "compare-markets", "payment distributions across markets");
  add_common_options(compare, &compare_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      return cmd_analyze_signal(analyze_args);
    }
    if (simulate->parsed()) {
      return cmd_simulate(simulate_args);
    }
    if (settle->parsed()) {
      return cmd_settle(settle_args);
    }
    if (compare->parsed()) {
      return cmd_compare_markets(compare_args);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
