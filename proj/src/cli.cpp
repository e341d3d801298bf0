#include "kalman/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <sstream>

#include "kalman/report.hpp"

namespace kalman::cli {

namespace {

struct RawFlags {
  std::string mode = "direct";
  std::string anchors;
  std::string trace;
  std::string plot;
  std::string report;
};

void add_scenario_flags(CLI::App* sub, ScenarioOptions& o, RawFlags& raw) {
  sub->add_option("--dt", o.dt, "Time step in seconds")->capture_default_str();
  sub->add_option("--n-iter", o.n_iter, "Number of filter iterations")->capture_default_str();
  sub->add_option("--sigma", o.sigma, "Measurement noise std. dev. in meters")
      ->capture_default_str();
  sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sub->add_option("--mode", raw.mode, "Measurement source")
      ->check(CLI::IsMember({"direct", "toa"}))
      ->capture_default_str();
  sub->add_option("--anchors", raw.anchors,
                  "ToA anchors as \"x,y;x,y;...\" in meters (default 0,0;20,0;0,20)");
  sub->add_flag("--paper-faithful", o.paper_faithful, "Fold measurement noise to |N(0, sigma)|");
  sub->add_flag("--center-on-estimate", o.center_on_estimate,
                "Draw measurements around the current estimate instead of the truth");
}

}  // namespace

std::vector<Anchor> parse_anchors(const std::string& text) {
  std::vector<Anchor> anchors;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    double x = 0.0;
    double y = 0.0;
    char tail = 0;
    if (std::sscanf(item.c_str(), " %lf , %lf %c", &x, &y, &tail) != 2) {
      throw UsageError("--anchors: cannot parse anchor '" + item + "'");
    }
    try {
      anchors.push_back({"a" + std::to_string(anchors.size()), Matrix::column({x, y})});
    } catch (const Error&) {
      throw UsageError("--anchors: non-finite coordinate in '" + item + "'");
    }
  }
  return anchors;
}

CliConfig parse_args(std::span<const std::string> args) {
  CliConfig cfg;
  RawFlags raw;

  CLI::App app{"Kalman filter tracking simulator", "kfsim"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run one seeded tracking scenario");
  add_scenario_flags(simulate, cfg.scenario, raw);
  simulate->add_option("--trace", raw.trace, "Write the per-step trace CSV here");
  simulate->add_option("--plot", raw.plot, "Write the trajectory SVG here");

  auto* bench = app.add_subcommand("bench", "Monte Carlo comparison of filtered vs raw accuracy");
  bench->add_option("--runs", cfg.n_runs, "Number of seeded runs")
      ->required()
      ->check(CLI::PositiveNumber);
  add_scenario_flags(bench, cfg.scenario, raw);
  bench->add_option("--report", raw.report, "Write the report here instead of stdout");

  auto* repro = app.add_subcommand("paper-repro",
                                   "Replay the reference tracking listing (folded noise, "
                                   "measurements around the estimate)");
  repro->add_option("--seed", cfg.scenario.seed, "Random seed")->capture_default_str();
  repro->add_option("--trace", raw.trace, "Write the per-step trace CSV here");
  repro->add_option("--plot", raw.plot, "Write the trajectory SVG here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    cfg.command = Command::help;
    cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::CallForAllHelp&) {
    cfg.command = Command::help;
    cfg.help_text = app.help("", CLI::AppFormatMode::All);
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (simulate->parsed()) {
    cfg.command = Command::simulate;
  } else if (bench->parsed()) {
    cfg.command = Command::bench;
  } else {
    cfg.command = Command::paper_repro;
  }

  if (!raw.trace.empty()) cfg.trace_path = raw.trace;
  if (!raw.plot.empty()) cfg.plot_path = raw.plot;
  if (!raw.report.empty()) cfg.report_path = raw.report;
  cfg.scenario.mode =
      raw.mode == "toa" ? MeasurementMode::toa_trilateration : MeasurementMode::direct_position;
  if (!raw.anchors.empty()) cfg.scenario.anchors = parse_anchors(raw.anchors);

  if (cfg.command == Command::paper_repro) {
    cfg.scenario.paper_faithful = true;
    cfg.scenario.center_on_estimate = true;
  }

  try {
    (void)build_scenario(cfg.scenario);
  } catch (const Error& e) {
    throw UsageError(std::string("invalid scenario: ") + e.what());
  }
  return cfg;
}

namespace {

Scenario scenario_for(const CliConfig& cfg) {
  if (cfg.command == Command::paper_repro) return paper_repro_scenario(cfg.scenario.seed);
  return build_scenario(cfg.scenario);
}

void print_summary(const RunSummary& s, std::ostream& out) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "steps %zu\nseed %llu\nrmse_measurement_m %.9g\nrmse_filtered_m %.9g\nmean_nees %.9g\n",
                s.records.size(), static_cast<unsigned long long>(s.seed), s.rmse_measurement,
                s.rmse_filtered, s.mean_nees);
  out << buf;
}

}  // namespace

int run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::help:
        out << cfg.help_text;
        return kExitOk;
      case Command::simulate:
      case Command::paper_repro: {
        const RunSummary summary = run_scenario(scenario_for(cfg));
        if (cfg.trace_path) emit_trace_csv(summary, *cfg.trace_path);
        if (cfg.plot_path) emit_plot_svg(summary, *cfg.plot_path);
        print_summary(summary, out);
        return kExitOk;
      }
      case Command::bench: {
        const MonteCarloAggregate agg = run_monte_carlo(scenario_for(cfg), cfg.n_runs);
        if (cfg.report_path) {
          emit_bench_report(agg, *cfg.report_path);
        } else {
          out << format_bench_report(agg);
        }
        return kExitOk;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

int main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }
  return run(cfg, out, err);
}

}  // namespace kalman::cli
