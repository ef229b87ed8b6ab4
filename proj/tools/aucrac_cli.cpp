// aucrac: run strategy sweeps over seeded simulations and write CSV results.
//
// Exit codes:
//   0  success             11 config schema         20 output I/O
//   1  usage               12 unknown enum name     21 malformed results file
//   10 missing config file 13 config invariant      30 runtime failure

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "aucrac/config.hpp"
#include "aucrac/experiment.hpp"
#include "aucrac/kernels/kernels.hpp"
#include "aucrac/sim.hpp"

namespace {

using namespace aucrac;

int config_exit_code(ConfigErrorKind k) {
  switch (k) {
    case ConfigErrorKind::missing_file: return 10;
    case ConfigErrorKind::schema: return 11;
    case ConfigErrorKind::unknown_enum: return 12;
    case ConfigErrorKind::invariant: return 13;
  }
  return 13;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_st("aucrac");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("AUCRAC_LOG");
  const std::string level = env ? env : "info";
  if (level == "trace") {
    spdlog::set_level(spdlog::level::trace);
  } else if (level == "off") {
    spdlog::set_level(spdlog::level::off);
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Auction-based task allocation simulator"};
  std::string config_path, sweep_text, seeds_text = "0..29", strategy_text = "all";
  std::string mode_text, win_rule_text, out_dir = "results", plots_text, event_log;
  unsigned jobs = 1;
  app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
  app.add_option("--sweep", sweep_text, "var=v1,v2,... with var in devices|workers|strategy");
  app.add_option("--seeds", seeds_text, "a..b or a comma list")->capture_default_str();
  app.add_option("--strategy", strategy_text, "strategy name or 'all'")->capture_default_str();
  app.add_option("--mode", mode_text, "literal|repaired");
  app.add_option("--win-rule", win_rule_text, "highest|lowest");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "parallel runs")->capture_default_str();
  app.add_option("--emit-plots", plots_text, "comma list of figures to emit as .dat files");
  app.add_option("--event-log", event_log,
                 "write the event log of the first (value, strategy, seed) cell to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    ExperimentSpec spec;
    spec.base = config_path.empty() ? SimConfig{} : load_config(config_path);
    if (!mode_text.empty()) spec.base.auction_mode = parse_auction_mode(mode_text, "mode");
    if (!win_rule_text.empty()) spec.base.win_rule = parse_win_rule(win_rule_text, "win-rule");
    spec.base.validate();

    if (sweep_text.empty()) {
      spec.sweep_var = SweepVar::devices;
      spec.sweep_values = {std::to_string(spec.base.num_devices)};
    } else {
      std::tie(spec.sweep_var, spec.sweep_values) = parse_sweep(sweep_text);
    }
    spec.seeds = parse_seeds(seeds_text);
    if (strategy_text == "all") {
      spec.strategies.assign(kAllStrategies.begin(), kAllStrategies.end());
    } else {
      spec.strategies = {parse_strategy(strategy_text, "strategy")};
    }
    spec.out_dir = out_dir;
    spec.jobs = jobs;

    std::vector<PlotFigure> figures;
    if (!plots_text.empty()) {
      for (const auto& f : split_list(plots_text)) figures.push_back(parse_plot_figure(f));
    }

    spdlog::info("kernels: {}", kernels::to_string(kernels::active_isa()));
    const auto rows = run_experiment(spec);
    spdlog::info("{} runs complete", rows.size());

    if (!event_log.empty()) {
      const Strategy s = spec.sweep_var == SweepVar::strategy
                             ? parse_strategy(spec.sweep_values.front(), "sweep")
                             : spec.strategies.front();
      const SimResult r =
          run(cell_config(spec, spec.sweep_values.front(), s, spec.seeds.front()));
      std::ofstream f(event_log, std::ios::binary | std::ios::trunc);
      write_log(f, r.log);
      if (!f) throw OutputError("cannot write event log '" + event_log + "'");
    }
    if (!figures.empty()) {
      for (const auto& p : emit_plot_data(spec.out_dir / "results.csv", figures, spec.out_dir,
                                          spec.base)) {
        spdlog::info("wrote {}", p.string());
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return config_exit_code(e.kind());
  } catch (const OutputError& e) {
    spdlog::error("output error: {}", e.what());
    return 20;
  } catch (const ResultsSchemaError& e) {
    spdlog::error("results error: {}", e.what());
    return 21;
  } catch (const std::exception& e) {
    spdlog::error("runtime error: {}", e.what());
    return 30;
  }
}
