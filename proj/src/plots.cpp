#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "aucrac/containers.hpp"
#include "aucrac/experiment.hpp"

namespace aucrac {

std::string_view to_string(PlotFigure f) {
  switch (f) {
    case PlotFigure::completion_vs_devices: return "completion_vs_devices";
    case PlotFigure::memory_vs_tasks: return "memory_vs_tasks";
    case PlotFigure::cpu_vs_tasks: return "cpu_vs_tasks";
    case PlotFigure::fairness_table: return "fairness_table";
  }
  return "?";
}

PlotFigure parse_plot_figure(std::string_view name) {
  for (PlotFigure f : {PlotFigure::completion_vs_devices, PlotFigure::memory_vs_tasks,
                       PlotFigure::cpu_vs_tasks, PlotFigure::fairness_table}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError(ConfigErrorKind::unknown_enum, "emit-plots",
                    fmt::format("unknown figure '{}'", name));
}

namespace {

/// Strategies in canonical order, restricted to those present in the rows.
std::vector<std::string> series_names(const std::vector<ResultRow>& rows) {
  std::vector<std::string> names;
  for (Strategy s : kAllStrategies) {
    const std::string n(to_string(s));
    if (std::any_of(rows.begin(), rows.end(), [&](const ResultRow& r) { return r.strategy == n; })) {
      names.push_back(n);
    }
  }
  for (const auto& r : rows) {
    if (std::find(names.begin(), names.end(), r.strategy) == names.end()) names.push_back(r.strategy);
  }
  return names;
}

/// x value of a row: the sweep value, turned into a task count when `per_task`
/// and the sweep is over devices.
double x_of(const ResultRow& r, bool per_task, const SimConfig& base) {
  const double v = r.sweep_var == "strategy" ? static_cast<double>(base.num_devices)
                                             : std::stod(r.sweep_value);
  if (!per_task) return v;
  const double devices = r.sweep_var == "devices" ? v : static_cast<double>(base.num_devices);
  return devices * base.workload.tasks_per_device;
}

std::string series_table(const std::vector<ResultRow>& rows, bool per_task,
                         const SimConfig& base, double ResultRow::*field) {
  const auto names = series_names(rows);
  std::map<double, std::map<std::string, std::pair<double, std::size_t>>> acc;
  for (const auto& r : rows) {
    auto& cell = acc[x_of(r, per_task, base)][r.strategy];
    cell.first += r.*field;
    ++cell.second;
  }
  std::string out = "# x";
  for (const auto& n : names) out += " " + n;
  out += "\n";
  for (const auto& [x, by_series] : acc) {
    out += fmt::format("{}", x);
    for (const auto& n : names) {
      const auto it = by_series.find(n);
      out += it == by_series.end()
                 ? std::string(" nan")
                 : fmt::format(" {}", it->second.first / static_cast<double>(it->second.second));
    }
    out += "\n";
  }
  return out;
}

double mean_task_memory(const WorkloadConfig& w) {
  return w.mix.lit * (w.lit.memory_min + w.lit.memory_max) / 2.0 +
         w.mix.mit * (w.mit.memory_min + w.mit.memory_max) / 2.0 +
         w.mix.hit * (w.hit.memory_min + w.hit.memory_max) / 2.0;
}

std::string memory_table(const std::vector<ResultRow>& rows, const SimConfig& base) {
  std::vector<double> xs;
  for (const auto& r : rows) xs.push_back(x_of(r, true, base));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const double m = mean_task_memory(base.workload);
  std::string out = "# x container vm\n";
  for (double x : xs) {
    const auto n = static_cast<std::size_t>(x);
    out += fmt::format("{} {} {}\n", x,
                       memory_footprint(base.executors, ExecutorMode::container, n, m),
                       memory_footprint(base.executors, ExecutorMode::vm, n, m));
  }
  return out;
}

std::string fairness_table(const std::vector<ResultRow>& rows) {
  std::string out = "# strategy fairness_jain deadline_miss mn_profit\n";
  for (const auto& name : series_names(rows)) {
    double f = 0.0, d = 0.0, p = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (r.strategy != name) continue;
      f += r.fairness_jain;
      d += r.deadline_miss;
      p += r.mn_profit;
      ++n;
    }
    const double k = static_cast<double>(n);
    out += fmt::format("{} {} {} {}\n", name, f / k, d / k, p / k);
  }
  return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& results_csv,
                                                  const std::vector<PlotFigure>& figures,
                                                  const std::filesystem::path& out_dir,
                                                  const SimConfig& base) {
  const auto rows = read_results_csv(results_csv);  // throws before anything is written
  for (const auto& r : rows) {
    if (r.sweep_var != "strategy") {
      try {
        (void)std::stod(r.sweep_value);
      } catch (const std::exception&) {
        throw ResultsSchemaError(
            fmt::format("sweep_value '{}' is not numeric for sweep '{}'", r.sweep_value, r.sweep_var));
      }
    }
  }

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (PlotFigure f : figures) {
    std::string text;
    switch (f) {
      case PlotFigure::completion_vs_devices:
        text = series_table(rows, false, base, &ResultRow::mean_completion_s);
        break;
      case PlotFigure::memory_vs_tasks: text = memory_table(rows, base); break;
      case PlotFigure::cpu_vs_tasks:
        text = series_table(rows, true, base, &ResultRow::mean_cpu_frac);
        break;
      case PlotFigure::fairness_table: text = fairness_table(rows); break;
    }
    files.emplace_back(out_dir / (std::string(to_string(f)) + ".dat"), std::move(text));
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw OutputError(fmt::format("cannot write '{}'", path.string()));
    written.push_back(path);
  }
  return written;
}

}  // namespace aucrac
