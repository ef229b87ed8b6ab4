#pragma once

// Multi-seed sweeps, CSV results and plot-ready data files.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "aucrac/config.hpp"

namespace aucrac {

enum class SweepVar { devices, workers, strategy };

std::string_view to_string(SweepVar v);
SweepVar parse_sweep_var(std::string_view name);

/// Result files could not be written or read back.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A results file does not have the expected shape (missing column, no rows).
class ResultsSchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  SimConfig base;
  SweepVar sweep_var = SweepVar::devices;
  std::vector<std::string> sweep_values;  // integers, or strategy names
  std::vector<std::uint64_t> seeds;
  std::vector<Strategy> strategies;  // ignored when sweeping over strategy
  std::filesystem::path out_dir = "results";
  unsigned jobs = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ResultRow {
  std::string sweep_var;
  std::string sweep_value;
  std::string strategy;
  std::uint64_t seed = 0;
  double mean_completion_s = 0.0;
  double p95_completion_s = 0.0;
  double deadline_miss = 0.0;  // fraction of arrived tasks finishing late
  double fairness_jain = 0.0;
  double mn_profit = 0.0;
  double peak_mem_mb = 0.0;
  double mean_cpu_frac = 0.0;
};

inline constexpr const char* kResultsHeader =
    "sweep_var,sweep_value,strategy,seed,mean_completion_s,p95_completion_s,deadline_miss,"
    "fairness_jain,mn_profit,peak_mem_mb,mean_cpu_frac";

/// "a..b" (inclusive) or a comma list. Throws ConfigError(schema) on bad syntax
/// and ConfigError(invariant) on duplicates.
std::vector<std::uint64_t> parse_seeds(std::string_view text);

/// "var=v1,v2,...". Throws ConfigError.
std::pair<SweepVar, std::vector<std::string>> parse_sweep(std::string_view text);

/// The config of one (sweep value, strategy, seed) cell.
SimConfig cell_config(const ExperimentSpec& spec, const std::string& value, Strategy strategy,
                      std::uint64_t seed);

/// Runs every cell (in parallel up to spec.jobs) and returns rows in
/// (sweep value, strategy, seed) order regardless of completion order.
std::vector<ResultRow> run_cells(const ExperimentSpec& spec);

std::string format_results_csv(const std::vector<ResultRow>& rows);
/// Mean and sample standard deviation (0 for one seed) per (value, strategy).
std::string format_aggregate_csv(const std::vector<ResultRow>& rows);

/// run_cells, then writes results.csv and aggregate.csv into spec.out_dir.
/// Throws OutputError when the directory or files cannot be written.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

enum class PlotFigure { completion_vs_devices, memory_vs_tasks, cpu_vs_tasks, fairness_table };

std::string_view to_string(PlotFigure f);
PlotFigure parse_plot_figure(std::string_view name);

/// Writes <out_dir>/<figure>.dat for each figure from a results CSV. Each file
/// starts with a "# x <series...>" header, then whitespace-separated columns.
/// `base` supplies tasks_per_device and the executor model. Throws
/// ResultsSchemaError on a missing column or an empty file (nothing written).
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& results_csv,
                                                  const std::vector<PlotFigure>& figures,
                                                  const std::filesystem::path& out_dir,
                                                  const SimConfig& base);

}  // namespace aucrac
