#include "aucrac/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "aucrac/sim.hpp"

namespace aucrac {

std::string_view to_string(SweepVar v) {
  switch (v) {
    case SweepVar::devices: return "devices";
    case SweepVar::workers: return "workers";
    case SweepVar::strategy: return "strategy";
  }
  return "?";
}

SweepVar parse_sweep_var(std::string_view name) {
  for (SweepVar v : {SweepVar::devices, SweepVar::workers, SweepVar::strategy}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError(ConfigErrorKind::unknown_enum, "sweep",
                    fmt::format("unknown sweep variable '{}' (devices|workers|strategy)", name));
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    std::uint64_t a = 0, b = 0;
    if (!parse_uint(text.substr(0, dots), a) || !parse_uint(text.substr(dots + 2), b) || b < a) {
      throw ConfigError(ConfigErrorKind::schema, "seeds",
                        fmt::format("expected 'a..b' with a <= b, got '{}'", text));
    }
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  for (const auto& part : split(text, ',')) {
    std::uint64_t s = 0;
    if (!parse_uint(std::string_view(part), s)) {
      throw ConfigError(ConfigErrorKind::schema, "seeds", fmt::format("bad seed '{}'", part));
    }
    seeds.push_back(s);
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) {
    throw ConfigError(ConfigErrorKind::invariant, "seeds", "seeds must be distinct");
  }
  return seeds;
}

std::pair<SweepVar, std::vector<std::string>> parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(ConfigErrorKind::schema, "sweep",
                      fmt::format("expected 'var=v1,v2,...', got '{}'", text));
  }
  return {parse_sweep_var(text.substr(0, eq)), split(text.substr(eq + 1), ',')};
}

void ExperimentSpec::validate() const {
  if (sweep_values.empty()) throw ConfigError(ConfigErrorKind::invariant, "sweep", "no sweep values");
  if (seeds.empty()) throw ConfigError(ConfigErrorKind::invariant, "seeds", "no seeds");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError(ConfigErrorKind::invariant, "seeds", "seeds must be distinct");
  }
  if (sweep_var != SweepVar::strategy && strategies.empty()) {
    throw ConfigError(ConfigErrorKind::invariant, "strategy", "no strategies selected");
  }
  if (jobs == 0) throw ConfigError(ConfigErrorKind::invariant, "jobs", "must be >= 1");
  for (const auto& v : sweep_values) {
    if (sweep_var == SweepVar::strategy) {
      parse_strategy(v, "sweep");
    } else {
      std::uint32_t n = 0;
      if (!parse_uint(std::string_view(v), n) || n == 0) {
        throw ConfigError(ConfigErrorKind::schema, "sweep",
                          fmt::format("'{}' is not a positive integer", v));
      }
    }
  }
  base.validate();
}

SimConfig cell_config(const ExperimentSpec& spec, const std::string& value, Strategy strategy,
                      std::uint64_t seed) {
  SimConfig cfg = spec.base;
  cfg.seed = seed;
  cfg.strategy = strategy;
  std::uint32_t n = 0;
  switch (spec.sweep_var) {
    case SweepVar::devices:
      parse_uint(std::string_view(value), n);
      cfg.num_devices = n;
      break;
    case SweepVar::workers:
      parse_uint(std::string_view(value), n);
      cfg.num_workers = n;
      break;
    case SweepVar::strategy:
      cfg.strategy = parse_strategy(value, "sweep");
      break;
  }
  return cfg;
}

std::vector<ResultRow> run_cells(const ExperimentSpec& spec) {
  spec.validate();
  struct Cell {
    std::string value;
    Strategy strategy;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& v : spec.sweep_values) {
    const std::vector<Strategy> strategies = spec.sweep_var == SweepVar::strategy
                                                 ? std::vector<Strategy>{parse_strategy(v, "sweep")}
                                                 : spec.strategies;
    for (Strategy s : strategies) {
      for (std::uint64_t seed : spec.seeds) cells.push_back({v, s, seed});
    }
  }

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const Cell& c = cells[i];
        const SimConfig cfg = cell_config(spec, c.value, c.strategy, c.seed);
        const SimResult r = run(cfg);
        const MetricsRecord& m = r.metrics;
        spdlog::debug("{}={} {} seed={} mean={}", to_string(spec.sweep_var), c.value,
                      to_string(c.strategy), c.seed, m.mean_completion);
        ResultRow& row = rows[i];
        row.sweep_var = std::string(to_string(spec.sweep_var));
        row.sweep_value = c.value;
        row.strategy = std::string(to_string(c.strategy));
        row.seed = c.seed;
        row.mean_completion_s = m.mean_completion;
        row.p95_completion_s = m.p95_completion;
        row.deadline_miss =
            m.tasks_arrived == 0
                ? 0.0
                : static_cast<double>(m.deadline_missed + m.failed_to_place) /
                      static_cast<double>(m.tasks_arrived);
        row.fairness_jain = m.fairness_jain;
        row.mn_profit = m.mn_profit;
        row.peak_mem_mb = m.peak_memory;
        row.mean_cpu_frac = m.mean_cpu_utilization;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(cells.size());
      }
    }
  };

  const unsigned threads = std::min<std::size_t>(spec.jobs, std::max<std::size_t>(1, cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

std::string format_results_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.sweep_var, r.sweep_value,
                       r.strategy, r.seed, r.mean_completion_s, r.p95_completion_s,
                       r.deadline_miss, r.fairness_jain, r.mn_profit, r.peak_mem_mb,
                       r.mean_cpu_frac);
  }
  return out;
}

namespace {

constexpr const char* kMetricNames[] = {"mean_completion_s", "p95_completion_s", "deadline_miss",
                                        "fairness_jain",     "mn_profit",        "peak_mem_mb",
                                        "mean_cpu_frac"};

std::array<double, 7> metric_values(const ResultRow& r) {
  return {r.mean_completion_s, r.p95_completion_s, r.deadline_miss, r.fairness_jain,
          r.mn_profit,         r.peak_mem_mb,      r.mean_cpu_frac};
}

/// Groups rows by (sweep value, strategy) keeping first-appearance order.
std::vector<std::vector<const ResultRow*>> group_rows(const std::vector<ResultRow>& rows) {
  std::vector<std::vector<const ResultRow*>> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.sweep_value, r.strategy);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }
  return groups;
}

}  // namespace

std::string format_aggregate_csv(const std::vector<ResultRow>& rows) {
  std::string out = "sweep_var,sweep_value,strategy,seeds";
  for (const char* name : kMetricNames) out += fmt::format(",{0}_mean,{0}_std", name);
  out += "\n";
  for (const auto& g : group_rows(rows)) {
    const double n = static_cast<double>(g.size());
    out += fmt::format("{},{},{},{}", g.front()->sweep_var, g.front()->sweep_value,
                       g.front()->strategy, g.size());
    for (std::size_t k = 0; k < 7; ++k) {
      double sum = 0.0;
      for (const ResultRow* r : g) sum += metric_values(*r)[k];
      const double mean = sum / n;
      double ss = 0.0;
      for (const ResultRow* r : g) {
        const double d = metric_values(*r)[k] - mean;
        ss += d * d;
      }
      const double sd = g.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      out += fmt::format(",{},{}", g.size() == 1 ? metric_values(*g.front())[k] : mean, sd);
    }
    out += "\n";
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError(fmt::format("cannot open '{}' for writing", path.string()));
  f << text;
  f.flush();
  if (!f) throw OutputError(fmt::format("failed writing '{}'", path.string()));
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError(fmt::format("cannot create output directory '{}'", dir.string()));
  }
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ensure_dir(spec.out_dir);
  auto rows = run_cells(spec);
  write_file(spec.out_dir / "results.csv", format_results_csv(rows));
  write_file(spec.out_dir / "aggregate.csv", format_aggregate_csv(rows));
  spdlog::info("wrote {} rows to {}", rows.size(), (spec.out_dir / "results.csv").string());
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw OutputError(fmt::format("cannot read '{}'", path.string()));
  std::string line;
  if (!std::getline(f, line) || line.empty()) {
    throw ResultsSchemaError(fmt::format("'{}' is empty", path.string()));
  }
  const auto header = split(line, ',');
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& name : split(kResultsHeader, ',')) {
    if (!col.contains(name)) {
      throw ResultsSchemaError(fmt::format("'{}' is missing column '{}'", path.string(), name));
    }
  }

  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ResultsSchemaError(fmt::format("{}:{}: expected {} fields, got {}", path.string(),
                                           line_no, header.size(), cells.size()));
    }
    const auto num = [&](const char* name) {
      const std::string& s = cells[col[name]];
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
      } catch (const std::exception&) {
      }
      throw ResultsSchemaError(
          fmt::format("{}:{}: column '{}' is not a number: '{}'", path.string(), line_no, name, s));
    };
    ResultRow r;
    r.sweep_var = cells[col["sweep_var"]];
    r.sweep_value = cells[col["sweep_value"]];
    r.strategy = cells[col["strategy"]];
    r.seed = static_cast<std::uint64_t>(num("seed"));
    r.mean_completion_s = num("mean_completion_s");
    r.p95_completion_s = num("p95_completion_s");
    r.deadline_miss = num("deadline_miss");
    r.fairness_jain = num("fairness_jain");
    r.mn_profit = num("mn_profit");
    r.peak_mem_mb = num("peak_mem_mb");
    r.mean_cpu_frac = num("mean_cpu_frac");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ResultsSchemaError(fmt::format("'{}' has no data rows", path.string()));
  return rows;
}

}  // namespace aucrac
