#include "aucrac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "aucrac/auction.hpp"
#include "aucrac/sim.hpp"

namespace aucrac {

double jain_fairness(std::span<const std::size_t> counts) {
  if (counts.empty()) throw InputError("jain_fairness needs at least one count");
  double sum = 0.0, sq = 0.0;
  for (std::size_t c : counts) {
    const double x = static_cast<double>(c);
    sum += x;
    sq += x * x;
  }
  if (sq == 0.0) return 1.0;
  return sum * sum / (static_cast<double>(counts.size()) * sq);
}

double mn_profit(std::span<const AuctionOutcome> outcomes, std::span<const Task> tasks,
                 double unit_price) {
  std::unordered_map<TaskId, const Task*> by_id;
  for (const Task& t : tasks) by_id.emplace(t.id, &t);
  double profit = 0.0;
  for (const auto& o : outcomes) {
    if (!o.winner) continue;
    const auto it = by_id.find(o.task_id);
    if (it == by_id.end()) throw InputError(fmt::format("outcome for unknown task {}", o.task_id));
    profit += mn_revenue(*it->second, unit_price) - o.payment;
  }
  return profit;
}

double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) return 0.0;
  if (q < 0.0 || q > 1.0) throw InputError("quantile level must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double pos = q * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

std::vector<std::vector<UtilizationPoint>> utilization_series(std::span<const LogRecord> log,
                                                              std::span<const double> cpu) {
  std::vector<std::vector<UtilizationPoint>> series(cpu.size());
  std::vector<double> busy(cpu.size(), 0.0), mem(cpu.size(), 0.0);
  for (auto& s : series) s.push_back({0.0, 0.0, 0.0});
  for (const auto& r : log) {
    if (!r.node_id || (r.cpu_delta == 0.0 && r.memory_delta == 0.0)) continue;
    const NodeId n = *r.node_id;
    if (n >= cpu.size()) throw InputError(fmt::format("log references unknown node {}", n));
    busy[n] += r.cpu_delta;
    mem[n] += r.memory_delta;
    // Repeated add/subtract of the same slices can leave a tiny residue.
    if (std::abs(busy[n]) < 1e-6 * cpu[n]) busy[n] = 0.0;
    if (std::abs(mem[n]) < 1e-9) mem[n] = 0.0;
    series[n].push_back({r.time, busy[n] / cpu[n], mem[n]});
  }
  return series;
}

}  // namespace aucrac
