#pragma once

#include <span>
#include <vector>

#include "aucrac/core.hpp"

namespace aucrac {

struct LogRecord;

/// (sum x)^2 / (n * sum x^2); 1 when every count is zero. Throws InputError on n = 0.
double jain_fairness(std::span<const std::size_t> counts);

/// Sum over outcomes with a winner of (d_j * v - payment). Outcomes whose task
/// id is not in `tasks` are an InputError.
double mn_profit(std::span<const AuctionOutcome> outcomes, std::span<const Task> tasks,
                 double unit_price);

/// Linear-interpolation quantile (q in [0,1]) of an unsorted sample; 0 for an empty one.
double quantile(std::vector<double> sample, double q);

struct UtilizationPoint {
  double time = 0.0;
  double cpu_fraction = 0.0;  // busy slices / e_i
  double memory_mb = 0.0;     // memory held by live containers

  bool operator==(const UtilizationPoint&) const = default;
};

/// Per-node step series rebuilt from an event log; one point per event that
/// touches the node, plus a zero point at t = 0. `cpu` holds e_i per node.
std::vector<std::vector<UtilizationPoint>> utilization_series(std::span<const LogRecord> log,
                                                              std::span<const double> cpu);

}  // namespace aucrac
