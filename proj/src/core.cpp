#include "aucrac/core.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace aucrac {

namespace {

void require_invariant(bool ok, std::string_view prefix, std::string_view field,
                       const std::string& msg) {
  if (!ok) {
    throw ConfigError(ConfigErrorKind::invariant, fmt::format("{}.{}", prefix, field), msg);
  }
}

}  // namespace

void ResourceWeights::validate(std::string_view prefix) const {
  for (auto [name, v] : {std::pair{"lambda1", lambda1}, std::pair{"lambda2", lambda2},
                         std::pair{"lambda3", lambda3}}) {
    require_invariant(v > 0.0 && v < 1.0, prefix, name,
                      fmt::format("must lie strictly in (0,1), got {}", v));
  }
  const double sum = lambda1 + lambda2 + lambda3;
  require_invariant(std::abs(sum - 1.0) <= 1e-12, prefix, "lambda1+lambda2+lambda3",
                    fmt::format("lambda sum must equal 1, got {}", sum));
  require_invariant(alpha1 > 0.0, prefix, "alpha1", "must be > 0");
  require_invariant(alpha2 > 0.0, prefix, "alpha2", "must be > 0");
  require_invariant(delta > 0.0, prefix, "delta", "must be > 0");
}

std::string_view to_string(TaskClass c) {
  switch (c) {
    case TaskClass::lit: return "lit";
    case TaskClass::mit: return "mit";
    case TaskClass::hit: return "hit";
  }
  return "?";
}

std::string_view to_string(ExecutorMode m) {
  return m == ExecutorMode::container ? "container" : "vm";
}

void Task::validate() const {
  for (auto [name, v] : {std::pair{"data_in", data_in}, std::pair{"data_out", data_out},
                         std::pair{"cycles", cycles}, std::pair{"memory", memory},
                         std::pair{"power", power}, std::pair{"value", value},
                         std::pair{"arrival_time", arrival_time}}) {
    if (!(v >= 0.0)) throw InputError(fmt::format("task {}: {} must be >= 0", id, name));
  }
  if (!(deadline > 0.0)) throw InputError(fmt::format("task {}: deadline must be > 0", id));
  if (!(td_max > 0.0)) throw InputError(fmt::format("task {}: td_max must be > 0", id));
}

WorkerNode WorkerNode::make(NodeId id, double cpu, double memory, double power,
                            double unit_cost, double time_const, ExecutorMode mode) {
  WorkerNode n;
  n.id = id;
  n.cpu = cpu;
  n.memory = memory;
  n.power = power;
  n.unit_cost = unit_cost;
  n.time_const = time_const;
  n.executor_mode = mode;
  n.free_memory = memory;
  n.validate();
  return n;
}

void WorkerNode::validate() const {
  for (auto [name, v] : {std::pair{"cpu", cpu}, std::pair{"memory", memory},
                         std::pair{"power", power}, std::pair{"unit_cost", unit_cost},
                         std::pair{"time_const", time_const}}) {
    if (!(v > 0.0)) throw InputError(fmt::format("node {}: {} must be > 0", id, name));
  }
  if (live_memory() > memory * (1.0 + 1e-12)) {
    throw InputError(fmt::format("node {}: live container memory exceeds capacity", id));
  }
  if (free_memory < 0.0 || std::abs(live_memory() + free_memory - memory) > 1e-9 * memory) {
    throw InputError(fmt::format("node {}: free plus live memory must equal capacity", id));
  }
}

double WorkerNode::busy_cpu() const {
  double s = 0.0;
  for (const auto& c : container_pool) {
    if (c.state == ContainerState::busy) s += c.compute;
  }
  return s;
}

double WorkerNode::live_memory() const {
  double s = 0.0;
  for (const auto& c : container_pool) s += c.memory;
  return s;
}

Container* WorkerNode::find(ContainerId cid) {
  auto it = std::find_if(container_pool.begin(), container_pool.end(),
                         [cid](const Container& c) { return c.id == cid; });
  return it == container_pool.end() ? nullptr : &*it;
}

const Container* WorkerNode::find(ContainerId cid) const {
  return const_cast<WorkerNode*>(this)->find(cid);
}

BidDistribution BidDistribution::uniform(double lower, double upper) {
  if (!(lower < upper)) {
    throw InputError(fmt::format("uniform bid distribution needs lower < upper ({} vs {})",
                                 lower, upper));
  }
  BidDistribution d;
  d.kind_ = Kind::uniform;
  d.lower_ = lower;
  d.upper_ = upper;
  return d;
}

BidDistribution BidDistribution::empirical(std::vector<double> samples) {
  if (samples.size() < 2) {
    throw InputError("empirical bid distribution needs at least 2 samples");
  }
  std::sort(samples.begin(), samples.end());
  BidDistribution d;
  d.kind_ = Kind::empirical;
  d.lower_ = samples.front();
  d.upper_ = samples.back();
  d.samples_ = std::move(samples);
  return d;
}

double BidDistribution::cdf(double b) const {
  if (kind_ == Kind::uniform) {
    if (b <= lower_) return 0.0;
    if (b >= upper_) return 1.0;
    return (b - lower_) / (upper_ - lower_);
  }
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), b);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

}  // namespace aucrac
