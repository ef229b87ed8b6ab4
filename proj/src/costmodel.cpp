#include "aucrac/costmodel.hpp"

#include <fmt/format.h>

namespace aucrac {

std::string_view to_string(Resource r) {
  switch (r) {
    case Resource::cpu: return "cpu";
    case Resource::memory: return "memory";
    case Resource::power: return "power";
  }
  return "?";
}

double CostEstimate::value() const {
  if (blocking_) {
    throw InfeasibleCost(fmt::format("infeasible: {} ratio {} >= 1", to_string(*blocking_), ratio_));
  }
  return cost_;
}

double resource_function(const ResourceDemand& d, const ResourceWeights& w) {
  if (d.cycles < 0.0 || d.memory < 0.0 || d.power < 0.0) {
    throw InputError("resource demand must be non-negative");
  }
  return w.delta * (w.lambda1 * d.cycles + w.alpha1 * w.lambda2 * d.memory +
                    w.alpha2 * w.lambda3 * d.power);
}

CostEstimate execution_cost(const WorkerNode& node, const ResourceDemand& d,
                            const ResourceWeights& w) {
  const ResourceDemand ratio{d.cycles / node.cpu, d.memory / node.memory, d.power / node.power};
  if (ratio.cycles >= 1.0) return CostEstimate::infeasible(Resource::cpu, ratio.cycles);
  if (ratio.memory >= 1.0) return CostEstimate::infeasible(Resource::memory, ratio.memory);
  if (ratio.power >= 1.0) return CostEstimate::infeasible(Resource::power, ratio.power);
  return CostEstimate::feasible(node.unit_cost * resource_function(ratio, w));
}

double execution_time(const WorkerNode& node, const Task& task) {
  return node.time_const * task.cycles / node.cpu;
}

bool deadline_eligibility(const WorkerNode& node, const Task& task) {
  return task.deadline - execution_time(node, task) > 0.0;
}

double valuation(const WorkerNode& node, const Task& task, const ResourceWeights& w,
                 double margin) {
  if (margin < 0.0) throw InputError("valuation margin must be >= 0");
  return (1.0 + margin) * execution_cost(node, task, w).value();
}

}  // namespace aucrac
