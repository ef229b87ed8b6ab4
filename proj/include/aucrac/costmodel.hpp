#pragma once

// Worker-side personalised assessment: resource function, execution cost,
// execution time, deadline eligibility and valuation.

#include <string>

#include "aucrac/core.hpp"

namespace aucrac {

struct ResourceDemand {
  double cycles = 0.0;  // e
  double memory = 0.0;  // m, MB
  double power = 0.0;   // p, W

  ResourceDemand operator+(const ResourceDemand& o) const {
    return {cycles + o.cycles, memory + o.memory, power + o.power};
  }
  ResourceDemand operator*(double a) const { return {cycles * a, memory * a, power * a}; }
};

inline ResourceDemand demand_of(const Task& t) { return {t.cycles, t.memory, t.power}; }

/// delta * (l1*e + a1*l2*m + a2*l3*p). Throws InputError on negative demand.
double resource_function(const ResourceDemand& demand, const ResourceWeights& w);

enum class Resource { cpu, memory, power };

std::string_view to_string(Resource r);

/// Result of execution_cost: either a cost or the first resource whose
/// demand/capacity ratio reached 1.
class CostEstimate {
 public:
  static CostEstimate feasible(double cost) { return CostEstimate(cost, {}, 0.0); }
  static CostEstimate infeasible(Resource r, double ratio) {
    return CostEstimate(0.0, r, ratio);
  }

  bool is_feasible() const noexcept { return !blocking_.has_value(); }
  explicit operator bool() const noexcept { return is_feasible(); }

  /// Throws InfeasibleCost when infeasible.
  double value() const;
  Resource blocking() const { return *blocking_; }
  double blocking_ratio() const noexcept { return ratio_; }

 private:
  CostEstimate(double c, std::optional<Resource> r, double ratio)
      : cost_(c), blocking_(r), ratio_(ratio) {}

  double cost_;
  std::optional<Resource> blocking_;
  double ratio_;
};

class InfeasibleCost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// c_i * delta * (l1*e_j/e_i + a1*l2*m_j/m_i + a2*l3*p_j/p_i).
/// Any ratio >= 1 yields an infeasible estimate.
CostEstimate execution_cost(const WorkerNode& node, const ResourceDemand& demand,
                            const ResourceWeights& w);
inline CostEstimate execution_cost(const WorkerNode& node, const Task& task,
                                   const ResourceWeights& w) {
  return execution_cost(node, demand_of(task), w);
}

/// phi_i * e_j / e_i, seconds on the whole node.
double execution_time(const WorkerNode& node, const Task& task);

/// 1 iff execution_time(node, task) < task.deadline.
bool deadline_eligibility(const WorkerNode& node, const Task& task);

/// (1 + margin) * execution_cost. Throws InfeasibleCost for infeasible nodes
/// and InputError for a negative margin.
double valuation(const WorkerNode& node, const Task& task, const ResourceWeights& w,
                 double margin);

}  // namespace aucrac
