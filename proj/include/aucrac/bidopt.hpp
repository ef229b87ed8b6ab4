#pragma once

// Worker-side cost minimisation over the resource allotment (e_j, m_j, p_j).
//
// The objective is the simplified Lagrangian with l1 = l2 = l3 = 1/3:
//
//   L = (1/3)(e_i + a1 m_i + a2 p_i) * (e_j/(3 e_i) + m_j/(3 m_i) + p_j/(3 p_i))
//     + (1/9) * [(1 - e_j/e_i) + (1 - m_j/m_i) + (1 - p_j/p_i)]
//     + l4 * (phi_i e_j / e_i - Omega_max)
//
// optimize() runs projected gradient descent on L over the feasible box
// lower <= x < capacity, e_j <= Omega_max e_i / phi_i. grid_oracle() is an
// independent exhaustive search of the linear execution cost over the same box.

#include <cstddef>
#include <functional>
#include <optional>

#include "aucrac/core.hpp"

namespace aucrac {

struct Point3 {
  double e = 0.0;  // cycles
  double m = 0.0;  // MB
  double p = 0.0;  // W

  double& operator[](std::size_t k) { return k == 0 ? e : (k == 1 ? m : p); }
  double operator[](std::size_t k) const { return k == 0 ? e : (k == 1 ? m : p); }
  bool operator==(const Point3&) const = default;
};

enum class LagrangianTerms {
  full,         // linear part + penalty block + deadline term
  linear_only,  // penalty block and deadline term dropped
};

struct OptimizerParams {
  Point3 capacity{1.0, 1.0, 1.0};  // e_i, m_i, p_i
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double phi = 1.0;            // phi_i
  double deadline_max = 1.0;   // Omega_max
  double learning_rate = 1.0;  // psi
  double tolerance = 1e-8;
  std::size_t max_iter = 100000;
  double lambda4 = 0.0;
  Point3 lower{0.0, 0.0, 0.0};  // optional demand floor; zero by default
  // Linear execution cost used by the oracle: unit_cost * delta * sum(ratio/3 ...).
  double unit_cost = 1.0;
  double delta = 1.0;
  LagrangianTerms terms = LagrangianTerms::full;

  /// Throws InputError on non-positive capacities, learning rate, tolerance
  /// or a zero iteration budget.
  void validate() const;
};

struct CriticalPoint {
  Point3 point;
  double gradient_norm = 0.0;  // projected-gradient norm at `point`
  std::size_t iterations = 0;  // accepted steps
  bool converged = false;
};

/// Inclusive lower / upper corners of the feasible box. The strict upper
/// bound x < capacity is represented by the largest double below capacity.
struct FeasibleBox {
  Point3 lower;
  Point3 upper;
  bool empty() const { return lower.e > upper.e || lower.m > upper.m || lower.p > upper.p; }
};

/// Parameters for allotting `node` resources to `task`. The demand floor is
/// the task's own (cycles, memory, power); pass demand_floor = false to drop it.
OptimizerParams optimizer_params(const WorkerNode& node, const Task& task, const ResourceWeights& w,
                                 bool demand_floor = true);

FeasibleBox feasible_box(const OptimizerParams& params);

double lagrangian_value(const Point3& x, const OptimizerParams& params);
Point3 lagrangian_gradient(const Point3& x, const OptimizerParams& params);

/// Gradient with components that push out of the box zeroed.
Point3 projected_gradient(const Point3& x, const Point3& grad, const FeasibleBox& box);

/// Linear execution cost with l1 = l2 = l3 = 1/3:
/// unit_cost * delta * (e/e_i + a1 m/m_i + a2 p/p_i) / 3.
double linear_cost(const Point3& x, const OptimizerParams& params);

/// Called after every accepted step with the new iterate and objective.
using IterateObserver = std::function<void(const Point3&, double)>;

/// Projected gradient descent with the step on axis k scaled by capacity[k].
/// psi is halved whenever a step would increase L;
/// the search stops unconverged once psi < 1e-12 or max_iter steps are taken.
/// Throws InputError when `start` lies outside the box (or the box is empty)
/// and DivergenceError on a non-finite objective.
CriticalPoint optimize(const OptimizerParams& params, const Point3& start,
                       const IterateObserver& observer = {});
/// Starts from capacity/2 clamped into the box.
CriticalPoint optimize(const OptimizerParams& params);

struct OracleResult {
  Point3 point;
  double cost = 0.0;
  std::size_t index_e = 0, index_m = 0, index_p = 0;
  Point3 cell;  // grid spacing per axis
  /// Upper bound on how much the cost can drop within one grid cell.
  double cell_bound() const;
  double coef_e = 0.0, coef_m = 0.0, coef_p = 0.0;  // d(cost)/dx per axis
};

/// Exhaustive search of linear_cost on the grid lower + k * (capacity - lower) / R,
/// k = 0..R-1 per axis, restricted to phi e / e_i <= Omega_max. Ties resolve to
/// the lexicographically smallest (k_e, k_m, k_p). Returns nullopt when no grid
/// point is feasible. Throws InputError when resolution < 8.
std::optional<OracleResult> grid_oracle(const OptimizerParams& params, std::size_t resolution);

}  // namespace aucrac
