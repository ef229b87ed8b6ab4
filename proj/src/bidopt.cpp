#include "aucrac/bidopt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "aucrac/core.hpp"
#include "aucrac/kernels/kernels.hpp"

namespace aucrac {

void OptimizerParams::validate() const {
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(capacity[k] > 0.0)) throw InputError("optimizer capacities must be > 0");
    if (!(lower[k] >= 0.0)) throw InputError("optimizer lower bounds must be >= 0");
  }
  if (!(phi > 0.0)) throw InputError("phi must be > 0");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (!(tolerance > 0.0)) throw InputError("tolerance must be > 0");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
}

OptimizerParams optimizer_params(const WorkerNode& node, const Task& task, const ResourceWeights& w,
                                 bool demand_floor) {
  OptimizerParams p;
  p.capacity = {node.cpu, node.memory, node.power};
  p.alpha1 = w.alpha1;
  p.alpha2 = w.alpha2;
  p.delta = w.delta;
  p.phi = node.time_const;
  p.deadline_max = task.deadline;
  p.unit_cost = node.unit_cost;
  if (demand_floor) p.lower = {task.cycles, task.memory, task.power};
  return p;
}

FeasibleBox feasible_box(const OptimizerParams& params) {
  FeasibleBox box;
  box.lower = params.lower;
  for (std::size_t k = 0; k < 3; ++k) {
    box.upper[k] = std::nextafter(params.capacity[k], 0.0);
  }
  box.upper.e = std::min(box.upper.e, params.deadline_max * params.capacity.e / params.phi);
  return box;
}

double lagrangian_value(const Point3& x, const OptimizerParams& q) {
  const Point3& c = q.capacity;
  const double re = x.e / c.e;
  const double rm = x.m / c.m;
  const double rp = x.p / c.p;
  const double scale = (c.e + q.alpha1 * c.m + q.alpha2 * c.p) / 3.0;
  double value = scale * (re / 3.0 + rm / 3.0 + rp / 3.0);
  if (q.terms == LagrangianTerms::full) {
    value += ((1.0 - re) + (1.0 - rm) + (1.0 - rp)) / 9.0;
    value += q.lambda4 * (q.phi * re - q.deadline_max);
  }
  return value;
}

Point3 lagrangian_gradient(const Point3& /*x*/, const OptimizerParams& q) {
  // L is affine in (e_j, m_j, p_j), so the gradient does not depend on x.
  const Point3& c = q.capacity;
  const double scale = (c.e + q.alpha1 * c.m + q.alpha2 * c.p) / 3.0;
  Point3 g{scale / (3.0 * c.e), scale / (3.0 * c.m), scale / (3.0 * c.p)};
  if (q.terms == LagrangianTerms::full) {
    g.e += -1.0 / (9.0 * c.e) + q.lambda4 * q.phi / c.e;
    g.m += -1.0 / (9.0 * c.m);
    g.p += -1.0 / (9.0 * c.p);
  }
  return g;
}

Point3 projected_gradient(const Point3& x, const Point3& grad, const FeasibleBox& box) {
  Point3 pg = grad;
  for (std::size_t k = 0; k < 3; ++k) {
    if ((x[k] <= box.lower[k] && grad[k] > 0.0) || (x[k] >= box.upper[k] && grad[k] < 0.0)) {
      pg[k] = 0.0;
    }
  }
  return pg;
}

double linear_cost(const Point3& x, const OptimizerParams& q) {
  const Point3& c = q.capacity;
  return q.unit_cost * q.delta *
         (x.e / c.e + q.alpha1 * (x.m / c.m) + q.alpha2 * (x.p / c.p)) / 3.0;
}

namespace {

double norm(const Point3& v) { return std::sqrt(v.e * v.e + v.m * v.m + v.p * v.p); }

Point3 clamp(const Point3& x, const FeasibleBox& box) {
  Point3 out;
  for (std::size_t k = 0; k < 3; ++k) out[k] = std::clamp(x[k], box.lower[k], box.upper[k]);
  return out;
}

bool inside(const Point3& x, const FeasibleBox& box) {
  for (std::size_t k = 0; k < 3; ++k) {
    if (x[k] < box.lower[k] || x[k] > box.upper[k]) return false;
  }
  return true;
}

constexpr double kMinLearningRate = 1e-12;

}  // namespace

CriticalPoint optimize(const OptimizerParams& params, const Point3& start,
                       const IterateObserver& observer) {
  params.validate();
  const FeasibleBox box = feasible_box(params);
  if (box.empty()) throw InputError("feasible box is empty");
  if (!inside(start, box)) throw InputError("start point lies outside the feasible box");

  CriticalPoint out;
  Point3 x = start;
  double value = lagrangian_value(x, params);
  if (!std::isfinite(value)) throw DivergenceError("non-finite Lagrangian at start point");
  double psi = params.learning_rate;

  for (std::size_t step = 0;; ++step) {
    const Point3 g = lagrangian_gradient(x, params);
    out.gradient_norm = norm(projected_gradient(x, g, box));
    if (out.gradient_norm < params.tolerance) {
      out.converged = true;
      break;
    }
    if (step >= params.max_iter) break;

    // Steps are taken in capacity-ratio coordinates x_k / cap_k; raw units
    // (cycles next to MB) leave the plain gradient badly conditioned.
    const Point3& cap = params.capacity;
    const Point3 candidate =
        clamp({x.e - psi * cap.e * g.e, x.m - psi * cap.m * g.m, x.p - psi * cap.p * g.p}, box);
    const double next = lagrangian_value(candidate, params);
    if (!std::isfinite(next)) {
      throw DivergenceError(fmt::format("non-finite Lagrangian after {} steps", step));
    }
    if (next > value) {
      psi *= 0.5;
      if (psi < kMinLearningRate) break;
      continue;
    }
    x = candidate;
    value = next;
    ++out.iterations;
    if (observer) observer(x, value);
  }
  out.point = x;
  return out;
}

CriticalPoint optimize(const OptimizerParams& params) {
  params.validate();
  const FeasibleBox box = feasible_box(params);
  if (box.empty()) throw InputError("feasible box is empty");
  const Point3 half{params.capacity.e / 2.0, params.capacity.m / 2.0, params.capacity.p / 2.0};
  return optimize(params, clamp(half, box));
}

double OracleResult::cell_bound() const {
  return std::abs(coef_e) * cell.e + std::abs(coef_m) * cell.m + std::abs(coef_p) * cell.p;
}

std::optional<OracleResult> grid_oracle(const OptimizerParams& params, std::size_t resolution) {
  if (resolution < 8) throw InputError("grid resolution must be >= 8");
  params.validate();

  const Point3& cap = params.capacity;
  const Point3& lo = params.lower;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(lo[k] < cap[k])) return std::nullopt;
  }

  const double res = static_cast<double>(resolution);
  Point3 cell;
  std::vector<double> axis[3];
  for (std::size_t k = 0; k < 3; ++k) {
    cell[k] = (cap[k] - lo[k]) / res;
    axis[k].resize(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
      axis[k][i] = lo[k] + static_cast<double>(i) * cell[k];
    }
  }

  OracleResult r;
  const double scale = params.unit_cost * params.delta / 3.0;
  r.coef_e = scale / cap.e;
  r.coef_m = scale * params.alpha1 / cap.m;
  r.coef_p = scale * params.alpha2 / cap.p;
  r.cell = cell;

  bool found = false;
  double best = 0.0;
  for (std::size_t ie = 0; ie < resolution; ++ie) {
    const double e = axis[0][ie];
    if (params.phi * e / cap.e > params.deadline_max) continue;
    for (std::size_t im = 0; im < resolution; ++im) {
      const double base = r.coef_e * e + r.coef_m * axis[1][im];
      const auto m = kernels::argmin_affine(base, r.coef_p, axis[2]);
      if (!found || m.value < best) {
        found = true;
        best = m.value;
        r.index_e = ie;
        r.index_m = im;
        r.index_p = m.index;
      }
    }
  }
  if (!found) return std::nullopt;

  r.point = {axis[0][r.index_e], axis[1][r.index_m], axis[2][r.index_p]};
  r.cost = linear_cost(r.point, params);
  return r;
}

}  // namespace aucrac
