#include "aucrac/containers.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace aucrac {

std::string_view to_string(PlacementAction a) {
  switch (a) {
    case PlacementAction::reuse: return "reuse";
    case PlacementAction::create: return "create";
    case PlacementAction::requeue: return "requeue";
  }
  return "?";
}

double container_slice(const Task& task, double granularity, double available) {
  if (!(granularity > 0.0)) throw InputError("slice granularity must be > 0");
  double k = std::floor(task.cycles / (task.td_max * granularity)) + 1.0;
  // floor() of a rounded quotient can land one step off either way.
  while (task.cycles / (k * granularity) >= task.td_max) k += 1.0;
  while (k > 1.0 && task.cycles / ((k - 1.0) * granularity) < task.td_max) k -= 1.0;
  return std::min(k * granularity, available);
}

ContainerDecision select_container(const WorkerNode& node, const Task& task,
                                   const ContainerPolicy& policy) {
  std::vector<const Container*> free;
  for (const auto& c : node.container_pool) {
    if (c.state == ContainerState::free) free.push_back(&c);
  }
  std::sort(free.begin(), free.end(), [](const Container* a, const Container* b) {
    if (a->compute != b->compute) return a->compute < b->compute;
    if (a->memory != b->memory) return a->memory < b->memory;
    return a->id < b->id;
  });

  const double free_cpu = node.free_cpu();
  ContainerDecision d;
  for (const Container* c : free) {
    const double t = task.cycles / c->compute;
    if (c->memory > task.memory && t < task.td_max && c->compute <= free_cpu) {
      d.action = PlacementAction::reuse;
      d.container_id = c->id;
      d.compute = c->compute;
      d.predicted_time = t;
      return d;
    }
  }

  if (node.free_memory > task.memory && free_cpu > 0.0 && task.cycles / free_cpu < task.td_max) {
    d.action = PlacementAction::create;
    d.compute = container_slice(task, policy.granularity, free_cpu);
    d.predicted_time = task.cycles / d.compute;
    return d;
  }
  return d;
}

double container_memory(const Task& task, ExecutorMode mode, const ExecutorConfig& executors) {
  return task.memory + executors.profile(mode).overhead_mb;
}

std::optional<ContainerId> create_container(WorkerNode& node, const Task& task,
                                            const ContainerPolicy& policy,
                                            const ExecutorConfig& executors) {
  const double free_cpu = node.free_cpu();
  if (!(free_cpu > 0.0) || task.cycles / free_cpu >= task.td_max) return std::nullopt;
  const double memory = container_memory(task, node.executor_mode, executors);
  if (memory > node.free_memory) return std::nullopt;

  const double overhead = executors.profile(node.executor_mode).overhead_mb;
  Container c;
  c.id = node.next_container_id++;
  c.node_id = node.id;
  c.memory = memory;
  c.compute = container_slice(task, policy.granularity, free_cpu);
  if (node.executor_mode == ExecutorMode::container) {
    c.lib_overhead = overhead;
  } else {
    c.startup_overhead = overhead;
  }
  c.state = ContainerState::busy;
  c.generation = 1;
  node.free_memory -= memory;
  node.container_pool.push_back(c);
  return c.id;
}

void acquire_container(WorkerNode& node, ContainerId id) {
  Container* c = node.find(id);
  if (c == nullptr) throw StateError(fmt::format("node {}: unknown container {}", node.id, id));
  if (c->state != ContainerState::free) {
    throw StateError(fmt::format("node {}: container {} is already busy", node.id, id));
  }
  if (c->compute > node.free_cpu()) {
    throw StateError(fmt::format("node {}: no free CPU for container {}", node.id, id));
  }
  c->state = ContainerState::busy;
  ++c->generation;
}

std::vector<ContainerId> release_container(WorkerNode& node, ContainerId id, double now,
                                           const ContainerPolicy& policy) {
  Container* c = node.find(id);
  if (c == nullptr) throw StateError(fmt::format("node {}: unknown container {}", node.id, id));
  if (c->state != ContainerState::busy) {
    throw StateError(fmt::format("node {}: container {} is not busy", node.id, id));
  }
  c->state = ContainerState::free;
  c->idle_since = now;
  return expire_idle(node, now, policy.idle_ttl);
}

void destroy_container(WorkerNode& node, ContainerId id) {
  auto it = std::find_if(node.container_pool.begin(), node.container_pool.end(),
                         [id](const Container& c) { return c.id == id; });
  if (it == node.container_pool.end()) {
    throw StateError(fmt::format("node {}: unknown container {}", node.id, id));
  }
  if (it->state != ContainerState::free) {
    throw StateError(fmt::format("node {}: cannot destroy busy container {}", node.id, id));
  }
  node.free_memory += it->memory;
  node.container_pool.erase(it);
  if (node.container_pool.empty()) node.free_memory = node.memory;  // drop rounding drift
}

std::vector<ContainerId> expire_idle(WorkerNode& node, double now, double ttl) {
  std::vector<ContainerId> gone;
  for (const auto& c : node.container_pool) {
    if (c.state == ContainerState::free && now - c.idle_since >= ttl) gone.push_back(c.id);
  }
  for (ContainerId id : gone) destroy_container(node, id);
  return gone;
}

namespace {

bool create_fits(const WorkerNode& node, const Task& task, const ContainerDecision& d,
                 const ExecutorConfig& executors) {
  return d.action == PlacementAction::create &&
         container_memory(task, node.executor_mode, executors) <= node.free_memory;
}

}  // namespace

PlacementPlan plan_placement(const WorkerNode& node, const Task& task,
                             const ContainerPolicy& policy, const ExecutorConfig& executors) {
  PlacementPlan plan;
  plan.decision = select_container(node, task, policy);
  if (plan.decision.action == PlacementAction::reuse) return plan;
  if (create_fits(node, task, plan.decision, executors)) return plan;
  if (!policy.evict_idle) {
    plan.decision = ContainerDecision{};
    return plan;
  }

  std::vector<const Container*> idle;
  for (const auto& c : node.container_pool) {
    if (c.state == ContainerState::free) idle.push_back(&c);
  }
  std::sort(idle.begin(), idle.end(), [](const Container* a, const Container* b) {
    if (a->idle_since != b->idle_since) return a->idle_since < b->idle_since;
    return a->id < b->id;
  });

  WorkerNode trial = node;
  for (const Container* c : idle) {
    destroy_container(trial, c->id);
    plan.evict.push_back(c->id);
    ContainerDecision d = select_container(trial, task, policy);
    if (create_fits(trial, task, d, executors)) {
      plan.decision = d;
      return plan;
    }
  }
  plan.evict.clear();
  plan.decision = ContainerDecision{};
  return plan;
}

ContainerId commit_placement(WorkerNode& node, const Task& task, const PlacementPlan& plan,
                             const ContainerPolicy& policy, const ExecutorConfig& executors) {
  if (!plan.placeable()) throw StateError("cannot commit a requeue decision");
  for (ContainerId id : plan.evict) destroy_container(node, id);
  if (plan.decision.action == PlacementAction::reuse) {
    acquire_container(node, *plan.decision.container_id);
    return *plan.decision.container_id;
  }
  const auto id = create_container(node, task, policy, executors);
  if (!id) throw StateError(fmt::format("node {}: planned container no longer fits", node.id));
  return *id;
}

double memory_footprint(const ExecutorConfig& executors, ExecutorMode mode,
                        std::size_t task_count, double task_memory) {
  return executors.base_memory +
         static_cast<double>(task_count) * (task_memory + executors.profile(mode).overhead_mb);
}

}  // namespace aucrac
