#pragma once

// Worker-side container management: best-fit selection of a free container,
// creation of a right-sized one, release, idle expiry, and the executor
// memory model used for the container-vs-VM comparison.

#include <optional>
#include <vector>

#include "aucrac/config.hpp"
#include "aucrac/core.hpp"

namespace aucrac {

enum class PlacementAction { reuse, create, requeue };

std::string_view to_string(PlacementAction a);

struct ContainerDecision {
  PlacementAction action = PlacementAction::requeue;
  std::optional<ContainerId> container_id;  // set for reuse
  double compute = 0.0;                     // C_c of the chosen / planned container
  double predicted_time = 0.0;              // C_j / C_c
};

/// Best-fit selection.
///
/// Free containers are scanned in ascending (C_c, m_c, id) order and the first
/// with m_c > m_j, C_j / C_c < td_max and C_c <= free_cpu is reused. Otherwise
/// a container is created when free memory > m_j and C_j / free_cpu < td_max,
/// where free_cpu is the node compute not held by busy containers. Otherwise:
/// requeue.
ContainerDecision select_container(const WorkerNode& node, const Task& task,
                                   const ContainerPolicy& policy);

/// Smallest multiple of the granularity with C_j / C_c < td_max, capped at
/// `available` (which must itself satisfy the bound).
double container_slice(const Task& task, double granularity, double available);

/// Memory a new container for `task` occupies: m_j plus the executor's
/// per-instance overhead (library layer for containers, OS image for VMs).
double container_memory(const Task& task, ExecutorMode mode, const ExecutorConfig& executors);

/// Creates a busy container sized for `task`. Returns nullopt (requeue) when
/// the node can no longer hold it: not enough free memory for m_j plus the
/// overhead, or the compute slice no longer fits.
std::optional<ContainerId> create_container(WorkerNode& node, const Task& task,
                                            const ContainerPolicy& policy,
                                            const ExecutorConfig& executors);

/// free -> busy. Throws StateError on an unknown id, a busy container, or a
/// slice larger than the node's free CPU.
void acquire_container(WorkerNode& node, ContainerId id);

/// busy -> free at time `now`, then destroys every free container idle for at
/// least policy.idle_ttl. Returns the ids destroyed. Throws StateError on an
/// unknown id or a container that is not busy.
std::vector<ContainerId> release_container(WorkerNode& node, ContainerId id, double now,
                                           const ContainerPolicy& policy);

/// Destroys free containers idle for at least `ttl`; returns their ids.
std::vector<ContainerId> expire_idle(WorkerNode& node, double now, double ttl);

/// Destroys one free container and returns its memory to the node.
void destroy_container(WorkerNode& node, ContainerId id);

/// select_container plus commit-time checks. When the plain decision is
/// requeue, or a create would not fit once the executor overhead is counted,
/// idle containers are considered for eviction (longest idle first); if
/// evicting some of them makes a create fit, they are listed in `evict`.
struct PlacementPlan {
  ContainerDecision decision;
  std::vector<ContainerId> evict;

  bool placeable() const { return decision.action != PlacementAction::requeue; }
};

PlacementPlan plan_placement(const WorkerNode& node, const Task& task,
                             const ContainerPolicy& policy, const ExecutorConfig& executors);

/// Applies a placeable plan: evicts, then reuses or creates. Returns the id of
/// the container now busy with `task`.
ContainerId commit_placement(WorkerNode& node, const Task& task, const PlacementPlan& plan,
                             const ContainerPolicy& policy, const ExecutorConfig& executors);

/// Resident memory of a node running `task_count` tasks of `task_memory` MB
/// each: base + count * (task_memory + per-instance overhead of `mode`).
double memory_footprint(const ExecutorConfig& executors, ExecutorMode mode,
                        std::size_t task_count, double task_memory);

}  // namespace aucrac
