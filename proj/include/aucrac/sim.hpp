#pragma once

// Discrete-event simulation of a Manager Node dispatching tasks to Worker
// Nodes under one of six strategies.
//
// Execution model. Every task runs inside a container holding a static CPU
// slice of its node. Live containers (busy or idle) keep their memory and
// slice until they are destroyed, either after idling for the configured TTL
// or when a placement needs the room. A freshly created container costs the
// executor's start latency before the task begins; reuse is immediate.
//
// aucrac: each node with zeta = 1 and a placeable container plan bids its
// valuation; the auction winner places the task at once. Without any bidder
// the task waits in the manager's queue and is re-auctioned whenever a task
// finishes, up to max_retries failed rounds.
//
// The other strategies pick a node up front and append the task to that
// node's FIFO queue; the node starts its queue head as soon as a container
// plan for it is placeable.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aucrac/config.hpp"
#include "aucrac/core.hpp"
#include "aucrac/rng.hpp"

namespace aucrac {

enum class EventKind { task_arrival, auction_round, exec_start, exec_finish, container_release };

std::string_view to_string(EventKind k);

/// Tie rank among events at equal time (lower first).
int event_rank(EventKind k);

struct SimEvent {
  double time = 0.0;
  EventKind kind = EventKind::task_arrival;
  TaskId task_id = 0;
  NodeId node_id = 0;
  ContainerId container_id = 0;
  std::uint64_t generation = 0;  // container generation for idle expiry
  std::uint64_t seq = 0;         // insertion order, last tie-breaker
};

/// One line of the event log. `cpu_delta` / `memory_delta` are the changes in
/// busy CPU and live container memory on `node_id` caused by the record.
struct LogRecord {
  double time = 0.0;
  EventKind kind = EventKind::task_arrival;
  std::optional<TaskId> task_id;
  std::optional<NodeId> node_id;
  std::optional<ContainerId> container_id;
  std::string detail;
  double cpu_delta = 0.0;
  double memory_delta = 0.0;
};

/// "time,kind,task_id,node_id,container_id,detail" with blank optional fields.
std::string format_log_line(const LogRecord& r);
void write_log(std::ostream& out, const std::vector<LogRecord>& log);

struct SimResult {
  MetricsRecord metrics;
  std::vector<LogRecord> log;
  std::vector<AuctionOutcome> outcomes;  // one per finished task, in finish order
  std::vector<Task> tasks;
  /// Tasks that started on a node whose whole-node time missed the deadline.
  std::size_t ineligible_starts = 0;
};

/// Called after every processed event with the node states at that instant.
using SimObserver = std::function<void(const SimEvent&, const std::vector<WorkerNode>&)>;

/// Validates the config, generates the workload from cfg.seed and simulates
/// until the event queue drains or the horizon is passed.
SimResult run(const SimConfig& cfg, const SimObserver& observer = {});

/// Same, on a caller-supplied task list (ids must be 0..n-1 in arrival order).
SimResult run(const SimConfig& cfg, std::vector<Task> tasks, const SimObserver& observer = {});

/// Per-strategy dispatch state that survives between calls to assign().
struct AssignState {
  std::size_t round_robin_next = 0;
  /// Seconds of queued plus remaining work per node, used by mct.
  std::vector<double> backlog;
};

/// Node choice of a load-blind or load-aware baseline. For aucrac and
/// auction_basic this runs the repaired sealed auction over nodes with
/// zeta = 1 (aucrac additionally requires a placeable container plan).
/// Returns nullopt when nobody is eligible.
std::optional<NodeId> assign(Strategy strategy, const Task& task,
                             const std::vector<WorkerNode>& nodes, Rng& rng,
                             AssignState& state, const SimConfig& cfg);

}  // namespace aucrac
