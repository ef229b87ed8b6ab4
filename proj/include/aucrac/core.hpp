#pragma once

// Domain types shared by every module: tasks, worker nodes, containers, bids
// and the error hierarchy. Everything here is a plain value type.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aucrac {

using TaskId = std::uint32_t;
using NodeId = std::uint32_t;
using ContainerId = std::uint32_t;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Bad argument to a library call (negative demand, empty search range...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not valid in the current object state (e.g. releasing a container
/// that is not busy, or an unknown container id).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative solver produced a non-finite objective value.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConfigErrorKind {
  missing_file,
  schema,
  unknown_enum,
  invariant,
};

/// Configuration rejected at load/validation time. `field` names the offending
/// key using a dotted path ("weights.lambda1", "workload.mix").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        kind_(kind),
        field_(std::move(field)) {}

  ConfigErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ConfigErrorKind kind_;
  std::string field_;
};

// ---------------------------------------------------------------------------
// Cost-model weights
// ---------------------------------------------------------------------------

/// Weights of the resource function F = delta * (l1*e + a1*l2*m + a2*l3*p).
struct ResourceWeights {
  double lambda1 = 1.0 / 3.0;
  double lambda2 = 1.0 / 3.0;
  double lambda3 = 1.0 / 3.0;
  double alpha1 = 1.0;  // per-MB unit matching
  double alpha2 = 1.0;  // per-watt unit matching
  double delta = 1.0;

  /// Throws ConfigError(invariant) naming the first violated field.
  void validate(std::string_view prefix = "weights") const;

  bool operator==(const ResourceWeights&) const = default;
};

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

enum class TaskClass { lit, mit, hit };

std::string_view to_string(TaskClass c);

/// One IoT workload unit. `deadline` doubles as both the end-to-end deadline
/// r_j used by the eligibility test and the Omega^max bound of the cost
/// minimization; `td_max` bounds the execution delay inside a container.
struct Task {
  TaskId id = 0;
  TaskClass intensity = TaskClass::lit;
  double data_in = 0.0;   // MB
  double data_out = 0.0;  // MB
  double cycles = 0.0;    // CPU cycles
  double memory = 0.0;    // MB
  double power = 0.0;     // W
  double deadline = 1.0;  // s
  double td_max = 1.0;    // s
  double value = 0.0;     // currency
  double arrival_time = 0.0;

  /// Throws InputError on negative fields or non-positive deadline/td_max.
  void validate() const;

  bool operator==(const Task&) const = default;
};

// ---------------------------------------------------------------------------
// Worker nodes and containers
// ---------------------------------------------------------------------------

enum class ExecutorMode { container, vm };

std::string_view to_string(ExecutorMode m);

enum class ContainerState { free, busy };

struct Container {
  ContainerId id = 0;
  NodeId node_id = 0;
  double memory = 0.0;            // m_c, MB, includes the overheads below
  double compute = 0.0;           // C_c, cycles/s
  double lib_overhead = 0.0;      // MB reserved for library installation
  double startup_overhead = 0.0;  // MB of executor image (OS image in vm mode)
  ContainerState state = ContainerState::free;
  double idle_since = 0.0;        // s, meaningful while free
  std::uint64_t generation = 0;   // bumped on every free->busy transition

  bool operator==(const Container&) const = default;
};

struct WorkerNode {
  NodeId id = 0;
  double cpu = 1.0;        // e_i, cycles/s
  double memory = 1.0;     // m_i, MB
  double power = 1.0;      // p_i, W
  double unit_cost = 1.0;  // c_i
  double time_const = 1.0; // phi_i
  ExecutorMode executor_mode = ExecutorMode::container;
  std::vector<Container> container_pool;
  double free_memory = 1.0;  // MB not held by live containers
  ContainerId next_container_id = 0;

  static WorkerNode make(NodeId id, double cpu, double memory, double power,
                         double unit_cost, double time_const,
                         ExecutorMode mode = ExecutorMode::container);

  /// Throws InputError when a capacity is non-positive or memory is overcommitted.
  void validate() const;

  /// Sum of C_c over busy containers. Idle containers keep their memory but
  /// hold no CPU.
  double busy_cpu() const;
  double free_cpu() const { return cpu - busy_cpu(); }
  /// Sum of m_c over live containers.
  double live_memory() const;

  Container* find(ContainerId cid);
  const Container* find(ContainerId cid) const;

  bool operator==(const WorkerNode&) const = default;
};

// ---------------------------------------------------------------------------
// Auction values
// ---------------------------------------------------------------------------

/// Distribution of competitors' bids, used by the winning-probability model.
class BidDistribution {
 public:
  enum class Kind { uniform, empirical };

  static BidDistribution uniform(double lower, double upper);
  /// Requires at least two samples; they are sorted on construction.
  static BidDistribution empirical(std::vector<double> samples);

  Kind kind() const noexcept { return kind_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  const std::vector<double>& samples() const noexcept { return samples_; }

  double cdf(double b) const;

 private:
  BidDistribution() = default;

  Kind kind_ = Kind::uniform;
  double lower_ = 0.0;
  double upper_ = 1.0;
  std::vector<double> samples_;
};

struct Bid {
  NodeId node_id = 0;
  TaskId task_id = 0;
  double amount = 0.0;
  double submit_time = 0.0;
  bool eligible = true;  // zeta

  bool operator==(const Bid&) const = default;
};

struct AuctionOutcome {
  TaskId task_id = 0;
  std::optional<NodeId> winner;
  double payment = 0.0;
  std::vector<Bid> losing_bids;
};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct MetricsRecord {
  std::size_t tasks_arrived = 0;
  std::size_t completed = 0;        // finished on time
  std::size_t deadline_missed = 0;  // finished late
  std::size_t failed_to_place = 0;
  std::size_t in_flight = 0;        // unfinished at the horizon

  double mean_completion = 0.0;  // s, over finished tasks (on time or late)
  double median_completion = 0.0;
  double p95_completion = 0.0;
  double fairness_jain = 1.0;
  double mn_profit = 0.0;
  double peak_memory = 0.0;      // MB, max over time of cluster live-container memory
  double mean_cpu_utilization = 0.0;

  std::size_t containers_created = 0;
  std::size_t containers_reused = 0;

  std::vector<std::size_t> node_task_counts;
  std::vector<double> node_peak_memory;

  bool operator==(const MetricsRecord&) const = default;
};

}  // namespace aucrac
