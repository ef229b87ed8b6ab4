#pragma once

// Experiment configuration and its JSON form.
//
// The JSON document uses the field names below verbatim. Every key is
// optional (missing keys keep the defaults shown here) but unknown keys,
// wrong types and unknown enum names are rejected. See configs/default.json
// for a complete document.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aucrac/core.hpp"

namespace aucrac {

enum class Strategy { aucrac, random, round_robin, greedy, mct, auction_basic };
enum class AuctionMode { literal, repaired };
enum class WinRule { highest, lowest };

inline constexpr std::array<Strategy, 6> kAllStrategies = {
    Strategy::aucrac, Strategy::random, Strategy::round_robin,
    Strategy::greedy, Strategy::mct,    Strategy::auction_basic};

std::string_view to_string(Strategy s);
std::string_view to_string(AuctionMode m);
std::string_view to_string(WinRule r);

/// Parsers throw ConfigError(unknown_enum) naming `field`.
Strategy parse_strategy(std::string_view name, std::string_view field = "strategy");
AuctionMode parse_auction_mode(std::string_view name, std::string_view field = "auction_mode");
WinRule parse_win_rule(std::string_view name, std::string_view field = "win_rule");
ExecutorMode parse_executor_mode(std::string_view name, std::string_view field);

/// Uniform ranges for one intensity class.
struct TaskClassProfile {
  double cycles_min = 1e8, cycles_max = 5e8;
  double memory_min = 64, memory_max = 256;  // MB
  double power_min = 5, power_max = 15;      // W
  double data_min = 0.5, data_max = 2.0;     // MB

  bool operator==(const TaskClassProfile&) const = default;
};

struct IntensityMix {
  double lit = 0.4;
  double mit = 0.3;
  double hit = 0.3;

  bool operator==(const IntensityMix&) const = default;
};

struct WorkloadConfig {
  std::uint32_t tasks_per_device = 20;
  double arrival_rate = 0.8;  // tasks/s per device (Poisson)
  IntensityMix mix;
  TaskClassProfile lit{1e8, 5e8, 64, 256, 5, 15, 0.5, 2.0};
  TaskClassProfile mit{5e8, 2e9, 256, 1024, 15, 40, 2.0, 10.0};
  TaskClassProfile hit{2e9, 1e10, 1024, 2048, 40, 80, 10.0, 50.0};
  double output_ratio = 0.1;     // d_out = ratio * d_in
  double reference_cpu = 1.6e10; // cycles/s used to scale time budgets
  // td_max = cycles / reference_cpu * U[td_slack_min, td_slack_max]
  double td_slack_min = 2.0, td_slack_max = 4.0;
  // deadline = td_max * U[deadline_slack_min, deadline_slack_max]
  double deadline_slack_min = 1.0, deadline_slack_max = 2.0;

  const TaskClassProfile& profile(TaskClass c) const;

  bool operator==(const WorkloadConfig&) const = default;
};

struct NodeTemplate {
  double cpu = 1.6e10;
  double memory = 8192;
  double power = 250;
  double unit_cost = 1.0;
  double time_const = 1.0;
  ExecutorMode executor_mode = ExecutorMode::container;

  bool operator==(const NodeTemplate&) const = default;
};

struct ContainerPolicy {
  double granularity = 1e9;  // cycles/s, slice rounding step
  double idle_ttl = 10.0;    // s an idle container survives before destruction
  std::uint32_t max_retries = 3;
  double retry_interval = 1.0;  // s between counted re-auctions of a waiting task
  // Let a placement destroy idle containers (longest idle first) to make room.
  bool evict_idle = true;

  bool operator==(const ContainerPolicy&) const = default;
};

/// Per-instance cost of an executor: resident memory added to every instance
/// and the time to bring a fresh instance up.
struct ExecutorProfile {
  double overhead_mb = 20.0;
  double start_latency = 0.5;  // s

  bool operator==(const ExecutorProfile&) const = default;
};

struct ExecutorConfig {
  double base_memory = 256.0;  // MB resident on a node with no tasks
  ExecutorProfile container{20.0, 0.5};
  ExecutorProfile vm{512.0, 5.0};

  const ExecutorProfile& profile(ExecutorMode m) const {
    return m == ExecutorMode::container ? container : vm;
  }

  bool operator==(const ExecutorConfig&) const = default;
};

struct SimConfig {
  std::uint64_t seed = 42;
  std::uint32_t num_devices = 50;
  std::uint32_t num_workers = 10;
  Strategy strategy = Strategy::aucrac;
  AuctionMode auction_mode = AuctionMode::repaired;
  WinRule win_rule = WinRule::lowest;
  double unit_price = 0.05;       // v, currency per MB
  double valuation_margin = 0.1;  // V = (1 + margin) * cost
  double horizon = 300.0;         // s
  ResourceWeights weights;
  WorkloadConfig workload;
  std::vector<NodeTemplate> node_templates = default_node_templates();
  ContainerPolicy containers;
  ExecutorConfig executors;

  static std::vector<NodeTemplate> default_node_templates();

  /// Throws ConfigError(invariant) naming the first violated field.
  void validate() const;

  /// Worker i uses node_templates[i % size].
  std::vector<WorkerNode> build_nodes() const;

  bool operator==(const SimConfig&) const = default;
};

nlohmann::json to_json(const SimConfig& cfg);
/// Strict decode; throws ConfigError. Does not run validate().
SimConfig sim_config_from_json(const nlohmann::json& j);

/// Parse + validate. Throws ConfigError (missing_file / schema / unknown_enum / invariant).
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(std::string_view text);
std::string dump_config(const SimConfig& cfg);

}  // namespace aucrac
