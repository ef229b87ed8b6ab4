#include "aucrac/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace aucrac {

using nlohmann::json;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::aucrac: return "aucrac";
    case Strategy::random: return "random";
    case Strategy::round_robin: return "round_robin";
    case Strategy::greedy: return "greedy";
    case Strategy::mct: return "mct";
    case Strategy::auction_basic: return "auction_basic";
  }
  return "?";
}

std::string_view to_string(AuctionMode m) {
  return m == AuctionMode::literal ? "literal" : "repaired";
}

std::string_view to_string(WinRule r) { return r == WinRule::highest ? "highest" : "lowest"; }

Strategy parse_strategy(std::string_view name, std::string_view field) {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError(ConfigErrorKind::unknown_enum, std::string(field),
                    fmt::format("unknown strategy '{}'", name));
}

AuctionMode parse_auction_mode(std::string_view name, std::string_view field) {
  if (name == "literal") return AuctionMode::literal;
  if (name == "repaired") return AuctionMode::repaired;
  throw ConfigError(ConfigErrorKind::unknown_enum, std::string(field),
                    fmt::format("unknown auction mode '{}' (literal|repaired)", name));
}

WinRule parse_win_rule(std::string_view name, std::string_view field) {
  if (name == "highest") return WinRule::highest;
  if (name == "lowest") return WinRule::lowest;
  throw ConfigError(ConfigErrorKind::unknown_enum, std::string(field),
                    fmt::format("unknown win rule '{}' (highest|lowest)", name));
}

ExecutorMode parse_executor_mode(std::string_view name, std::string_view field) {
  if (name == "container") return ExecutorMode::container;
  if (name == "vm") return ExecutorMode::vm;
  throw ConfigError(ConfigErrorKind::unknown_enum, std::string(field),
                    fmt::format("unknown executor mode '{}' (container|vm)", name));
}

const TaskClassProfile& WorkloadConfig::profile(TaskClass c) const {
  switch (c) {
    case TaskClass::lit: return lit;
    case TaskClass::mit: return mit;
    case TaskClass::hit: return hit;
  }
  return lit;
}

std::vector<NodeTemplate> SimConfig::default_node_templates() {
  // Larger nodes cost more per unit but less per task, so the cost ranking
  // differs from the raw-speed ranking.
  return {
      {1.2e10, 4096, 150, 0.8, 1.0, ExecutorMode::container},
      {1.6e10, 8192, 250, 1.0, 1.0, ExecutorMode::container},
      {2.4e10, 16384, 350, 1.3, 1.0, ExecutorMode::container},
      {3.2e10, 32768, 500, 1.6, 1.0, ExecutorMode::container},
  };
}

namespace {

[[noreturn]] void invariant(const std::string& field, const std::string& msg) {
  throw ConfigError(ConfigErrorKind::invariant, field, msg);
}

void check_range(const std::string& field, double lo, double hi) {
  if (!(lo > 0.0)) invariant(field, fmt::format("lower bound must be > 0, got {}", lo));
  if (!(lo <= hi)) invariant(field, fmt::format("min {} exceeds max {}", lo, hi));
}

void validate_profile(const std::string& p, const TaskClassProfile& c) {
  check_range(p + ".cycles", c.cycles_min, c.cycles_max);
  check_range(p + ".memory", c.memory_min, c.memory_max);
  check_range(p + ".power", c.power_min, c.power_max);
  check_range(p + ".data", c.data_min, c.data_max);
}

}  // namespace

void SimConfig::validate() const {
  if (num_workers < 2) invariant("num_workers", "need at least 2 workers");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) invariant("horizon", "must be >= 0");
  if (!(unit_price >= 0.0)) invariant("unit_price", "must be >= 0");
  if (!(valuation_margin >= 0.0)) invariant("valuation_margin", "must be >= 0");
  weights.validate("weights");

  const auto& w = workload;
  const double mix_sum = w.mix.lit + w.mix.mit + w.mix.hit;
  if (w.mix.lit < 0 || w.mix.mit < 0 || w.mix.hit < 0) {
    invariant("workload.mix", "fractions must be >= 0");
  }
  if (std::abs(mix_sum - 1.0) > 1e-9) {
    invariant("workload.mix", fmt::format("fractions must sum to 1, got {}", mix_sum));
  }
  if (!(w.arrival_rate > 0.0)) invariant("workload.arrival_rate", "must be > 0");
  validate_profile("workload.lit", w.lit);
  validate_profile("workload.mit", w.mit);
  validate_profile("workload.hit", w.hit);
  if (!(w.output_ratio >= 0.0)) invariant("workload.output_ratio", "must be >= 0");
  if (!(w.reference_cpu > 0.0)) invariant("workload.reference_cpu", "must be > 0");
  check_range("workload.td_slack", w.td_slack_min, w.td_slack_max);
  check_range("workload.deadline_slack", w.deadline_slack_min, w.deadline_slack_max);

  if (node_templates.empty()) invariant("node_templates", "need at least one template");
  for (std::size_t i = 0; i < node_templates.size(); ++i) {
    const auto& t = node_templates[i];
    const std::string p = fmt::format("node_templates[{}]", i);
    for (auto [name, v] : {std::pair{"cpu", t.cpu}, std::pair{"memory", t.memory},
                           std::pair{"power", t.power}, std::pair{"unit_cost", t.unit_cost},
                           std::pair{"time_const", t.time_const}}) {
      if (!(v > 0.0)) invariant(p + "." + name, "must be > 0");
    }
  }

  if (!(containers.granularity > 0.0)) invariant("containers.granularity", "must be > 0");
  if (!(containers.idle_ttl >= 0.0)) invariant("containers.idle_ttl", "must be >= 0");
  if (!(containers.retry_interval > 0.0)) {
    invariant("containers.retry_interval", "must be > 0");
  }
  if (!(executors.base_memory >= 0.0)) invariant("executors.base_memory", "must be >= 0");
  for (auto [name, p] : {std::pair{"container", &executors.container},
                         std::pair{"vm", &executors.vm}}) {
    if (!(p->overhead_mb >= 0.0)) {
      invariant(fmt::format("executors.{}.overhead_mb", name), "must be >= 0");
    }
    if (!(p->start_latency >= 0.0)) {
      invariant(fmt::format("executors.{}.start_latency", name), "must be >= 0");
    }
  }
}

std::vector<WorkerNode> SimConfig::build_nodes() const {
  std::vector<WorkerNode> nodes;
  nodes.reserve(num_workers);
  for (std::uint32_t i = 0; i < num_workers; ++i) {
    const auto& t = node_templates[i % node_templates.size()];
    nodes.push_back(WorkerNode::make(i, t.cpu, t.memory, t.power, t.unit_cost, t.time_const,
                                     t.executor_mode));
  }
  return nodes;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

/// Reads keys out of a JSON object, remembering which were consumed so that
/// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError(ConfigErrorKind::schema, path_.empty() ? "<root>" : path_,
                        "expected an object");
    }
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
  }

  const json* get(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  void number(std::string_view key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) schema(key, "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) schema(key, "expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto s = v->get<std::int64_t>();
        if (s < 0) schema(key, "expected a non-negative integer");
        out = static_cast<Int>(s);
      }
    }
  }

  void boolean(std::string_view key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) schema(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  std::optional<std::string> string(std::string_view key) {
    if (const json* v = get(key)) {
      if (!v->is_string()) schema(key, "expected a string");
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  std::optional<Reader> object(std::string_view key) {
    if (const json* v = get(key)) return Reader(*v, field(key));
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(ConfigErrorKind::schema, field(it.key()), "unknown key");
      }
    }
  }

  [[noreturn]] void schema(std::string_view key, const std::string& msg) const {
    throw ConfigError(ConfigErrorKind::schema, field(key), msg);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json profile_json(const TaskClassProfile& p) {
  return {{"cycles_min", p.cycles_min}, {"cycles_max", p.cycles_max},
          {"memory_min", p.memory_min}, {"memory_max", p.memory_max},
          {"power_min", p.power_min},   {"power_max", p.power_max},
          {"data_min", p.data_min},     {"data_max", p.data_max}};
}

void read_profile(Reader r, TaskClassProfile& p) {
  r.number("cycles_min", p.cycles_min);
  r.number("cycles_max", p.cycles_max);
  r.number("memory_min", p.memory_min);
  r.number("memory_max", p.memory_max);
  r.number("power_min", p.power_min);
  r.number("power_max", p.power_max);
  r.number("data_min", p.data_min);
  r.number("data_max", p.data_max);
  r.finish();
}

json executor_json(const ExecutorProfile& p) {
  return {{"overhead_mb", p.overhead_mb}, {"start_latency", p.start_latency}};
}

void read_executor(Reader r, ExecutorProfile& p) {
  r.number("overhead_mb", p.overhead_mb);
  r.number("start_latency", p.start_latency);
  r.finish();
}

}  // namespace

json to_json(const SimConfig& c) {
  json templates = json::array();
  for (const auto& t : c.node_templates) {
    templates.push_back({{"cpu", t.cpu},
                         {"memory", t.memory},
                         {"power", t.power},
                         {"unit_cost", t.unit_cost},
                         {"time_const", t.time_const},
                         {"executor_mode", std::string(to_string(t.executor_mode))}});
  }
  const auto& w = c.workload;
  return {
      {"seed", c.seed},
      {"num_devices", c.num_devices},
      {"num_workers", c.num_workers},
      {"strategy", std::string(to_string(c.strategy))},
      {"auction_mode", std::string(to_string(c.auction_mode))},
      {"win_rule", std::string(to_string(c.win_rule))},
      {"unit_price", c.unit_price},
      {"valuation_margin", c.valuation_margin},
      {"horizon", c.horizon},
      {"weights",
       {{"lambda1", c.weights.lambda1},
        {"lambda2", c.weights.lambda2},
        {"lambda3", c.weights.lambda3},
        {"alpha1", c.weights.alpha1},
        {"alpha2", c.weights.alpha2},
        {"delta", c.weights.delta}}},
      {"workload",
       {{"tasks_per_device", w.tasks_per_device},
        {"arrival_rate", w.arrival_rate},
        {"mix", {{"lit", w.mix.lit}, {"mit", w.mix.mit}, {"hit", w.mix.hit}}},
        {"lit", profile_json(w.lit)},
        {"mit", profile_json(w.mit)},
        {"hit", profile_json(w.hit)},
        {"output_ratio", w.output_ratio},
        {"reference_cpu", w.reference_cpu},
        {"td_slack_min", w.td_slack_min},
        {"td_slack_max", w.td_slack_max},
        {"deadline_slack_min", w.deadline_slack_min},
        {"deadline_slack_max", w.deadline_slack_max}}},
      {"node_templates", templates},
      {"containers",
       {{"granularity", c.containers.granularity},
        {"idle_ttl", c.containers.idle_ttl},
        {"max_retries", c.containers.max_retries},
        {"retry_interval", c.containers.retry_interval},
        {"evict_idle", c.containers.evict_idle}}},
      {"executors",
       {{"base_memory", c.executors.base_memory},
        {"container", executor_json(c.executors.container)},
        {"vm", executor_json(c.executors.vm)}}},
  };
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig c;
  Reader r(j, "");
  r.integer("seed", c.seed);
  r.integer("num_devices", c.num_devices);
  r.integer("num_workers", c.num_workers);
  if (auto s = r.string("strategy")) c.strategy = parse_strategy(*s);
  if (auto s = r.string("auction_mode")) c.auction_mode = parse_auction_mode(*s);
  if (auto s = r.string("win_rule")) c.win_rule = parse_win_rule(*s);
  r.number("unit_price", c.unit_price);
  r.number("valuation_margin", c.valuation_margin);
  r.number("horizon", c.horizon);

  if (auto w = r.object("weights")) {
    w->number("lambda1", c.weights.lambda1);
    w->number("lambda2", c.weights.lambda2);
    w->number("lambda3", c.weights.lambda3);
    w->number("alpha1", c.weights.alpha1);
    w->number("alpha2", c.weights.alpha2);
    w->number("delta", c.weights.delta);
    w->finish();
  }

  if (auto w = r.object("workload")) {
    auto& wl = c.workload;
    w->integer("tasks_per_device", wl.tasks_per_device);
    w->number("arrival_rate", wl.arrival_rate);
    if (auto m = w->object("mix")) {
      m->number("lit", wl.mix.lit);
      m->number("mit", wl.mix.mit);
      m->number("hit", wl.mix.hit);
      m->finish();
    }
    if (auto p = w->object("lit")) read_profile(*p, wl.lit);
    if (auto p = w->object("mit")) read_profile(*p, wl.mit);
    if (auto p = w->object("hit")) read_profile(*p, wl.hit);
    w->number("output_ratio", wl.output_ratio);
    w->number("reference_cpu", wl.reference_cpu);
    w->number("td_slack_min", wl.td_slack_min);
    w->number("td_slack_max", wl.td_slack_max);
    w->number("deadline_slack_min", wl.deadline_slack_min);
    w->number("deadline_slack_max", wl.deadline_slack_max);
    w->finish();
  }

  if (const json* t = r.get("node_templates")) {
    if (!t->is_array()) r.schema("node_templates", "expected an array");
    c.node_templates.clear();
    for (std::size_t i = 0; i < t->size(); ++i) {
      Reader tr((*t)[i], fmt::format("node_templates[{}]", i));
      NodeTemplate nt;
      tr.number("cpu", nt.cpu);
      tr.number("memory", nt.memory);
      tr.number("power", nt.power);
      tr.number("unit_cost", nt.unit_cost);
      tr.number("time_const", nt.time_const);
      if (auto s = tr.string("executor_mode")) {
        nt.executor_mode = parse_executor_mode(*s, tr.field("executor_mode"));
      }
      tr.finish();
      c.node_templates.push_back(nt);
    }
  }

  if (auto p = r.object("containers")) {
    p->number("granularity", c.containers.granularity);
    p->number("idle_ttl", c.containers.idle_ttl);
    p->integer("max_retries", c.containers.max_retries);
    p->number("retry_interval", c.containers.retry_interval);
    p->boolean("evict_idle", c.containers.evict_idle);
    p->finish();
  }

  if (auto e = r.object("executors")) {
    e->number("base_memory", c.executors.base_memory);
    if (auto p = e->object("container")) read_executor(*p, c.executors.container);
    if (auto p = e->object("vm")) read_executor(*p, c.executors.vm);
    e->finish();
  }

  r.finish();
  return c;
}

SimConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigErrorKind::schema, "<document>", e.what());
  }
  SimConfig c = sim_config_from_json(j);
  c.validate();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigErrorKind::missing_file, "config",
                      fmt::format("cannot open '{}'", path.string()));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const SimConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace aucrac
