#include "aucrac/sim.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>

#include <fmt/format.h>

#include "aucrac/auction.hpp"
#include "aucrac/containers.hpp"
#include "aucrac/costmodel.hpp"
#include "aucrac/metrics.hpp"
#include "aucrac/workload.hpp"

namespace aucrac {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::task_arrival: return "task_arrival";
    case EventKind::auction_round: return "auction_round";
    case EventKind::exec_start: return "exec_start";
    case EventKind::exec_finish: return "exec_finish";
    case EventKind::container_release: return "container_release";
  }
  return "?";
}

int event_rank(EventKind k) {
  // Finishing work first frees capacity for everything else at that instant.
  switch (k) {
    case EventKind::exec_finish: return 0;
    case EventKind::container_release: return 1;
    case EventKind::task_arrival: return 2;
    case EventKind::auction_round: return 3;
    case EventKind::exec_start: return 4;
  }
  return 5;
}

std::string format_log_line(const LogRecord& r) {
  const auto opt = [](const auto& v) { return v ? fmt::format("{}", *v) : std::string(); };
  return fmt::format("{},{},{},{},{},{}", r.time, to_string(r.kind), opt(r.task_id),
                     opt(r.node_id), opt(r.container_id), r.detail);
}

void write_log(std::ostream& out, const std::vector<LogRecord>& log) {
  out << "time,kind,task_id,node_id,container_id,detail\n";
  for (const auto& r : log) out << format_log_line(r) << '\n';
}

namespace {

bool is_auction(Strategy s) { return s == Strategy::aucrac || s == Strategy::auction_basic; }

std::optional<double> try_valuation(const WorkerNode& node, const Task& task,
                                    const SimConfig& cfg) {
  const CostEstimate c = execution_cost(node, task, cfg.weights);
  if (!c) return std::nullopt;
  return (1.0 + cfg.valuation_margin) * c.value();
}

bool placeable_when_empty(const WorkerNode& node, const Task& task, const SimConfig& cfg) {
  WorkerNode empty = node;
  empty.container_pool.clear();
  empty.free_memory = empty.memory;
  return plan_placement(empty, task, cfg.containers, cfg.executors).placeable();
}

/// Sealed bids from every node with zeta = 1 and a finite valuation. aucrac
/// bidders must also be able to place the task right now, and value it on the
/// resources it would really take: a new container adds the executor's
/// library overhead to the task's memory demand.
std::vector<Bid> collect_bids(Strategy strategy, const Task& task,
                              const std::vector<WorkerNode>& nodes, const SimConfig& cfg,
                              double now) {
  std::vector<Bid> bids;
  for (const auto& node : nodes) {
    if (!deadline_eligibility(node, task)) continue;
    std::optional<double> amount;
    if (strategy == Strategy::aucrac) {
      const PlacementPlan plan = plan_placement(node, task, cfg.containers, cfg.executors);
      if (!plan.placeable()) continue;
      Task demand = task;
      if (plan.decision.action == PlacementAction::create) {
        demand.memory += cfg.executors.profile(node.executor_mode).overhead_mb;
      }
      amount = try_valuation(node, demand, cfg);
    } else {
      amount = try_valuation(node, task, cfg);
    }
    if (amount) bids.push_back(Bid{node.id, task.id, *amount, now, true});
  }
  return bids;
}

struct Later {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    const int ra = event_rank(a.kind), rb = event_rank(b.kind);
    if (ra != rb) return ra > rb;
    const auto ida = a.kind == EventKind::container_release ? a.container_id : a.task_id;
    const auto idb = b.kind == EventKind::container_release ? b.container_id : b.task_id;
    if (ida != idb) return ida > idb;
    return a.seq > b.seq;
  }
};

enum class Phase { pending, waiting, queued, running, completed, missed, failed };

struct TaskState {
  Phase phase = Phase::pending;
  std::uint32_t retries = 0;
  NodeId node = 0;
  ContainerId container = 0;
  double compute = 0.0;
  double finish = 0.0;
  double payment = 0.0;
};

class Engine {
 public:
  Engine(const SimConfig& cfg, std::vector<Task> tasks, const SimObserver& observer)
      : cfg_(cfg),
        observer_(observer),
        nodes_(cfg.build_nodes()),
        state_(tasks.size()),
        queues_(nodes_.size()),
        literal_bids_(nodes_.size(), 0.0),
        assign_rng_(Rng(cfg.seed).fork("assign")) {
    result_.tasks = std::move(tasks);
    result_.metrics.node_task_counts.assign(nodes_.size(), 0);
    result_.metrics.node_peak_memory.assign(nodes_.size(), 0.0);
    for (const auto& n : nodes_) total_cpu_ += n.cpu;
    assign_state_.backlog.assign(nodes_.size(), 0.0);
  }

  SimResult run() {
    for (const Task& t : result_.tasks) push({t.arrival_time, EventKind::task_arrival, t.id});
    while (!events_.empty()) {
      const SimEvent ev = events_.top();
      if (ev.time > cfg_.horizon) break;
      events_.pop();
      advance(ev.time);
      dispatch(ev);
      track_memory();
      if (observer_) observer_(ev, nodes_);
    }
    finalize();
    return std::move(result_);
  }

 private:
  void push(SimEvent ev) {
    ev.seq = seq_++;
    events_.push(ev);
  }

  void log(EventKind kind, std::optional<TaskId> task, std::optional<NodeId> node,
           std::optional<ContainerId> container, std::string detail, double cpu_delta = 0.0,
           double memory_delta = 0.0) {
    result_.log.push_back(
        LogRecord{now_, kind, task, node, container, std::move(detail), cpu_delta, memory_delta});
  }

  void advance(double t) {
    cpu_area_ += busy_cpu_ * (t - now_);
    now_ = t;
  }

  void track_memory() {
    double total = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double live = nodes_[i].memory - nodes_[i].free_memory;
      auto& peak = result_.metrics.node_peak_memory[i];
      peak = std::max(peak, live);
      total += live;
    }
    result_.metrics.peak_memory = std::max(result_.metrics.peak_memory, total);
  }

  void dispatch(const SimEvent& ev) {
    switch (ev.kind) {
      case EventKind::task_arrival: on_arrival(ev.task_id); break;
      case EventKind::auction_round: on_auction(ev.task_id); break;
      case EventKind::exec_finish: on_finish(ev.task_id); break;
      case EventKind::container_release: on_expiry(ev); break;
      case EventKind::exec_start: break;  // starts are logged when committed
    }
  }

  const Task& task(TaskId id) const { return result_.tasks[id]; }

  void on_arrival(TaskId id) {
    ++result_.metrics.tasks_arrived;
    if (is_auction(cfg_.strategy)) {
      log(EventKind::task_arrival, id, {}, {}, "");
      push({now_, EventKind::auction_round, id});
      return;
    }
    refresh_backlog();
    const auto node = assign(cfg_.strategy, task(id), nodes_, assign_rng_, assign_state_, cfg_);
    // Baselines never return nullopt for a non-empty cluster.
    log(EventKind::task_arrival, id, *node, {}, fmt::format("assign={}", *node));
    state_[id].payment = try_valuation(nodes_[*node], task(id), cfg_).value_or(0.0);
    enqueue(id, *node);
  }

  void on_auction(TaskId id) {
    auto& s = state_[id];
    if (s.phase == Phase::pending) {
      s.phase = Phase::waiting;
      if (auction(id)) return;
      if (!ever_biddable(id)) {
        fail(id, EventKind::auction_round, "failed_to_place;no_feasible_node");
        return;
      }
      pending_.push_back(id);
      log(EventKind::auction_round, id, {}, {}, "no_bidder;retry=0");
      push({now_ + cfg_.containers.retry_interval, EventKind::auction_round, id});
      return;
    }
    if (s.phase != Phase::waiting) return;  // placed since the tick was scheduled

    std::erase(pending_, id);
    if (auction(id)) return;
    ++s.retries;
    if (s.retries >= cfg_.containers.max_retries) {
      fail(id, EventKind::auction_round, fmt::format("failed_to_place;retries={}", s.retries));
      return;
    }
    pending_.push_back(id);
    log(EventKind::auction_round, id, {}, {}, fmt::format("no_bidder;retry={}", s.retries));
    push({now_ + cfg_.containers.retry_interval, EventKind::auction_round, id});
  }

  /// One auction for `id`. Returns false when nobody bid.
  bool auction(TaskId id) {
    const Task& t = task(id);
    std::optional<NodeId> winner;
    double payment = 0.0;
    std::size_t bidders = 0;
    if (cfg_.auction_mode == AuctionMode::literal) {
      const auto r = literal_round(t);
      if (r) {
        winner = r->first;
        payment = r->second;
      }
    } else {
      const auto bids = collect_bids(cfg_.strategy, t, nodes_, cfg_, now_);
      bidders = bids.size();
      if (!bids.empty()) {
        const AuctionConfig ac{cfg_.win_rule, cfg_.auction_mode, std::max<std::size_t>(2, bids.size())};
        const AuctionOutcome out = run_sealed_auction(t, bids, ac);
        winner = out.winner;
        payment = out.payment;
      }
    }
    if (!winner) return false;

    state_[id].payment = payment;
    log(EventKind::auction_round, id, *winner, {},
        fmt::format("winner={};bids={};payment={}", *winner, bidders, payment));
    WorkerNode& node = nodes_[*winner];
    if (cfg_.strategy == Strategy::aucrac &&
        plan_placement(node, t, cfg_.containers, cfg_.executors).placeable()) {
      start(id, node);
    } else {
      enqueue(id, *winner);
    }
    return true;
  }

  /// Literal allocation over the zeta = 1 nodes with a finite valuation; bids
  /// persist per node across rounds. Returns (winner, its valuation).
  std::optional<std::pair<NodeId, double>> literal_round(const Task& t) {
    std::vector<NodeId> ids;
    std::vector<double> values;
    for (const auto& node : nodes_) {
      if (!deadline_eligibility(node, t)) continue;
      const auto v = try_valuation(node, t, cfg_);
      if (!v) continue;
      ids.push_back(node.id);
      values.push_back(*v);
    }
    if (ids.empty()) return std::nullopt;

    std::vector<std::size_t> order(ids.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> prior(ids.size());
    for (std::size_t k = 0; k < order.size(); ++k) prior[k] = literal_bids_[ids[order[k]]];

    const Task one[] = {t};
    const LiteralAllocation a = allocate_tasks_literal(values, one, prior);
    for (std::size_t k = 0; k < a.order.size(); ++k) literal_bids_[ids[a.order[k]]] = a.bids[k];
    const std::size_t w = a.assigned_worker.front();
    return std::make_pair(ids[w], values[w]);
  }

  bool ever_biddable(TaskId id) const {
    const Task& t = task(id);
    for (const auto& node : nodes_) {
      if (deadline_eligibility(node, t) && try_valuation(node, t, cfg_) &&
          placeable_when_empty(node, t, cfg_)) {
        return true;
      }
    }
    return false;
  }

  /// Capacity was freed somewhere: re-auction waiting tasks in arrival order.
  /// These opportunistic attempts do not count as retries.
  void retry_pending() {
    std::deque<TaskId> keep;
    for (TaskId id : pending_) {
      if (!auction(id)) keep.push_back(id);
    }
    pending_ = std::move(keep);
  }

  void fail(TaskId id, EventKind kind, std::string detail, std::optional<NodeId> node = {}) {
    state_[id].phase = Phase::failed;
    ++result_.metrics.failed_to_place;
    log(kind, id, node, {}, std::move(detail));
  }

  void enqueue(TaskId id, NodeId n) {
    if (!placeable_when_empty(nodes_[n], task(id), cfg_)) {
      fail(id, EventKind::task_arrival, "failed_to_place;never_fits", n);
      return;
    }
    state_[id].phase = Phase::queued;
    state_[id].node = n;
    queues_[n].push_back(id);
    drain_queue(n);
  }

  void drain_queue(NodeId n) {
    auto& q = queues_[n];
    while (!q.empty()) {
      const PlacementPlan plan =
          plan_placement(nodes_[n], task(q.front()), cfg_.containers, cfg_.executors);
      if (!plan.placeable()) break;
      const TaskId id = q.front();
      q.pop_front();
      start(id, nodes_[n]);
    }
  }

  void start(TaskId id, WorkerNode& node) {
    const Task& t = task(id);
    const PlacementPlan plan = plan_placement(node, t, cfg_.containers, cfg_.executors);
    for (ContainerId cid : plan.evict) {
      const double mem = node.find(cid)->memory;
      log(EventKind::container_release, {}, node.id, cid, fmt::format("evict;mem={}", mem), 0.0,
          -mem);
    }
    const ContainerId cid = commit_placement(node, t, plan, cfg_.containers, cfg_.executors);
    const Container& c = *node.find(cid);
    const bool created = plan.decision.action == PlacementAction::create;
    const double latency = created ? cfg_.executors.profile(node.executor_mode).start_latency : 0.0;

    auto& s = state_[id];
    s.phase = Phase::running;
    s.node = node.id;
    s.container = cid;
    s.compute = c.compute;
    s.finish = now_ + latency + t.cycles / c.compute;

    if (created) {
      ++result_.metrics.containers_created;
      log(EventKind::exec_start, id, node.id, cid,
          fmt::format("create;mem={};cpu={};startup={}", c.memory, c.compute, latency), c.compute,
          c.memory);
    } else {
      ++result_.metrics.containers_reused;
      log(EventKind::exec_start, id, node.id, cid, fmt::format("reuse;cpu={}", c.compute),
          c.compute);
    }
    if (!deadline_eligibility(node, t)) ++result_.ineligible_starts;
    ++result_.metrics.node_task_counts[node.id];
    busy_cpu_ += c.compute;
    push({s.finish, EventKind::exec_finish, id, node.id, cid});
  }

  void on_finish(TaskId id) {
    auto& s = state_[id];
    const Task& t = task(id);
    WorkerNode& node = nodes_[s.node];
    const double elapsed = now_ - t.arrival_time;
    const bool on_time = elapsed <= t.deadline;
    s.phase = on_time ? Phase::completed : Phase::missed;
    ++(on_time ? result_.metrics.completed : result_.metrics.deadline_missed);
    completions_.push_back(elapsed);
    busy_cpu_ -= s.compute;

    log(EventKind::exec_finish, id, node.id, s.container,
        fmt::format("{};elapsed={}", on_time ? "on_time" : "late", elapsed), -s.compute);

    // Memory of containers destroyed by the release sweep, read before it runs.
    std::vector<std::pair<ContainerId, double>> before;
    for (const auto& c : node.container_pool) before.emplace_back(c.id, c.memory);
    const auto gone = release_container(node, s.container, now_, cfg_.containers);
    for (ContainerId cid : gone) {
      const auto it = std::find_if(before.begin(), before.end(),
                                   [cid](const auto& p) { return p.first == cid; });
      log(EventKind::container_release, {}, node.id, cid, fmt::format("destroy;mem={}", it->second),
          0.0, -it->second);
    }
    if (const Container* c = node.find(s.container)) {
      push({now_ + cfg_.containers.idle_ttl, EventKind::container_release, id, node.id,
            s.container, c->generation});
    }

    AuctionOutcome out;
    out.task_id = id;
    out.winner = node.id;
    out.payment = s.payment;
    result_.outcomes.push_back(std::move(out));

    drain_queue(node.id);
    if (is_auction(cfg_.strategy)) retry_pending();
  }

  void on_expiry(const SimEvent& ev) {
    WorkerNode& node = nodes_[ev.node_id];
    const Container* c = node.find(ev.container_id);
    if (c == nullptr || c->state != ContainerState::free || c->generation != ev.generation) return;
    const double mem = c->memory;
    destroy_container(node, ev.container_id);
    log(EventKind::container_release, {}, node.id, ev.container_id,
        fmt::format("destroy;mem={}", mem), 0.0, -mem);
    drain_queue(node.id);
    if (is_auction(cfg_.strategy)) retry_pending();
  }

  void refresh_backlog() {
    if (cfg_.strategy != Strategy::mct) return;
    std::fill(assign_state_.backlog.begin(), assign_state_.backlog.end(), 0.0);
    for (std::size_t i = 0; i < state_.size(); ++i) {
      const auto& s = state_[i];
      const double e = nodes_[s.node].cpu;
      if (s.phase == Phase::queued) {
        assign_state_.backlog[s.node] += task(static_cast<TaskId>(i)).cycles / e;
      } else if (s.phase == Phase::running) {
        const double left = std::min(s.finish - now_, task(static_cast<TaskId>(i)).cycles / s.compute);
        assign_state_.backlog[s.node] += std::max(0.0, left) * s.compute / e;
      }
    }
  }

  void finalize() {
    auto& m = result_.metrics;
    m.in_flight = m.tasks_arrived - m.completed - m.deadline_missed - m.failed_to_place;
    if (!completions_.empty()) {
      double sum = 0.0;
      for (double c : completions_) sum += c;
      m.mean_completion = sum / static_cast<double>(completions_.size());
      m.median_completion = quantile(completions_, 0.5);
      m.p95_completion = quantile(completions_, 0.95);
    }
    m.fairness_jain = jain_fairness(m.node_task_counts);
    m.mn_profit = mn_profit(result_.outcomes, result_.tasks, cfg_.unit_price);
    m.mean_cpu_utilization = now_ > 0.0 ? cpu_area_ / (now_ * total_cpu_) : 0.0;
  }

  const SimConfig& cfg_;
  const SimObserver& observer_;
  std::vector<WorkerNode> nodes_;
  std::vector<TaskState> state_;
  std::vector<std::deque<TaskId>> queues_;
  std::deque<TaskId> pending_;
  std::vector<double> literal_bids_;
  Rng assign_rng_;
  AssignState assign_state_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> events_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  double busy_cpu_ = 0.0;
  double total_cpu_ = 0.0;
  double cpu_area_ = 0.0;
  std::vector<double> completions_;
  SimResult result_;
};

}  // namespace

std::optional<NodeId> assign(Strategy strategy, const Task& task,
                             const std::vector<WorkerNode>& nodes, Rng& rng,
                             AssignState& state, const SimConfig& cfg) {
  if (nodes.empty()) throw InputError("assign needs at least one node");
  switch (strategy) {
    case Strategy::random:
      return nodes[rng.below(nodes.size())].id;
    case Strategy::round_robin:
      return nodes[state.round_robin_next++ % nodes.size()].id;
    case Strategy::greedy: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i].cpu - nodes[i].busy_cpu() > nodes[best].cpu - nodes[best].busy_cpu()) best = i;
      }
      return nodes[best].id;
    }
    case Strategy::mct: {
      if (state.backlog.size() != nodes.size()) state.backlog.assign(nodes.size(), 0.0);
      std::size_t best = 0;
      double best_t = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double t = state.backlog[i] + execution_time(nodes[i], task);
        if (t < best_t) {
          best_t = t;
          best = i;
        }
      }
      return nodes[best].id;
    }
    case Strategy::aucrac:
    case Strategy::auction_basic: {
      const auto bids = collect_bids(strategy, task, nodes, cfg, task.arrival_time);
      if (bids.empty()) return std::nullopt;
      const AuctionConfig ac{cfg.win_rule, AuctionMode::repaired,
                             std::max<std::size_t>(2, bids.size())};
      return run_sealed_auction(task, bids, ac).winner;
    }
  }
  return std::nullopt;
}

SimResult run(const SimConfig& cfg, std::vector<Task> tasks, const SimObserver& observer) {
  cfg.validate();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    tasks[i].validate();
    if (tasks[i].id != i) throw InputError("task ids must be 0..n-1 in order");
    if (i > 0 && tasks[i].arrival_time < tasks[i - 1].arrival_time) {
      throw InputError("tasks must be sorted by arrival time");
    }
  }
  Engine engine(cfg, std::move(tasks), observer);
  return engine.run();
}

SimResult run(const SimConfig& cfg, const SimObserver& observer) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<Task> tasks = generate_workload(cfg, rng);
  for (Task& t : tasks) t.value = mn_revenue(t, cfg.unit_price);
  return run(cfg, std::move(tasks), observer);
}

}  // namespace aucrac
