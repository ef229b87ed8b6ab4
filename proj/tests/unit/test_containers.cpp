#include <doctest.h>

#include "aucrac/containers.hpp"
#include "aucrac/rng.hpp"
#include "oracles.hpp"

using namespace aucrac;

namespace {

Task demand(double cycles, double memory, double td_max) {
  Task t;
  t.cycles = cycles;
  t.memory = memory;
  t.td_max = td_max;
  t.deadline = td_max;
  return t;
}

Container idle(ContainerId id, double memory, double compute, double since = 0.0) {
  Container c;
  c.id = id;
  c.memory = memory;
  c.compute = compute;
  c.idle_since = since;
  return c;
}

WorkerNode node_with(double cpu, double memory, std::vector<Container> pool) {
  WorkerNode n = WorkerNode::make(0, cpu, memory, 10, 1, 1);
  for (const auto& c : pool) n.free_memory -= c.memory;
  n.next_container_id = static_cast<ContainerId>(pool.size());
  n.container_pool = std::move(pool);
  return n;
}

ExecutorConfig overhead(double mb) {
  ExecutorConfig e;
  e.container.overhead_mb = mb;
  return e;
}

ContainerPolicy unit_granularity() {
  ContainerPolicy p;
  p.granularity = 1;
  return p;
}

}  // namespace

TEST_CASE("select: reuse the smallest container that fits") {
  const auto n = node_with(100, 100, {idle(0, 1, 3), idle(1, 4, 4)});
  const auto d = select_container(n, demand(10, 2, 5), unit_granularity());
  CHECK(d.action == PlacementAction::reuse);
  CHECK(d.container_id == ContainerId{1});
  CHECK(d.predicted_time == 2.5);
}

TEST_CASE("select: create when nothing fits but the node has room") {
  const auto n = node_with(10, 8, {});
  const auto d = select_container(n, demand(10, 2, 5), unit_granularity());
  CHECK(d.action == PlacementAction::create);
  CHECK_FALSE(d.container_id.has_value());
  CHECK(d.compute == 3);
  CHECK(d.predicted_time < 5);
}

TEST_CASE("select: requeue when memory is short") {
  const auto n = node_with(10, 1, {});
  CHECK(select_container(n, demand(10, 2, 5), unit_granularity()).action == PlacementAction::requeue);
}

TEST_CASE("select: strict inequalities fail at the boundary") {
  // m_c == m_j and C_j / C_c == td_max both reject.
  auto n = node_with(100, 100, {idle(0, 2, 10), idle(1, 5, 2)});
  CHECK(select_container(n, demand(10, 2, 5), unit_granularity()).action == PlacementAction::create);
  n = node_with(2, 2, {});
  CHECK(select_container(n, demand(10, 2, 5), unit_granularity()).action == PlacementAction::requeue);
}

TEST_CASE("select: sort key is compute, then memory, then id") {
  const auto n = node_with(100, 100, {idle(0, 9, 5), idle(1, 8, 5), idle(2, 8, 5), idle(3, 3, 6)});
  CHECK(select_container(n, demand(10, 2, 5), unit_granularity()).container_id == ContainerId{1});
}

TEST_CASE("select: a slice larger than the free CPU is not reusable") {
  auto n = node_with(10, 100, {idle(0, 10, 7), idle(1, 10, 4)});
  n.container_pool[1].state = ContainerState::busy;  // holds 4 of 10
  const auto d = select_container(n, demand(10, 2, 5), unit_granularity());
  CHECK(d.action == PlacementAction::create);
  CHECK(d.compute == 3);
  n.container_pool[0].compute = 6;
  CHECK(select_container(n, demand(10, 2, 5), unit_granularity()).container_id == ContainerId{0});
}

TEST_CASE("slice: smallest granular multiple meeting the bound") {
  CHECK(container_slice(demand(10, 0, 5), 1, 100) == 3);
  CHECK(container_slice(demand(10, 0, 5), 2, 100) == 4);
  CHECK(container_slice(demand(10, 0, 5), 1, 2.5) == 2.5);
  CHECK(container_slice(demand(0, 0, 5), 1, 100) == 1);
  CHECK_THROWS_AS(container_slice(demand(10, 0, 5), 0, 100), InputError);
  Rng r(3);
  for (int i = 0; i < 2000; ++i) {
    const Task t = demand(r.uniform(1e8, 1e10), 1, r.uniform(0.01, 2));
    const double s = container_slice(t, 1e9, 1e12);
    CHECK(t.cycles / s < t.td_max);
    if (s > 1e9) CHECK(t.cycles / (s - 1e9) >= t.td_max);
  }
}

TEST_CASE("create: memory includes the library overhead") {
  auto n = node_with(10, 8, {});
  const auto id = create_container(n, demand(10, 2, 5), unit_granularity(), overhead(0.5));
  REQUIRE(id);
  const Container& c = *n.find(*id);
  CHECK(c.memory == 2.5);
  CHECK(c.lib_overhead == 0.5);
  CHECK(c.state == ContainerState::busy);
  CHECK(c.compute == 3);
  CHECK(n.free_memory == 5.5);
  CHECK(n.busy_cpu() == 3);

  auto m = node_with(10, 8, {});
  const auto plain = create_container(m, demand(10, 2, 5), unit_granularity(), overhead(0));
  CHECK(m.find(*plain)->memory == 2);
}

TEST_CASE("create: vm mode records the image as startup overhead") {
  auto n = node_with(10, 1000, {});
  n.executor_mode = ExecutorMode::vm;
  const auto id = create_container(n, demand(10, 2, 5), unit_granularity(), ExecutorConfig{});
  REQUIRE(id);
  CHECK(n.find(*id)->startup_overhead == 512);
  CHECK(n.find(*id)->lib_overhead == 0);
  CHECK(n.find(*id)->memory == 514);
}

TEST_CASE("create: refuses when the overhead does not fit") {
  auto n = node_with(10, 2.4, {});
  CHECK_FALSE(create_container(n, demand(10, 2, 5), unit_granularity(), overhead(0.5)).has_value());
  CHECK(n.container_pool.empty());
  CHECK(n.free_memory == 2.4);
}

TEST_CASE("release and reuse") {
  auto n = node_with(10, 8, {});
  const auto id = *create_container(n, demand(10, 2, 5), unit_granularity(), overhead(0.5));
  ContainerPolicy keep = unit_granularity();
  keep.idle_ttl = 100;
  CHECK(release_container(n, id, 1.0, keep).empty());
  CHECK(n.find(id)->state == ContainerState::free);
  CHECK(n.find(id)->idle_since == 1.0);
  CHECK(n.busy_cpu() == 0);

  const auto again = select_container(n, demand(10, 2, 5), keep);
  CHECK(again.action == PlacementAction::reuse);
  CHECK(again.container_id == id);
  acquire_container(n, id);
  CHECK(n.find(id)->generation == 2);

  CHECK_THROWS_AS(release_container(n, 99, 2.0, keep), StateError);
  CHECK_THROWS_AS(acquire_container(n, id), StateError);
  CHECK_THROWS_AS(acquire_container(n, 99), StateError);
  release_container(n, id, 2.0, keep);
  CHECK_THROWS_AS(release_container(n, id, 3.0, keep), StateError);
}

TEST_CASE("idle expiry returns memory") {
  auto n = node_with(10, 100, {idle(0, 10, 1, 0.0), idle(1, 20, 1, 5.0)});
  CHECK(n.free_memory == 70);
  CHECK(expire_idle(n, 9.0, 5.0) == std::vector<ContainerId>{0});
  CHECK(n.free_memory == 80);
  CHECK(expire_idle(n, 10.0, 5.0) == std::vector<ContainerId>{1});
  CHECK(n.free_memory == 100);
  CHECK(n.container_pool.empty());
  CHECK_THROWS_AS(destroy_container(n, 0), StateError);
}

TEST_CASE("release with zero ttl destroys at once") {
  auto n = node_with(10, 8, {});
  const auto id = *create_container(n, demand(10, 2, 5), unit_granularity(), overhead(0));
  ContainerPolicy now = unit_granularity();
  now.idle_ttl = 0;
  CHECK(release_container(n, id, 1.0, now) == std::vector<ContainerId>{id});
  CHECK(n.free_memory == 8);
}

TEST_CASE("acquire refuses a slice that would overcommit the CPU") {
  auto n = node_with(10, 100, {idle(0, 10, 8), idle(1, 10, 4)});
  acquire_container(n, 0);
  CHECK_THROWS_AS(acquire_container(n, 1), StateError);
}

TEST_CASE("plan: evicts the longest idle container to make room") {
  // 10 MB node, two idle 4 MB containers too small to reuse for a 5 MB task.
  auto n = node_with(10, 10, {idle(0, 4, 5, 3.0), idle(1, 4, 5, 1.0)});
  ContainerPolicy p = unit_granularity();
  const auto plan = plan_placement(n, demand(10, 5, 5), p, overhead(0));
  CHECK(plan.placeable());
  CHECK(plan.decision.action == PlacementAction::create);
  CHECK(plan.evict == std::vector<ContainerId>{1});

  const auto id = commit_placement(n, demand(10, 5, 5), plan, p, overhead(0));
  CHECK(n.find(1) == nullptr);
  CHECK(n.find(id)->memory == 5);
  CHECK(n.live_memory() + n.free_memory == 10);

  p.evict_idle = false;
  auto m = node_with(10, 10, {idle(0, 4, 5, 3.0), idle(1, 4, 5, 1.0)});
  const auto none = plan_placement(m, demand(10, 5, 5), p, overhead(0));
  CHECK_FALSE(none.placeable());
  CHECK(none.evict.empty());
  CHECK_THROWS_AS(commit_placement(m, demand(10, 5, 5), none, p, overhead(0)), StateError);
}

TEST_CASE("plan: the overhead is checked before committing a create") {
  auto n = node_with(10, 3, {});
  const auto plan = plan_placement(n, demand(10, 2, 5), unit_granularity(), overhead(2));
  CHECK_FALSE(plan.placeable());
}

TEST_CASE("decisions always respect the delay bound") {
  Rng r(9);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Container> pool;
    for (std::size_t k = 0, n = r.below(8); k < n; ++k) {
      pool.push_back(idle(static_cast<ContainerId>(k), r.uniform(1, 10), r.uniform(0.5, 5)));
    }
    const auto node = node_with(20, 100, pool);
    const Task t = demand(r.uniform(1, 20), r.uniform(0.5, 8), r.uniform(0.5, 5));
    const auto d = select_container(node, t, unit_granularity());
    if (d.action != PlacementAction::requeue) CHECK(d.predicted_time < t.td_max);
    const auto want = oracle::brute_force_fit(node, t);
    CHECK(d.action == want.action);
    CHECK(d.container_id == want.id);
  }
}

TEST_CASE("memory footprint model") {
  const ExecutorConfig e;
  CHECK(memory_footprint(e, ExecutorMode::container, 0, 100) == e.base_memory);
  CHECK(memory_footprint(e, ExecutorMode::vm, 0, 100) == e.base_memory);
  for (std::size_t n = 1; n < 200; ++n) {
    CHECK(memory_footprint(e, ExecutorMode::vm, n, 100) >
          memory_footprint(e, ExecutorMode::container, n, 100));
  }
  const double step1 = memory_footprint(e, ExecutorMode::container, 1, 64) - e.base_memory;
  const double step2 = memory_footprint(e, ExecutorMode::container, 2, 64) - e.base_memory;
  CHECK(step2 == 2 * step1);
  CHECK(container_memory(demand(1, 64, 1), ExecutorMode::vm, e) == 64 + 512);
}
