#include <doctest.h>

#include "aucrac/costmodel.hpp"
#include "aucrac/rng.hpp"

using namespace aucrac;

namespace {

ResourceWeights weights(double a1, double a2, double delta = 1.0) {
  ResourceWeights w;
  w.alpha1 = a1;
  w.alpha2 = a2;
  w.delta = delta;
  return w;
}

Task task_with(double e, double m, double p, double deadline = 10.0) {
  Task t;
  t.cycles = e;
  t.memory = m;
  t.power = p;
  t.deadline = deadline;
  return t;
}

}  // namespace

TEST_CASE("resource function examples") {
  CHECK(resource_function({3, 3, 3}, ResourceWeights{}) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(resource_function({0, 0, 0}, ResourceWeights{}) == 0.0);
  CHECK(resource_function({3, 6, 3}, weights(0.5, 0.8, 2.0)) == doctest::Approx(5.6).epsilon(1e-14));
  CHECK_THROWS_AS(resource_function({-1, 0, 0}, ResourceWeights{}), InputError);
}

TEST_CASE("resource function is linear and additive") {
  Rng r(4);
  const auto w = weights(0.7, 1.3, 1.9);
  for (int i = 0; i < 1000; ++i) {
    const ResourceDemand d1{r.uniform(0, 100), r.uniform(0, 100), r.uniform(0, 100)};
    const ResourceDemand d2{r.uniform(0, 100), r.uniform(0, 100), r.uniform(0, 100)};
    const double a = r.uniform(0, 10);
    CHECK(resource_function(d1 * a, w) == doctest::Approx(a * resource_function(d1, w)).epsilon(1e-12));
    CHECK(resource_function(d1 + d2, w) ==
          doctest::Approx(resource_function(d1, w) + resource_function(d2, w)).epsilon(1e-12));
  }
}

TEST_CASE("execution cost examples") {
  const auto node = WorkerNode::make(0, 2, 2, 2, 1, 1);
  CHECK(execution_cost(node, task_with(1, 1, 1), ResourceWeights{}).value() == doctest::Approx(0.5));
  CHECK(execution_cost(node, task_with(0, 0, 0), ResourceWeights{}).value() == 0.0);

  const auto ex = WorkerNode::make(0, 2, 3, 4, 1, 10);
  const double hand = (1.0 / 3) * (2.0 / 3) + 0.5 * (1.0 / 3) * (2.0 / 9) + 0.8 * (1.0 / 3) * (2.0 / 3);
  const auto c = execution_cost(ex, task_with(4.0 / 3, 2.0 / 3, 8.0 / 3), weights(0.5, 0.8));
  CHECK(c.value() == doctest::Approx(hand).epsilon(1e-14));
  CHECK(c.value() == doctest::Approx(0.4370).epsilon(1e-3));
}

TEST_CASE("execution cost reports the blocking resource") {
  const auto node = WorkerNode::make(0, 2, 2, 2, 1, 1);
  const auto cpu = execution_cost(node, task_with(2, 1, 1), ResourceWeights{});
  CHECK_FALSE(cpu.is_feasible());
  CHECK(cpu.blocking() == Resource::cpu);
  CHECK(cpu.blocking_ratio() == 1.0);
  CHECK_THROWS_AS(cpu.value(), InfeasibleCost);

  const auto mem = execution_cost(node, task_with(1, 3, 1), ResourceWeights{});
  CHECK(mem.blocking() == Resource::memory);
  const auto pow = execution_cost(node, task_with(1, 1, 2.5), ResourceWeights{});
  CHECK(pow.blocking() == Resource::power);
  CHECK(execution_cost(node, task_with(1.999, 1, 1), ResourceWeights{}).is_feasible());
}

TEST_CASE("execution cost is homogeneous in unit cost and monotone") {
  Rng r(8);
  const auto w = weights(0.6, 1.2);
  for (int i = 0; i < 1000; ++i) {
    const double e = r.uniform(10, 20), m = r.uniform(10, 20), p = r.uniform(10, 20);
    const Task t = task_with(r.uniform(0, 5), r.uniform(0, 5), r.uniform(0, 5));
    const auto base = WorkerNode::make(0, e, m, p, 1.0, 1.0);
    const double c0 = execution_cost(base, t, w).value();

    const double k = r.uniform(0.1, 5);
    CHECK(execution_cost(WorkerNode::make(0, e, m, p, k, 1.0), t, w).value() ==
          doctest::Approx(k * c0).epsilon(1e-12));

    Task bigger = t;
    bigger.cycles += r.uniform(0, 3);
    bigger.memory += r.uniform(0, 3);
    bigger.power += r.uniform(0, 3);
    CHECK(execution_cost(base, bigger, w).value() >= c0);

    const auto larger = WorkerNode::make(0, e + r.uniform(0, 5), m + r.uniform(0, 5),
                                         p + r.uniform(0, 5), 1.0, 1.0);
    CHECK(execution_cost(larger, t, w).value() <= c0);
  }
}

TEST_CASE("execution time examples") {
  CHECK(execution_time(WorkerNode::make(0, 2, 1, 1, 1, 10), task_with(1, 0, 0)) == 5.0);
  CHECK(execution_time(WorkerNode::make(0, 2, 1, 1, 1, 10), task_with(0, 0, 0)) == 0.0);
  CHECK(execution_time(WorkerNode::make(0, 2, 1, 1, 1, 10), task_with(4.0 / 3, 0, 0)) ==
        doctest::Approx(20.0 / 3));
}

TEST_CASE("deadline eligibility is strict") {
  const auto node = WorkerNode::make(0, 2, 1, 1, 1, 10);  // q = 5 for e_j = 1
  CHECK(deadline_eligibility(node, task_with(1, 0, 0, 10)));
  CHECK_FALSE(deadline_eligibility(node, task_with(1, 0, 0, 5)));
  CHECK_FALSE(deadline_eligibility(node, task_with(1, 0, 0, 4)));
}

TEST_CASE("eligibility agrees with execution time on random pairs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng r(seed);
    for (int i = 0; i < 1000; ++i) {
      const auto node = WorkerNode::make(0, r.uniform(1, 10), 1, 1, 1, r.uniform(0.1, 5));
      const Task t = task_with(r.uniform(0, 10), 0, 0, r.uniform(0.1, 20));
      CHECK(deadline_eligibility(node, t) == (execution_time(node, t) < t.deadline));
    }
  }
}

TEST_CASE("valuation examples") {
  const auto node = WorkerNode::make(0, 2, 2, 2, 1, 1);
  const Task half = task_with(1, 1, 1);  // cost 0.5
  CHECK(valuation(node, half, ResourceWeights{}, 0.0) == doctest::Approx(0.5));
  CHECK(valuation(node, half, ResourceWeights{}, 0.2) == doctest::Approx(0.6));
  CHECK(valuation(node, task_with(0, 0, 0), ResourceWeights{}, 0.7) == 0.0);
  CHECK_THROWS_AS(valuation(node, task_with(3, 0, 0), ResourceWeights{}, 0.1), InfeasibleCost);
  CHECK_THROWS_AS(valuation(node, half, ResourceWeights{}, -0.1), InputError);
}
