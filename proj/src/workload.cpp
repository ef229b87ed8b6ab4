#include "aucrac/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace aucrac {

std::array<std::size_t, 3> class_counts(std::size_t total, const IntensityMix& mix) {
  const std::array<double, 3> frac = {mix.lit, mix.mit, mix.hit};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = frac[k] * static_cast<double>(total);
    counts[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  while (assigned < total) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (rem[k] > rem[best]) best = k;
    }
    ++counts[best];
    rem[best] = -1.0;
    ++assigned;
  }
  return counts;
}

std::vector<Task> generate_workload(const SimConfig& cfg, Rng& rng) {
  const auto& w = cfg.workload;
  const double mix_sum = w.mix.lit + w.mix.mit + w.mix.hit;
  if (std::abs(mix_sum - 1.0) > 1e-9) {
    throw ConfigError(ConfigErrorKind::invariant, "workload.mix",
                      fmt::format("fractions must sum to 1, got {}", mix_sum));
  }

  const std::size_t total = static_cast<std::size_t>(cfg.num_devices) * w.tasks_per_device;
  std::vector<Task> tasks;
  if (total == 0) return tasks;
  tasks.reserve(total);

  Rng arrivals = rng.fork("arrivals");
  Rng classes = rng.fork("classes");
  Rng attrs = rng.fork("attributes");

  std::vector<double> times;
  times.reserve(total);
  for (std::uint32_t d = 0; d < cfg.num_devices; ++d) {
    double t = 0.0;
    for (std::uint32_t k = 0; k < w.tasks_per_device; ++k) {
      t += arrivals.exponential(w.arrival_rate);
      times.push_back(t);
    }
  }
  std::sort(times.begin(), times.end());

  const auto counts = class_counts(total, w.mix);
  std::vector<TaskClass> labels;
  labels.reserve(total);
  labels.insert(labels.end(), counts[0], TaskClass::lit);
  labels.insert(labels.end(), counts[1], TaskClass::mit);
  labels.insert(labels.end(), counts[2], TaskClass::hit);
  // Fisher-Yates with the portable bounded draw.
  for (std::size_t i = labels.size(); i > 1; --i) {
    std::swap(labels[i - 1], labels[classes.below(i)]);
  }

  for (std::size_t i = 0; i < total; ++i) {
    const auto& p = w.profile(labels[i]);
    Task t;
    t.id = static_cast<TaskId>(i);
    t.intensity = labels[i];
    t.arrival_time = times[i];
    t.cycles = attrs.uniform(p.cycles_min, p.cycles_max);
    t.memory = attrs.uniform(p.memory_min, p.memory_max);
    t.power = attrs.uniform(p.power_min, p.power_max);
    t.data_in = attrs.uniform(p.data_min, p.data_max);
    t.data_out = t.data_in * w.output_ratio;
    t.td_max = t.cycles / w.reference_cpu * attrs.uniform(w.td_slack_min, w.td_slack_max);
    t.deadline = t.td_max * attrs.uniform(w.deadline_slack_min, w.deadline_slack_max);
    tasks.push_back(t);
  }
  return tasks;
}

}  // namespace aucrac
