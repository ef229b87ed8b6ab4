#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "aucrac/config.hpp"
#include "aucrac/rng.hpp"

namespace aucrac {

/// Splits `total` into per-class counts proportional to `mix` using largest
/// remainders (ties go to the earlier class), so counts always sum to `total`.
std::array<std::size_t, 3> class_counts(std::size_t total, const IntensityMix& mix);

/// Generates num_devices * tasks_per_device tasks. Each device emits a Poisson
/// stream at workload.arrival_rate; streams are merged and ids are assigned in
/// arrival order. Class labels follow class_counts() exactly and are shuffled.
/// Task::value is left at 0. Throws ConfigError when the mix does not sum to 1.
std::vector<Task> generate_workload(const SimConfig& cfg, Rng& rng);

}  // namespace aucrac
