#include <algorithm>

#include "aucrac/kernels/kernels.hpp"

namespace aucrac::kernels::scalar {

Extremum argmin_affine(double base, double slope, std::span<const double> xs) {
  Extremum best;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double v = base + slope * xs[k];
    if (best.index == npos || v < best.value) best = {v, k};
  }
  return best;
}

void expected_utility(const UniformUtility& u, std::span<const double> bids,
                      std::span<double> out) {
  const double width = u.upper - u.lower;
  for (std::size_t k = 0; k < bids.size(); ++k) {
    double f = (bids[k] - u.lower) / width;
    f = std::max(0.0, std::min(1.0, f));
    const double q = u.lowest_wins ? 1.0 - f : f;
    double p = 1.0;
    for (unsigned e = 0; e < u.exponent; ++e) p *= q;
    out[k] = p * (u.value - bids[k]);
  }
}

Extremum argmax(std::span<const double> values) {
  Extremum best;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (best.index == npos || values[k] > best.value) best = {values[k], k};
  }
  return best;
}

}  // namespace aucrac::kernels::scalar
