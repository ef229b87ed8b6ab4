#pragma once

// Data-parallel inner loops of the grid searches (cost-grid arg-min for the
// optimizer oracle, expected-utility scan for bid search).
//
// Every kernel has a scalar reference in kernels::scalar and, on x86-64, an
// AVX2 variant in kernels::avx2. The variants are bit-identical: the AVX2 unit
// is built without FMA contraction and ties are resolved to the lowest index
// in both. The unqualified entry points dispatch at runtime.

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace aucrac::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

struct Extremum {
  double value = 0.0;
  std::size_t index = npos;  // npos when the input was empty

  bool operator==(const Extremum&) const = default;
};

/// Parameters of E[U](b) = q(b)^exponent * (value - b) where
/// F(b) = clamp((b - lower) / (upper - lower), 0, 1) and q = F (highest-wins)
/// or 1 - F (lowest-wins).
struct UniformUtility {
  double lower = 0.0;
  double upper = 1.0;
  unsigned exponent = 1;  // n - 1
  bool lowest_wins = false;
  double value = 1.0;
};

namespace scalar {
Extremum argmin_affine(double base, double slope, std::span<const double> xs);
void expected_utility(const UniformUtility& u, std::span<const double> bids,
                      std::span<double> out);
Extremum argmax(std::span<const double> values);
}  // namespace scalar

namespace avx2 {
bool available();
Extremum argmin_affine(double base, double slope, std::span<const double> xs);
void expected_utility(const UniformUtility& u, std::span<const double> bids,
                      std::span<double> out);
Extremum argmax(std::span<const double> values);
}  // namespace avx2

/// ISA used by the dispatching entry points. Defaults to the best the CPU
/// supports; AUCRAC_ISA=scalar in the environment forces the reference path.
Isa active_isa();
/// Overrides the dispatch choice (tests). Requesting avx2 on a machine
/// without it falls back to scalar.
void set_isa(Isa isa);

/// min over k of base + slope * xs[k]; lowest index on ties.
Extremum argmin_affine(double base, double slope, std::span<const double> xs);
void expected_utility(const UniformUtility& u, std::span<const double> bids,
                      std::span<double> out);
/// max over values; lowest index on ties.
Extremum argmax(std::span<const double> values);

}  // namespace aucrac::kernels
