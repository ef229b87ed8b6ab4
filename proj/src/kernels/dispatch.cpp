#include <atomic>
#include <cstdlib>
#include <string_view>

#include "aucrac/kernels/kernels.hpp"

namespace aucrac::kernels {

#ifndef AUCRAC_HAVE_AVX2_TU
namespace avx2 {
bool available() { return false; }
Extremum argmin_affine(double base, double slope, std::span<const double> xs) {
  return scalar::argmin_affine(base, slope, xs);
}
void expected_utility(const UniformUtility& u, std::span<const double> bids,
                      std::span<double> out) {
  scalar::expected_utility(u, bids, out);
}
Extremum argmax(std::span<const double> values) { return scalar::argmax(values); }
}  // namespace avx2
#endif

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace {

Isa detect() {
  if (const char* env = std::getenv("AUCRAC_ISA")) {
    if (std::string_view(env) == "scalar") return Isa::scalar;
  }
  return avx2::available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2::available()) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
}

Extremum argmin_affine(double base, double slope, std::span<const double> xs) {
  return active_isa() == Isa::avx2 ? avx2::argmin_affine(base, slope, xs)
                                   : scalar::argmin_affine(base, slope, xs);
}

void expected_utility(const UniformUtility& u, std::span<const double> bids,
                      std::span<double> out) {
  if (active_isa() == Isa::avx2) {
    avx2::expected_utility(u, bids, out);
  } else {
    scalar::expected_utility(u, bids, out);
  }
}

Extremum argmax(std::span<const double> values) {
  return active_isa() == Isa::avx2 ? avx2::argmax(values) : scalar::argmax(values);
}

}  // namespace aucrac::kernels
