#include <immintrin.h>

#include "aucrac/kernels/kernels.hpp"

namespace aucrac::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

// Lane-wise (value, index) pairs reduced to the first extremum. `better`
// picks strictly better values; equal values keep the lower index.
template <typename Better>
Extremum reduce(__m256d vals, __m256d idx, Better better) {
  alignas(32) double v[kLanes];
  alignas(32) double i[kLanes];
  _mm256_store_pd(v, vals);
  _mm256_store_pd(i, idx);
  Extremum best{v[0], static_cast<std::size_t>(i[0])};
  for (std::size_t l = 1; l < kLanes; ++l) {
    const auto li = static_cast<std::size_t>(i[l]);
    if (better(v[l], best.value) || (v[l] == best.value && li < best.index)) {
      best = {v[l], li};
    }
  }
  return best;
}

}  // namespace

bool available() { return __builtin_cpu_supports("avx2"); }

Extremum argmin_affine(double base, double slope, std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < kLanes) return scalar::argmin_affine(base, slope, xs);

  const __m256d vbase = _mm256_set1_pd(base);
  const __m256d vslope = _mm256_set1_pd(slope);
  const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
  __m256d idx = _mm256_setr_pd(0, 1, 2, 3);
  __m256d best_idx = idx;
  __m256d best = _mm256_add_pd(vbase, _mm256_mul_pd(vslope, _mm256_loadu_pd(xs.data())));

  std::size_t k = kLanes;
  for (; k + kLanes <= n; k += kLanes) {
    idx = _mm256_add_pd(idx, step);
    const __m256d v = _mm256_add_pd(vbase, _mm256_mul_pd(vslope, _mm256_loadu_pd(xs.data() + k)));
    const __m256d lt = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, v, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
  }

  Extremum out = reduce(best, best_idx, [](double a, double b) { return a < b; });
  for (; k < n; ++k) {
    const double v = base + slope * xs[k];
    if (v < out.value) out = {v, k};
  }
  return out;
}

void expected_utility(const UniformUtility& u, std::span<const double> bids,
                      std::span<double> out) {
  const std::size_t n = bids.size();
  const __m256d lower = _mm256_set1_pd(u.lower);
  const __m256d width = _mm256_set1_pd(u.upper - u.lower);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d value = _mm256_set1_pd(u.value);

  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d b = _mm256_loadu_pd(bids.data() + k);
    __m256d f = _mm256_div_pd(_mm256_sub_pd(b, lower), width);
    // Same operand order as std::max(0, std::min(1, f)).
    f = _mm256_max_pd(zero, _mm256_min_pd(one, f));
    const __m256d q = u.lowest_wins ? _mm256_sub_pd(one, f) : f;
    __m256d p = one;
    for (unsigned e = 0; e < u.exponent; ++e) p = _mm256_mul_pd(p, q);
    _mm256_storeu_pd(out.data() + k, _mm256_mul_pd(p, _mm256_sub_pd(value, b)));
  }
  if (k < n) scalar::expected_utility(u, bids.subspan(k), out.subspan(k));
}

Extremum argmax(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < kLanes) return scalar::argmax(values);

  const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
  __m256d idx = _mm256_setr_pd(0, 1, 2, 3);
  __m256d best_idx = idx;
  __m256d best = _mm256_loadu_pd(values.data());

  std::size_t k = kLanes;
  for (; k + kLanes <= n; k += kLanes) {
    idx = _mm256_add_pd(idx, step);
    const __m256d v = _mm256_loadu_pd(values.data() + k);
    const __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, v, gt);
    best_idx = _mm256_blendv_pd(best_idx, idx, gt);
  }

  Extremum out = reduce(best, best_idx, [](double a, double b) { return a > b; });
  for (; k < n; ++k) {
    if (values[k] > out.value) out = {values[k], k};
  }
  return out;
}

}  // namespace aucrac::kernels::avx2
