// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

#if defined(GOSSIP_AGE_HAVE_AVX2)

#include <immintrin.h>

#define GOSSIP_AGE_AVX2 __attribute__((target("avx2")))

namespace gossip_age::simd::detail {

namespace {

// Four lanes of kahan_step. Ages stay below 2^31, so the signed conversion
// is exact.
GOSSIP_AGE_AVX2 inline void flush_block(const std::uint32_t* ages, double* touched, double* sum,
                                        double* comp, __m256d t) {
  const __m256d age = _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(ages)));
  const __m256d dt = _mm256_sub_pd(t, _mm256_loadu_pd(touched));
  const __m256d value = _mm256_mul_pd(age, dt);
  const __m256d s0 = _mm256_loadu_pd(sum);
  const __m256d y = _mm256_sub_pd(value, _mm256_loadu_pd(comp));
  const __m256d s = _mm256_add_pd(s0, y);
  _mm256_storeu_pd(comp, _mm256_sub_pd(_mm256_sub_pd(s, s0), y));
  _mm256_storeu_pd(sum, s);
  _mm256_storeu_pd(touched, t);
}

}  // namespace

GOSSIP_AGE_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d p0 = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    const __m256d p1 = _mm256_mul_pd(a, _mm256_loadu_pd(x + i + 4));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p0));
    _mm256_storeu_pd(y + i + 4, _mm256_add_pd(_mm256_loadu_pd(y + i + 4), p1));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(a, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

GOSSIP_AGE_AVX2 void flush_avx2(const std::uint32_t* ages, double* touched, double* sum,
                                double* comp, double t, std::size_t n) {
  const __m256d tv = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) flush_block(ages + i, touched + i, sum + i, comp + i, tv);
  for (; i < n; ++i) {
    kahan_step(static_cast<double>(ages[i]) * (t - touched[i]), sum[i], comp[i]);
    touched[i] = t;
  }
}

GOSSIP_AGE_AVX2 void flush_increment_avx2(std::uint32_t* ages, double* touched, double* sum,
                                          double* comp, double t, std::size_t n) {
  const __m256d tv = _mm256_set1_pd(t);
  const __m128i one = _mm_set1_epi32(1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    flush_block(ages + i, touched + i, sum + i, comp + i, tv);
    auto* lane = reinterpret_cast<__m128i*>(ages + i);
    _mm_storeu_si128(lane, _mm_add_epi32(_mm_loadu_si128(lane), one));
  }
  for (; i < n; ++i) {
    kahan_step(static_cast<double>(ages[i]) * (t - touched[i]), sum[i], comp[i]);
    touched[i] = t;
    ages[i] += 1;
  }
}

}  // namespace gossip_age::simd::detail

#endif  // GOSSIP_AGE_HAVE_AVX2
