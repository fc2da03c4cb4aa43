// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

#if defined(GOSSIP_AGE_HAVE_NEON)

#include <arm_neon.h>

namespace gossip_age::simd::detail {

namespace {

inline void flush_pair(const std::uint32_t* ages, double* touched, double* sum, double* comp,
                       float64x2_t t) {
  const float64x2_t age = vcvtq_f64_u64(vmovl_u32(vld1_u32(ages)));
  const float64x2_t value = vmulq_f64(age, vsubq_f64(t, vld1q_f64(touched)));
  const float64x2_t s0 = vld1q_f64(sum);
  const float64x2_t y = vsubq_f64(value, vld1q_f64(comp));
  const float64x2_t s = vaddq_f64(s0, y);
  vst1q_f64(comp, vsubq_f64(vsubq_f64(s, s0), y));
  vst1q_f64(sum, s);
  vst1q_f64(touched, t);
}

}  // namespace

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void flush_neon(const std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                std::size_t n) {
  const float64x2_t tv = vdupq_n_f64(t);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) flush_pair(ages + i, touched + i, sum + i, comp + i, tv);
  for (; i < n; ++i) {
    kahan_step(static_cast<double>(ages[i]) * (t - touched[i]), sum[i], comp[i]);
    touched[i] = t;
  }
}

void flush_increment_neon(std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                          std::size_t n) {
  const float64x2_t tv = vdupq_n_f64(t);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    flush_pair(ages + i, touched + i, sum + i, comp + i, tv);
    vst1_u32(ages + i, vadd_u32(vld1_u32(ages + i), vdup_n_u32(1)));
  }
  for (; i < n; ++i) {
    kahan_step(static_cast<double>(ages[i]) * (t - touched[i]), sum[i], comp[i]);
    touched[i] = t;
    ages[i] += 1;
  }
}

}  // namespace gossip_age::simd::detail

#endif  // GOSSIP_AGE_HAVE_NEON
