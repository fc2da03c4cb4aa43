// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

namespace gossip_age::simd::detail {

// Kahan update of (sum, comp) with value. Also the tail loop of every vector
// variant, so it must stay free of reassociation.
inline void kahan_step(double value, double& sum, double& comp) {
  const double y = value - comp;
  const double s = sum + y;
  comp = (s - sum) - y;
  sum = s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void flush_scalar(const std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                  std::size_t n);
void flush_increment_scalar(std::uint32_t* ages, double* touched, double* sum, double* comp,
                            double t, std::size_t n);

#if (defined(__x86_64__) || defined(_M_X64)) && !defined(GOSSIP_AGE_NO_SIMD)
#define GOSSIP_AGE_HAVE_AVX2 1
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void flush_avx2(const std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                std::size_t n);
void flush_increment_avx2(std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                          std::size_t n);
#endif

#if defined(__aarch64__) && !defined(GOSSIP_AGE_NO_SIMD)
#define GOSSIP_AGE_HAVE_NEON 1
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
void flush_neon(const std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                std::size_t n);
void flush_increment_neon(std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                          std::size_t n);
#endif

}  // namespace gossip_age::simd::detail
