// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

namespace gossip_age::simd::detail {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void flush_scalar(const std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    kahan_step(static_cast<double>(ages[i]) * (t - touched[i]), sum[i], comp[i]);
    touched[i] = t;
  }
}

void flush_increment_scalar(std::uint32_t* ages, double* touched, double* sum, double* comp,
                            double t, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    kahan_step(static_cast<double>(ages[i]) * (t - touched[i]), sum[i], comp[i]);
    touched[i] = t;
    ages[i] += 1;
  }
}

}  // namespace gossip_age::simd::detail
