// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gossip_age::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// Per-position time integrals of the version ages, kept lazily: position i
/// has been integrated up to touched[i]; sum/comp are a Kahan pair.
struct AgeIntegrals {
  std::vector<double> touched;
  std::vector<double> sum;
  std::vector<double> comp;

  explicit AgeIntegrals(std::size_t n = 0) : touched(n, 0.0), sum(n, 0.0), comp(n, 0.0) {}
};

/// Function table for one instruction set. Every kernel is elementwise (no
/// horizontal reductions, no fused multiply-add), so all variants produce
/// bit-identical results.
struct Kernels {
  Isa isa;
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// Integrate every position up to time t.
  void (*flush)(const std::uint32_t* ages, double* touched, double* sum, double* comp, double t,
                std::size_t n);
  /// flush() followed by ages[i] += 1 (a source self-update).
  void (*flush_increment)(std::uint32_t* ages, double* touched, double* sum, double* comp,
                          double t, std::size_t n);
};

const Kernels& scalar_kernels() noexcept;
/// nullptr when the variant is not compiled in for this target.
const Kernels* avx2_kernels() noexcept;
const Kernels* neon_kernels() noexcept;

/// Variants compiled in and supported by the running CPU, scalar first.
std::vector<Isa> available_isas();

/// The kernel table picked at startup: the widest supported variant, unless
/// GOSSIP_AGE_SIMD=scalar|avx2|neon names another available one.
const Kernels& active() noexcept;

/// Overrides the active table (tests and benchmarks). Returns false if the
/// variant is unavailable.
bool select(Isa isa) noexcept;

// Convenience wrappers over the active table.
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void flush(std::span<const std::uint32_t> ages, AgeIntegrals& acc, double t) {
  active().flush(ages.data(), acc.touched.data(), acc.sum.data(), acc.comp.data(), t, ages.size());
}

inline void flush_increment(std::span<std::uint32_t> ages, AgeIntegrals& acc, double t) {
  active().flush_increment(ages.data(), acc.touched.data(), acc.sum.data(), acc.comp.data(), t,
                           ages.size());
}

}  // namespace gossip_age::simd
