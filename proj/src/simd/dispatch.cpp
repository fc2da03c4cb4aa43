// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "gossip_age/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace gossip_age::simd {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

namespace {

constexpr Kernels kScalar{Isa::Scalar, detail::axpy_scalar, detail::flush_scalar,
                          detail::flush_increment_scalar};

#if defined(GOSSIP_AGE_HAVE_AVX2)
constexpr Kernels kAvx2{Isa::Avx2, detail::axpy_avx2, detail::flush_avx2,
                        detail::flush_increment_avx2};
#endif

#if defined(GOSSIP_AGE_HAVE_NEON)
constexpr Kernels kNeon{Isa::Neon, detail::axpy_neon, detail::flush_neon,
                        detail::flush_increment_neon};
#endif

const Kernels* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2: return avx2_kernels();
    case Isa::Neon: return neon_kernels();
  }
  return nullptr;
}

const Kernels* pick_initial() noexcept {
  if (const char* forced = std::getenv("GOSSIP_AGE_SIMD")) {
    const std::string_view name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == to_string(isa)) {
        if (const Kernels* k = table_for(isa)) return k;
      }
    }
  }
  if (const Kernels* k = avx2_kernels()) return k;
  if (const Kernels* k = neon_kernels()) return k;
  return &kScalar;
}

std::atomic<const Kernels*>& current() noexcept {
  static std::atomic<const Kernels*> table{pick_initial()};
  return table;
}

}  // namespace

const Kernels& scalar_kernels() noexcept { return kScalar; }

const Kernels* avx2_kernels() noexcept {
#if defined(GOSSIP_AGE_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return &kAvx2;
#endif
  return nullptr;
}

const Kernels* neon_kernels() noexcept {
#if defined(GOSSIP_AGE_HAVE_NEON)
  return &kNeon;  // baseline on aarch64
#else
  return nullptr;
#endif
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
  if (avx2_kernels()) out.push_back(Isa::Avx2);
  if (neon_kernels()) out.push_back(Isa::Neon);
  return out;
}

const Kernels& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
  const Kernels* k = table_for(isa);
  if (!k) return false;
  current().store(k, std::memory_order_relaxed);
  return true;
}

}  // namespace gossip_age::simd
