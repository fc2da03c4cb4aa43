// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gossip_age/network.hpp"

namespace gossip_age::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random spec with every rate in [0.1, 2]. The gossip graph always holds a
/// directed cycle through all positions, so every proper set has gossip input
/// and the level systems are nonsingular. Mobility pairs are kept with a
/// per-spec random probability.
inline NetworkSpec random_spec(std::mt19937_64& rng, int n, bool mobility = true) {
  NetworkSpec spec(n);
  spec.lambda_e = uniform(rng, 0.1, 2.0);
  std::bernoulli_distribution coin(0.5);
  bool any_source = false;
  for (Position i = 0; i < n; ++i) {
    if (coin(rng)) {
      spec.source_rates[i] = uniform(rng, 0.1, 2.0);
      any_source = true;
    }
  }
  if (!any_source) spec.source_rates[0] = uniform(rng, 0.1, 2.0);

  std::vector<Position> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  if (n > 1) {
    for (int k = 0; k < n; ++k) spec.gossip_rates(order[k], order[(k + 1) % n]) = uniform(rng, 0.1, 2.0);
  }
  std::bernoulli_distribution extra(0.3);
  for (Position i = 0; i < n; ++i) {
    for (Position j = 0; j < n; ++j) {
      if (i != j && spec.gossip_rates(i, j) == 0.0 && extra(rng)) spec.gossip_rates(i, j) = uniform(rng, 0.1, 2.0);
    }
  }
  if (mobility) {
    std::bernoulli_distribution keep(uniform(rng, 0.0, 1.0));
    for (Position i = 0; i < n; ++i) {
      for (Position j = i + 1; j < n; ++j) {
        if (keep(rng)) spec.set_mobility(i, j, uniform(rng, 0.1, 2.0));
      }
    }
  }
  return spec;
}

inline NetworkSpec without_mobility(NetworkSpec spec) {
  spec.mobility_rates = RateMatrix(spec.n);
  return spec;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace gossip_age::testing
