// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "gossip_age/network.hpp"

namespace gossip_age {

enum class EventKind : std::uint8_t { SourceSelf, SourceDelivery, Gossip, Swap };

/// One transition of the process. `from`/`to` are positions; SourceSelf uses
/// neither and SourceDelivery uses only `to`. For Swap the pair is unordered.
struct Event {
  EventKind kind = EventKind::SourceSelf;
  Position from = 0;
  Position to = 0;

  bool operator==(const Event&) const = default;
};

/// Reset map of one event on the per-position version ages.
void apply_event(std::span<std::uint32_t> ages, const Event& event);
std::vector<std::uint32_t> apply_event(std::vector<std::uint32_t> ages, const Event& event);

/// Uniform doubles in [0, 1) from a 64-bit Mersenne twister. The bit
/// extraction is fixed here so streams are identical across standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
  }

 private:
  std::mt19937_64 engine_;
};

/// Seed of replication `replication`: splitmix64(seed + (replication + 1) * golden),
/// with golden = 0x9E3779B97F4A7C15.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication);

/// Walker/Vose alias table over a fixed weight vector.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t draw(Rng& rng) const {
    const std::size_t i = static_cast<std::size_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Superposition sampler: draws the category by total weight, then the event
/// inside the category from an alias table, or from a plain uniform index
/// when every rate of the category is equal.
class EventSampler {
 public:
  explicit EventSampler(const ValidatedNetwork& net);

  /// Category order follows EventKind.
  const std::array<double, 4>& category_weights() const { return weights_; }
  /// Compensated sum of the category weights.
  double total_rate() const { return total_; }
  bool uniform_swaps() const { return swap_uniform_; }
  std::size_t stored_events() const;

  Event draw(Rng& rng) const;

 private:
  Event draw_in(EventKind kind, Rng& rng) const;

  int n_ = 0;
  std::array<double, 4> weights_{};
  std::array<double, 4> cumulative_{};
  double total_ = 0.0;

  bool source_uniform_ = false;
  std::vector<Position> source_targets_;
  AliasTable source_alias_;

  std::vector<std::pair<Position, Position>> gossip_pairs_;
  AliasTable gossip_alias_;

  bool swap_uniform_ = false;
  std::vector<std::pair<Position, Position>> swap_pairs_;
  AliasTable swap_alias_;
};

struct SimConfig {
  double horizon = 2e5;
  double warmup = 2e4;
  int replications = 10;
  std::uint64_t seed = 1;
  std::vector<PositionSet> tracked_sets;
  int workers = 1;
  /// Validate the reset-map invariants after every event (slow).
  bool debug_checks = false;
};

struct ReplicationResult {
  std::vector<double> position_means;
  std::vector<double> tracked_means;
  std::uint64_t events = 0;
  std::uint64_t swaps = 0;
};

struct SimEstimate {
  std::vector<double> per_position_mean;
  std::vector<double> per_position_stderr;
  double mean_age = 0.0;
  double mean_stderr = 0.0;
  std::vector<double> tracked_set_means;
  std::vector<double> tracked_set_stderr;
  std::vector<ReplicationResult> replications;
  std::uint64_t events = 0;
};

/// One independent run of the process from all-zero ages.
ReplicationResult run_replication(const ValidatedNetwork& net, const EventSampler& sampler,
                                  const SimConfig& config, int replication);

/// Time-averaged ages over `config.replications` independent runs.
SimEstimate simulate(const ValidatedNetwork& net, const SimConfig& config);

/// CSV with header replication,position,mean_age (1-based).
void write_replications_csv(std::ostream& out, const SimEstimate& estimate);
/// CSV with header position,mean,stderr.
void write_estimate_csv(std::ostream& out, const SimEstimate& estimate);

}  // namespace gossip_age
