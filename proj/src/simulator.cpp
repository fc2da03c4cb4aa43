// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "gossip_age/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "gossip_age/errors.hpp"
#include "gossip_age/simd/kernels.hpp"
#include "numeric_format.hpp"
#include "simd/kernels_impl.hpp"

namespace gossip_age {

void apply_event(std::span<std::uint32_t> ages, const Event& event) {
  switch (event.kind) {
    case EventKind::SourceSelf:
      for (auto& a : ages) a += 1;
      break;
    case EventKind::SourceDelivery:
      ages[event.to] = 0;
      break;
    case EventKind::Gossip:
      ages[event.to] = std::min(ages[event.from], ages[event.to]);
      break;
    case EventKind::Swap:
      std::swap(ages[event.from], ages[event.to]);
      break;
  }
}

std::vector<std::uint32_t> apply_event(std::vector<std::uint32_t> ages, const Event& event) {
  apply_event(std::span<std::uint32_t>(ages), event);
  return ages;
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication) {
  std::uint64_t z = seed + (replication + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t m = weights.size();
  prob_.assign(m, 1.0);
  alias_.resize(m);
  if (m == 0) return;
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> scaled(m);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < m; ++i) {
    scaled[i] = weights[i] * static_cast<double>(m) / total;
    alias_[i] = static_cast<std::uint32_t>(i);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::uint32_t i : small) prob_[i] = 1.0;
  for (std::uint32_t i : large) prob_[i] = 1.0;
}

namespace {

double neumaier_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

bool all_equal(const std::vector<double>& rates) {
  return std::adjacent_find(rates.begin(), rates.end(), std::not_equal_to<>()) == rates.end();
}

}  // namespace

EventSampler::EventSampler(const ValidatedNetwork& net) : n_(net.n()) {
  const NetworkSpec& spec = net.spec();
  const int n = spec.n;

  std::vector<double> source_weights;
  for (Position j = 0; j < n; ++j) {
    if (spec.source_rates[j] > 0.0) {
      source_targets_.push_back(j);
      source_weights.push_back(spec.source_rates[j]);
    }
  }
  source_uniform_ = all_equal(source_weights);
  if (!source_uniform_) source_alias_ = AliasTable(source_weights);

  std::vector<double> gossip_weights;
  for (Position i = 0; i < n; ++i) {
    for (Position j = 0; j < n; ++j) {
      if (spec.gossip_rates(i, j) > 0.0) {
        gossip_pairs_.emplace_back(i, j);
        gossip_weights.push_back(spec.gossip_rates(i, j));
      }
    }
  }
  gossip_alias_ = AliasTable(gossip_weights);

  // Complete uniform mobility is drawn as a uniform pair without storing the
  // C(n,2) pairs.
  const double first = n >= 2 ? spec.mobility_rates(0, 1) : 0.0;
  swap_uniform_ = n >= 2 && first > 0.0;
  for (Position i = 0; i < n && swap_uniform_; ++i) {
    for (Position j = i + 1; j < n; ++j) {
      if (spec.mobility_rates(i, j) != first) {
        swap_uniform_ = false;
        break;
      }
    }
  }
  std::vector<double> swap_weights;
  if (swap_uniform_) {
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    weights_[3] = pairs * first;
  } else {
    for (Position i = 0; i < n; ++i) {
      for (Position j = i + 1; j < n; ++j) {
        if (spec.mobility_rates(i, j) > 0.0) {
          swap_pairs_.emplace_back(i, j);
          swap_weights.push_back(spec.mobility_rates(i, j));
        }
      }
    }
    swap_alias_ = AliasTable(swap_weights);
    weights_[3] = neumaier_sum(swap_weights);
  }

  weights_[0] = spec.lambda_e;
  weights_[1] = neumaier_sum(source_weights);
  weights_[2] = neumaier_sum(gossip_weights);
  total_ = neumaier_sum(weights_);
  double running = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    running += weights_[c];
    cumulative_[c] = running;
  }
  if (!std::isfinite(total_) || !(total_ > 0.0)) {
    throw Error(ErrorCode::RateOverflow, "total event rate is not finite");
  }
}

std::size_t EventSampler::stored_events() const {
  return source_targets_.size() + gossip_pairs_.size() + swap_pairs_.size();
}

Event EventSampler::draw_in(EventKind kind, Rng& rng) const {
  switch (kind) {
    case EventKind::SourceSelf:
      return {EventKind::SourceSelf, 0, 0};
    case EventKind::SourceDelivery: {
      const std::size_t idx = source_uniform_ ? rng.below(source_targets_.size()) : source_alias_.draw(rng);
      return {EventKind::SourceDelivery, 0, source_targets_[idx]};
    }
    case EventKind::Gossip: {
      const auto& [i, j] = gossip_pairs_[gossip_alias_.draw(rng)];
      return {EventKind::Gossip, i, j};
    }
    case EventKind::Swap: {
      if (swap_uniform_) {
        const auto i = static_cast<Position>(rng.below(static_cast<std::uint64_t>(n_)));
        auto j = static_cast<Position>(rng.below(static_cast<std::uint64_t>(n_ - 1)));
        if (j >= i) ++j;
        return {EventKind::Swap, std::min(i, j), std::max(i, j)};
      }
      const auto& [i, j] = swap_pairs_[swap_alias_.draw(rng)];
      return {EventKind::Swap, i, j};
    }
  }
  return {};
}

Event EventSampler::draw(Rng& rng) const {
  const double u = rng.uniform() * cumulative_[3];
  std::size_t c = 0;
  while (c < 3 && (u >= cumulative_[c] || weights_[c] == 0.0)) ++c;
  while (weights_[c] == 0.0) --c;  // u landed on a rounding sliver past the end
  return draw_in(static_cast<EventKind>(c), rng);
}

namespace {

struct TrackedSets {
  std::vector<PositionSet> sets;
  std::vector<std::vector<std::uint32_t>> by_position;
  std::vector<std::uint32_t> current_min;
  simd::AgeIntegrals integrals;

  TrackedSets(const std::vector<PositionSet>& tracked, int n)
      : sets(tracked), by_position(static_cast<std::size_t>(n)), current_min(tracked.size(), 0),
        integrals(tracked.size()) {
    for (std::uint32_t s = 0; s < sets.size(); ++s) {
      for (Position p : sets[s]) by_position[p].push_back(s);
    }
  }

  bool empty() const { return sets.empty(); }

  std::uint32_t min_over(std::uint32_t s, std::span<const std::uint32_t> ages) const {
    std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
    for (Position p : sets[s]) m = std::min(m, ages[p]);
    return m;
  }

  void flush_one(std::uint32_t s, double t, bool integrating) {
    if (integrating) {
      simd::detail::kahan_step(static_cast<double>(current_min[s]) * (t - integrals.touched[s]),
                               integrals.sum[s], integrals.comp[s]);
    }
    integrals.touched[s] = t;
  }

  // Called after ages[p] changed at time t.
  void refresh(Position p, std::span<const std::uint32_t> ages, double t, bool integrating) {
    for (std::uint32_t s : by_position[p]) {
      const std::uint32_t m = min_over(s, ages);
      if (m == current_min[s]) continue;
      flush_one(s, t, integrating);
      current_min[s] = m;
    }
  }
};

void check_invariants(const Event& e, const std::vector<std::uint32_t>& before,
                      std::span<const std::uint32_t> after) {
  auto fail = [&](const char* what) {
    throw std::logic_error(std::string("simulator invariant violated: ") + what);
  };
  if (e.kind == EventKind::SourceSelf) {
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (after[i] != before[i] + 1) fail("self-update must add exactly one to every age");
    }
    return;
  }
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (e.kind != EventKind::Swap && after[i] > before[i]) fail("only self-updates may increase an age");
  }
  if (e.kind == EventKind::Swap) {
    std::vector<std::uint32_t> a(before), b(after.begin(), after.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) fail("swap changed the multiset of ages");
  }
}

}  // namespace

ReplicationResult run_replication(const ValidatedNetwork& net, const EventSampler& sampler,
                                  const SimConfig& config, int replication) {
  const int n = net.n();
  const double horizon = config.horizon;
  const double warmup = config.warmup;
  const double rate = sampler.total_rate();

  Rng rng(replication_seed(config.seed, static_cast<std::uint64_t>(replication)));
  std::vector<std::uint32_t> ages(static_cast<std::size_t>(n), 0);
  simd::AgeIntegrals acc(static_cast<std::size_t>(n));
  TrackedSets tracked(config.tracked_sets, n);
  const simd::Kernels& kern = simd::active();

  ReplicationResult out;
  bool integrating = warmup <= 0.0;
  double t = 0.0;
  std::vector<std::uint32_t> before;

  auto flush_position = [&](Position p) {
    if (integrating) {
      simd::detail::kahan_step(static_cast<double>(ages[p]) * (t - acc.touched[p]), acc.sum[p], acc.comp[p]);
    }
    acc.touched[p] = t;
  };

  while (true) {
    const double next = t - std::log1p(-rng.uniform()) / rate;
    if (!integrating && next >= warmup) {
      // Ages are constant on [t, next), so integration can start at warmup.
      std::fill(acc.touched.begin(), acc.touched.end(), warmup);
      std::fill(tracked.integrals.touched.begin(), tracked.integrals.touched.end(), warmup);
      integrating = true;
    }
    if (next >= horizon) break;
    t = next;
    const Event e = sampler.draw(rng);
    ++out.events;
    if (config.debug_checks) before = ages;

    switch (e.kind) {
      case EventKind::SourceSelf:
        if (integrating) {
          kern.flush_increment(ages.data(), acc.touched.data(), acc.sum.data(), acc.comp.data(), t,
                               ages.size());
        } else {
          for (auto& a : ages) a += 1;
        }
        for (std::uint32_t s = 0; s < tracked.sets.size(); ++s) {
          tracked.flush_one(s, t, integrating);
          tracked.current_min[s] += 1;
        }
        break;
      case EventKind::SourceDelivery:
        if (ages[e.to] != 0) {
          flush_position(e.to);
          ages[e.to] = 0;
          if (!tracked.empty()) tracked.refresh(e.to, ages, t, integrating);
        }
        break;
      case EventKind::Gossip:
        if (ages[e.from] < ages[e.to]) {
          flush_position(e.to);
          ages[e.to] = ages[e.from];
          if (!tracked.empty()) tracked.refresh(e.to, ages, t, integrating);
        }
        break;
      case EventKind::Swap:
        ++out.swaps;
        if (ages[e.from] != ages[e.to]) {
          flush_position(e.from);
          flush_position(e.to);
          std::swap(ages[e.from], ages[e.to]);
          if (!tracked.empty()) {
            tracked.refresh(e.from, ages, t, integrating);
            tracked.refresh(e.to, ages, t, integrating);
          }
        }
        break;
    }
    if (config.debug_checks) {
      check_invariants(e, before, ages);
      std::vector<std::uint32_t> reference = apply_event(before, e);
      if (reference != ages) throw std::logic_error("simulator diverged from the reset map");
    }
  }

  t = horizon;
  kern.flush(ages.data(), acc.touched.data(), acc.sum.data(), acc.comp.data(), t, ages.size());
  for (std::uint32_t s = 0; s < tracked.sets.size(); ++s) tracked.flush_one(s, t, true);

  const double span = horizon - warmup;
  out.position_means.resize(static_cast<std::size_t>(n));
  for (Position p = 0; p < n; ++p) out.position_means[p] = (acc.sum[p] - acc.comp[p]) / span;
  out.tracked_means.resize(tracked.sets.size());
  for (std::size_t s = 0; s < tracked.sets.size(); ++s) {
    out.tracked_means[s] = (tracked.integrals.sum[s] - tracked.integrals.comp[s]) / span;
  }
  return out;
}

namespace {

void mean_and_stderr(const std::vector<double>& xs, double& mean, double& stderr_out) {
  const double m = static_cast<double>(xs.size());
  double total = 0.0;
  for (double x : xs) total += x;
  mean = total / m;
  if (xs.size() < 2) {
    stderr_out = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  stderr_out = std::sqrt(ss / (m - 1.0) / m);
}

}  // namespace

SimEstimate simulate(const ValidatedNetwork& net, const SimConfig& config) {
  if (!(config.horizon > config.warmup) || config.warmup < 0.0 || !std::isfinite(config.horizon)) {
    throw Error(ErrorCode::DegenerateHorizon, "need 0 <= warmup < horizon");
  }
  if (config.replications < 1) throw Error(ErrorCode::ConfigError, "replications must be >= 1");
  for (PositionSet s : config.tracked_sets) {
    if (s.empty() || !s.subset_of(PositionSet::full(net.n()))) {
      throw Error(ErrorCode::ConfigError, "tracked set " + s.to_string() + " is not a nonempty subset");
    }
  }
  const EventSampler sampler(net);

  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<ReplicationResult> results(reps);
  const int workers = std::clamp(config.workers, 1, config.replications);
  if (workers == 1) {
    for (std::size_t r = 0; r < reps; ++r) results[r] = run_replication(net, sampler, config, static_cast<int>(r));
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(reps);
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t r; (r = next.fetch_add(1)) < reps;) {
            try {
              results[r] = run_replication(net, sampler, config, static_cast<int>(r));
            } catch (...) {
              errors[r] = std::current_exception();
            }
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const int n = net.n();
  SimEstimate est;
  est.per_position_mean.resize(static_cast<std::size_t>(n));
  est.per_position_stderr.resize(static_cast<std::size_t>(n));
  std::vector<double> column(reps);
  for (Position p = 0; p < n; ++p) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = results[r].position_means[p];
    mean_and_stderr(column, est.per_position_mean[p], est.per_position_stderr[p]);
  }
  double total = 0.0;
  for (double v : est.per_position_mean) total += v;
  est.mean_age = total / n;
  for (std::size_t r = 0; r < reps; ++r) {
    double s = 0.0;
    for (double v : results[r].position_means) s += v;
    column[r] = s / n;
  }
  double unused = 0.0;
  mean_and_stderr(column, unused, est.mean_stderr);

  est.tracked_set_means.resize(config.tracked_sets.size());
  est.tracked_set_stderr.resize(config.tracked_sets.size());
  for (std::size_t s = 0; s < config.tracked_sets.size(); ++s) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = results[r].tracked_means[s];
    mean_and_stderr(column, est.tracked_set_means[s], est.tracked_set_stderr[s]);
  }
  for (const auto& r : results) est.events += r.events;
  est.replications = std::move(results);
  return est;
}

void write_replications_csv(std::ostream& out, const SimEstimate& estimate) {
  out << "replication,position,mean_age\n";
  for (std::size_t r = 0; r < estimate.replications.size(); ++r) {
    const auto& means = estimate.replications[r].position_means;
    for (std::size_t p = 0; p < means.size(); ++p) {
      out << r + 1 << ',' << p + 1 << ',' << format_double(means[p]) << '\n';
    }
  }
}

void write_estimate_csv(std::ostream& out, const SimEstimate& estimate) {
  out << "position,mean,stderr\n";
  for (std::size_t p = 0; p < estimate.per_position_mean.size(); ++p) {
    out << p + 1 << ',' << format_double(estimate.per_position_mean[p]) << ','
        << format_double(estimate.per_position_stderr[p]) << '\n';
  }
}

}  // namespace gossip_age
