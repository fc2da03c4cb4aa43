// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "gossip_age/errors.hpp"
#include "gossip_age/shs_solver.hpp"
#include "gossip_age/simd/kernels.hpp"
#include "gossip_age/simulator.hpp"
#include "test_support.hpp"

using namespace gossip_age;

TEST_CASE("apply_event reset maps") {
  using V = std::vector<std::uint32_t>;
  CHECK(apply_event(V{3, 0, 5}, {EventKind::SourceSelf, 0, 0}) == V{4, 1, 6});
  CHECK(apply_event(V{3, 0, 5}, {EventKind::SourceDelivery, 0, 2}) == V{3, 0, 0});
  CHECK(apply_event(V{3, 0, 5}, {EventKind::Gossip, 1, 0}) == V{0, 0, 5});
  // gossip never makes the receiver older
  CHECK(apply_event(V{3, 0, 5}, {EventKind::Gossip, 2, 0}) == V{3, 0, 5});
  CHECK(apply_event(V{3, 0, 5}, {EventKind::Swap, 0, 2}) == V{5, 0, 3});
}

TEST_CASE("replication seeds are distinct and stable") {
  CHECK(replication_seed(1, 0) != replication_seed(1, 1));
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
  CHECK(replication_seed(1, 0) == replication_seed(1, 0));
}

TEST_CASE("alias table frequencies") {
  const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
  AliasTable table(w);
  Rng rng(9);
  std::array<int, 4> counts{};
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) ++counts[table.draw(rng)];
  for (std::size_t k = 0; k < 4; ++k) {
    const double p = w[k] / 10.0;
    const double sigma = std::sqrt(draws * p * (1 - p));
    CHECK(std::abs(counts[k] - draws * p) < 4 * sigma);
  }
}

TEST_CASE("sampler category weights") {
  SUBCASE("uniform mobility is not enumerated") {
    const EventSampler s(validate(disconnected_pairs(1000, 1, 1, 0.001)));
    CHECK(s.uniform_swaps());
    CHECK(s.category_weights()[3] == doctest::Approx(1000.0 * 999 / 2 * 0.001));
    CHECK(s.stored_events() < 3000);

    Rng rng(4);
    std::array<int, 4> counts{};
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) ++counts[static_cast<int>(s.draw(rng).kind)];
    for (std::size_t k = 0; k < 4; ++k) {
      const double p = s.category_weights()[k] / s.total_rate();
      CHECK(std::abs(counts[k] - draws * p) <= 3 * std::sqrt(draws * p * (1 - p)) + 1);
    }
  }
  SUBCASE("single gossip rate") {
    NetworkSpec spec(2);
    spec.source_rates[0] = 1.0;
    spec.gossip_rates(0, 1) = 3.0;
    const EventSampler s(validate(spec));
    CHECK(s.total_rate() == doctest::Approx(5.0));
    Rng rng(5);
    int gossip = 0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
      const Event e = s.draw(rng);
      if (e.kind == EventKind::Gossip) {
        ++gossip;
        CHECK(e == Event{EventKind::Gossip, 0, 1});
      }
    }
    CHECK(std::abs(gossip - draws * 0.6) < 4 * std::sqrt(draws * 0.24));
  }
  SUBCASE("fc_plus_single weights sum to the total") {
    const EventSampler s(validate(fc_plus_single(16, 1, 1)));
    const auto& w = s.category_weights();
    CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(s.total_rate()).epsilon(1e-15));
    CHECK(w[1] == 1.0);
    CHECK(w[3] == doctest::Approx(15.0));
  }
}

TEST_CASE("one position: mean age is lambda_e over lambda") {
  NetworkSpec spec(1);
  spec.lambda_e = 2.0;
  spec.source_rates[0] = 0.5;
  SimConfig cfg;
  cfg.horizon = 2e5;
  cfg.warmup = 1e3;
  cfg.replications = 4;
  const SimEstimate est = simulate(validate(spec), cfg);
  CHECK(est.mean_age == doctest::Approx(4.0).epsilon(0.03));
}

TEST_CASE("simulation matches the solver on the toy network, tracked sets included") {
  const ValidatedNetwork net = validate(toy_variant_12(1, 1, 1));
  const AgeTable exact = solve_all(net);
  SimConfig cfg;
  cfg.horizon = 1e5;
  cfg.warmup = 1e4;
  cfg.replications = 4;
  cfg.workers = 2;
  cfg.tracked_sets = {PositionSet{0b011}, PositionSet{0b101}, PositionSet{0b111}};
  const SimEstimate est = simulate(net, cfg);
  for (int i = 0; i < 3; ++i) CHECK(est.per_position_mean[i] == doctest::Approx(exact.position_ages()[i]).epsilon(0.03));
  for (std::size_t s = 0; s < cfg.tracked_sets.size(); ++s) {
    CHECK(est.tracked_set_means[s] == doctest::Approx(exact.at(cfg.tracked_sets[s])).epsilon(0.03));
  }
}

TEST_CASE("seeded runs are bit-identical across worker counts and kernel variants") {
  std::mt19937_64 rng(21);
  const ValidatedNetwork net = validate(testing::random_spec(rng, 6));
  SimConfig cfg;
  cfg.horizon = 2e3;
  cfg.warmup = 2e2;
  cfg.replications = 3;
  cfg.seed = 77;
  simd::select(simd::Isa::Scalar);
  const SimEstimate a = simulate(net, cfg);
  cfg.workers = 3;
  for (simd::Isa isa : simd::available_isas()) {
    simd::select(isa);
    const SimEstimate b = simulate(net, cfg);
    REQUIRE(a.per_position_mean.size() == b.per_position_mean.size());
    CHECK(std::memcmp(a.per_position_mean.data(), b.per_position_mean.data(),
                      a.per_position_mean.size() * sizeof(double)) == 0);
    CHECK(a.events == b.events);
  }
  cfg.seed = 78;
  CHECK(simulate(net, cfg).per_position_mean != a.per_position_mean);
}

TEST_CASE("debug checks hold over many events") {
  std::mt19937_64 rng(22);
  const ValidatedNetwork net = validate(testing::random_spec(rng, 6));
  SimConfig cfg;
  cfg.horizon = 2e3;
  cfg.warmup = 100;
  cfg.replications = 2;
  cfg.debug_checks = true;
  const SimEstimate est = simulate(net, cfg);
  CHECK(est.events > 1000);
}

TEST_CASE("bad horizons are rejected") {
  const ValidatedNetwork net = validate(toy_variant_13(1, 1, 1));
  SimConfig cfg;
  cfg.horizon = 10;
  cfg.warmup = 10;
  CHECK_THROWS_AS(simulate(net, cfg), Error);
}

TEST_CASE("CSV writers") {
  const ValidatedNetwork net = validate(toy_variant_13(1, 1, 1));
  SimConfig cfg;
  cfg.horizon = 100;
  cfg.warmup = 10;
  cfg.replications = 2;
  const SimEstimate est = simulate(net, cfg);
  std::ostringstream reps, agg;
  write_replications_csv(reps, est);
  write_estimate_csv(agg, est);
  CHECK(reps.str().rfind("replication,position,mean_age\n1,1,", 0) == 0);
  CHECK(agg.str().rfind("position,mean,stderr\n1,", 0) == 0);
}
