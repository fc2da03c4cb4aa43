// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gossip_age/errors.hpp"
#include "gossip_age/network.hpp"
#include "test_support.hpp"

using namespace gossip_age;

namespace {

ErrorCode code_of(NetworkSpec spec) {
  try {
    validate(std::move(spec));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected validate() to throw");
  return ErrorCode::ConfigError;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("PositionSet basics") {
  const PositionSet s = PositionSet::single(0).with(2);
  CHECK(s.size() == 2);
  CHECK(s.contains(0));
  CHECK_FALSE(s.contains(1));
  CHECK(s.to_string() == "{1,3}");
  CHECK(s.swapped(2, 1) == PositionSet::single(0).with(1));
  CHECK(PositionSet::full(3).bits() == 7);
  CHECK(PositionSet::full(64).size() == 64);
  CHECK(s.subset_of(PositionSet::full(3)));
  std::vector<Position> members(s.begin(), s.end());
  CHECK(members == std::vector<Position>{0, 2});
}

TEST_CASE("validate rejects malformed specs") {
  NetworkSpec base = toy_variant_13(1, 1, 1);
  CHECK_NOTHROW(validate(base));

  NetworkSpec asym = base;
  asym.mobility_rates(0, 1) = 1.0;
  asym.mobility_rates(1, 0) = 0.0;
  CHECK(code_of(asym) == ErrorCode::AsymmetricMobility);

  NetworkSpec no_source = base;
  for (double& r : no_source.source_rates) r = 0.0;
  CHECK(code_of(no_source) == ErrorCode::ZeroSourceTotal);

  NetworkSpec negative = base;
  negative.gossip_rates(0, 1) = -0.5;
  CHECK(code_of(negative) == ErrorCode::NegativeRate);

  NetworkSpec diag = base;
  diag.gossip_rates(1, 1) = 1.0;
  CHECK(code_of(diag) == ErrorCode::NonzeroDiagonal);

  NetworkSpec bad_e = base;
  bad_e.lambda_e = 0.0;
  CHECK(code_of(bad_e) == ErrorCode::NegativeRate);

  NetworkSpec inf = base;
  inf.source_rates[0] = INFINITY;
  CHECK(code_of(inf) == ErrorCode::NegativeRate);
}

TEST_CASE("toy rate queries") {
  const NetworkSpec t = toy_variant_13(1, 1, 0.25);
  const PositionSet p1 = PositionSet::single(0);
  const PositionSet p2 = PositionSet::single(1);
  const PositionSet p3 = PositionSet::single(2);
  CHECK(source_rate_into(t, p1) == doctest::Approx(0.5));
  CHECK(source_rate_into(t, p2) == 0.0);
  CHECK(source_rate_into(t, p1.with(2)) == doctest::Approx(1.0));
  // position 2 hears from 1 at lambda/2 and from 3 at lambda
  CHECK(gossip_rate_into(t, 0, p2) == doctest::Approx(0.5));
  CHECK(gossip_rate_into(t, 2, p2) == doctest::Approx(1.0));
  CHECK(gossip_rate_into(t, 0, p3) == doctest::Approx(0.5));
  CHECK(gossip_rate_into(t, 1, p3) == 0.0);
  CHECK(gossip_rate_into(t, 0, p1) == 0.0);
  CHECK(neighbors_of(t, p2) == p1.with(2));

  const auto exits = mobility_exits(t, p1);
  REQUIRE(exits.size() == 1);
  CHECK(exits[0] == MobilityExit{0, 2, 0.25});
  CHECK(mobility_exit_total(t, p1.with(2)) == 0.0);
  CHECK(mobility_exits(toy_variant_12(1, 1, 2), p1.with(2)).size() == 1);
}

TEST_CASE("builders make source rates sum to lambda exactly") {
  for (double lambda : {1.0, 0.3, 7.0}) {
    CHECK(toy_variant_13(1, lambda, 1).total_source_rate() == lambda);
    CHECK(toy_variant_12(1, lambda, 1).total_source_rate() == lambda);
    for (int n : {3, 7, 10, 33}) {
      CHECK(sum(fc_plus_single(n, 1, lambda).source_rates) == lambda);
      CHECK(sum(fully_connected(n, 1, lambda, true, 1).source_rates) == lambda);
    }
    for (int n : {2, 6, 14, 100}) CHECK(sum(disconnected_pairs(n, 1, lambda, 0.1).source_rates) == lambda);
  }
}

TEST_CASE("builder structure") {
  const NetworkSpec fc = fc_plus_single(6, 1, 1);
  CHECK_NOTHROW(validate(fc));
  CHECK(gossip_components(fc) == 2);
  CHECK(fc.source_rates[5] == doctest::Approx(0.5));
  CHECK(fc.gossip_rates(0, 1) == doctest::Approx(0.25));
  CHECK(fc.mobility_rates(0, 5) == 1.0);
  CHECK(fc.mobility_rates(0, 1) == 0.0);

  const NetworkSpec dp = disconnected_pairs(8, 1, 1, 0.125);
  CHECK(gossip_components(dp) == 4);
  CHECK(dp.gossip_rates(2, 3) == 1.0);
  CHECK(dp.gossip_rates(1, 2) == 0.0);
  CHECK(dp.mobility_rates(0, 7) == 0.125);

  const NetworkSpec full = fully_connected(5, 1, 2, true, 0.5);
  CHECK(gossip_components(full) == 1);
  CHECK(full.gossip_rates(0, 4) == doctest::Approx(0.5));
  CHECK(fully_connected(5, 1, 2, false, 0.5).mobility_rates(0, 4) == 0.0);

  CHECK_THROWS_AS(disconnected_pairs(7, 1, 1, 1), Error);
  CHECK_THROWS_AS(fc_plus_single(2, 1, 1), Error);
}

TEST_CASE("permuted relabels every rate") {
  std::mt19937_64 rng(7);
  const NetworkSpec spec = testing::random_spec(rng, 5);
  const std::vector<Position> perm{3, 0, 4, 1, 2};
  const NetworkSpec p = permuted(spec, perm);
  for (Position i = 0; i < 5; ++i) {
    CHECK(p.source_rates[perm[i]] == spec.source_rates[i]);
    for (Position j = 0; j < 5; ++j) {
      CHECK(p.gossip_rates(perm[i], perm[j]) == spec.gossip_rates(i, j));
      CHECK(p.mobility_rates(perm[i], perm[j]) == spec.mobility_rates(i, j));
    }
  }
}

TEST_CASE("json round trip and field errors") {
  const NetworkSpec spec = fc_plus_single(5, 2, 3);
  const nlohmann::json j = spec;
  CHECK(j.get<NetworkSpec>() == spec);

  nlohmann::json broken = j;
  broken.erase("gossip_rates");
  try {
    (void)broken.get<NetworkSpec>();
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("gossip_rates") != std::string::npos);
  }
}
