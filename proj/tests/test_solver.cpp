// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "gossip_age/bounds.hpp"
#include "gossip_age/errors.hpp"
#include "gossip_age/shs_solver.hpp"
#include "test_support.hpp"

using namespace gossip_age;
using gossip_age::testing::random_spec;
using gossip_age::testing::rel_err;

TEST_CASE("sets_of_size enumerates in bitmask order and level_rank inverts it") {
  for (int n : {1, 4, 7, 12}) {
    for (int k = 1; k <= n; ++k) {
      const auto sets = sets_of_size(n, k);
      for (std::size_t r = 0; r < sets.size(); ++r) {
        CHECK(sets[r].size() == k);
        CHECK(level_rank(sets[r]) == r);
        if (r > 0) CHECK(sets[r - 1].bits() < sets[r].bits());
        CHECK(sets[r].subset_of(PositionSet::full(n)));
      }
    }
  }
  CHECK(sets_of_size(10, 5).size() == 252);
  CHECK(sets_of_size(5, 0).empty());
}

TEST_CASE("toy networks: solver equals closed forms") {
  for (double lm : {0.0, 0.001, 0.1, 1.0, 10.0, 1000.0}) {
    for (ToyVariant v : {ToyVariant::Exchange13, ToyVariant::Exchange12}) {
      const AgeTable t = solve_all(validate(toy_network(v, 1.0, 1.0, lm)));
      const ToyAges a = toy_ages(v, 1.0, 1.0, lm);
      CAPTURE(lm);
      CHECK(rel_err(t.position_ages()[0], a.v1) < 1e-12);
      CHECK(rel_err(t.position_ages()[1], a.v2) < 1e-12);
      CHECK(rel_err(t.position_ages()[2], a.v3) < 1e-12);
    }
  }
  // lambda = 2, lambda_e = 3: everything scales with lambda_e / lambda
  const AgeTable t = solve_all(validate(toy_variant_13(3.0, 2.0, 0.0)));
  CHECK(t.position_ages()[2] == doctest::Approx(1.5 * 1.5));
  CHECK(t.at(PositionSet::full(3)) == doctest::Approx(1.5));
}

TEST_CASE("age of the full set is lambda_e over total source rate") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const NetworkSpec spec = random_spec(rng, 5);
    const AgeTable t = solve_all(validate(spec));
    CHECK(t.at(PositionSet::full(5)) == doctest::Approx(spec.lambda_e / spec.total_source_rate()));
  }
}

TEST_CASE("superset monotonicity") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    const AgeTable t = solve_all(validate(random_spec(rng, n)));
    t.for_each([&](PositionSet s, double v) {
      for (Position i = 0; i < n; ++i) {
        if (!s.contains(i)) CHECK(t.at(s.with(i)) <= v * (1 + 1e-12));
      }
    });
  }
}

TEST_CASE("homogeneity: scaling every rate leaves ages unchanged, scaling lambda_e scales them") {
  std::mt19937_64 rng(13);
  NetworkSpec spec = random_spec(rng, 4);
  const AgeTable base = solve_all(validate(spec));
  NetworkSpec fast = spec;
  fast.lambda_e *= 3;
  for (double& r : fast.source_rates) r *= 3;
  for (Position i = 0; i < 4; ++i) {
    for (Position j = 0; j < 4; ++j) {
      fast.gossip_rates(i, j) *= 3;
      fast.mobility_rates(i, j) *= 3;
    }
  }
  const AgeTable scaled = solve_all(validate(fast));
  NetworkSpec more = spec;
  more.lambda_e *= 2.5;
  const AgeTable doubled = solve_all(validate(more));
  for (Position i = 0; i < 4; ++i) {
    CHECK(rel_err(scaled.position_ages()[i], base.position_ages()[i]) < 1e-12);
    CHECK(rel_err(doubled.position_ages()[i], 2.5 * base.position_ages()[i]) < 1e-12);
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 4;
    const NetworkSpec spec = random_spec(rng, n);
    std::vector<Position> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    const AgeTable a = solve_all(validate(spec));
    const AgeTable b = solve_all(validate(permuted(spec, perm)));
    a.for_each([&](PositionSet s, double v) {
      PositionSet image;
      for (Position i : s) image = image.with(perm[i]);
      CHECK(rel_err(b.at(image), v) < 1e-12);
    });
  }
}

TEST_CASE("fully connected mobility does not change per-node ages") {
  for (int n : {4, 5}) {
    const AgeTable still = solve_all(validate(fully_connected(n, 1, 1, true, 0.0)));
    const AgeTable moving = solve_all(validate(fully_connected(n, 1, 1, true, 3.0)));
    for (int i = 0; i < n; ++i) CHECK(rel_err(moving.position_ages()[i], still.position_ages()[i]) < 1e-12);
  }
}

TEST_CASE("iterative path agrees with dense path") {
  std::mt19937_64 rng(15);
  const ValidatedNetwork net = validate(random_spec(rng, 8));
  SolverOptions iterative;
  iterative.dense_limit = 0;
  const AgeTable a = solve_all(net);
  const AgeTable b = solve_all(net, iterative);
  a.for_each([&](PositionSet s, double v) { CHECK(rel_err(b.at(s), v) < 1e-10); });

  const LevelSolution top = solve_level(net, 8, AgeTable::dense(8), iterative);
  CHECK(top.iterative);
  CHECK(top.sets.size() == 1);
}

TEST_CASE("disconnected_pairs top sets match the shape-reduced constant") {
  for (double lm : {0.05, 1.0}) {
    const AgeTable t = solve_all(validate(disconnected_pairs(8, 1, 1, lm)));
    // all pairs but {7,8}
    CHECK(rel_err(t.at(PositionSet{0x3F}), disconnected_top_age(8, 1, 1, lm)) < 1e-12);
  }
  const AgeTable fc = solve_all(validate(fc_plus_single(7, 1, 1)));
  CHECK(rel_err(fc.at(PositionSet{0x3F}), fc_single_top_age(7, 1, 1)) < 1e-12);
}

TEST_CASE("errors: cap and singular systems") {
  try {
    solve_all(validate(fully_connected(25, 1, 1, false, 0.0)));
    FAIL("expected CapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }

  // Position 2 hears nothing and never moves.
  NetworkSpec spec(2);
  spec.source_rates[0] = 1.0;
  try {
    solve_all(validate(spec));
    FAIL("expected SingularLevelSystem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularLevelSystem);
  }
  // ...but mobility rescues it.
  spec.set_mobility(0, 1, 1.0);
  CHECK_NOTHROW(solve_all(validate(spec)));
}

TEST_CASE("CSV writers") {
  const AgeTable t = solve_all(validate(toy_variant_13(1, 1, 0)));
  std::ostringstream table;
  write_age_table_csv(table, t);
  std::istringstream lines(table.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "set_bitmask,set_members,cardinality,v_S");
  std::getline(lines, line);
  CHECK(line.rfind("1,1,1,", 0) == 0);
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line.rfind("3,1;2,2,", 0) == 0);
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 4);

  std::ostringstream ages;
  write_position_ages_csv(ages, t);
  CHECK(ages.str().rfind("position,v_i\n1,", 0) == 0);
  CHECK(ages.str().find("\n3,1.5") != std::string::npos);
}
