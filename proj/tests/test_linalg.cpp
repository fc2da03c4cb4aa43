// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gossip_age/errors.hpp"
#include "gossip_age/linalg.hpp"

using namespace gossip_age;
using namespace gossip_age::linalg;

TEST_CASE("solve_dense on a small system needing a pivot") {
  DenseMatrix a(3);
  // [0 2 1; 1 1 1; 2 1 0] x = [5; 6; 4] has x = (1, 2, 1) after scaling below
  a(0, 0) = 0; a(0, 1) = 2; a(0, 2) = 1;
  a(1, 0) = 1; a(1, 1) = 1; a(1, 2) = 1;
  a(2, 0) = 2; a(2, 1) = 1; a(2, 2) = 0;
  const auto x = solve_dense(a, {5, 4, 4});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));
  CHECK(x[2] == doctest::Approx(1.0));
}

TEST_CASE("solve_dense flags singular matrices") {
  DenseMatrix a(2);
  a(0, 0) = 1; a(0, 1) = 2;
  a(1, 0) = 2; a(1, 1) = 4;
  try {
    solve_dense(a, {1, 2});
    FAIL("expected SingularLevelSystem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularLevelSystem);
  }
}

namespace {

CoupledSystem random_dominant(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::bernoulli_distribution keep(0.3);
  CoupledSystem sys;
  for (std::size_t r = 0; r < m; ++r) {
    sys.add_row(0.0, u(rng));
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      if (c != r && keep(rng)) {
        const double w = u(rng);
        sys.add_coupling(static_cast<std::uint32_t>(c), w);
        total += w;
      }
    }
    sys.diag.back() = total + u(rng);
  }
  return sys;
}

}  // namespace

TEST_CASE("Gauss-Seidel agrees with the direct solve") {
  std::mt19937_64 rng(3);
  for (std::size_t m : {1, 5, 40}) {
    const CoupledSystem sys = random_dominant(rng, m);
    const auto direct = solve_dense(sys.to_dense(), sys.rhs);
    CHECK(sys.max_residual(direct) < 1e-12);
    for (double omega : {1.0, 1.2}) {
      SweepOptions opt;
      opt.tolerance = 1e-13;
      opt.relaxation = omega;
      const SweepResult it = gauss_seidel(sys, opt);
      REQUIRE(it.converged);
      CHECK(it.residual <= 1e-13);
      for (std::size_t i = 0; i < m; ++i) CHECK(it.x[i] == doctest::Approx(direct[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("Gauss-Seidel reports non-convergence at the sweep cap") {
  std::mt19937_64 rng(5);
  const CoupledSystem sys = random_dominant(rng, 30);
  SweepOptions opt;
  opt.tolerance = 1e-300;
  opt.max_sweeps = 3;
  const SweepResult it = gauss_seidel(sys, opt);
  CHECK_FALSE(it.converged);
  CHECK(it.sweeps == 3);
}

TEST_CASE("to_dense places couplings with negative sign") {
  CoupledSystem sys;
  sys.add_row(3.0, 1.0);
  sys.add_coupling(1, 0.5);
  sys.add_row(2.0, 1.0);
  const DenseMatrix d = sys.to_dense();
  CHECK(d(0, 0) == 3.0);
  CHECK(d(0, 1) == -0.5);
  CHECK(d(1, 0) == 0.0);
  CHECK(d(1, 1) == 2.0);
}
