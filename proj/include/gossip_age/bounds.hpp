// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gossip_age/network.hpp"
#include "gossip_age/shs_solver.hpp"

namespace gossip_age {

// ---------------------------------------------------------------------------
// Three-position toy network

enum class ToyVariant { None, Exchange13, Exchange12 };

std::string_view to_string(ToyVariant variant) noexcept;
ToyVariant toy_variant_from_string(std::string_view name);

/// Builder spec for a toy variant (None is variant 13 with lambda_m = 0).
NetworkSpec toy_network(ToyVariant variant, double lambda_e, double lambda, double lambda_m);

struct ToyAges {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  ToyVariant variant = ToyVariant::None;

  double mean() const { return (v1 + v2 + v3) / 3.0; }
};

/// Closed-form position ages of the toy network.
ToyAges toy_ages(ToyVariant variant, double lambda_e, double lambda, double lambda_m);

// ---------------------------------------------------------------------------
// Fully connected block of n-1 positions plus one position that only talks to
// the source and trades places with every block position at rate lambda.
//
// The coefficients follow the printed recursion, including its (n-a-2)
// gossip/mobility counts for sets that hold the single position; the direct
// count for the builder network is (n-a). The bound is therefore checked
// against exact and simulated ages rather than trusted.

struct FcSingleCoefficients {
  double c = 0.0;
  double d = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

FcSingleCoefficients fc_single_coefficients(int n, double lambda, int a);

/// v_{(n-1,0)}: the age of the whole block, from the coupled top-level
/// equations of fc_plus_single(n).
double fc_single_top_age(int n, double lambda_e, double lambda);

/// Upper bound on the age of one block position, evaluating the recursion
/// sum and product exactly. Requires n >= 4.
double fc_single_bound_recursion(int n, double lambda_e, double lambda);

/// (5/2)(lambda_e/lambda) log n + C'. Requires n >= 4.
double fc_single_log_bound(int n, double lambda_e, double lambda);

/// Prefix products prod_{j<i} y_j/z_j for i = 1..n-1.
std::vector<double> fc_single_prefix_products(int n, double lambda);

/// Ages of fc_plus_single(n) with the mobility removed, via the per-size
/// recursion of the block: {block position age, single position age}.
std::pair<double, double> fc_single_no_mobility_ages(int n, double lambda_e, double lambda);

// ---------------------------------------------------------------------------
// Disjoint gossiping pairs with full mobility at lambda_m = lambda / f(n).

struct DisconnectedCoefficients {
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double f_corr = 0.0;  // 1 - 2a(n-2(a+1)) lambda_m / c
  double g_corr = 0.0;  // 1 - 2(a-1)(n-2(a+1)) lambda_m / d
  double x = 0.0;
  double y = 0.0;
};

DisconnectedCoefficients disconnected_coefficients(int n, double lambda, double lambda_m, int a);

/// v_{(n/2-1,0)}: all pairs but one, from the coupled top-level equations of
/// disconnected_pairs(n). Requires even n >= 4.
double disconnected_top_age(int n, double lambda_e, double lambda, double lambda_m);

/// lambda_e/lambda + lambda_e * sum_i x_i alpha_i + C. Requires even n >= 6.
double disconnected_bound_recursion(int n, double lambda_e, double lambda, double f_of_n);

/// (lambda_e/lambda)(1 + (3/2) min(f, (sqrt(pi)/2) sqrt(n))) + C.
double disconnected_scaling_bound(int n, double lambda_e, double lambda, double f_of_n);

/// Constant-f regime: (lambda_e/lambda)(1 + (3/2) k) + C + (3/2) lambda_e/lambda.
double disconnected_constant_bound(int n, double lambda_e, double lambda, double k);

/// Single-position age of disconnected_pairs(n) with no mobility.
double disconnected_no_mobility_age(int n, double lambda_e, double lambda);

// ---------------------------------------------------------------------------
// Mobility-free reference recursion

/// Zeroes the mobility matrix and evaluates v_S = (lambda_e + sum_i
/// lambda_i(S) v_{S+i}) / (lambda_0(S) + sum_i lambda_i(S)) top-down from the
/// singletons, memoizing only the sets it reaches. Independent of the level
/// solver. Returns a sparse table. Requires n <= 64.
AgeTable no_mobility_reference(const ValidatedNetwork& net);

// ---------------------------------------------------------------------------
// Bound curves

/// Mobility slowdown f(n), lambda_m = lambda / f(n).
struct MobilityScale {
  enum class Kind { Linear, Sqrt, Log, Constant };
  Kind kind = Kind::Linear;
  double constant = 1.0;

  double operator()(int n) const;
  std::string to_string() const;
  /// Accepts "n", "sqrt(n)", "log(n)" or a positive number.
  static MobilityScale parse(std::string_view text);
};

enum class BoundKind {
  FcSingleExactRecursion,
  FcSingleLogClosedForm,
  DisconnectedRecursion,
  DisconnectedSqrtClosedForm,
  DisconnectedConstantRegime,
};

std::string_view to_string(BoundKind kind) noexcept;
BoundKind bound_kind_from_string(std::string_view name);

struct BoundCurve {
  std::vector<int> n_values;
  std::vector<double> bound_values;
  std::vector<double> f_values;  // f(n) per point; 0 where not applicable
  BoundKind kind = BoundKind::FcSingleExactRecursion;
};

BoundCurve bound_curve(BoundKind kind, const std::vector<int>& n_values, double lambda_e,
                       double lambda, const MobilityScale& scale = {});

/// CSV with header n,bound,kind,f_of_n.
void write_bound_curve_csv(std::ostream& out, const BoundCurve& curve);

}  // namespace gossip_age
