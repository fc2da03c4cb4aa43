// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "gossip_age/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "gossip_age/errors.hpp"
#include "gossip_age/linalg.hpp"
#include "numeric_format.hpp"

namespace gossip_age {

namespace {

void require_positive(double lambda_e, double lambda) {
  if (!(lambda_e > 0.0) || !(lambda > 0.0) || !std::isfinite(lambda_e) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NegativeRate, "lambda_e and lambda must be positive");
  }
}

}  // namespace

std::string_view to_string(ToyVariant variant) noexcept {
  switch (variant) {
    case ToyVariant::None: return "none";
    case ToyVariant::Exchange13: return "exchange_13";
    case ToyVariant::Exchange12: return "exchange_12";
  }
  return "none";
}

ToyVariant toy_variant_from_string(std::string_view name) {
  for (ToyVariant v : {ToyVariant::None, ToyVariant::Exchange13, ToyVariant::Exchange12}) {
    if (name == to_string(v)) return v;
  }
  throw Error(ErrorCode::ConfigError, "unknown toy variant '" + std::string(name) + "'");
}

NetworkSpec toy_network(ToyVariant variant, double lambda_e, double lambda, double lambda_m) {
  switch (variant) {
    case ToyVariant::None: return toy_variant_13(lambda_e, lambda, 0.0);
    case ToyVariant::Exchange13: return toy_variant_13(lambda_e, lambda, lambda_m);
    case ToyVariant::Exchange12: return toy_variant_12(lambda_e, lambda, lambda_m);
  }
  return toy_variant_13(lambda_e, lambda, 0.0);
}

ToyAges toy_ages(ToyVariant variant, double lambda_e, double lambda, double lambda_m) {
  require_positive(lambda_e, lambda);
  if (!(lambda_m >= 0.0)) throw Error(ErrorCode::NegativeRate, "lambda_m must be >= 0");
  const double unit = lambda_e / lambda;
  const double lm = lambda_m;
  ToyAges out;
  out.variant = variant;
  switch (variant) {
    case ToyVariant::None:
      out.v1 = 2.0 * unit;
      out.v2 = 2.0 * unit;
      out.v3 = 1.5 * unit;
      break;
    case ToyVariant::Exchange13: {
      const double den = lambda / 2.0 + 1.5 * lm;
      out.v1 = unit * (lambda + 2.5 * lm) / den;
      out.v3 = unit * (0.75 * lambda + 2.5 * lm) / den;
      out.v2 = 2.0 * unit;
      break;
    }
    case ToyVariant::Exchange12: {
      const double common = 5.0 / 3.0 + (2.0 * lambda + 3.0 * lm) / (1.5 * lambda + 2.5 * lm) +
                            lm / (lambda / 2.0 + lm);
      const double shared = 0.75 * lambda + 2.0 * lm;
      out.v2 = unit * (lambda / 2.0 + lm) / shared * common;
      out.v1 = lambda_e / (lambda / 2.0 + lm) + unit * lm / shared * common;
      out.v3 = unit * (4.5 * lambda + 8.0 * lm) / (3.0 * lambda + 5.0 * lm);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FcSingleCoefficients fc_single_coefficients(int n, double lambda, int a) {
  const double nn = n;
  const double aa = a;
  FcSingleCoefficients k;
  k.c = (aa - 1) * lambda / (2 * (nn - 1)) + lambda / 2 + (aa - 1) * (nn - aa - 2) * lambda / (nn - 2) +
        (nn - aa - 2) * lambda;
  k.d = aa * lambda / (2 * (nn - 1)) + aa * (nn - aa - 1) * lambda / (nn - 2) + aa * lambda;
  k.x = k.c + aa * lambda;
  k.y = aa * (nn - aa - 1) * lambda * k.c / (nn - 2) +
        aa * (aa - 1) * (nn - aa - 2) * lambda * lambda / (nn - 2);
  k.z = k.c * k.d - (nn - aa - 2) * aa * lambda * lambda;
  return k;
}

double fc_single_top_age(int n, double lambda_e, double lambda) {
  require_positive(lambda_e, lambda);
  if (n < 3) throw Error(ErrorCode::BadScale, "fc_plus_single needs n >= 3");
  const double nn = n;
  const double full = lambda_e / lambda;
  // Unknowns: [whole block (n-1,0), block minus one plus single (n-2,1)].
  linalg::DenseMatrix a(2);
  a(0, 0) = lambda / 2 + (nn - 1) * lambda;
  a(0, 1) = -(nn - 1) * lambda;
  a(1, 0) = -lambda;
  a(1, 1) = lambda / 2 + (nn - 2) * lambda / (2 * (nn - 1)) + lambda + lambda;
  const std::vector<double> v = linalg::solve_dense(a, {lambda_e, lambda_e + lambda * full});
  return v[0];
}

std::vector<double> fc_single_prefix_products(int n, double lambda) {
  std::vector<double> prefix{1.0};
  for (int j = 1; j <= n - 2; ++j) {
    const FcSingleCoefficients k = fc_single_coefficients(n, lambda, j);
    prefix.push_back(prefix.back() * (k.y / k.z));
  }
  return prefix;
}

double fc_single_bound_recursion(int n, double lambda_e, double lambda) {
  require_positive(lambda_e, lambda);
  if (n < 4) throw Error(ErrorCode::BadScale, "fc_single bound needs n >= 4");
  double sum = 0.0;
  double product = 1.0;
  for (int i = 1; i <= n - 2; ++i) {
    const FcSingleCoefficients k = fc_single_coefficients(n, lambda, i);
    sum += k.x / k.z * product;
    product *= k.y / k.z;
  }
  return lambda_e * sum + product * fc_single_top_age(n, lambda_e, lambda);
}

double fc_single_log_bound(int n, double lambda_e, double lambda) {
  require_positive(lambda_e, lambda);
  if (n < 4) throw Error(ErrorCode::BadScale, "fc_single bound needs n >= 4");
  const double unit = lambda_e / lambda;
  const double constant =
      fc_single_top_age(n, lambda_e, lambda) + 2.5 * std::numbers::egamma * unit + 1.25 * unit;
  return 2.5 * unit * std::log(static_cast<double>(n)) + constant;
}

std::pair<double, double> fc_single_no_mobility_ages(int n, double lambda_e, double lambda) {
  require_positive(lambda_e, lambda);
  if (n < 3) throw Error(ErrorCode::BadScale, "fc_plus_single needs n >= 3");
  const double nn = n;
  const double per_source = lambda / (2 * (nn - 1));
  const double per_gossip = lambda / (nn - 2);
  double v = lambda_e / ((nn - 1) * per_source);  // whole block
  for (int k = n - 2; k >= 1; --k) {
    const double inflow = k * (nn - 1 - k) * per_gossip;
    v = (lambda_e + inflow * v) / (k * per_source + inflow);
  }
  return {v, lambda_e / (lambda / 2)};
}

// ---------------------------------------------------------------------------

DisconnectedCoefficients disconnected_coefficients(int n, double lambda, double lambda_m, int a) {
  const double nn = n;
  const double aa = a;
  const double lm = lambda_m;
  DisconnectedCoefficients k;
  k.b = 2 * aa * lambda / nn + 2 * aa * (nn - 2 * aa) * lm;
  k.c = (2 * aa + 1) * lambda / nn + lambda + 2 * aa * (nn - 2 * (aa + 1)) * lm;
  k.d = 2 * aa * lambda / nn + 2 * lambda + 2 * lm + 2 * (aa - 1) * (nn - 2 * (aa + 1)) * lm;
  k.f_corr = 1 - 2 * aa * (nn - 2 * (aa + 1)) * lm / k.c;
  k.g_corr = 1 - 2 * (aa - 1) * (nn - 2 * (aa + 1)) * lm / k.d;
  const double outer = aa * (nn - 2 * aa) * lm;
  const double full = k.b * k.c * k.d * k.f_corr * k.g_corr;
  k.x = 1 / k.b + 2 * outer / (k.b * k.d * k.g_corr) + 4 * outer * lambda / full;
  k.y = 4 * outer * lambda * lambda / full;
  return k;
}

double disconnected_top_age(int n, double lambda_e, double lambda, double lambda_m) {
  require_positive(lambda_e, lambda);
  if (n < 4 || n % 2 != 0) throw Error(ErrorCode::BadScale, "disconnected_pairs top levels need even n >= 4");
  const double nn = n;
  const double full = lambda_e / lambda;
  const double missing_one = (lambda_e + lambda * full) / ((nn - 1) * lambda / nn + lambda);
  const double source = (nn - 2) * lambda / nn;
  // Unknowns: [complement is a pair, complement splits two pairs].
  linalg::DenseMatrix a(2);
  a(0, 0) = source + 2 * (nn - 2) * lambda_m;
  a(0, 1) = -2 * (nn - 2) * lambda_m;
  a(1, 0) = -2 * lambda_m;
  a(1, 1) = source + 2 * lambda + 2 * lambda_m;
  const std::vector<double> v = linalg::solve_dense(a, {lambda_e, lambda_e + 2 * lambda * missing_one});
  return v[0];
}

namespace {

void require_disconnected_scale(int n, double f_of_n) {
  if (n < 6 || n % 2 != 0) throw Error(ErrorCode::BadScale, "disconnected bound needs even n >= 6");
  if (!(f_of_n > 0.0) || !std::isfinite(f_of_n)) throw Error(ErrorCode::BadScale, "f(n) must be positive");
}

}  // namespace

double disconnected_bound_recursion(int n, double lambda_e, double lambda, double f_of_n) {
  require_positive(lambda_e, lambda);
  require_disconnected_scale(n, f_of_n);
  const double lambda_m = lambda / f_of_n;
  double sum = 0.0;
  double alpha = 1.0;
  for (int i = 1; i <= n / 2 - 2; ++i) {
    const DisconnectedCoefficients k = disconnected_coefficients(n, lambda, lambda_m, i);
    sum += k.x * alpha;
    alpha *= k.y;
  }
  return lambda_e / lambda + lambda_e * sum + disconnected_top_age(n, lambda_e, lambda, lambda_m);
}

double disconnected_scaling_bound(int n, double lambda_e, double lambda, double f_of_n) {
  require_positive(lambda_e, lambda);
  require_disconnected_scale(n, f_of_n);
  const double sqrt_term = std::sqrt(std::numbers::pi) / 2 * std::sqrt(static_cast<double>(n));
  const double c = disconnected_top_age(n, lambda_e, lambda, lambda / f_of_n);
  return lambda_e / lambda * (1 + 1.5 * std::min(f_of_n, sqrt_term)) + c;
}

double disconnected_constant_bound(int n, double lambda_e, double lambda, double k) {
  require_positive(lambda_e, lambda);
  require_disconnected_scale(n, k);
  const double unit = lambda_e / lambda;
  const double c = disconnected_top_age(n, lambda_e, lambda, lambda / k);
  return unit * (1 + 1.5 * k) + c + 1.5 * unit;
}

double disconnected_no_mobility_age(int n, double lambda_e, double lambda) {
  require_positive(lambda_e, lambda);
  if (n < 2 || n % 2 != 0) throw Error(ErrorCode::BadScale, "disconnected_pairs needs even n >= 2");
  const double nn = n;
  const double pair = lambda_e / (2 * lambda / nn);
  return (lambda_e + lambda * pair) / (lambda / nn + lambda);
}

// ---------------------------------------------------------------------------

AgeTable no_mobility_reference(const ValidatedNetwork& net) {
  const NetworkSpec& spec = net.spec();
  const int n = spec.n;
  if (n > kMaxSetPositions) throw Error(ErrorCode::CapExceeded, "reference recursion needs n <= 64");
  constexpr std::size_t kMaxSets = std::size_t{1} << 22;

  std::unordered_map<std::uint64_t, double> memo;
  // Explicit stack: a set is finished once every S + i with lambda_i(S) > 0 is.
  struct Frame {
    PositionSet set;
    bool expanded;
  };
  std::vector<Frame> stack;
  for (Position i = n; i-- > 0;) stack.push_back({PositionSet::single(i), false});
  while (!stack.empty()) {
    Frame& top = stack.back();
    const PositionSet s = top.set;
    if (memo.contains(s.bits())) {
      stack.pop_back();
      continue;
    }
    if (!top.expanded) {
      top.expanded = true;
      for (Position i = 0; i < n; ++i) {
        if (gossip_rate_into(spec, i, s) > 0.0 && !memo.contains(s.with(i).bits())) {
          stack.push_back({s.with(i), false});
        }
      }
      continue;
    }
    double numerator = spec.lambda_e;
    double denominator = source_rate_into(spec, s);
    for (Position i = 0; i < n; ++i) {
      const double rate = gossip_rate_into(spec, i, s);
      if (rate > 0.0) {
        numerator += rate * memo.at(s.with(i).bits());
        denominator += rate;
      }
    }
    if (!(denominator > 0.0)) {
      throw Error(ErrorCode::SingularLevelSystem, "set " + s.to_string() + " receives nothing without mobility");
    }
    memo.emplace(s.bits(), numerator / denominator);
    if (memo.size() > kMaxSets) throw Error(ErrorCode::CapExceeded, "reference recursion visits too many sets");
    stack.pop_back();
  }

  AgeTable table = AgeTable::sparse(n);
  std::vector<std::pair<std::uint64_t, double>> entries(memo.begin(), memo.end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [m, v] : entries) table.set(PositionSet{m}, v);
  table.finalize();
  return table;
}

// ---------------------------------------------------------------------------

double MobilityScale::operator()(int n) const {
  switch (kind) {
    case Kind::Linear: return n;
    case Kind::Sqrt: return std::sqrt(static_cast<double>(n));
    case Kind::Log: return std::log(static_cast<double>(n));
    case Kind::Constant: return constant;
  }
  return n;
}

std::string MobilityScale::to_string() const {
  switch (kind) {
    case Kind::Linear: return "n";
    case Kind::Sqrt: return "sqrt(n)";
    case Kind::Log: return "log(n)";
    case Kind::Constant: return format_double(constant);
  }
  return "n";
}

MobilityScale MobilityScale::parse(std::string_view text) {
  if (text == "n") return {Kind::Linear, 1.0};
  if (text == "sqrt(n)" || text == "sqrt") return {Kind::Sqrt, 1.0};
  if (text == "log(n)" || text == "log") return {Kind::Log, 1.0};
  double k = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(k > 0.0)) {
    throw Error(ErrorCode::ConfigError, "f_of_n must be n, sqrt(n), log(n) or a positive number, got '" +
                                            std::string(text) + "'");
  }
  return {Kind::Constant, k};
}

std::string_view to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::FcSingleExactRecursion: return "fc_single_exact_recursion";
    case BoundKind::FcSingleLogClosedForm: return "fc_single_log_closed_form";
    case BoundKind::DisconnectedRecursion: return "disconnected_recursion";
    case BoundKind::DisconnectedSqrtClosedForm: return "disconnected_sqrt_closed_form";
    case BoundKind::DisconnectedConstantRegime: return "disconnected_constant_regime";
  }
  return "unknown";
}

BoundKind bound_kind_from_string(std::string_view name) {
  for (BoundKind k : {BoundKind::FcSingleExactRecursion, BoundKind::FcSingleLogClosedForm,
                      BoundKind::DisconnectedRecursion, BoundKind::DisconnectedSqrtClosedForm,
                      BoundKind::DisconnectedConstantRegime}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown bound kind '" + std::string(name) + "'");
}

BoundCurve bound_curve(BoundKind kind, const std::vector<int>& n_values, double lambda_e,
                       double lambda, const MobilityScale& scale) {
  BoundCurve curve;
  curve.kind = kind;
  for (int n : n_values) {
    double value = 0.0;
    double f = 0.0;
    switch (kind) {
      case BoundKind::FcSingleExactRecursion: value = fc_single_bound_recursion(n, lambda_e, lambda); break;
      case BoundKind::FcSingleLogClosedForm: value = fc_single_log_bound(n, lambda_e, lambda); break;
      case BoundKind::DisconnectedRecursion:
        f = scale(n);
        value = disconnected_bound_recursion(n, lambda_e, lambda, f);
        break;
      case BoundKind::DisconnectedSqrtClosedForm:
        f = scale(n);
        value = disconnected_scaling_bound(n, lambda_e, lambda, f);
        break;
      case BoundKind::DisconnectedConstantRegime:
        f = scale(n);
        value = disconnected_constant_bound(n, lambda_e, lambda, f);
        break;
    }
    curve.n_values.push_back(n);
    curve.bound_values.push_back(value);
    curve.f_values.push_back(f);
  }
  return curve;
}

void write_bound_curve_csv(std::ostream& out, const BoundCurve& curve) {
  out << "n,bound,kind,f_of_n\n";
  for (std::size_t i = 0; i < curve.n_values.size(); ++i) {
    out << curve.n_values[i] << ',' << format_double(curve.bound_values[i]) << ',' << to_string(curve.kind)
        << ',' << format_double(curve.f_values[i]) << '\n';
  }
}

}  // namespace gossip_age
