// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "gossip_age/network.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gossip_age/errors.hpp"

namespace gossip_age {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::AsymmetricMobility: return "AsymmetricMobility";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::ZeroSourceTotal: return "ZeroSourceTotal";
    case ErrorCode::BadScale: return "BadScale";
    case ErrorCode::SingularLevelSystem: return "SingularLevelSystem";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateHorizon: return "DegenerateHorizon";
    case ErrorCode::RateOverflow: return "RateOverflow";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::string PositionSet::to_string() const {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (Position i : *this) {
    if (!first) out << ',';
    out << i + 1;
    first = false;
  }
  out << '}';
  return out.str();
}

double NetworkSpec::total_source_rate() const {
  return std::accumulate(source_rates.begin(), source_rates.end(), 0.0);
}

namespace {

void check_rate(double r, const char* what) {
  if (!std::isfinite(r) || r < 0.0) {
    throw Error(ErrorCode::NegativeRate, std::string(what) + " must be finite and >= 0");
  }
}

// Sets the last entry so that a left-to-right sum of `rates` equals `total`
// bit for bit.
void close_sum(std::vector<double>& rates, double total) {
  double partial = 0.0;
  for (std::size_t j = 0; j + 1 < rates.size(); ++j) partial += rates[j];
  rates.back() = total - partial;
}

}  // namespace

ValidatedNetwork validate(NetworkSpec spec) {
  const int n = spec.n;
  if (n < 1 || n > 1 << 20) throw Error(ErrorCode::BadScale, "n must be positive");
  if (static_cast<int>(spec.source_rates.size()) != n || spec.gossip_rates.size() != n ||
      spec.mobility_rates.size() != n) {
    throw Error(ErrorCode::BadScale, "rate structures do not match n");
  }
  if (!std::isfinite(spec.lambda_e) || spec.lambda_e <= 0.0) {
    throw Error(ErrorCode::NegativeRate, "lambda_e must be finite and > 0");
  }
  for (double r : spec.source_rates) check_rate(r, "source rate");
  for (Position i = 0; i < n; ++i) {
    for (Position j = 0; j < n; ++j) {
      check_rate(spec.gossip_rates(i, j), "gossip rate");
      check_rate(spec.mobility_rates(i, j), "mobility rate");
    }
  }
  for (Position i = 0; i < n; ++i) {
    if (spec.gossip_rates(i, i) != 0.0 || spec.mobility_rates(i, i) != 0.0) {
      throw Error(ErrorCode::NonzeroDiagonal, "position " + std::to_string(i + 1));
    }
    for (Position j = i + 1; j < n; ++j) {
      if (spec.mobility_rates(i, j) != spec.mobility_rates(j, i)) {
        throw Error(ErrorCode::AsymmetricMobility,
                    "positions " + std::to_string(i + 1) + " and " + std::to_string(j + 1));
      }
    }
  }
  if (!(spec.total_source_rate() > 0.0)) {
    throw Error(ErrorCode::ZeroSourceTotal, "no position receives from the source");
  }
  return ValidatedNetwork(std::move(spec));
}

double source_rate_into(const NetworkSpec& spec, PositionSet s) {
  double total = 0.0;
  for (Position j : s) total += spec.source_rates[j];
  return total;
}

double gossip_rate_into(const NetworkSpec& spec, Position i, PositionSet s) {
  if (s.contains(i)) return 0.0;
  double total = 0.0;
  for (Position j : s) total += spec.gossip_rates(i, j);
  return total;
}

PositionSet neighbors_of(const NetworkSpec& spec, PositionSet s) {
  PositionSet out;
  for (Position i = 0; i < spec.n; ++i) {
    if (gossip_rate_into(spec, i, s) > 0.0) out = out.with(i);
  }
  return out;
}

std::vector<MobilityExit> mobility_exits(const NetworkSpec& spec, PositionSet s) {
  std::vector<MobilityExit> exits;
  for (Position i : s) {
    for (Position j = 0; j < spec.n; ++j) {
      if (s.contains(j)) continue;
      const double rate = spec.mobility_rates(i, j);
      if (rate > 0.0) exits.push_back({i, j, rate});
    }
  }
  return exits;
}

double mobility_exit_total(const NetworkSpec& spec, PositionSet s) {
  double total = 0.0;
  for (Position i : s) {
    for (Position j = 0; j < spec.n; ++j) {
      if (!s.contains(j)) total += spec.mobility_rates(i, j);
    }
  }
  return total;
}

namespace {

// Toy network: source feeds 1 and 3; 1 gossips to 2 and 3, 3 gossips to 2.
NetworkSpec toy_base(double lambda_e, double lambda) {
  if (!(lambda_e > 0.0) || !(lambda > 0.0)) {
    throw Error(ErrorCode::NegativeRate, "toy rates must be positive");
  }
  NetworkSpec spec(3);
  spec.lambda_e = lambda_e;
  spec.source_rates = {lambda / 2, 0.0, lambda / 2};
  spec.gossip_rates(0, 1) = lambda / 2;
  spec.gossip_rates(0, 2) = lambda / 2;
  spec.gossip_rates(2, 1) = lambda;
  return spec;
}

void require_mobility_rate(double lambda_m) {
  if (!std::isfinite(lambda_m) || lambda_m < 0.0) {
    throw Error(ErrorCode::NegativeRate, "lambda_m must be finite and >= 0");
  }
}

}  // namespace

NetworkSpec toy_variant_13(double lambda_e, double lambda, double lambda_m) {
  require_mobility_rate(lambda_m);
  NetworkSpec spec = toy_base(lambda_e, lambda);
  spec.set_mobility(0, 2, lambda_m);
  return spec;
}

NetworkSpec toy_variant_12(double lambda_e, double lambda, double lambda_m) {
  require_mobility_rate(lambda_m);
  NetworkSpec spec = toy_base(lambda_e, lambda);
  spec.set_mobility(0, 1, lambda_m);
  return spec;
}

NetworkSpec fully_connected(int n, double lambda_e, double lambda, bool full_mobility,
                            double lambda_m) {
  if (n < 2) throw Error(ErrorCode::BadScale, "fully_connected needs n >= 2");
  require_mobility_rate(lambda_m);
  NetworkSpec spec(n);
  spec.lambda_e = lambda_e;
  for (Position i = 0; i < n; ++i) {
    spec.source_rates[i] = lambda / n;
    for (Position j = 0; j < n; ++j) {
      if (i == j) continue;
      spec.gossip_rates(i, j) = lambda / (n - 1);
      if (full_mobility) spec.mobility_rates(i, j) = lambda_m;
    }
  }
  close_sum(spec.source_rates, lambda);
  return spec;
}

NetworkSpec fc_plus_single(int n, double lambda_e, double lambda) {
  if (n < 3) throw Error(ErrorCode::BadScale, "fc_plus_single needs n >= 3");
  NetworkSpec spec(n);
  spec.lambda_e = lambda_e;
  const Position single = n - 1;
  for (Position i = 0; i < single; ++i) {
    spec.source_rates[i] = lambda / (2.0 * (n - 1));
    for (Position j = 0; j < single; ++j) {
      if (i != j) spec.gossip_rates(i, j) = lambda / (n - 2);
    }
    spec.set_mobility(i, single, lambda);
  }
  spec.source_rates[single] = lambda / 2;
  close_sum(spec.source_rates, lambda);
  return spec;
}

NetworkSpec disconnected_pairs(int n, double lambda_e, double lambda, double lambda_m) {
  if (n < 2 || n % 2 != 0) throw Error(ErrorCode::BadScale, "disconnected_pairs needs even n >= 2");
  require_mobility_rate(lambda_m);
  NetworkSpec spec(n);
  spec.lambda_e = lambda_e;
  for (Position i = 0; i < n; ++i) {
    spec.source_rates[i] = lambda / n;
    for (Position j = 0; j < n; ++j) {
      if (i != j) spec.mobility_rates(i, j) = lambda_m;
    }
  }
  for (Position i = 0; i < n; i += 2) {
    spec.gossip_rates(i, i + 1) = lambda;
    spec.gossip_rates(i + 1, i) = lambda;
  }
  close_sum(spec.source_rates, lambda);
  return spec;
}

NetworkSpec permuted(const NetworkSpec& spec, const std::vector<Position>& perm) {
  if (static_cast<int>(perm.size()) != spec.n) throw Error(ErrorCode::BadScale, "permutation size");
  NetworkSpec out(spec.n);
  out.lambda_e = spec.lambda_e;
  for (Position i = 0; i < spec.n; ++i) {
    out.source_rates[perm[i]] = spec.source_rates[i];
    for (Position j = 0; j < spec.n; ++j) {
      out.gossip_rates(perm[i], perm[j]) = spec.gossip_rates(i, j);
      out.mobility_rates(perm[i], perm[j]) = spec.mobility_rates(i, j);
    }
  }
  return out;
}

int gossip_components(const NetworkSpec& spec) {
  std::vector<int> parent(spec.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = spec.n;
  for (Position i = 0; i < spec.n; ++i) {
    for (Position j = 0; j < spec.n; ++j) {
      if (spec.gossip_rates(i, j) <= 0.0) continue;
      const int a = find(i);
      const int b = find(j);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
  }
  return components;
}

namespace {

nlohmann::json matrix_to_json(const RateMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Position i = 0; i < m.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Position j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RateMatrix matrix_from_json(const nlohmann::json& j, int n, const char* field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw Error(ErrorCode::ConfigError, std::string(field) + ": expected " + std::to_string(n) + " rows");
  }
  RateMatrix m(n);
  for (Position r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw Error(ErrorCode::ConfigError,
                  std::string(field) + "[" + std::to_string(r) + "]: expected " + std::to_string(n) + " columns");
    }
    for (Position c = 0; c < n; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

}  // namespace

void to_json(nlohmann::json& j, const NetworkSpec& spec) {
  j = nlohmann::json{{"n", spec.n},
                     {"lambda_e", spec.lambda_e},
                     {"source_rates", spec.source_rates},
                     {"gossip_rates", matrix_to_json(spec.gossip_rates)},
                     {"mobility_rates", matrix_to_json(spec.mobility_rates)}};
}

void from_json(const nlohmann::json& j, NetworkSpec& spec) {
  for (const char* key : {"n", "lambda_e", "source_rates", "gossip_rates", "mobility_rates"}) {
    if (!j.contains(key)) throw Error(ErrorCode::ConfigError, std::string("network: missing field '") + key + "'");
  }
  const int n = j.at("n").get<int>();
  if (n < 1) throw Error(ErrorCode::ConfigError, "network.n must be positive");
  NetworkSpec out(n);
  out.lambda_e = j.at("lambda_e").get<double>();
  out.source_rates = j.at("source_rates").get<std::vector<double>>();
  if (static_cast<int>(out.source_rates.size()) != n) {
    throw Error(ErrorCode::ConfigError, "source_rates: expected " + std::to_string(n) + " entries");
  }
  out.gossip_rates = matrix_from_json(j.at("gossip_rates"), n, "gossip_rates");
  out.mobility_rates = matrix_from_json(j.at("mobility_rates"), n, "mobility_rates");
  spec = std::move(out);
}

}  // namespace gossip_age
