// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace gossip_age {

/// Positions are 0-based in code and 1-based in every file or CLI output.
using Position = int;

/// Widest network a PositionSet can index.
inline constexpr int kMaxSetPositions = 64;

/// A subset of positions stored as a bitmask; bit i is position i.
class PositionSet {
 public:
  constexpr PositionSet() = default;
  constexpr explicit PositionSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr PositionSet single(Position i) { return PositionSet{std::uint64_t{1} << i}; }
  static constexpr PositionSet full(int n) {
    return PositionSet{n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1};
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(Position i) const { return (bits_ >> i) & 1U; }
  constexpr bool subset_of(PositionSet other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr PositionSet with(Position i) const { return PositionSet{bits_ | (std::uint64_t{1} << i)}; }
  constexpr PositionSet without(Position i) const { return PositionSet{bits_ & ~(std::uint64_t{1} << i)}; }
  /// The set reached when the node at `leaving` (in the set) trades places
  /// with the node at `entering` (outside it).
  constexpr PositionSet swapped(Position leaving, Position entering) const {
    return without(leaving).with(entering);
  }

  class Iterator {
   public:
    using value_type = Position;
    using difference_type = std::ptrdiff_t;
    constexpr Iterator() = default;
    constexpr explicit Iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr Position operator*() const { return std::countr_zero(rest_); }
    constexpr Iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr Iterator operator++(int) {
      Iterator old = *this;
      ++*this;
      return old;
    }
    constexpr bool operator==(const Iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr Iterator begin() const { return Iterator{bits_}; }
  constexpr Iterator end() const { return Iterator{0}; }

  constexpr auto operator<=>(const PositionSet&) const = default;

  /// Members as 1-based labels, e.g. "{1,3}".
  std::string to_string() const;

 private:
  std::uint64_t bits_ = 0;
};

/// Dense n x n row-major matrix of rates.
class RateMatrix {
 public:
  RateMatrix() = default;
  explicit RateMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double operator()(Position i, Position j) const { return data_[index(i, j)]; }
  double& operator()(Position i, Position j) { return data_[index(i, j)]; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const RateMatrix&) const = default;

 private:
  std::size_t index(Position i, Position j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  std::vector<double> data_;
};

/// Full parameterization of one gossip network.
struct NetworkSpec {
  int n = 0;
  double lambda_e = 1.0;
  std::vector<double> source_rates;  // lambda_0j
  RateMatrix gossip_rates;           // lambda_ij, flow i -> j
  RateMatrix mobility_rates;         // lambda^m_ij, symmetric

  explicit NetworkSpec(int positions = 0)
      : n(positions), source_rates(static_cast<std::size_t>(positions), 0.0),
        gossip_rates(positions), mobility_rates(positions) {}

  void set_mobility(Position i, Position j, double rate) {
    mobility_rates(i, j) = rate;
    mobility_rates(j, i) = rate;
  }

  double total_source_rate() const;

  bool operator==(const NetworkSpec&) const = default;
};

/// A NetworkSpec that passed validate(). Immutable.
class ValidatedNetwork {
 public:
  const NetworkSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  double lambda_e() const { return spec_.lambda_e; }

 private:
  explicit ValidatedNetwork(NetworkSpec spec) : spec_(std::move(spec)) {}
  friend ValidatedNetwork validate(NetworkSpec spec);

  NetworkSpec spec_;
};

/// Checks rates are finite and nonnegative, diagonals are zero, mobility is
/// symmetric and the source feeds at least one position. Throws Error.
ValidatedNetwork validate(NetworkSpec spec);

/// lambda_0(S).
double source_rate_into(const NetworkSpec& spec, PositionSet s);

/// lambda_i(S); zero when i is a member of S.
double gossip_rate_into(const NetworkSpec& spec, Position i, PositionSet s);

/// N(S): positions outside S with positive gossip into S.
PositionSet neighbors_of(const NetworkSpec& spec, PositionSet s);

struct MobilityExit {
  Position leaving;   // member of S
  Position entering;  // outside S
  double rate;

  bool operator==(const MobilityExit&) const = default;
};

/// Every swap that moves S to S u {entering} \ {leaving}, ordered by
/// (leaving, entering).
std::vector<MobilityExit> mobility_exits(const NetworkSpec& spec, PositionSet s);

/// Sum of all mobility exit rates of S.
double mobility_exit_total(const NetworkSpec& spec, PositionSet s);

// Scenario builders. All of them make the source rates sum to lambda exactly.

NetworkSpec toy_variant_13(double lambda_e, double lambda, double lambda_m);
NetworkSpec toy_variant_12(double lambda_e, double lambda, double lambda_m);
NetworkSpec fully_connected(int n, double lambda_e, double lambda, bool full_mobility,
                            double lambda_m);
NetworkSpec fc_plus_single(int n, double lambda_e, double lambda);
NetworkSpec disconnected_pairs(int n, double lambda_e, double lambda, double lambda_m);

/// Relabels positions: position i of the input becomes perm[i].
NetworkSpec permuted(const NetworkSpec& spec, const std::vector<Position>& perm);

/// Number of weakly connected components of the gossip graph.
int gossip_components(const NetworkSpec& spec);

void to_json(nlohmann::json& j, const NetworkSpec& spec);
void from_json(const nlohmann::json& j, NetworkSpec& spec);

}  // namespace gossip_age
