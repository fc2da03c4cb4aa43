// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "gossip_age/network.hpp"

namespace gossip_age {

/// Largest n the exact solver accepts.
inline constexpr int kExactSolverCap = 24;

/// Limiting average version ages v_S of position sets.
///
/// A table is either dense (every nonempty subset, indexed by bitmask) or
/// sparse (only the sets some recursion visited). Immutable once built.
class AgeTable {
 public:
  static AgeTable dense(int n);
  static AgeTable sparse(int n);

  int n() const { return n_; }
  bool is_dense() const { return dense_mode_; }
  std::size_t size() const;

  std::optional<double> find(PositionSet s) const;
  /// Throws std::out_of_range when S was not solved.
  double at(PositionSet s) const;

  /// v_{{i}} for each position.
  const std::vector<double>& position_ages() const { return position_ages_; }
  double mean_age() const { return mean_age_; }

  /// Visits solved sets in increasing bitmask order.
  void for_each(const std::function<void(PositionSet, double)>& visit) const;

  // Construction (used by the solvers).
  void set(PositionSet s, double v);
  void finalize();

 private:
  int n_ = 0;
  bool dense_mode_ = true;
  std::vector<double> dense_;                               // index = bitmask
  std::vector<std::pair<std::uint64_t, double>> sparse_;    // kept sorted
  std::vector<double> position_ages_;
  double mean_age_ = 0.0;
};

struct SolverOptions {
  std::size_t dense_limit = 4096;     // direct solve up to this many sets per level
  double tolerance_factor = 1e-12;    // iterative stop: max residual <= factor * lambda_e
  std::size_t max_sweeps = 1000000;
  double relaxation = 1.0;
};

struct LevelSolution {
  int cardinality = 0;
  std::vector<PositionSet> sets;   // bitmask order
  std::vector<double> ages;
  bool iterative = false;
  std::size_t sweeps = 0;
  double residual = 0.0;
};

/// Solves the simultaneous equations for every set of size k, given the ages
/// of all sets of size k + 1 in `upper` (ignored when k == n).
LevelSolution solve_level(const ValidatedNetwork& net, int k, const AgeTable& upper,
                          const SolverOptions& options = {});

/// Every v_S, descending from the full set to the singletons.
AgeTable solve_all(const ValidatedNetwork& net, const SolverOptions& options = {});

/// Average of the singleton ages; equal to the average age of a node.
double mean_node_age(const AgeTable& table);

/// Sets of size k in increasing bitmask order.
std::vector<PositionSet> sets_of_size(int n, int k);

/// Index of S among the sets of its size in bitmask order.
std::size_t level_rank(PositionSet s);

/// CSV with header set_bitmask,set_members,cardinality,v_S.
void write_age_table_csv(std::ostream& out, const AgeTable& table);
/// CSV with header position,v_i.
void write_position_ages_csv(std::ostream& out, const AgeTable& table);

}  // namespace gossip_age
