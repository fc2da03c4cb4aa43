// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "gossip_age/shs_solver.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gossip_age/errors.hpp"
#include "gossip_age/linalg.hpp"
#include "numeric_format.hpp"

namespace gossip_age {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

const std::array<std::array<std::uint64_t, 65>, 65>& binomials() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 65>, 65> c{};
    for (int n = 0; n <= 64; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
    }
    return c;
  }();
  return table;
}

}  // namespace

AgeTable AgeTable::dense(int n) {
  if (n > kExactSolverCap) throw Error(ErrorCode::CapExceeded, "dense table for n=" + std::to_string(n));
  AgeTable t;
  t.n_ = n;
  t.dense_mode_ = true;
  t.dense_.assign(std::size_t{1} << n, kMissing);
  return t;
}

AgeTable AgeTable::sparse(int n) {
  AgeTable t;
  t.n_ = n;
  t.dense_mode_ = false;
  return t;
}

std::size_t AgeTable::size() const {
  if (!dense_mode_) return sparse_.size();
  return static_cast<std::size_t>(
      std::count_if(dense_.begin(), dense_.end(), [](double v) { return !std::isnan(v); }));
}

std::optional<double> AgeTable::find(PositionSet s) const {
  if (dense_mode_) {
    if (s.bits() >= dense_.size() || std::isnan(dense_[s.bits()])) return std::nullopt;
    return dense_[s.bits()];
  }
  auto it = std::lower_bound(sparse_.begin(), sparse_.end(), s.bits(),
                             [](const auto& e, std::uint64_t key) { return e.first < key; });
  if (it == sparse_.end() || it->first != s.bits()) return std::nullopt;
  return it->second;
}

double AgeTable::at(PositionSet s) const {
  if (auto v = find(s)) return *v;
  throw std::out_of_range("no age for set " + s.to_string());
}

void AgeTable::for_each(const std::function<void(PositionSet, double)>& visit) const {
  if (dense_mode_) {
    for (std::uint64_t m = 1; m < dense_.size(); ++m) {
      if (!std::isnan(dense_[m])) visit(PositionSet{m}, dense_[m]);
    }
    return;
  }
  for (const auto& [m, v] : sparse_) visit(PositionSet{m}, v);
}

void AgeTable::set(PositionSet s, double v) {
  if (dense_mode_) {
    dense_[s.bits()] = v;
    return;
  }
  auto it = std::lower_bound(sparse_.begin(), sparse_.end(), s.bits(),
                             [](const auto& e, std::uint64_t key) { return e.first < key; });
  if (it != sparse_.end() && it->first == s.bits()) {
    it->second = v;
  } else {
    sparse_.insert(it, {s.bits(), v});
  }
}

void AgeTable::finalize() {
  position_ages_.assign(static_cast<std::size_t>(n_), kMissing);
  double total = 0.0;
  for (Position i = 0; i < n_; ++i) {
    position_ages_[i] = at(PositionSet::single(i));
    total += position_ages_[i];
  }
  mean_age_ = n_ > 0 ? total / n_ : 0.0;
}

std::vector<PositionSet> sets_of_size(int n, int k) {
  std::vector<PositionSet> out;
  if (k < 1 || k > n) return out;
  out.reserve(binomials()[n][k]);
  const std::uint64_t limit = n >= 64 ? 0 : std::uint64_t{1} << n;
  std::uint64_t m = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  while (true) {
    out.emplace_back(m);
    // Gosper's hack: next larger word with the same popcount.
    const std::uint64_t low = m & (~m + 1);
    const std::uint64_t ripple = m + low;
    if (ripple == 0) break;
    m = (((ripple ^ m) >> 2) / low) | ripple;
    if (limit != 0 && m >= limit) break;
  }
  return out;
}

std::size_t level_rank(PositionSet s) {
  std::size_t rank = 0;
  int t = 1;
  for (Position c : s) rank += binomials()[c][t++];
  return rank;
}

namespace {

// Rows with no source or gossip input only sit on the diagonal-dominance
// boundary. The level system is nonsingular iff every such row reaches a
// strictly dominant row through its couplings.
void require_nonsingular(const linalg::CoupledSystem& sys, const std::vector<bool>& strict,
                         const std::vector<PositionSet>& sets) {
  const std::size_t m = sys.size();
  // Reverse reachability from strict rows: row r is good if it couples to a good row.
  std::vector<std::vector<std::uint32_t>> incoming(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = sys.row_start[r]; k < sys.row_start[r + 1]; ++k) {
      incoming[sys.col[k]].push_back(static_cast<std::uint32_t>(r));
    }
  }
  std::vector<bool> good(strict);
  std::vector<std::uint32_t> frontier;
  for (std::size_t r = 0; r < m; ++r) {
    if (good[r]) frontier.push_back(static_cast<std::uint32_t>(r));
  }
  while (!frontier.empty()) {
    const std::uint32_t c = frontier.back();
    frontier.pop_back();
    for (std::uint32_t r : incoming[c]) {
      if (!good[r]) {
        good[r] = true;
        frontier.push_back(r);
      }
    }
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (!good[r]) {
      throw Error(ErrorCode::SingularLevelSystem,
                  "set " + sets[r].to_string() + " has no path to source or gossip input");
    }
  }
}

}  // namespace

LevelSolution solve_level(const ValidatedNetwork& net, int k, const AgeTable& upper,
                          const SolverOptions& options) {
  const NetworkSpec& spec = net.spec();
  const int n = spec.n;
  if (n > kExactSolverCap) {
    throw Error(ErrorCode::CapExceeded, "n=" + std::to_string(n) + " exceeds the exact solver cap");
  }
  if (k < 1 || k > n) throw Error(ErrorCode::BadScale, "level " + std::to_string(k));

  LevelSolution out;
  out.cardinality = k;
  out.sets = sets_of_size(n, k);
  const std::size_t m = out.sets.size();

  linalg::CoupledSystem sys;
  sys.diag.reserve(m);
  sys.rhs.reserve(m);
  std::vector<bool> strict(m, false);
  for (std::size_t r = 0; r < m; ++r) {
    const PositionSet s = out.sets[r];
    const double inflow_source = source_rate_into(spec, s);
    double inflow_gossip = 0.0;
    double rhs = spec.lambda_e;
    if (k < n) {
      for (Position i = 0; i < n; ++i) {
        const double rate = gossip_rate_into(spec, i, s);
        if (rate > 0.0) {
          inflow_gossip += rate;
          rhs += rate * upper.at(s.with(i));
        }
      }
    }
    double exit_total = 0.0;
    sys.add_row(0.0, rhs);
    for (const MobilityExit& e : mobility_exits(spec, s)) {
      exit_total += e.rate;
      sys.add_coupling(static_cast<std::uint32_t>(level_rank(s.swapped(e.leaving, e.entering))), e.rate);
    }
    const double diag = inflow_source + inflow_gossip + exit_total;
    sys.diag.back() = diag;
    strict[r] = inflow_source + inflow_gossip > 0.0;
    assert(diag >= exit_total);  // weak diagonal dominance
    if (!(diag > 0.0)) {
      throw Error(ErrorCode::SingularLevelSystem, "set " + s.to_string() + " has zero total exit weight");
    }
  }
  require_nonsingular(sys, strict, out.sets);

  if (m <= options.dense_limit) {
    out.ages = linalg::solve_dense(sys.to_dense(), sys.rhs);
    out.residual = sys.max_residual(out.ages);
    return out;
  }

  linalg::SweepOptions sweep;
  sweep.tolerance = options.tolerance_factor * spec.lambda_e;
  sweep.max_sweeps = options.max_sweeps;
  sweep.relaxation = options.relaxation;
  linalg::SweepResult result = linalg::gauss_seidel(sys, sweep);
  out.iterative = true;
  out.sweeps = result.sweeps;
  out.residual = result.residual;
  if (!result.converged) {
    throw Error(ErrorCode::NoConvergence, "level " + std::to_string(k) + " residual " +
                                              format_double(result.residual) + " after " +
                                              std::to_string(result.sweeps) + " sweeps");
  }
  out.ages = std::move(result.x);
  return out;
}

AgeTable solve_all(const ValidatedNetwork& net, const SolverOptions& options) {
  const int n = net.n();
  if (n > kExactSolverCap) {
    throw Error(ErrorCode::CapExceeded, "n=" + std::to_string(n) + " exceeds the exact solver cap");
  }
  AgeTable table = AgeTable::dense(n);
  for (int k = n; k >= 1; --k) {
    LevelSolution level = solve_level(net, k, table, options);
    for (std::size_t r = 0; r < level.sets.size(); ++r) table.set(level.sets[r], level.ages[r]);
  }
  table.finalize();
  return table;
}

double mean_node_age(const AgeTable& table) {
  const auto& ages = table.position_ages();
  if (ages.empty()) return 0.0;
  double total = 0.0;
  for (double v : ages) total += v;
  return total / static_cast<double>(ages.size());
}

void write_age_table_csv(std::ostream& out, const AgeTable& table) {
  out << "set_bitmask,set_members,cardinality,v_S\n";
  table.for_each([&](PositionSet s, double v) {
    std::string members;
    for (Position i : s) {
      if (!members.empty()) members += ';';
      members += std::to_string(i + 1);
    }
    out << s.bits() << ',' << members << ',' << s.size() << ',' << format_double(v) << '\n';
  });
}

void write_position_ages_csv(std::ostream& out, const AgeTable& table) {
  out << "position,v_i\n";
  const auto& ages = table.position_ages();
  for (std::size_t i = 0; i < ages.size(); ++i) out << i + 1 << ',' << format_double(ages[i]) << '\n';
}

}  // namespace gossip_age
