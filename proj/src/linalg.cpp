// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#include "gossip_age/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gossip_age/errors.hpp"
#include "gossip_age/simd/kernels.hpp"

namespace gossip_age::linalg {

std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = a.size();
  const simd::Kernels& k = simd::active();

  std::vector<double> row_scale(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) row_scale[r] = std::max(row_scale[r], std::abs(a(r, c)));
    if (row_scale[r] == 0.0) {
      throw Error(ErrorCode::SingularLevelSystem, "row " + std::to_string(r) + " is zero");
    }
  }

  std::vector<double> tmp(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t best = p;
    for (std::size_t r = p + 1; r < n; ++r) {
      if (std::abs(a(r, p)) > std::abs(a(best, p))) best = r;
    }
    if (!(std::abs(a(best, p)) > 1e-13 * row_scale[best])) {
      throw Error(ErrorCode::SingularLevelSystem, "pivot " + std::to_string(p) + " vanishes");
    }
    if (best != p) {
      std::swap_ranges(a.row(p), a.row(p) + n, a.row(best));
      std::swap(b[p], b[best]);
      std::swap(row_scale[p], row_scale[best]);
    }
    const double pivot = a(p, p);
    const double* prow = a.row(p) + p;
    for (std::size_t r = p + 1; r < n; ++r) {
      const double lead = a(r, p);
      if (lead == 0.0) continue;
      const double factor = -lead / pivot;
      k.axpy(factor, prow, a.row(r) + p, n - p);
      b[r] += factor * b[p];
    }
  }

  for (std::size_t p = n; p-- > 0;) {
    double acc = b[p];
    for (std::size_t c = p + 1; c < n; ++c) acc -= a(p, c) * b[c];
    b[p] = acc / a(p, p);
  }
  return b;
}

DenseMatrix CoupledSystem::to_dense() const {
  DenseMatrix m(size());
  for (std::size_t r = 0; r < size(); ++r) {
    m(r, r) += diag[r];
    for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) m(r, col[k]) -= coupling[k];
  }
  return m;
}

double CoupledSystem::max_residual(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < size(); ++r) {
    double lhs = diag[r] * x[r];
    for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) lhs -= coupling[k] * x[col[k]];
    worst = std::max(worst, std::abs(lhs - rhs[r]));
  }
  return worst;
}

SweepResult gauss_seidel(const CoupledSystem& system, const SweepOptions& options) {
  const std::size_t n = system.size();
  SweepResult out;
  out.x.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!(system.diag[r] > 0.0)) {
      throw Error(ErrorCode::SingularLevelSystem, "row " + std::to_string(r) + " has no diagonal weight");
    }
    out.x[r] = system.rhs[r] / system.diag[r];
  }
  const double w = options.relaxation;
  out.residual = system.max_residual(out.x);
  while (out.residual > options.tolerance && out.sweeps < options.max_sweeps) {
    for (std::size_t r = 0; r < n; ++r) {
      double acc = system.rhs[r];
      for (std::size_t k = system.row_start[r]; k < system.row_start[r + 1]; ++k) {
        acc += system.coupling[k] * out.x[system.col[k]];
      }
      out.x[r] = (1.0 - w) * out.x[r] + w * (acc / system.diag[r]);
    }
    ++out.sweeps;
    out.residual = system.max_residual(out.x);
  }
  out.converged = out.residual <= options.tolerance;
  return out;
}

}  // namespace gossip_age::linalg
