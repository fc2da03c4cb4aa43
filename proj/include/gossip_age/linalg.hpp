// Copyright 2026 The gossip-age Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gossip_age::linalg {

/// Square row-major matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double* row(std::size_t r) { return data_.data() + r * n_; }
  const double* row(std::size_t r) const { return data_.data() + r * n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Gaussian elimination with partial pivoting. Throws
/// Error(SingularLevelSystem) when a pivot vanishes relative to its row.
std::vector<double> solve_dense(DenseMatrix a, std::vector<double> b);

/// Rows of the form  diag[i] * x[i] - sum_k coupling[k] * x[col[k]] = rhs[i],
/// with row i's couplings in [row_start[i], row_start[i+1]).
struct CoupledSystem {
  std::vector<double> diag;
  std::vector<double> rhs;
  std::vector<std::size_t> row_start{0};
  std::vector<std::uint32_t> col;
  std::vector<double> coupling;

  std::size_t size() const { return diag.size(); }
  void add_row(double d, double r) {
    diag.push_back(d);
    rhs.push_back(r);
    row_start.push_back(col.size());
  }
  /// Appends a coupling to the most recently added row.
  void add_coupling(std::uint32_t c, double w) {
    col.push_back(c);
    coupling.push_back(w);
    ++row_start.back();
  }

  DenseMatrix to_dense() const;
  double max_residual(const std::vector<double>& x) const;
};

struct SweepOptions {
  double tolerance = 1e-12;         // absolute, on the max row residual
  std::size_t max_sweeps = 1000000;
  double relaxation = 1.0;          // 1 = plain Gauss-Seidel
};

struct SweepResult {
  std::vector<double> x;
  std::size_t sweeps = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Relaxed Gauss-Seidel sweeps from the Jacobi guess rhs/diag.
SweepResult gauss_seidel(const CoupledSystem& system, const SweepOptions& options);

}  // namespace gossip_age::linalg
