#pragma once

#include <string>
#include <utility>
#include <vector>

#include "apcloud/core.hpp"

namespace apc {

// Row-compressed sparse matrix with attached right-hand side.
struct SparseSystem {
  int n = 0;
  std::vector<int> row_ptr;  // size n+1
  std::vector<int> col;      // strictly increasing within each row
  std::vector<double> val;   // no explicit zeros
  std::vector<double> rhs;

  std::vector<double> apply(const std::vector<double>& x) const;
  void dump_coordinate(const std::string& path) const;  // "row col value" lines
};

// One row under assembly: (column, coefficient) pairs, duplicates summed.
using SparseRow = std::vector<std::pair<int, double>>;

SparseSystem assemble(const std::vector<std::pair<int, SparseRow>>& rows, int n);

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
  std::string method;  // "bicgstab" or "gmres"
};

// Diagonally preconditioned BiCGStab with a restarted GMRES fallback.
// Returns x with ||Ax - b|| / ||b|| <= tol or throws NonConvergenceError.
std::vector<double> krylov_solve(const SparseSystem& system, const std::vector<double>& b,
                                 double tol, int max_iter, SolveReport* report = nullptr);

}  // namespace apc
