#pragma once

// Dense two-phase primal simplex for
//
//   maximize c^T x  subject to  A x = b,  x >= 0.
//
// Rows are sign-normalized so b >= 0, equilibrated to unit infinity norm and
// screened for linear dependence (tolerance 1e-10) before phase 1. Pricing is
// Dantzig; after 5 (rows + cols) consecutive non-improving pivots the solver
// switches to Bland's rule for the rest of the run. The solver is fully
// deterministic: identical inputs give identical pivot sequences.

#include <cstddef>
#include <vector>

#include "pdthresh/linalg.hpp"

namespace pdthresh {

struct LinearProgram {
  std::vector<double> objective;  // c
  Matrix eq_matrix;               // A, one row per constraint
  std::vector<double> eq_rhs;     // b

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return eq_rhs.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus s) noexcept;

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  long iterations = 0;
  std::vector<std::size_t> basis;  // basic structural columns at termination
  std::vector<double> duals;       // one per original row; 0 for dropped rows
  std::size_t rows_dropped = 0;
  bool used_bland = false;
};

/// Throws InvalidArgument on inconsistent dimensions or non-finite data and
/// NumericError when the 10^6 iteration cap is exceeded.
LpSolution solve(const LinearProgram& lp);

// Dual quantities are relative to the size of the terms that cancel in them:
// near-dependent constraint rows produce duals of order 1e13 whose absolute
// rounding error says nothing about optimality.
struct LpResidualReport {
  double primal_residual = 0.0;     // ||A x - b||_inf
  double nonnegativity = 0.0;       // max(0, -min_j x_j)
  double dual_infeasibility = 0.0;  // max_j (c_j - a_j^T y) / (1 + |c_j| + sum_i |a_ij y_i|), floored at 0
  double duality_gap = 0.0;         // |c^T x - b^T y| / (1 + sum_i |b_i y_i|)

  bool within(double tol = 1e-7) const noexcept {
    return primal_residual <= tol && nonnegativity <= tol && dual_infeasibility <= tol &&
           duality_gap <= tol;
  }
};

/// Recomputes feasibility and optimality residuals of an optimal solution.
/// Throws InvalidArgument if sol is not optimal.
LpResidualReport verify(const LinearProgram& lp, const LpSolution& sol);

}  // namespace pdthresh
