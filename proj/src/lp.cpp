#include "pdthresh/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "pdthresh/errors.hpp"

namespace pdthresh {

const char* to_string(LpStatus s) noexcept {
  switch (s) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kOptimalityTol = 1e-9;
constexpr double kDependenceTol = 1e-10;
constexpr long kIterationCap = 1'000'000;

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Solves M z = r (or M^T z = r) by Gaussian elimination with partial pivoting.
std::optional<std::vector<double>> dense_solve(Matrix m, std::vector<double> r, bool transpose) {
  const std::size_t n = m.rows();
  if (transpose) {
    Matrix t(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t(i, j) = m(j, i);
    m = std::move(t);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
    if (m(piv, col) == 0.0) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      std::swap(r[piv], r[col]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = m(i, col) / m(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
      r[i] -= f * r[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = r[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * r[j];
    r[i] = s / m(i, i);
  }
  return r;
}

// Single-use tableau solver over the preprocessed (scaled, full row rank) system.
class Simplex {
 public:
  Simplex(const LinearProgram& lp) : lp_(lp) {}

  LpSolution run() {
    LpSolution out;
    if (!preprocess(out)) {
      out.status = LpStatus::infeasible;
      return out;
    }
    build_tableau();

    if (num_artificial_ > 0) {
      std::vector<double> phase1(total_cols_, 0.0);
      for (std::size_t j = n_; j < total_cols_; ++j) phase1[j] = -1.0;
      set_objective(phase1);
      if (!iterate(out, /*allow_artificial=*/false)) {
        throw InternalError("phase 1 of the simplex method cannot be unbounded");
      }
      if (-objective_value() > 1e-9 * (1.0 + rhs_scale_)) {
        out.status = LpStatus::infeasible;
        return out;
      }
      drive_out_artificials();
    }

    std::vector<double> phase2(total_cols_, 0.0);
    std::copy(lp_.objective.begin(), lp_.objective.end(), phase2.begin());
    set_objective(phase2);
    if (!iterate(out, false)) {
      out.status = LpStatus::unbounded;
      return out;
    }
    extract(out);
    out.status = LpStatus::optimal;
    return out;
  }

 private:
  bool preprocess(LpSolution& out) {
    const std::size_t m = lp_.num_rows();
    n_ = lp_.num_vars();
    const double b_norm = inf_norm(lp_.eq_rhs);
    std::vector<std::vector<double>> q_rows;
    std::vector<double> q_rhs;
    for (std::size_t i = 0; i < m; ++i) {
      const auto a = lp_.eq_matrix.row(i);
      double s = 0.0;
      for (double v : a) s = std::max(s, std::abs(v));
      if (s == 0.0) {
        if (std::abs(lp_.eq_rhs[i]) > 1e-10 * (1.0 + b_norm)) return false;
        ++out.rows_dropped;
        continue;
      }
      const double factor = (lp_.eq_rhs[i] < 0.0 ? -1.0 : 1.0) / s;
      std::vector<double> row(a.begin(), a.end());
      for (double& v : row) v *= factor;
      const double rhs = lp_.eq_rhs[i] * factor;

      // Modified Gram-Schmidt (two passes) against the rows kept so far.
      std::vector<double> r = row;
      double rb = rhs;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < q_rows.size(); ++k) {
          double d = 0.0;
          for (std::size_t j = 0; j < n_; ++j) d += q_rows[k][j] * r[j];
          for (std::size_t j = 0; j < n_; ++j) r[j] -= d * q_rows[k][j];
          rb -= d * q_rhs[k];
        }
      }
      double row_norm = 0.0, r_norm = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        row_norm += row[j] * row[j];
        r_norm += r[j] * r[j];
      }
      row_norm = std::sqrt(row_norm);
      r_norm = std::sqrt(r_norm);
      if (r_norm <= kDependenceTol * row_norm) {
        if (std::abs(rb) > 1e-8 * (1.0 + b_norm * std::abs(factor))) return false;
        ++out.rows_dropped;
        continue;
      }
      for (double& v : r) v /= r_norm;
      q_rows.push_back(std::move(r));
      q_rhs.push_back(rb / r_norm);

      kept_rows_.push_back(i);
      row_factor_.push_back(factor);
      scaled_rows_.push_back(std::move(row));
      scaled_rhs_.push_back(rhs);
    }
    rhs_scale_ = inf_norm(scaled_rhs_);
    return true;
  }

  void build_tableau() {
    m_ = kept_rows_.size();
    basis_.assign(m_, std::numeric_limits<std::size_t>::max());

    // Crash basis: a column that is a positive singleton among the kept rows
    // enters directly; every other row gets an artificial variable.
    for (std::size_t j = 0; j < n_; ++j) {
      std::size_t nonzero_row = m_;
      int count = 0;
      for (std::size_t i = 0; i < m_ && count < 2; ++i) {
        if (scaled_rows_[i][j] != 0.0) {
          nonzero_row = i;
          ++count;
        }
      }
      if (count == 1 && scaled_rows_[nonzero_row][j] > 0.0 &&
          basis_[nonzero_row] == std::numeric_limits<std::size_t>::max()) {
        basis_[nonzero_row] = j;
      }
    }
    num_artificial_ = static_cast<std::size_t>(
        std::count(basis_.begin(), basis_.end(), std::numeric_limits<std::size_t>::max()));
    total_cols_ = n_ + num_artificial_;
    width_ = total_cols_ + 1;  // last column holds the right-hand side
    tableau_ = Matrix(m_ + 1, width_);

    std::size_t next_art = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) tableau_(i, j) = scaled_rows_[i][j];
      tableau_(i, total_cols_) = scaled_rhs_[i];
      if (basis_[i] == std::numeric_limits<std::size_t>::max()) {
        basis_[i] = next_art;
        artificial_row_.push_back(i);
        tableau_(i, next_art) = 1.0;
        ++next_art;
      } else {
        const double p = tableau_(i, basis_[i]);
        for (std::size_t j = 0; j < width_; ++j) tableau_(i, j) /= p;
      }
    }
  }

  // Objective row holds reduced costs d_j = c_j - c_B^T B^{-1} a_j and, in
  // the rhs column, -c_B^T x_B.
  void set_objective(const std::vector<double>& c) {
    cost_ = c;
    for (std::size_t j = 0; j < width_; ++j) {
      double d = j < total_cols_ ? c[j] : 0.0;
      for (std::size_t i = 0; i < m_; ++i) d -= c[basis_[i]] * tableau_(i, j);
      tableau_(m_, j) = d;
    }
    for (std::size_t i = 0; i < m_; ++i) tableau_(m_, basis_[i]) = 0.0;
  }

  double objective_value() const { return -tableau_(m_, total_cols_); }

  void pivot(std::size_t r, std::size_t c) {
    const double p = tableau_(r, c);
    auto prow = tableau_.row(r);
    for (double& v : prow) v /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = tableau_(i, c);
      if (f == 0.0) continue;
      auto row = tableau_.row(i);
      for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Returns false when the objective is unbounded.
  bool iterate(LpSolution& out, bool allow_artificial) {
    const long degenerate_limit = 5L * static_cast<long>(m_ + n_);
    long stalled = 0;
    const std::size_t price_cols = allow_artificial ? total_cols_ : n_;
    for (;;) {
      if (out.iterations >= kIterationCap) {
        throw NumericError("simplex iteration cap exceeded", objective_value());
      }
      std::size_t enter = price_cols;
      if (bland_) {
        for (std::size_t j = 0; j < price_cols; ++j) {
          if (tableau_(m_, j) > kOptimalityTol) {
            enter = j;
            break;
          }
        }
      } else {
        double best = kOptimalityTol;
        for (std::size_t j = 0; j < price_cols; ++j) {
          if (tableau_(m_, j) > best) {
            best = tableau_(m_, j);
            enter = j;
          }
        }
      }
      if (enter == price_cols) return true;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = tableau_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(tableau_(i, total_cols_), 0.0) / a;
        if (leave == m_ || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
          const bool take = bland_ ? basis_[i] < basis_[leave]
                                   : a > tableau_(leave, enter);
          if (take) {
            leave = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leave == m_) return false;

      const double before = objective_value();
      pivot(leave, enter);
      ++out.iterations;
      if (objective_value() <= before + 1e-14 * (1.0 + std::abs(before))) {
        if (++stalled >= degenerate_limit && !bland_) {
          bland_ = true;
          out.used_bland = true;
        }
      } else {
        stalled = 0;
      }
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t best = n_;
      double best_abs = 1e-9;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::find(basis_.begin(), basis_.end(), j) != basis_.end()) continue;
        if (std::abs(tableau_(i, j)) > best_abs) {
          best_abs = std::abs(tableau_(i, j));
          best = j;
        }
      }
      // A row without a usable structural entry is redundant; its artificial
      // stays basic at zero and can never move since no pivot touches it.
      if (best != n_) pivot(i, best);
    }
  }

  void extract(LpSolution& out) {
    // Re-solve B x_B = b and B^T y = c_B from the scaled rows to shed
    // accumulated tableau drift.
    Matrix b(m_, m_);
    std::vector<double> cb(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      const std::size_t col = basis_[k];
      for (std::size_t i = 0; i < m_; ++i) {
        b(i, k) = col < n_ ? scaled_rows_[i][col] : (artificial_row_[col - n_] == i ? 1.0 : 0.0);
      }
      cb[k] = col < n_ ? lp_.objective[col] : 0.0;
    }
    std::vector<double> xb(m_);
    for (std::size_t i = 0; i < m_; ++i) xb[i] = tableau_(i, total_cols_);
    // An ill-conditioned basis can make the re-solve worse than the tableau.
    auto violation = [&](const std::vector<double>& v) {
      double worst = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        double r = -scaled_rhs_[i];
        for (std::size_t k = 0; k < m_; ++k) r += b(i, k) * v[k];
        worst = std::max(worst, std::abs(r));
        if (basis_[i] < n_) worst = std::max(worst, -v[i]);
      }
      return worst;
    };
    if (auto refined = dense_solve(b, scaled_rhs_, false)) {
      if (std::all_of(refined->begin(), refined->end(), [](double v) { return std::isfinite(v); }) &&
          violation(*refined) <= violation(xb))
        xb = std::move(*refined);
    }

    out.x.assign(n_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      if (basis_[k] >= n_) continue;
      double v = xb[k];
      if (v < 0.0 && v > -1e-10) v = 0.0;
      out.x[basis_[k]] = v;
      out.basis.push_back(basis_[k]);
    }
    std::sort(out.basis.begin(), out.basis.end());
    out.objective_value = 0.0;
    for (std::size_t j = 0; j < n_; ++j) out.objective_value += lp_.objective[j] * out.x[j];

    out.duals.assign(lp_.num_rows(), 0.0);
    if (auto y = dense_solve(b, cb, true)) {
      for (std::size_t i = 0; i < m_; ++i) out.duals[kept_rows_[i]] = (*y)[i] * row_factor_[i];
    }
  }

  const LinearProgram& lp_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t num_artificial_ = 0;
  std::size_t total_cols_ = 0;
  std::size_t width_ = 0;
  double rhs_scale_ = 0.0;
  bool bland_ = false;

  std::vector<std::size_t> kept_rows_;
  std::vector<double> row_factor_;
  std::vector<std::vector<double>> scaled_rows_;
  std::vector<double> scaled_rhs_;

  Matrix tableau_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> artificial_row_;  // row of artificial column n_ + a
  std::vector<double> cost_;
};

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  if (lp.eq_matrix.rows() != lp.eq_rhs.size() || lp.eq_matrix.cols() != lp.objective.size()) {
    throw InvalidArgument("linear program dimensions are inconsistent");
  }
  if (lp.objective.empty()) throw InvalidArgument("linear program has no variables");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(lp.objective.begin(), lp.objective.end(), finite) ||
      !std::all_of(lp.eq_rhs.begin(), lp.eq_rhs.end(), finite) ||
      !std::all_of(lp.eq_matrix.data().begin(), lp.eq_matrix.data().end(), finite)) {
    throw InvalidArgument("linear program data must be finite");
  }
  return Simplex(lp).run();
}

LpResidualReport verify(const LinearProgram& lp, const LpSolution& sol) {
  if (sol.status != LpStatus::optimal) {
    throw InvalidArgument(std::string("cannot verify a non-optimal solution (status ") +
                          to_string(sol.status) + ")");
  }
  if (sol.x.size() != lp.num_vars() || sol.duals.size() != lp.num_rows()) {
    throw InvalidArgument("solution does not match the linear program");
  }
  LpResidualReport rep;
  double primal_obj = 0.0, dual_obj = 0.0, dual_scale = 1.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    double ax = 0.0;
    const auto row = lp.eq_matrix.row(i);
    for (std::size_t j = 0; j < lp.num_vars(); ++j) ax += row[j] * sol.x[j];
    rep.primal_residual = std::max(rep.primal_residual, std::abs(ax - lp.eq_rhs[i]));
    dual_obj += lp.eq_rhs[i] * sol.duals[i];
    dual_scale += std::abs(lp.eq_rhs[i] * sol.duals[i]);
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    rep.nonnegativity = std::max(rep.nonnegativity, -sol.x[j]);
    double reduced = lp.objective[j];
    double magnitude = 1.0 + std::abs(lp.objective[j]);
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
      reduced -= lp.eq_matrix(i, j) * sol.duals[i];
      magnitude += std::abs(lp.eq_matrix(i, j) * sol.duals[i]);
    }
    rep.dual_infeasibility = std::max(rep.dual_infeasibility, reduced / magnitude);
    primal_obj += lp.objective[j] * sol.x[j];
  }
  rep.duality_gap = std::abs(primal_obj - dual_obj) / dual_scale;
  return rep;
}

}  // namespace pdthresh
