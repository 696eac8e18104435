#include "pdthresh/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdthresh/errors.hpp"
#include "pdthresh/kernels.hpp"

namespace pdthresh {

namespace {

void fill_deviation(const SymmetricMatrix& before, const SymmetricMatrix& after, double tau,
                    ThresholdReport& rep) {
  if (before.dim() != after.dim()) throw InvalidArgument("matrix dimensions differ");
  rep.tau_used = tau;
  rep.max_abs_entry_change = 0.0;
  rep.sandwich_violations = 0;
  for (std::size_t i = 0; i < before.dim(); ++i) {
    for (std::size_t j = i; j < before.dim(); ++j) {
      const double x = before(i, j), y = after(i, j);
      rep.max_abs_entry_change = std::max(rep.max_abs_entry_change, std::abs(y - x));
      if (i == j) continue;
      const auto b = sandwich_bounds(tau, x);
      if (y < b.lo - kSandwichSlack || y > b.hi + kSandwichSlack) ++rep.sandwich_violations;
    }
  }
}

double min_eigenvalue(const SymmetricMatrix& m) { return sym_eigen(m).values.front(); }

}  // namespace

CorrelationMatrix certify_input(const SymmetricMatrix& m, std::vector<std::string>& warnings) {
  auto c = certify_correlation(m, kInputPsdTol);
  if (c.min_eig() < -kDefaultPsdTol) {
    warnings.push_back("input min eigenvalue " + std::to_string(c.min_eig()) +
                       " is slightly negative; accepted");
  }
  return c;
}

std::pair<CorrelationMatrix, ThresholdReport> apply_entrywise(
    const GegenbauerSeries& s, const CorrelationMatrix& m,
    const std::optional<ThresholdSet>& k_set) {
  if (!s.is_positive_definite(1e-10)) {
    throw InvalidArgument("thresholding series must have nonnegative coefficients");
  }
  if (!s.is_unital(1e-9)) throw InvalidArgument("thresholding series must satisfy f(1) = 1");

  ThresholdReport rep;
  rep.min_eig_before = m.min_eig();
  rep.rank_before = m.numeric_rank();
  const bool rank_ok = m.numeric_rank() <= s.context().n();
  if (!rank_ok) {
    rep.warnings.push_back("input rank " + std::to_string(m.numeric_rank()) +
                           " exceeds n = " + std::to_string(s.context().n()) +
                           "; the PSD guarantee does not apply");
  }

  Matrix out = map_entries(s, m.base());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    if (std::abs(out(i, i) - 1.0) > 1e-9) {
      throw InternalError("f(1) drifted from 1 by more than 1e-9");
    }
    out(i, i) = 1.0;
  }
  SymmetricMatrix after(std::move(out));

  if (k_set) {
    for (std::size_t i = 0; i < after.dim(); ++i) {
      for (std::size_t j = i + 1; j < after.dim(); ++j) {
        if (k_set->contains(m(i, j)) && std::abs(after(i, j)) <= kZeroedTol) ++rep.entries_zeroed;
      }
    }
  } else {
    for (std::size_t i = 0; i < after.dim(); ++i) {
      for (std::size_t j = i + 1; j < after.dim(); ++j) {
        if (std::abs(after(i, j)) <= 1e-12) ++rep.entries_zeroed;
      }
    }
  }
  fill_deviation(m.base(), after, s.linear_coefficient(), rep);

  if (rank_ok) {
    try {
      auto certified = certify_correlation(after, kDefaultPsdTol);
      rep.min_eig_after = certified.min_eig();
      return {std::move(certified), std::move(rep)};
    } catch (const CorrelationError& e) {
      throw InternalError(std::string("positive definite thresholding produced a non-PSD matrix: ") +
                          e.what());
    }
  }
  auto uncertified = certify_correlation(after, std::numeric_limits<double>::infinity());
  rep.min_eig_after = uncertified.min_eig();
  if (rep.min_eig_after < -kDefaultPsdTol) {
    rep.warnings.push_back("output is not PSD (min eigenvalue " +
                           std::to_string(rep.min_eig_after) + ")");
  }
  return {std::move(uncertified), std::move(rep)};
}

std::pair<SymmetricMatrix, ThresholdReport> hard_threshold(const CorrelationMatrix& m, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  Matrix out = m.base().matrix();
  ThresholdReport rep;
  rep.min_eig_before = m.min_eig();
  rep.rank_before = m.numeric_rank();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      if (i != j && std::abs(out(i, j)) < eps) {
        out(i, j) = 0.0;
        if (i < j) ++rep.entries_zeroed;
      }
    }
  }
  SymmetricMatrix after(std::move(out));
  rep.min_eig_after = min_eigenvalue(after);
  // Hard thresholding has no Gegenbauer expansion; report against tau = 1.
  fill_deviation(m.base(), after, 1.0, rep);
  if (rep.min_eig_after < -kDefaultPsdTol) {
    rep.warnings.push_back("hard-thresholded matrix is not PSD");
  }
  return {std::move(after), std::move(rep)};
}

std::pair<double, CorrelationMatrix> shrinkage_repair(const SymmetricMatrix& m) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (std::abs(m(i, i) - 1.0) > kDiagonalTol) {
      throw InvalidArgument("shrinkage repair needs a unit diagonal");
    }
  }
  const double mu = min_eigenvalue(m);
  if (mu >= 1.0 + 1e-12 && m.dim() > 1) {
    throw InternalError("smallest eigenvalue of a unit-diagonal matrix exceeds 1");
  }
  const double lambda = mu >= -kRepairTol ? 0.0 : -mu / (1.0 - mu);
  if (lambda == 0.0) return {0.0, certify_correlation(m)};
  Matrix out = m.matrix();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = i == j ? 1.0 : (1.0 - lambda) * out(i, j);
    }
  }
  return {lambda, certify_correlation(SymmetricMatrix(std::move(out)))};
}

ThresholdReport deviation_report(const CorrelationMatrix& before, const SymmetricMatrix& after,
                                 double tau) {
  ThresholdReport rep;
  fill_deviation(before.base(), after, tau, rep);
  rep.min_eig_before = before.min_eig();
  rep.rank_before = before.numeric_rank();
  rep.min_eig_after = min_eigenvalue(after);
  return rep;
}

}  // namespace pdthresh
