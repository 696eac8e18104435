#pragma once

// Entrywise thresholding of correlation matrices: positive definite
// thresholders (which keep rank <= n inputs PSD), plain hard thresholding,
// and shrinkage toward the identity as a PSD repair.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdthresh/faithfulness.hpp"
#include "pdthresh/gegenbauer.hpp"
#include "pdthresh/linalg.hpp"

namespace pdthresh {

struct ThresholdReport {
  double min_eig_before = 0.0;
  double min_eig_after = 0.0;
  int rank_before = 0;
  double tau_used = 0.0;
  double max_abs_entry_change = 0.0;
  int sandwich_violations = 0;  // off-diagonal pairs outside tau t -/+ (1 - tau)
  int entries_zeroed = 0;       // off-diagonal pairs with input in K mapped to |f| <= 1e-7
  std::vector<std::string> warnings;
};

inline constexpr double kZeroedTol = 1e-7;
inline constexpr double kSandwichSlack = 1e-9;
inline constexpr double kInputPsdTol = 1e-6;
inline constexpr double kRepairTol = 1e-10;

/// Certifies estimated input. Eigenvalues down to -1e-6 are tolerated; below
/// -1e-8 a warning is appended to `warnings`.
CorrelationMatrix certify_input(const SymmetricMatrix& m, std::vector<std::string>& warnings);

/// f[m] for a unital positive definite series. The output diagonal is reset
/// to exactly 1 after checking that f(1) drifts by at most 1e-9. If m has
/// numeric rank <= n the output must certify as PSD (psd_tol 1e-8), otherwise
/// InternalError is thrown; above rank n a warning is recorded and the output
/// is certified with an unbounded tolerance so min_eig_after is still reported.
/// `k_set` (optional) is used to count zeroed entries.
std::pair<CorrelationMatrix, ThresholdReport> apply_entrywise(
    const GegenbauerSeries& s, const CorrelationMatrix& m,
    const std::optional<ThresholdSet>& k_set = std::nullopt);

/// Keeps off-diagonal entries with |m_ij| >= eps and zeroes the rest. The
/// output is generally not PSD; min_eig_after reports what happened.
std::pair<SymmetricMatrix, ThresholdReport> hard_threshold(const CorrelationMatrix& m, double eps);

/// (1 - lambda) m + lambda I with lambda = max(0, -mu / (1 - mu)) for the
/// smallest eigenvalue mu of m: the least shrinkage that restores PSD. The
/// zero pattern of m is preserved. mu >= -1e-10 counts as PSD (lambda = 0).
std::pair<double, CorrelationMatrix> shrinkage_repair(const SymmetricMatrix& m);

/// Compares `after` against the sandwich bounds for faithfulness tau.
ThresholdReport deviation_report(const CorrelationMatrix& before, const SymmetricMatrix& after,
                                 double tau);

}  // namespace pdthresh
