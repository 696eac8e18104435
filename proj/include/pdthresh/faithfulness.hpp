#pragma once

// Positive definite functions on S^{n-1} that vanish on a threshold set K,
// and how faithful they can be.
//
// A unital positive definite function is f = sum_k a_k Gamma_k with a_k >= 0
// and sum_k a_k = 1. Its faithfulness is the linear coefficient a_1; the best
// achievable value over functions vanishing on K is denoted tau(K, n). The
// solvers here compute tau by linear programming over truncated expansions;
// the closed forms give the one-point lower bound, the two-point value and the
// small-interval limit bound.

#include <optional>
#include <utility>
#include <vector>

#include "pdthresh/gegenbauer.hpp"
#include "pdthresh/lp.hpp"

namespace pdthresh {

/// Compact set K in [-1, 1) to be thresholded to zero: a finite point list,
/// an interval [lo, hi], or the union of both.
class ThresholdSet {
 public:
  enum class Kind { finite, interval, union_ };

  static ThresholdSet finite(std::vector<double> points);
  static ThresholdSet interval(double lo, double hi);
  static ThresholdSet union_of(std::vector<double> points, double lo, double hi);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& points() const noexcept { return points_; }
  const std::optional<std::pair<double, double>>& range() const noexcept { return range_; }
  /// True iff K = -K.
  bool symmetric() const noexcept { return symmetric_; }

  double sup() const noexcept;
  double inf() const noexcept;
  bool contains(double t, double tol = 1e-12) const noexcept;

  /// Points at which vanishing is checked: the finite points plus, for an
  /// interval, a uniform grid of `interval_samples` points.
  std::vector<double> check_grid(int interval_samples = 2049) const;

 private:
  ThresholdSet(Kind kind, std::vector<double> points, std::optional<std::pair<double, double>> range);

  Kind kind_;
  std::vector<double> points_;
  std::optional<std::pair<double, double>> range_;
  bool symmetric_ = false;
};

const char* to_string(ThresholdSet::Kind k) noexcept;

struct SolverDiagnostics {
  LpStatus status = LpStatus::optimal;
  long iterations = 0;       // simplex pivots, summed over all LP solves
  int lp_solves = 0;
  int cutting_rounds = 0;    // nodes appended by the exchange loop
  double lp_residual = 0.0;  // worst LpResidualReport component of the final LP
};

struct FaithfulnessResult {
  double tau = 0.0;
  GegenbauerSeries optimizer;
  int degree_used = 0;
  double residual_sup = 0.0;   // sup |f| over the check grid of K
  double recovery_norm = 0.0;  // 1 / sqrt(tau): norm of the map recovering x from its embedding
  SolverDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Closed forms

/// f = a_1 Gamma_1 + (1 - a_1) Gamma_2 with f(eps) = 0, so
/// a_1 = -Gamma_2(eps) / (eps - Gamma_2(eps)). A lower bound for tau({eps}).
/// Throws DomainError when Gamma_2(eps) >= 0 (eps >= 1/sqrt(n)).
FaithfulnessResult one_point_construction(const SphereContext& ctx, double eps);

struct TwoPointResult {
  FaithfulnessResult result;
  double sigma = 0.0;         // sup over odd degrees m of Gamma_m(-eps)
  int maximizing_degree = 0;  // the odd degree attaining sigma
  int scanned_to = 0;         // largest odd degree examined
};

inline constexpr int kDefaultTwoPointCap = 5000;
inline constexpr int kLowDimensionTwoPointCap = 50000;

/// tau({-eps, eps}) = sigma / (eps + sigma), with the witness
/// f(x) = (Gamma_m(-eps) x + eps Gamma_m(x)) / (eps + Gamma_m(-eps)).
/// Odd degrees up to 2 k_cap - 1 are scanned, stopping early once a Darboux
/// envelope calibrated on the scan (times 10) cannot beat the running max.
/// k_cap defaults to 5000, or 50000 for n <= 3.
TwoPointResult two_point_faithfulness(const SphereContext& ctx, double eps,
                                      std::optional<int> k_cap = std::nullopt);

struct IntervalBound {
  bool trivial = false;  // n <= 3: the supremum is infinite and the bound is 1
  double sigma = 0.0;    // sup over odd m >= 3 of |Gamma_m'(0)|
  double bound = 1.0;    // sigma / (1 + sigma)
  int maximizing_degree = 0;
  int scanned_to = 0;
};

/// Upper bound on lim_{eps -> 0} tau([-eps, eps]).
IntervalBound interval_limit_bound(const SphereContext& ctx);

// ---------------------------------------------------------------------------
// Linear programs

inline constexpr int kAutoDegreeStart = 64;
inline constexpr int kAutoDegreeMax = 4096;

/// Maximize a_1 subject to sum a_k = 1, f(t) = 0 on the finite set K and
/// a_k >= 0 for k <= degree. Without an explicit degree the truncation is
/// doubled from 64 until tau changes by less than 1e-8 (or degree 4096).
/// Symmetric K restricts the expansion to odd degrees.
FaithfulnessResult solve_finite(const SphereContext& ctx, const ThresholdSet& k_set,
                                std::optional<int> degree = std::nullopt);

/// Same program with a semi-infinite constraint f = 0 on an interval (or a
/// union of an interval and points), handled by an exchange loop: start from
/// 33 Chebyshev nodes, add up to 16 local maxima of |f| on a 2049-point check
/// grid per round until sup |f| <= 1e-8 (at most 200 rounds). Symmetric sets
/// use odd degrees only, so nodes are kept on the nonnegative half.
FaithfulnessResult solve_interval(const SphereContext& ctx, const ThresholdSet& k_set,
                                  std::optional<int> degree = std::nullopt);

/// Dispatches to solve_finite or solve_interval by kind.
FaithfulnessResult solve_faithfulness(const SphereContext& ctx, const ThresholdSet& k_set,
                                      std::optional<int> degree = std::nullopt);

// ---------------------------------------------------------------------------
// Structure of optimizers

struct StructuralReport {
  std::vector<double> margins;  // a_1 d_k / n - (c_{k-1} a_{k-1} + b_{k+1} a_{k+1}), k = 0..N
  std::vector<int> violations;  // degrees with margin < -1e-8
  double min_margin = 0.0;

  bool ok() const noexcept { return violations.empty(); }
};

/// Second-order difference inequality satisfied by every maximizer of a_1.
StructuralReport structural_check(const GegenbauerSeries& s);

// ---------------------------------------------------------------------------
// Existence via cap autocorrelation

struct CapKernel {
  SphereContext context;
  double radius = 0.0;        // cap angular radius r
  GegenbauerSeries series;    // f(1) = 1, all coefficients >= 0
  double support_edge = 0.0;  // cos(2 r): f vanishes below this value
  int quad_points = 0;
};

/// Normalized autocorrelation of the indicator of a cap of radius r:
/// a_k proportional to d_k * (integral of 1_{[cos r, 1]} Gamma_k)^2.
/// The cap integrals use Gauss-Legendre in the polar angle over [0, r].
/// Throws DomainError when fewer than 3 points of a quad_points rule would
/// resolve the cap (r * quad_points / pi < 3).
CapKernel cap_autocorrelation(const SphereContext& ctx, double r, int degree, int quad_points);

/// Cap kernel vanishing on K: r = arccos((1 + sup K) / 2) / 2, with degree
/// raised from 64 by doubling (up to 2048) until sup |f| on K is <= 5e-3.
CapKernel existence_for_set(const SphereContext& ctx, const ThresholdSet& k_set);

// ---------------------------------------------------------------------------
// Classical Delsarte bound and the sandwich inequality

struct DelsarteResult {
  double bound = 0.0;  // f(1) / a_0 with f(1) = 1
  GegenbauerSeries function;
  int grid_points = 0;
  SolverDiagnostics diagnostics;
};

/// Maximize a_0 subject to sum a_k = 1, a_k >= 0 and f(t) <= 0 on
/// [-1, cos theta] (513-node grid plus exchange refinement on a finer grid).
DelsarteResult delsarte_lp(const SphereContext& ctx, double theta, int degree);
double delsarte_code_bound(const SphereContext& ctx, double theta, int degree);

struct SandwichBounds {
  double lo;
  double hi;
};

/// tau t - (1 - tau) <= f(t) <= tau t + (1 - tau) for unital pd f with a_1 = tau.
SandwichBounds sandwich_bounds(double tau, double t);

}  // namespace pdthresh
