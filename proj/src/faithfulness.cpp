#include "pdthresh/faithfulness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pdthresh/errors.hpp"
#include "pdthresh/kernels.hpp"
#include "pdthresh/linalg.hpp"

namespace pdthresh {

// ---------------------------------------------------------------------------
// ThresholdSet

namespace {

constexpr double kPointTol = 1e-12;

void check_member(double t) {
  if (!std::isfinite(t) || t < -1.0 || t >= 1.0) {
    throw InvalidArgument("threshold set members must lie in [-1, 1), got " + std::to_string(t));
  }
}

std::vector<double> normalized_points(std::vector<double> pts) {
  for (double p : pts) check_member(p);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (out.empty() || p - out.back() > kPointTol) out.push_back(p);
  }
  return out;
}

bool points_symmetric(const std::vector<double>& pts) {
  // Sorted ascending, so p[i] pairs with p[size - 1 - i].
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (std::abs(pts[i] + pts[pts.size() - 1 - i]) > kPointTol) return false;
  }
  return true;
}

}  // namespace

const char* to_string(ThresholdSet::Kind k) noexcept {
  switch (k) {
    case ThresholdSet::Kind::finite:
      return "finite";
    case ThresholdSet::Kind::interval:
      return "interval";
    case ThresholdSet::Kind::union_:
      return "union";
  }
  return "unknown";
}

ThresholdSet::ThresholdSet(Kind kind, std::vector<double> points,
                           std::optional<std::pair<double, double>> range)
    : kind_(kind), points_(std::move(points)), range_(range) {
  bool sym = points_symmetric(points_);
  if (range_) sym = sym && std::abs(range_->first + range_->second) <= kPointTol;
  symmetric_ = sym;
}

ThresholdSet ThresholdSet::finite(std::vector<double> points) {
  auto pts = normalized_points(std::move(points));
  if (pts.empty()) throw InvalidArgument("threshold set must not be empty");
  return ThresholdSet(Kind::finite, std::move(pts), std::nullopt);
}

ThresholdSet ThresholdSet::interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo > -1.0) || !(hi < 1.0) || lo > hi) {
    throw InvalidArgument("interval must satisfy -1 < lo <= hi < 1");
  }
  return ThresholdSet(Kind::interval, {}, std::make_pair(lo, hi));
}

ThresholdSet ThresholdSet::union_of(std::vector<double> points, double lo, double hi) {
  const auto base = interval(lo, hi);
  auto pts = normalized_points(std::move(points));
  return ThresholdSet(Kind::union_, std::move(pts), base.range_);
}

double ThresholdSet::sup() const noexcept {
  double s = -std::numeric_limits<double>::infinity();
  if (!points_.empty()) s = points_.back();
  if (range_) s = std::max(s, range_->second);
  return s;
}

double ThresholdSet::inf() const noexcept {
  double s = std::numeric_limits<double>::infinity();
  if (!points_.empty()) s = points_.front();
  if (range_) s = std::min(s, range_->first);
  return s;
}

bool ThresholdSet::contains(double t, double tol) const noexcept {
  if (range_ && t >= range_->first - tol && t <= range_->second + tol) return true;
  return std::any_of(points_.begin(), points_.end(),
                     [t, tol](double p) { return std::abs(p - t) <= tol; });
}

std::vector<double> ThresholdSet::check_grid(int interval_samples) const {
  std::vector<double> grid = points_;
  if (range_) {
    const auto [lo, hi] = *range_;
    if (interval_samples < 2 || hi == lo) {
      grid.push_back(lo);
    } else {
      for (int i = 0; i < interval_samples; ++i) {
        grid.push_back(lo + (hi - lo) * i / (interval_samples - 1));
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Shared LP plumbing

namespace {

constexpr double kExchangeTol = 1e-8;
constexpr int kExchangeRounds = 200;
constexpr int kChebyshevNodes = 33;
constexpr int kCheckSamples = 2049;
constexpr std::size_t kPointsPerRound = 16;
constexpr double kStagnationTol = 1e-8;
constexpr double kMonotoneTol = 1e-7;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
}

std::vector<int> expansion_degrees(int degree, bool odd_only) {
  std::vector<int> ks;
  for (int k = odd_only ? 1 : 0; k <= degree; k += odd_only ? 2 : 1) ks.push_back(k);
  return ks;
}

// maximize a_1 s.t. sum a_k = 1, f(t) = 0 at nodes, optionally f'(0) = 0.
LinearProgram vanishing_program(const SphereContext& ctx, const std::vector<int>& degrees,
                                const std::vector<double>& nodes, bool derivative_at_zero) {
  const int max_k = degrees.back();
  const std::size_t rows = 1 + nodes.size() + (derivative_at_zero ? 1 : 0);
  LinearProgram lp{std::vector<double>(degrees.size(), 0.0), Matrix(rows, degrees.size()),
                   std::vector<double>(rows, 0.0)};
  const Matrix table = gegenbauer_table(ctx, nodes, max_k);
  for (std::size_t c = 0; c < degrees.size(); ++c) {
    const auto k = static_cast<std::size_t>(degrees[c]);
    if (k == 1) lp.objective[c] = 1.0;
    lp.eq_matrix(0, c) = 1.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) lp.eq_matrix(j + 1, c) = table(j, k);
  }
  lp.eq_rhs[0] = 1.0;
  if (derivative_at_zero) {
    // Gamma_k'(0) = k (k+n-2)/(n-1) Gamma^{(n+2)}_{k-1}(0)
    const auto raised = eval_gegenbauer_all(ctx.raised(), std::max(max_k - 1, 0), 0.0);
    const double n = ctx.n();
    for (std::size_t c = 0; c < degrees.size(); ++c) {
      const int k = degrees[c];
      lp.eq_matrix(rows - 1, c) =
          k == 0 ? 0.0 : k * (k + n - 2) / (n - 1) * raised[static_cast<std::size_t>(k - 1)];
    }
  }
  return lp;
}

double worst_residual(const LpResidualReport& r) {
  return std::max({r.primal_residual, r.nonnegativity, r.dual_infeasibility, r.duality_gap});
}

GegenbauerSeries series_from_solution(const SphereContext& ctx, const std::vector<int>& degrees,
                                      const std::vector<double>& x) {
  std::vector<double> coeffs(static_cast<std::size_t>(degrees.back()) + 1, 0.0);
  for (std::size_t c = 0; c < degrees.size(); ++c) {
    // the solver guarantees x >= -1e-10; round those to the admissible cone
    coeffs[static_cast<std::size_t>(degrees[c])] = std::max(x[c], 0.0);
  }
  return GegenbauerSeries(ctx, std::move(coeffs));
}

double sup_abs(const GegenbauerSeries& f, const std::vector<double>& grid) {
  const auto values = eval_series_batch(f, grid);
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

FaithfulnessResult make_result(GegenbauerSeries f, const ThresholdSet& k_set,
                               SolverDiagnostics diag) {
  const double tau = f.linear_coefficient();
  const int degree = f.degree();
  const double residual = sup_abs(f, k_set.check_grid(kCheckSamples));
  return FaithfulnessResult{tau, std::move(f), degree, residual, 1.0 / std::sqrt(tau), diag};
}

struct SingleSolve {
  std::optional<GegenbauerSeries> series;  // empty when infeasible
  SolverDiagnostics diag;
};

SingleSolve solve_vanishing(const SphereContext& ctx, const std::vector<int>& degrees,
                            const std::vector<double>& nodes, bool derivative_at_zero) {
  const auto lp = vanishing_program(ctx, degrees, nodes, derivative_at_zero);
  const auto sol = solve(lp);
  SingleSolve out;
  out.diag.status = sol.status;
  out.diag.iterations = sol.iterations;
  out.diag.lp_solves = 1;
  if (sol.status == LpStatus::unbounded) {
    throw InternalError("faithfulness LP cannot be unbounded (a_1 <= sum a_k = 1)");
  }
  if (sol.status != LpStatus::optimal) return out;
  out.diag.lp_residual = worst_residual(verify(lp, sol));
  out.series = series_from_solution(ctx, degrees, sol.x);
  return out;
}

void accumulate(SolverDiagnostics& into, const SolverDiagnostics& from) {
  into.status = from.status;
  into.iterations += from.iterations;
  into.lp_solves += from.lp_solves;
  into.cutting_rounds += from.cutting_rounds;
  into.lp_residual = from.lp_residual;
}

// Runs `attempt(degree)` for degree 64, 128, ... 4096 until tau stagnates.
template <class Attempt>
FaithfulnessResult with_auto_degree(std::optional<int> degree, Attempt&& attempt) {
  if (degree) {
    auto r = attempt(*degree);
    if (!r) throw NumericError("faithfulness LP infeasible at degree " + std::to_string(*degree));
    return std::move(*r);
  }
  std::optional<FaithfulnessResult> best;
  SolverDiagnostics total;
  for (int n = kAutoDegreeStart; n <= kAutoDegreeMax; n *= 2) {
    auto r = attempt(n);
    if (!r) continue;
    accumulate(total, r->diagnostics);
    if (best && r->tau < best->tau - kMonotoneTol) {
      // tau cannot drop as the degree grows; a drop means the LP lost accuracy
      const double kept = best->diagnostics.lp_residual;
      best->diagnostics = total;
      best->diagnostics.lp_residual = kept;
      break;
    }
    const bool stagnated = best && std::abs(r->tau - best->tau) < kStagnationTol;
    best = std::move(r);
    best->diagnostics = total;
    if (stagnated) break;
  }
  if (!best) {
    throw NumericError("faithfulness LP infeasible up to degree " +
                       std::to_string(kAutoDegreeMax) + "; the degree cap is too small");
  }
  return std::move(*best);
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed forms

FaithfulnessResult one_point_construction(const SphereContext& ctx, double eps) {
  check_eps(eps);
  const double g2 = eval_gegenbauer(ctx, 2, eps);
  if (g2 >= 0.0) {
    throw DomainError("construction inapplicable: Gamma_2(eps) >= 0 (eps >= 1/sqrt(n))");
  }
  const double a1 = -g2 / (eps - g2);
  GegenbauerSeries f(ctx, {0.0, a1, 1.0 - a1});
  return make_result(std::move(f), ThresholdSet::finite({eps}), SolverDiagnostics{});
}

TwoPointResult two_point_faithfulness(const SphereContext& ctx, double eps,
                                      std::optional<int> k_cap) {
  check_eps(eps);
  const int cap = k_cap.value_or(ctx.n() <= 3 ? kLowDimensionTwoPointCap : kDefaultTwoPointCap);
  if (cap < 1) throw InvalidArgument("k_cap must be >= 1");
  const int max_degree = 2 * cap - 1;
  const double t = -eps;
  const double decay = 0.5 * (ctx.n() - 2);  // envelope ~ m^{-decay}

  double sigma = -std::numeric_limits<double>::infinity();
  int best_m = 0;
  double envelope_c = 0.0;
  int scanned = 1;
  // Gamma_m(t) by the normalized recurrence, inspecting odd m.
  double prev = 1.0, cur = t;
  for (int m = 1; m <= max_degree; ++m) {
    if (m > 1) {
      const auto w = recurrence_weights(ctx, m - 1);
      const double next = (t * cur - w.backward * prev) / w.forward;
      prev = cur;
      cur = next;
    }
    if (m % 2 == 0) continue;
    scanned = m;
    if (m >= 3 && cur > sigma * (1.0 + 1e-12) + 1e-300) {
      sigma = cur;
      best_m = m;
    }
    envelope_c = std::max(envelope_c, std::abs(cur) * std::pow(m, decay));
    if (m >= 64 && sigma > 0.0 && 10.0 * envelope_c * std::pow(m, -decay) < sigma) break;
  }
  if (!(sigma > 0.0)) {
    throw NumericError("no positive odd value found up to degree " + std::to_string(max_degree));
  }
  std::vector<double> coeffs(static_cast<std::size_t>(best_m) + 1, 0.0);
  coeffs[1] = sigma / (eps + sigma);
  coeffs[static_cast<std::size_t>(best_m)] += eps / (eps + sigma);
  GegenbauerSeries f(ctx, std::move(coeffs));
  auto result = make_result(std::move(f), ThresholdSet::finite({-eps, eps}), SolverDiagnostics{});
  result.tau = sigma / (eps + sigma);
  result.recovery_norm = 1.0 / std::sqrt(result.tau);
  return TwoPointResult{std::move(result), sigma, best_m, scanned};
}

IntervalBound interval_limit_bound(const SphereContext& ctx) {
  IntervalBound out;
  if (ctx.n() <= 3) {
    out.trivial = true;
    out.sigma = std::numeric_limits<double>::infinity();
    out.bound = 1.0;
    return out;
  }
  // |Gamma_m'(0)| = m (m+n-2)/(n-1) |G_{m-1}(0)| with G the normalized
  // polynomials of dimension n+2; G_{j+2}(0) = -(b_{j+1}/c_{j+1}) G_j(0).
  constexpr int kMaxDegree = 2 * kLowDimensionTwoPointCap - 1;
  const SphereContext raised = ctx.raised();
  const double n = ctx.n();
  const double decay = 0.5 * (n - 4);  // envelope ~ m^{-decay}
  double g = 1.0;                      // G_{m-1}(0), starting at m = 1
  double envelope_c = 0.0;
  for (int m = 3; m <= kMaxDegree; m += 2) {
    const auto w = recurrence_weights(raised, m - 2);
    g *= -w.backward / w.forward;
    const double s = std::abs(m * (m + n - 2) / (n - 1) * g);
    out.scanned_to = m;
    if (s > out.sigma * (1.0 + 1e-12)) {
      out.sigma = s;
      out.maximizing_degree = m;
    }
    envelope_c = std::max(envelope_c, s * std::pow(m, decay));
    if (m >= 64 && 10.0 * envelope_c * std::pow(m, -decay) < out.sigma) break;
  }
  out.bound = out.sigma / (1.0 + out.sigma);
  return out;
}

// ---------------------------------------------------------------------------
// Linear programs

FaithfulnessResult solve_finite(const SphereContext& ctx, const ThresholdSet& k_set,
                                std::optional<int> degree) {
  if (k_set.kind() != ThresholdSet::Kind::finite) {
    throw InvalidArgument("solve_finite needs a finite threshold set");
  }
  const auto& pts = k_set.points();
  if (pts.front() <= -1.0) throw InvalidArgument("threshold points must lie in (-1, 1)");
  if (degree && *degree < static_cast<int>(pts.size()) + 1) {
    throw InvalidArgument("degree must be at least |K| + 1");
  }
  const bool odd = k_set.symmetric();
  auto attempt = [&](int n) -> std::optional<FaithfulnessResult> {
    const auto degrees = expansion_degrees(n, odd);
    auto s = solve_vanishing(ctx, degrees, pts, false);
    if (!s.series) return std::nullopt;
    return make_result(std::move(*s.series), k_set, s.diag);
  };
  return with_auto_degree(degree, attempt);
}

FaithfulnessResult solve_interval(const SphereContext& ctx, const ThresholdSet& k_set,
                                  std::optional<int> degree) {
  if (k_set.kind() == ThresholdSet::Kind::finite || !k_set.range()) {
    throw InvalidArgument("solve_interval needs an interval threshold set");
  }
  const auto [lo, hi] = *k_set.range();
  if (!(hi > lo)) throw InvalidArgument("interval must have positive width");
  if (degree && *degree < 1) throw InvalidArgument("degree must be >= 1");

  const bool odd = k_set.symmetric();
  // An odd f vanishes at -t whenever it vanishes at t, and at 0 always, so
  // symmetric sets only need nodes in (0, hi].
  std::vector<double> nodes;
  auto add_node = [&](double t) {
    if (odd) t = std::abs(t);
    if (odd && t <= kPointTol) return;
    for (double u : nodes) {
      if (std::abs(u - t) <= kPointTol) return;
    }
    nodes.push_back(t);
  };
  for (double p : k_set.points()) add_node(p);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < kChebyshevNodes; ++i) {
    add_node(mid + half * std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * kChebyshevNodes)));
  }
  const auto grid = k_set.check_grid(kCheckSamples);

  // Nodes found at one truncation degree seed the next one.
  auto attempt = [&](int n) -> std::optional<FaithfulnessResult> {
    const auto degrees = expansion_degrees(n, odd);
    SolverDiagnostics diag;
    for (int round = 0;; ++round) {
      auto s = solve_vanishing(ctx, degrees, nodes, odd);
      accumulate(diag, s.diag);
      diag.cutting_rounds = round;
      if (!s.series) return std::nullopt;
      const auto values = eval_series_batch(*s.series, grid);
      // Local maxima of |f| above tolerance, largest first.
      std::vector<std::size_t> peaks;
      double sup = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = std::abs(values[i]);
        sup = std::max(sup, v);
        if (v <= kExchangeTol) continue;
        if (i > 0 && std::abs(values[i - 1]) > v) continue;
        if (i + 1 < values.size() && std::abs(values[i + 1]) >= v) continue;
        peaks.push_back(i);
      }
      if (sup <= kExchangeTol) return make_result(std::move(*s.series), k_set, diag);
      if (round == kExchangeRounds) {
        throw NumericError("interval exchange did not converge in 200 rounds", sup);
      }
      std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(values[a]) > std::abs(values[b]);
      });
      if (peaks.size() > kPointsPerRound) peaks.resize(kPointsPerRound);
      const std::size_t before = nodes.size();
      for (std::size_t i : peaks) add_node(grid[i]);
      if (nodes.size() == before) {
        throw NumericError("interval exchange stalled: the worst points are already nodes", sup);
      }
    }
  };
  return with_auto_degree(degree, attempt);
}

FaithfulnessResult solve_faithfulness(const SphereContext& ctx, const ThresholdSet& k_set,
                                      std::optional<int> degree) {
  if (k_set.kind() == ThresholdSet::Kind::finite) return solve_finite(ctx, k_set, degree);
  return solve_interval(ctx, k_set, degree);
}

// ---------------------------------------------------------------------------
// Structure

StructuralReport structural_check(const GegenbauerSeries& s) {
  const auto& ctx = s.context();
  const int top = s.degree();
  const auto dims = harmonic_dimensions_real(ctx, top);
  const double a1 = s.linear_coefficient();
  StructuralReport rep;
  rep.margins.resize(static_cast<std::size_t>(top) + 1);
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= top; ++k) {
    const double lower = k >= 1 ? recurrence_weights(ctx, k - 1).forward * s.coeff(k - 1) : 0.0;
    const double upper = recurrence_weights(ctx, k + 1).backward * s.coeff(k + 1);
    const double margin = a1 * dims[static_cast<std::size_t>(k)] / ctx.n() - (lower + upper);
    rep.margins[static_cast<std::size_t>(k)] = margin;
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin < -1e-8) rep.violations.push_back(k);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Cap autocorrelation

CapKernel cap_autocorrelation(const SphereContext& ctx, double r, int degree, int quad_points) {
  if (!(r > 0.0 && r < 0.5 * std::numbers::pi)) throw InvalidArgument("cap radius must lie in (0, pi/2)");
  if (degree < 0 || degree > 2048) throw InvalidArgument("cap kernel degree must lie in [0, 2048]");
  if (quad_points < std::max(2 * degree, 1)) {
    throw InvalidArgument("quad_points must be at least 2 * degree");
  }
  if (r * quad_points / std::numbers::pi < 3.0) {
    throw DomainError("cap radius too small for " + std::to_string(quad_points) +
                      " quadrature points; increase quad_points");
  }
  // Gauss-Legendre in the polar angle phi over [0, r]; dnu = sin^{n-2}(phi) dphi / Z.
  const auto legendre = gauss_gegenbauer(SphereContext(3), quad_points);
  const double n = ctx.n();
  const double z = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(0.5 * (n - 1)) - std::lgamma(0.5 * n));
  std::vector<double> cosines(legendre.nodes.size());
  std::vector<double> measure(legendre.nodes.size());
  for (std::size_t i = 0; i < cosines.size(); ++i) {
    const double phi = 0.5 * r * (1.0 + legendre.nodes[i]);
    cosines[i] = std::cos(phi);
    measure[i] = r * legendre.weights[i] * std::pow(std::sin(phi), n - 2) / z;
  }
  const Matrix table = gegenbauer_table(ctx, cosines, degree);
  const auto dims = harmonic_dimensions_real(ctx, degree);
  std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    double projection = 0.0;
    for (std::size_t i = 0; i < cosines.size(); ++i) projection += measure[i] * table(i, k);
    coeffs[k] = dims[k] * projection * projection;
    total += coeffs[k];
  }
  for (double& a : coeffs) a /= total;
  return CapKernel{ctx, r, GegenbauerSeries(ctx, std::move(coeffs)), std::cos(2.0 * r), quad_points};
}

CapKernel existence_for_set(const SphereContext& ctx, const ThresholdSet& k_set) {
  const double s = k_set.sup();
  if (!(s < 1.0)) throw InvalidArgument("sup K must be < 1");
  const double r = 0.5 * std::acos(0.5 * (1.0 + s));
  if (!(std::cos(2.0 * r) - s >= 0.1 * (1.0 - s) - 1e-15)) {
    throw InternalError("cap radius does not leave the required margin above sup K");
  }
  const int min_quad = static_cast<int>(std::ceil(3.0 * std::numbers::pi / r)) + 1;
  const auto grid = k_set.check_grid(kCheckSamples);
  double last = 0.0;
  for (int degree = 64; degree <= 2048; degree *= 2) {
    const int quad = std::max(2 * degree, min_quad);
    if (quad > 2048) break;
    auto kernel = cap_autocorrelation(ctx, r, degree, quad);
    last = sup_abs(kernel.series, grid);
    if (last <= 5e-3) return kernel;
  }
  throw DomainError("cap kernel does not vanish on K within 5e-3 at the largest degree (residual " +
                    std::to_string(last) + ")");
}

// ---------------------------------------------------------------------------
// Delsarte

DelsarteResult delsarte_lp(const SphereContext& ctx, double theta, int degree) {
  if (!(theta > 0.0 && theta <= std::numbers::pi)) throw InvalidArgument("theta must lie in (0, pi]");
  if (degree < 1) throw InvalidArgument("degree must be >= 1");
  constexpr int kGrid = 513;
  constexpr int kFineGrid = 16385;
  const double edge = std::cos(theta);

  auto uniform = [&](int count) {
    std::vector<double> g;
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? -1.0 : -1.0 + (edge + 1.0) * i / (count - 1);
      if (g.empty() || t - g.back() > kPointTol) g.push_back(t);
    }
    g.back() = edge;
    return g;
  };
  std::vector<double> nodes = uniform(kGrid);
  const std::vector<double> fine = uniform(kFineGrid);

  SolverDiagnostics diag;
  for (int round = 0;; ++round) {
    // Dual program, one row per degree k:
    //   sum_j mu_j Gamma_k(t_j) + y+ - y- - s_k = [k = 0],  maximize y- - y+.
    // Its duals are -a_k for the primal max a_0, sum a_k = 1, f(t_j) <= 0.
    const std::size_t terms = static_cast<std::size_t>(degree) + 1;
    const std::size_t m_nodes = nodes.size();
    const std::size_t cols = m_nodes + 2 + terms;
    LinearProgram lp{std::vector<double>(cols, 0.0), Matrix(terms, cols), std::vector<double>(terms, 0.0)};
    lp.eq_rhs[0] = 1.0;
    lp.objective[m_nodes] = -1.0;
    lp.objective[m_nodes + 1] = 1.0;
    const Matrix table = gegenbauer_table(ctx, nodes, degree);
    for (std::size_t k = 0; k < terms; ++k) {
      for (std::size_t j = 0; j < m_nodes; ++j) lp.eq_matrix(k, j) = table(j, k);
      lp.eq_matrix(k, m_nodes) = 1.0;
      lp.eq_matrix(k, m_nodes + 1) = -1.0;
      lp.eq_matrix(k, m_nodes + 2 + k) = -1.0;
    }
    const auto sol = solve(lp);
    diag.status = sol.status;
    diag.iterations += sol.iterations;
    diag.lp_solves += 1;
    diag.cutting_rounds = round;
    if (sol.status != LpStatus::optimal) {
      throw NumericError(std::string("Delsarte LP not optimal: ") + to_string(sol.status));
    }
    diag.lp_residual = worst_residual(verify(lp, sol));
    std::vector<double> coeffs(terms);
    for (std::size_t k = 0; k < terms; ++k) {
      const double a = -sol.duals[k];
      if (a < -1e-9) throw NumericError("Delsarte LP dual has a negative coefficient", a);
      coeffs[k] = std::max(a, 0.0);
    }
    GegenbauerSeries f(ctx, std::move(coeffs));

    const auto values = eval_series_batch(f, fine);
    const auto worst = static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
    if (values[worst] <= 1e-10 || round == kExchangeRounds) {
      if (!(f.coeff(0) > 0.0)) {
        throw NumericError("Delsarte LP optimum has a_0 = 0; no finite bound at this degree");
      }
      const double bound = 1.0 / f.coeff(0);
      return DelsarteResult{bound, std::move(f), static_cast<int>(nodes.size()), diag};
    }
    nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), fine[worst]), fine[worst]);
  }
}

double delsarte_code_bound(const SphereContext& ctx, double theta, int degree) {
  return delsarte_lp(ctx, theta, degree).bound;
}

SandwichBounds sandwich_bounds(double tau, double t) {
  return {tau * t - (1.0 - tau), tau * t + (1.0 - tau)};
}

}  // namespace pdthresh
