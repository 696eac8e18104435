#include "pdthresh/gegenbauer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pdthresh/errors.hpp"

namespace pdthresh {

namespace {

constexpr double kClampSlack = 1e-12;

void check_degree(int k) {
  if (k < 0) throw InvalidArgument("degree must be non-negative, got " + std::to_string(k));
}

double checked_argument(double t) {
  if (!std::isfinite(t)) throw InvalidArgument("argument must be finite");
  if (t > 1.0) {
    if (t - 1.0 > kClampSlack) throw InvalidArgument("argument outside [-1, 1]: " + std::to_string(t));
    return 1.0;
  }
  if (t < -1.0) {
    if (-1.0 - t > kClampSlack) throw InvalidArgument("argument outside [-1, 1]: " + std::to_string(t));
    return -1.0;
  }
  return t;
}

__extension__ using u128 = unsigned __int128;

// Exact binomial C(m, j) for m >= 0, or 0 when j < 0 or j > m.
std::int64_t checked_binomial(std::int64_t m, std::int64_t j) {
  if (j < 0 || m < 0 || j > m) return 0;
  j = std::min(j, m - j);
  constexpr auto kMax = static_cast<u128>(std::numeric_limits<std::int64_t>::max());
  u128 r = 1;
  for (std::int64_t i = 1; i <= j; ++i) {
    // r * (m - j + i) / i is exact: r is C(m-j+i-1, i-1).
    r = r * static_cast<u128>(m - j + i) / static_cast<u128>(i);
    if (r > kMax) throw RangeError("harmonic dimension overflows 64-bit integer");
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

SphereContext::SphereContext(int n) : n_(n) {
  if (n < 2) throw InvalidArgument("sphere dimension n must be >= 2, got " + std::to_string(n));
}

RecurrenceWeights recurrence_weights(const SphereContext& ctx, int k) {
  check_degree(k);
  if (k == 0) return {1.0, 0.0};
  const double denom = 2.0 * k + ctx.n() - 2;
  return {(k + ctx.n() - 2) / denom, k / denom};
}

void eval_gegenbauer_all(const SphereContext& ctx, double t, std::span<double> out) {
  t = checked_argument(t);
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = t;
  const int n = ctx.n();
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double denom = 2.0 * static_cast<double>(k) + n - 2;
    const double c = (static_cast<double>(k) + n - 2) / denom;
    const double b = static_cast<double>(k) / denom;
    out[k + 1] = (t * out[k] - b * out[k - 1]) / c;
  }
}

std::vector<double> eval_gegenbauer_all(const SphereContext& ctx, int max_k, double t) {
  check_degree(max_k);
  std::vector<double> out(static_cast<std::size_t>(max_k) + 1);
  eval_gegenbauer_all(ctx, t, out);
  return out;
}

double eval_gegenbauer(const SphereContext& ctx, int k, double t) {
  check_degree(k);
  t = checked_argument(t);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  const int n = ctx.n();
  for (int j = 1; j < k; ++j) {
    const double denom = 2.0 * j + n - 2;
    const double next = (t * cur - (j / denom) * prev) / ((j + n - 2) / denom);
    prev = cur;
    cur = next;
  }
  return cur;
}

double eval_derivative(const SphereContext& ctx, int k, double t) {
  check_degree(k);
  t = checked_argument(t);
  if (k == 0) return 0.0;
  const double n = ctx.n();
  const double prefactor = static_cast<double>(k) * (k + n - 2) / (n - 1);
  return prefactor * eval_gegenbauer(ctx.raised(), k - 1, t);
}

std::int64_t harmonic_dimension(const SphereContext& ctx, int k) {
  check_degree(k);
  if (k == 0) return 1;
  const std::int64_t n = ctx.n();
  // d_k = (2k+n-2)/k * C(k+n-3, k-1); the binomial is below d_k, the quotient exact.
  const u128 d = static_cast<u128>(checked_binomial(k + n - 3, k - 1)) * static_cast<u128>(2 * k + n - 2) /
                 static_cast<u128>(k);
  if (d > static_cast<u128>(std::numeric_limits<std::int64_t>::max())) {
    throw RangeError("harmonic dimension overflows 64-bit integer");
  }
  return static_cast<std::int64_t>(d);
}

std::vector<double> harmonic_dimensions_real(const SphereContext& ctx, int max_k) {
  check_degree(max_k);
  std::vector<double> d(static_cast<std::size_t>(max_k) + 1);
  d[0] = 1.0;
  for (int k = 0; k < max_k; ++k) {
    // detailed balance: d_k c_k = d_{k+1} b_{k+1}
    d[k + 1] = d[k] * recurrence_weights(ctx, k).forward / recurrence_weights(ctx, k + 1).backward;
  }
  return d;
}

GegenbauerSeries::GegenbauerSeries(SphereContext ctx, std::vector<double> coeffs)
    : ctx_(ctx), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidArgument("series needs at least one coefficient");
  for (double a : coeffs_) {
    if (!std::isfinite(a)) throw InvalidArgument("series coefficients must be finite");
  }
}

double GegenbauerSeries::value_at_one() const noexcept {
  double s = 0.0;
  for (double a : coeffs_) s += a;
  return s;
}

bool GegenbauerSeries::is_positive_definite(double tol) const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [tol](double a) { return a >= -tol; });
}

bool GegenbauerSeries::is_unital(double tol) const noexcept {
  return std::abs(value_at_one() - 1.0) <= tol;
}

double GegenbauerSeries::operator()(double t) const { return eval_series(*this, t); }

double eval_series(const SphereContext& ctx, std::span<const double> coeffs, double t) {
  if (coeffs.empty()) throw InvalidArgument("empty coefficient vector");
  t = checked_argument(t);
  // Gamma_{k+1} = (t/c_k) Gamma_k - (b_k/c_k) Gamma_{k-1}; Clenshaw runs this backwards.
  const int n = ctx.n();
  const auto top = static_cast<int>(coeffs.size()) - 1;
  double y1 = 0.0;  // y_{k+1}
  double y2 = 0.0;  // y_{k+2}
  for (int k = top; k >= 0; --k) {
    double alpha_k = t;  // t / c_k with c_0 = 1
    if (k > 0) alpha_k = t * (2.0 * k + n - 2) / (k + n - 2.0);
    // beta_{k+1} = -b_{k+1}/c_{k+1} = -(k+1)/(k+n-1)
    const double beta_next = -(k + 1.0) / (k + n - 1.0);
    const double y = coeffs[static_cast<std::size_t>(k)] + alpha_k * y1 + beta_next * y2;
    y2 = y1;
    y1 = y;
  }
  return y1;
}

double eval_series(const GegenbauerSeries& s, double t) {
  return eval_series(s.context(), s.coeffs(), t);
}

DecayFit darboux_decay_fit(const SphereContext& ctx, double theta, int k_min, int k_max) {
  if (!(theta >= 0.2 && theta <= std::numbers::pi - 0.2)) {
    throw DomainError("theta must lie in [0.2, pi - 0.2] to stay away from the poles");
  }
  if (k_min < 10 || k_max < 10 * k_min) {
    throw InvalidArgument("decay fit needs k_min >= 10 and k_max >= 10 * k_min");
  }
  const auto gamma = eval_gegenbauer_all(ctx, k_max, std::cos(theta));
  // One window per oscillation period so every window contains a crest.
  const int window = static_cast<int>(std::ceil(2.0 * std::numbers::pi / theta));

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int start = k_min; start + window - 1 <= k_max; start += window) {
    int best_k = start;
    double best = 0.0;
    for (int k = start; k < start + window; ++k) {
      if (std::abs(gamma[k]) > best) {
        best = std::abs(gamma[k]);
        best_k = k;
      }
    }
    if (best <= 0.0) continue;
    const double x = std::log(static_cast<double>(best_k));
    const double y = std::log(best);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw NumericError("too few envelope samples for a decay fit");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return {slope, 0.5 * (2 - ctx.n()), {k_min, k_max}, theta};
}

}  // namespace pdthresh
