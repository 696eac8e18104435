#pragma once

// Normalized Gegenbauer polynomials on S^{n-1}.
//
// Gamma_k(t) = C_k^{(alpha)}(t) / C_k^{(alpha)}(1) with alpha = (n-2)/2, so
// that Gamma_k(1) = 1. Everything here is evaluated through the normalized
// three-term recurrence
//
//   t Gamma_k(t) = c_k Gamma_{k+1}(t) + b_k Gamma_{k-1}(t),
//   c_k = (k+n-2)/(2k+n-2),  b_k = k/(2k+n-2),  c_0 = 1, b_0 = 0,
//
// which never forms C_k^{(alpha)}(1) and therefore does not overflow.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pdthresh {

/// Ambient dimension n of the sphere S^{n-1}.
class SphereContext {
 public:
  explicit SphereContext(int n);

  int n() const noexcept { return n_; }
  double alpha() const noexcept { return 0.5 * (n_ - 2); }

  /// Context whose parameter is alpha + 1, i.e. ambient dimension n + 2.
  SphereContext raised() const { return SphereContext(n_ + 2); }

  friend bool operator==(const SphereContext&, const SphereContext&) = default;

 private:
  int n_;
};

struct RecurrenceWeights {
  double forward;   // c_k
  double backward;  // b_k
};

RecurrenceWeights recurrence_weights(const SphereContext& ctx, int k);

/// Gamma_k(t). Arguments within 1e-12 outside [-1, 1] are clamped.
double eval_gegenbauer(const SphereContext& ctx, int k, double t);

/// Gamma_0(t), ..., Gamma_{out.size()-1}(t) in one recurrence pass.
void eval_gegenbauer_all(const SphereContext& ctx, double t, std::span<double> out);
std::vector<double> eval_gegenbauer_all(const SphereContext& ctx, int max_k, double t);

/// d/dt Gamma_k(t) = k(k+n-2)/(n-1) * Gamma^{(n+2)}_{k-1}(t).
double eval_derivative(const SphereContext& ctx, int k, double t);

/// Dimension d_k(n) of the degree-k spherical harmonics on S^{n-1}.
/// Throws RangeError when the value does not fit in int64.
std::int64_t harmonic_dimension(const SphereContext& ctx, int k);

/// d_0, ..., d_{max_k} in floating point via d_{k+1} = d_k c_k / b_{k+1}.
/// Never overflows for the degrees used in quadrature and LP work.
std::vector<double> harmonic_dimensions_real(const SphereContext& ctx, int max_k);

/// f(t) = sum_k a_k Gamma_k(t).
class GegenbauerSeries {
 public:
  GegenbauerSeries(SphereContext ctx, std::vector<double> coeffs);

  const SphereContext& context() const noexcept { return ctx_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

  double coeff(int k) const noexcept {
    return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : 0.0;
  }
  /// The linear coefficient a_1, i.e. the faithfulness of the function.
  double linear_coefficient() const noexcept { return coeff(1); }
  /// f(1) = sum_k a_k.
  double value_at_one() const noexcept;

  bool is_positive_definite(double tol = 1e-12) const noexcept;
  bool is_unital(double tol = 1e-10) const noexcept;

  double operator()(double t) const;

 private:
  SphereContext ctx_;
  std::vector<double> coeffs_;
};

/// Clenshaw evaluation of the series. Throws InvalidArgument if empty.
double eval_series(const GegenbauerSeries& s, double t);
double eval_series(const SphereContext& ctx, std::span<const double> coeffs, double t);

/// Fitted power-law exponent of the envelope of |Gamma_k(cos theta)|.
struct DecayFit {
  double fitted_exponent;
  double expected_exponent;  // (2-n)/2
  std::pair<int, int> k_range;
  double theta;
};

DecayFit darboux_decay_fit(const SphereContext& ctx, double theta, int k_min, int k_max);

}  // namespace pdthresh
