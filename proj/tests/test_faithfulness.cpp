#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "oracles.hpp"
#include "pdthresh/errors.hpp"
#include "pdthresh/faithfulness.hpp"

using namespace pdthresh;

namespace {

// f(t) = sum_k a_k Gamma_k(t) summed term by term (no Clenshaw).
double direct_sum(const GegenbauerSeries& s, double t) {
  const auto g = eval_gegenbauer_all(s.context(), s.degree(), t);
  double v = 0.0;
  for (int k = 0; k <= s.degree(); ++k) v += s.coeff(k) * g[k];
  return v;
}

void check_admissible(const GegenbauerSeries& s) {
  const auto& a = s.coeffs();
  CHECK(std::all_of(a.begin(), a.end(), [](double v) { return v >= -1e-12; }));
  CHECK(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

// Autocorrelation of the indicator of a cap of angular radius r on S^{n-1}
// at inner product cos(theta): the fraction of the cap around x that lies in
// the cap around y. A point at polar angle phi from x has inner product
// cos(phi) cos(theta) + sin(phi) sin(theta) s with y, where s is the
// projection of a uniform point of S^{n-2}, distributed as 2 Beta(a, a) - 1,
// a = (n - 2) / 2.
double cap_overlap(int n, double r, double theta) {
  if (theta >= 2 * r) return 0.0;
  const double a = (n - 2) / 2.0;
  auto frac = [&](double phi) {
    if (phi == 0.0 || theta == 0.0) return std::cos(phi) * std::cos(theta) >= std::cos(r) ? 1.0 : 0.0;
    const double need = (std::cos(r) - std::cos(phi) * std::cos(theta)) / (std::sin(phi) * std::sin(theta));
    if (need <= -1.0) return 1.0;
    if (need >= 1.0) return 0.0;
    if (n == 2) return 0.0;  // S^0 = {-1, 1}: handled by the caller
    return boost::math::ibetac(a, a, 0.5 * (1.0 + need));
  };
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto w = [&](double phi) { return std::pow(std::sin(phi), n - 2); };
  const double num = gk::integrate([&](double phi) { return w(phi) * frac(phi); }, 0.0, r, 15, 1e-13);
  const double den = gk::integrate(w, 0.0, r, 15, 1e-13);
  return num / den;
}

}  // namespace

TEST_CASE("ThresholdSet") {
  const auto k = ThresholdSet::finite({0.1, -0.1, 0.1});
  CHECK(k.points() == std::vector<double>{-0.1, 0.1});
  CHECK(k.symmetric());
  CHECK(k.sup() == 0.1);
  CHECK(k.inf() == -0.1);
  CHECK(k.contains(0.1));
  CHECK_FALSE(k.contains(0.0));
  CHECK_FALSE(ThresholdSet::finite({0.1}).symmetric());

  const auto iv = ThresholdSet::interval(-0.2, 0.2);
  CHECK(iv.symmetric());
  CHECK(iv.contains(0.05));
  CHECK(iv.check_grid().size() == 2049);
  const auto u = ThresholdSet::union_of({0.5}, -0.1, 0.1);
  CHECK(u.sup() == 0.5);
  CHECK_FALSE(u.symmetric());
  CHECK(u.contains(0.5));
  CHECK(u.contains(0.0));

  CHECK_THROWS_AS(ThresholdSet::finite({}), InvalidArgument);
  CHECK_THROWS_AS(ThresholdSet::finite({1.0}), InvalidArgument);
  CHECK_THROWS_AS(ThresholdSet::finite({-1.2}), InvalidArgument);
  CHECK_THROWS_AS(ThresholdSet::interval(0.3, 0.2), InvalidArgument);
  CHECK_THROWS_AS(ThresholdSet::interval(-1.0, 0.2), InvalidArgument);
}

TEST_CASE("one-point construction") {
  const auto r = one_point_construction(SphereContext(3), 0.1);
  CHECK(r.tau == doctest::Approx(0.485 / 0.585).epsilon(1e-14));
  CHECK(r.optimizer.coeff(2) == doctest::Approx(0.1 / 0.585).epsilon(1e-14));
  CHECK(std::abs(r.optimizer(0.1)) < 1e-15);
  check_admissible(r.optimizer);
  CHECK(r.recovery_norm == doctest::Approx(1.0 / std::sqrt(r.tau)));
  CHECK_THROWS_AS(one_point_construction(SphereContext(3), 0.7), DomainError);
  // Gamma_2(t) = (n t^2 - 1) / (n - 1) vanishes at 1/sqrt(n)
  CHECK_THROWS_AS(one_point_construction(SphereContext(4), 0.5), DomainError);

  double prev = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
    const double a1 = one_point_construction(SphereContext(5), eps).tau;
    CHECK(a1 > prev);
    prev = a1;
  }
  CHECK(prev > 0.99999);
}

TEST_CASE("two-point formula against a Legendre scan") {
  const double eps = 0.1;
  double sigma = -1.0;
  int arg = -1;
  for (int m = 1; m < 10000; m += 2) {
    const double v = boost::math::legendre_p(m, -eps);
    if (v > sigma) {
      sigma = v;
      arg = m;
    }
  }
  CHECK(boost::math::legendre_p(3, -0.1) == doctest::Approx(0.1475));
  const auto r = two_point_faithfulness(SphereContext(3), eps, 5000);
  CHECK(r.maximizing_degree == arg);
  CHECK(r.sigma == doctest::Approx(sigma).epsilon(1e-13));
  CHECK(r.result.tau == doctest::Approx(sigma / (eps + sigma)).epsilon(1e-13));
  CHECK(std::abs(r.result.optimizer(eps)) < 1e-13);
  CHECK(std::abs(r.result.optimizer(-eps)) < 1e-13);
  check_admissible(r.result.optimizer);

  const auto r20 = two_point_faithfulness(SphereContext(20), 1e-3);
  CHECK(std::abs(r20.result.tau - 3.0 / 22.0) < 5e-3);
}

TEST_CASE("interval limit bound") {
  const auto b4 = interval_limit_bound(SphereContext(4));
  CHECK_FALSE(b4.trivial);
  CHECK(b4.sigma == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b4.maximizing_degree == 3);
  CHECK(b4.bound == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(interval_limit_bound(SphereContext(3)).trivial);
  CHECK(interval_limit_bound(SphereContext(2)).trivial);
  CHECK(interval_limit_bound(SphereContext(3)).bound == 1.0);
  for (int n = 5; n <= 12; ++n) {
    const auto b = interval_limit_bound(SphereContext(n));
    CHECK(b.maximizing_degree == 3);
    CHECK(std::abs(b.bound - 3.0 / (n + 2)) < 1e-9);
    // sup over odd m of |Gamma_m'(0)| by direct evaluation of the derivative
    double sup = 0.0;
    for (int m = 3; m < 400; m += 2) sup = std::max(sup, std::abs(eval_derivative(SphereContext(n), m, 0.0)));
    CHECK(b.sigma == doctest::Approx(sup).epsilon(1e-12));
  }
}

TEST_CASE("finite LP") {
  SUBCASE("dominates the one-point construction") {
    const auto r = solve_finite(SphereContext(3), ThresholdSet::finite({0.1}));
    CHECK(r.tau >= 0.485 / 0.585 - 1e-12);
    check_admissible(r.optimizer);
    CHECK(std::abs(direct_sum(r.optimizer, 0.1)) < 1e-9);
    CHECK(r.diagnostics.lp_residual < 1e-7);
  }
  SUBCASE("equals the two-point formula") {
    for (int n : {3, 5}) {
      const auto lp = solve_finite(SphereContext(n), ThresholdSet::finite({-0.1, 0.1}));
      const auto cf = two_point_faithfulness(SphereContext(n), 0.1);
      CHECK(std::abs(lp.tau - cf.result.tau) < 1e-5);
      for (int k = 0; k <= lp.optimizer.degree(); k += 2) CHECK(lp.optimizer.coeff(k) == 0.0);
    }
  }
  SUBCASE("adding points never increases tau") {
    const SphereContext ctx(4);
    const double t1 = solve_finite(ctx, ThresholdSet::finite({0.2}), 128).tau;
    const double t2 = solve_finite(ctx, ThresholdSet::finite({0.2, -0.3}), 128).tau;
    const double t3 = solve_finite(ctx, ThresholdSet::finite({0.2, -0.3, 0.6}), 128).tau;
    CHECK(t2 <= t1 + 1e-10);
    CHECK(t3 <= t2 + 1e-10);
  }
  SUBCASE("raising the degree never decreases tau") {
    const SphereContext ctx(3);
    const auto k = ThresholdSet::finite({0.25, -0.4});
    double prev = 0.0;
    for (int d : {4, 8, 16, 32, 64}) {
      const double t = solve_finite(ctx, k, d).tau;
      CHECK(t >= prev - 1e-10);
      prev = t;
    }
  }
  CHECK_THROWS_AS(solve_finite(SphereContext(3), ThresholdSet::finite({0.1, 0.2}), 2), InvalidArgument);
}

TEST_CASE("interval LP") {
  SUBCASE("n = 4, K = [-0.2, 0.2]") {
    const auto r = solve_interval(SphereContext(4), ThresholdSet::interval(-0.2, 0.2));
    check_admissible(r.optimizer);
    double sup = 0.0;
    for (int i = 0; i <= 20000; ++i) sup = std::max(sup, std::abs(direct_sum(r.optimizer, -0.2 + 0.4 * i / 20000)));
    CHECK(sup <= 1e-7);
    CHECK(r.tau <= two_point_faithfulness(SphereContext(4), 0.2).result.tau + 1e-9);
  }
  SUBCASE("n = 3, K = [-0.05, 0.05]") {
    const auto r = solve_interval(SphereContext(3), ThresholdSet::interval(-0.05, 0.05));
    CHECK(r.tau < 1.0);
    CHECK(r.residual_sup <= 1e-7);
  }
  SUBCASE("asymmetric interval and union") {
    const SphereContext ctx(5);
    const auto iv = ThresholdSet::interval(0.1, 0.3);
    const auto r = solve_faithfulness(ctx, iv, 256);
    CHECK(r.residual_sup <= 1e-7);
    const auto u = ThresholdSet::union_of({-0.5}, 0.1, 0.3);
    const auto ru = solve_faithfulness(ctx, u, 256);
    CHECK(ru.tau <= r.tau + 1e-9);
    CHECK(std::abs(direct_sum(ru.optimizer, -0.5)) <= 1e-7);
  }
}

TEST_CASE("structural inequality") {
  const SphereContext ctx(3);
  const auto id = structural_check(GegenbauerSeries(ctx, {0.0, 1.0}));
  CHECK(id.margins[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(id.margins[1] == doctest::Approx(1.0));
  CHECK(id.ok());
  const auto bad = structural_check(GegenbauerSeries(ctx, {0.0, 0.01, 0.99}));
  CHECK_FALSE(bad.ok());
  CHECK(std::find(bad.violations.begin(), bad.violations.end(), 1) != bad.violations.end());
  CHECK(structural_check(GegenbauerSeries(ctx, {1.0})).margins.size() >= 1);
  for (int n : {3, 6}) {
    const auto r = solve_finite(SphereContext(n), ThresholdSet::finite({0.3, -0.2}));
    const auto rep = structural_check(r.optimizer);
    CHECK(rep.min_margin >= -1e-8);
  }
}

TEST_CASE("cap autocorrelation against the two-cap overlap") {
  // Truncation error near t = 1 decays like 1/degree and grows with n.
  for (auto [n, degree] : {std::pair{3, 400}, std::pair{4, 1000}, std::pair{6, 1000}}) {
    const double r = M_PI / 6;
    const auto cap = cap_autocorrelation(SphereContext(n), r, degree, 2 * degree);
    check_admissible(cap.series);
    CHECK(cap.support_edge == doctest::Approx(std::cos(2 * r)));
    for (double theta : {0.0, 0.2, 0.5, 0.8, 1.0, 1.5, 2.5}) {
      CAPTURE(n);
      CAPTURE(theta);
      CHECK(std::abs(cap.series(std::cos(theta)) - cap_overlap(n, r, theta)) < 3e-3);
    }
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double t = -1.0 + (std::cos(2 * r) - 0.05 + 1.0) * i / 4000;
      sup = std::max(sup, std::abs(cap.series(t)));
    }
    CHECK(sup <= 5e-3);
  }
  CHECK_THROWS_AS(cap_autocorrelation(SphereContext(3), 1e-3, 50, 100), DomainError);
}

TEST_CASE("existence for a given set") {
  const auto c4 = existence_for_set(SphereContext(4), ThresholdSet::finite({0.3}));
  CHECK(c4.support_edge > 0.3);
  CHECK(std::abs(c4.series(0.3)) <= 5e-3);
  const auto c3 = existence_for_set(SphereContext(3), ThresholdSet::interval(-0.5, 0.2));
  for (int i = 0; i <= 100; ++i) CHECK(std::abs(c3.series(-0.5 + 0.7 * i / 100)) <= 5e-3);
  // sup K close to 1: either a kernel meeting the contract or a domain error
  try {
    const auto c = existence_for_set(SphereContext(3), ThresholdSet::finite({0.999}));
    CHECK(c.support_edge > 0.999);
    CHECK(std::abs(c.series(0.999)) <= 5e-3);
  } catch (const DomainError&) {
  }
}

TEST_CASE("Delsarte bound") {
  CHECK(delsarte_code_bound(SphereContext(3), M_PI, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(delsarte_code_bound(SphereContext(3), M_PI / 2, 2) == doctest::Approx(6.0).epsilon(1e-9));
  // f(t) = t(t+1)/2 has Legendre coefficients (1/6, 1/2, 1/3): f(1)/a_0 = 6
  const auto r = delsarte_lp(SphereContext(3), M_PI / 2, 2);
  CHECK(r.function.coeff(0) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(r.function.coeff(1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.function.coeff(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  // kissing configurations: the classical LP bounds 13.158 (n = 3) and 25.558 (n = 4)
  CHECK(delsarte_code_bound(SphereContext(3), M_PI / 3, 16) == doctest::Approx(13.1583).epsilon(1e-4));
  CHECK(delsarte_code_bound(SphereContext(4), M_PI / 3, 16) == doctest::Approx(25.5584).epsilon(1e-4));
  CHECK_THROWS_AS(delsarte_code_bound(SphereContext(3), 0.0, 4), InvalidArgument);
}

TEST_CASE("sandwich bounds") {
  auto b = sandwich_bounds(1.0, 0.4);
  CHECK(b.lo == doctest::Approx(0.4));
  CHECK(b.hi == doctest::Approx(0.4));
  b = sandwich_bounds(0.0, 0.9);
  CHECK(b.lo == -1.0);
  CHECK(b.hi == 1.0);
  b = sandwich_bounds(0.5, 0.0);
  CHECK(b.lo == -0.5);
  CHECK(b.hi == 0.5);
  // every unital pd function respects its own sandwich
  const auto r = solve_finite(SphereContext(4), ThresholdSet::finite({0.2, -0.5}), 64);
  for (int i = 0; i <= 200; ++i) {
    const double t = -1.0 + i / 100.0;
    const auto s = sandwich_bounds(r.tau, t);
    CHECK(r.optimizer(t) >= s.lo - 1e-12);
    CHECK(r.optimizer(t) <= s.hi + 1e-12);
  }
}
