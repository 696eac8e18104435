#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "oracles.hpp"
#include "pdthresh/errors.hpp"
#include "pdthresh/gegenbauer.hpp"
#include "pdthresh/linalg.hpp"

using namespace pdthresh;
using boost::multiprecision::cpp_rational;
using boost::multiprecision::cpp_int;

namespace {

std::vector<double> test_points() {
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(-1.0 + i / 20.0);
  ts.push_back(0.1);
  ts.push_back(-0.1);
  ts.push_back(0.999999);
  return ts;
}

}  // namespace

TEST_CASE("Gamma_k matches the Boost Gegenbauer oracle") {
  for (int n : {2, 3, 4, 5, 8, 11}) {
    const SphereContext ctx(n);
    for (int k = 0; k <= 60; ++k) {
      for (double t : test_points()) {
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(t);
        CHECK(eval_gegenbauer(ctx, k, t) == doctest::Approx(oracle::gamma(n, k, t)).epsilon(1e-11).scale(1.0));
      }
    }
  }
}

TEST_CASE("n = 3 gives Legendre polynomials") {
  const SphereContext ctx(3);
  for (int k = 0; k <= 30; ++k) {
    for (double t : test_points()) {
      CHECK(std::abs(eval_gegenbauer(ctx, k, t) - boost::math::legendre_p(k, t)) < 1e-13);
    }
  }
  CHECK(eval_gegenbauer(ctx, 2, 0.1) == doctest::Approx(-0.485).epsilon(1e-15));
}

TEST_CASE("Gamma_k(1) = 1, parity and the bound |Gamma_k| <= 1") {
  for (int n : {2, 3, 4, 7, 20}) {
    const SphereContext ctx(n);
    for (int k = 0; k <= 200; k += 7) {
      CHECK(eval_gegenbauer(ctx, k, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
      for (double t : test_points()) {
        const double v = eval_gegenbauer(ctx, k, t);
        CHECK(std::abs(v) <= 1.0 + 1e-12);
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        CHECK(std::abs(eval_gegenbauer(ctx, k, -t) - sign * v) < 1e-12);
      }
    }
  }
}

TEST_CASE("eval_gegenbauer_all agrees with single evaluations") {
  const SphereContext ctx(6);
  const auto all = eval_gegenbauer_all(ctx, 80, 0.37);
  REQUIRE(all.size() == 81);
  for (int k = 0; k <= 80; ++k) CHECK(all[k] == eval_gegenbauer(ctx, k, 0.37));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(SphereContext(1), InvalidArgument);
  CHECK_THROWS_AS(SphereContext(-3), InvalidArgument);
  const SphereContext ctx(3);
  CHECK_THROWS_AS(eval_gegenbauer(ctx, 2, 1.5), InvalidArgument);
  CHECK_THROWS_AS(eval_gegenbauer(ctx, -1, 0.5), InvalidArgument);
  CHECK_THROWS_AS(eval_gegenbauer(ctx, 2, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
  CHECK(eval_gegenbauer(ctx, 3, 1.0 + 5e-13) == doctest::Approx(1.0));
  CHECK_THROWS_AS(GegenbauerSeries(ctx, {}), InvalidArgument);
  CHECK_THROWS_AS(GegenbauerSeries(ctx, {0.5, std::numeric_limits<double>::infinity()}), InvalidArgument);
}

TEST_CASE("harmonic dimensions against the generating function") {
  for (int n : {2, 3, 4, 5, 8, 13}) {
    const SphereContext ctx(n);
    const auto ref = oracle::harmonic_dims(n, 200);
    const auto real = harmonic_dimensions_real(ctx, 200);
    for (int k = 0; k <= 200; ++k) {
      CAPTURE(n);
      CAPTURE(k);
      CHECK(cpp_int(harmonic_dimension(ctx, k)) == ref[k]);
      CHECK(real[k] == doctest::Approx(ref[k].convert_to<double>()).epsilon(1e-12));
    }
  }
  CHECK(harmonic_dimension(SphereContext(3), 5) == 11);
  CHECK(harmonic_dimension(SphereContext(4), 5) == 36);
  CHECK(harmonic_dimension(SphereContext(2), 9) == 2);
  CHECK_THROWS_AS(harmonic_dimension(SphereContext(60), 400), RangeError);
}

TEST_CASE("detailed balance d_k c_k = d_{k+1} b_{k+1} holds exactly") {
  for (int n : {2, 3, 4, 5, 9}) {
    const auto d = oracle::harmonic_dims(n, 201);
    for (int k = 0; k <= 200; ++k) {
      const cpp_rational c = k == 0 ? cpp_rational(1) : cpp_rational(k + n - 2, 2 * k + n - 2);
      const cpp_rational b(k + 1, 2 * (k + 1) + n - 2);
      CHECK(cpp_rational(d[k]) * c == cpp_rational(d[k + 1]) * b);
      const auto w = recurrence_weights(SphereContext(n), k);
      CHECK(w.forward == doctest::Approx(c.convert_to<double>()).epsilon(1e-15));
    }
  }
}

TEST_CASE("orthogonality: <Gamma_i, Gamma_j> d_i = delta_ij") {
  for (int n : {2, 3, 4, 5, 8}) {
    const SphereContext ctx(n);
    const auto rule = oracle::angle_rule(n, 24);
    const int kmax = 40;
    std::vector<std::vector<double>> table;
    for (double t : rule.t) table.push_back(eval_gegenbauer_all(ctx, kmax, t));
    for (int i = 0; i <= kmax; ++i) {
      for (int j = i; j <= kmax; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.t.size(); ++q) s += rule.w[q] * table[q][i] * table[q][j];
        CHECK(std::abs(s * harmonic_dimensions_real(ctx, i)[i] - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
    }
  }
}

TEST_CASE("derivative identity against finite differences") {
  for (int n : {2, 3, 4, 6}) {
    const SphereContext ctx(n);
    for (int k = 0; k <= 25; ++k) {
      for (double t : {-0.9, -0.3, 0.0, 0.2, 0.75}) {
        const double h = 1e-5;
        const double fd = (eval_gegenbauer(ctx, k, t + h) - eval_gegenbauer(ctx, k, t - h)) / (2 * h);
        CHECK(eval_derivative(ctx, k, t) == doctest::Approx(fd).epsilon(1e-6).scale(1.0 + k * k));
      }
    }
    CHECK(eval_derivative(ctx, 1, 0.3) == doctest::Approx(1.0));
  }
  // Gamma_3'(0) = -3/(n-1)
  for (int n : {4, 5, 10}) {
    CHECK(eval_derivative(SphereContext(n), 3, 0.0) == doctest::Approx(-3.0 / (n - 1)).epsilon(1e-14));
  }
}

TEST_CASE("Clenshaw evaluation matches the direct sum") {
  for (int n : {2, 3, 5, 9}) {
    const SphereContext ctx(n);
    std::vector<double> a(50);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::cos(1.7 * k) / (1.0 + k);
    const GegenbauerSeries s(ctx, a);
    for (double t : test_points()) {
      double direct = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) direct += a[k] * oracle::gamma(n, static_cast<int>(k), t);
      CHECK(eval_series(s, t) == doctest::Approx(direct).epsilon(1e-11).scale(1.0));
      CHECK(s(t) == eval_series(s, t));
    }
  }
}

TEST_CASE("series helpers") {
  const SphereContext ctx(4);
  const GegenbauerSeries f(ctx, {0.25, 0.5, 0.0, 0.25});
  CHECK(f.degree() == 3);
  CHECK(f.linear_coefficient() == 0.5);
  CHECK(f.coeff(7) == 0.0);
  CHECK(f.value_at_one() == doctest::Approx(1.0));
  CHECK(f.is_unital());
  CHECK(f.is_positive_definite());
  CHECK(f(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  const GegenbauerSeries g(ctx, {0.5, 0.6, -0.1});
  CHECK_FALSE(g.is_positive_definite());
}

TEST_CASE("Darboux envelope exponent") {
  for (int n : {2, 3, 4, 6}) {
    for (double theta : {M_PI / 3, M_PI / 2}) {
      const auto fit = darboux_decay_fit(SphereContext(n), theta, 20, 2000);
      CAPTURE(n);
      CAPTURE(theta);
      CHECK(fit.expected_exponent == doctest::Approx((2.0 - n) / 2.0));
      CHECK(std::abs(fit.fitted_exponent - fit.expected_exponent) < 0.15);
    }
  }
  CHECK_THROWS_AS(darboux_decay_fit(SphereContext(3), 0.1, 20, 2000), DomainError);
  CHECK_THROWS_AS(darboux_decay_fit(SphereContext(3), 1.0, 20, 100), InvalidArgument);
}
