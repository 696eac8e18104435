#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>

#include "oracles.hpp"
#include "pdthresh/errors.hpp"
#include "pdthresh/linalg.hpp"

using namespace pdthresh;

namespace {

SymmetricMatrix random_symmetric(std::size_t dim, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) m(i, j) = nd(gen);
  return SymmetricMatrix(std::move(m));
}

Eigen::MatrixXd to_eigen(const SymmetricMatrix& s) {
  Eigen::MatrixXd e(s.dim(), s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < s.dim(); ++j) e(i, j) = s(i, j);
  return e;
}

}  // namespace

TEST_CASE("SymmetricMatrix mirrors the upper triangle and validates") {
  Matrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 0.3;
  m(1, 0) = 99;
  m(1, 1) = 1;
  const SymmetricMatrix s(m);
  CHECK(s(1, 0) == 0.3);
  CHECK_THROWS_AS(SymmetricMatrix(Matrix(2, 3)), InvalidArgument);
  CHECK_THROWS_AS(SymmetricMatrix(Matrix(0, 0)), InvalidArgument);
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(SymmetricMatrix{m}, InvalidArgument);
}

TEST_CASE("Jacobi eigenvalues agree with Eigen") {
  for (std::size_t dim : {1u, 2u, 3u, 7u, 20u, 45u}) {
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const auto s = random_symmetric(dim, seed * 31 + dim);
      const auto ed = sym_eigen(s, true);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(s));
      REQUIRE(ed.values.size() == dim);
      CHECK(std::is_sorted(ed.values.begin(), ed.values.end()));
      for (std::size_t i = 0; i < dim; ++i) {
        CHECK(ed.values[i] == doctest::Approx(ref.eigenvalues()(i)).epsilon(1e-10).scale(s.frobenius_norm()));
      }
      // Q Lambda Q^T = M and Q^T Q = I
      REQUIRE(ed.vectors);
      const Matrix& q = *ed.vectors;
      double recon = 0.0, ortho = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
          double a = 0.0, b = 0.0;
          for (std::size_t k = 0; k < dim; ++k) {
            a += q(i, k) * ed.values[k] * q(j, k);
            b += q(k, i) * q(k, j);
          }
          recon += (a - s(i, j)) * (a - s(i, j));
          ortho = std::max(ortho, std::abs(b - (i == j ? 1.0 : 0.0)));
        }
      }
      CHECK(std::sqrt(recon) <= 1e-9 * s.frobenius_norm());
      CHECK(ortho < 1e-10);
      CHECK(ed.off_norm <= 1e-12 * s.frobenius_norm());
    }
  }
}

TEST_CASE("eigenvalue invariants: trace and Frobenius norm") {
  const auto s = random_symmetric(30, 99);
  const auto ev = sym_eigen(s).values;
  double tr = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) tr += s(i, i);
  for (double v : ev) sq += v * v;
  CHECK(std::accumulate(ev.begin(), ev.end(), 0.0) == doctest::Approx(tr).epsilon(1e-11));
  CHECK(std::sqrt(sq) == doctest::Approx(s.frobenius_norm()).epsilon(1e-11));
}

TEST_CASE("certify_correlation") {
  Matrix m(2, 2);
  m(0, 0) = m(1, 1) = 1.0;
  m(0, 1) = 0.9;
  const auto c = certify_correlation(SymmetricMatrix(m));
  CHECK(c.min_eig() == doctest::Approx(0.1));
  CHECK(c.numeric_rank() == 2);

  m(0, 1) = 2.0;
  try {
    certify_correlation(SymmetricMatrix(m));
    FAIL("expected CorrelationError");
  } catch (const CorrelationError& e) {
    CHECK(e.min_eig() == doctest::Approx(-1.0));
  }
  m(0, 1) = 0.0;
  m(1, 1) = 1.1;
  CHECK_THROWS_AS(certify_correlation(SymmetricMatrix(m)), CorrelationError);

  CHECK(certify_correlation(SymmetricMatrix::identity(5)).numeric_rank() == 5);
}

TEST_CASE("Gram matrices of points in R^n have rank <= n") {
  for (int n : {2, 3, 5}) {
    const auto g = random_gram(SphereContext(n), 25, 17);
    CHECK(g.numeric_rank() == n);
    CHECK(g.min_eig() > -1e-12);
    for (std::size_t i = 0; i < g.dim(); ++i) CHECK(g(i, i) == 1.0);
  }
}

TEST_CASE("parallel and serial Gram kernels agree exactly") {
  const auto pts = random_unit_vectors(SphereContext(7), 60, 5);
  CHECK(gram_matrix(pts) == gram_matrix_serial(pts));
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    double s = 0.0;
    for (double v : pts.row(i)) s += v * v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("CounterRng is a pure function of (seed, counter)") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.bits(7) == b.bits(7));
  CHECK(a.bits(7) != c.bits(7));
  double mean = 0.0, var = 0.0, umin = 1.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double z = a.normal(i);
    mean += z;
    var += z * z;
    const double u = a.uniform(i);
    CHECK_MESSAGE((u > 0.0 && u <= 1.0), "uniform out of range");
    umin = std::min(umin, u);
  }
  mean /= count;
  var = var / count - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
  CHECK(random_gram(SphereContext(4), 10, 3).base() == random_gram(SphereContext(4), 10, 3).base());
}

TEST_CASE("Gauss-Gegenbauer quadrature") {
  SUBCASE("n = 3 nodes are the Legendre zeros") {
    for (int m : {1, 2, 5, 16, 33}) {
      const auto rule = gauss_gegenbauer(SphereContext(3), m);
      auto zeros = boost::math::legendre_p_zeros<double>(m);  // nonnegative half
      std::vector<double> all;
      for (double z : zeros) {
        all.push_back(z);
        if (z != 0.0) all.push_back(-z);
      }
      std::sort(all.begin(), all.end());
      REQUIRE(all.size() == rule.nodes.size());
      for (std::size_t i = 0; i < all.size(); ++i) CHECK(rule.nodes[i] == doctest::Approx(all[i]).epsilon(1e-14));
    }
  }
  SUBCASE("exact for degree <= 2m - 1 against the angle oracle") {
    for (int n : {2, 3, 4, 7}) {
      const SphereContext ctx(n);
      const int m = 12;
      const auto rule = gauss_gegenbauer(ctx, m);
      CHECK(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
      CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
      for (int p = 0; p < 2 * m; ++p) {
        auto mono = [p](double t) { return std::pow(t, p); };
        CHECK(rule.integrate(mono) == doctest::Approx(oracle::sphere_average(n, mono)).epsilon(1e-12).scale(1.0));
      }
    }
  }
  SUBCASE("large rules stay accurate") {
    const SphereContext ctx(5);
    const auto rule = gauss_gegenbauer(ctx, 1500);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(1.0));
    const auto d = harmonic_dimensions_real(ctx, 1000);
    const double norm = rule.integrate([&](double t) {
      const double g = eval_gegenbauer(ctx, 1000, t);
      return g * g;
    });
    CHECK(norm * d[1000] == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(gauss_gegenbauer(SphereContext(3), 0), InvalidArgument);
  CHECK_THROWS_AS(gauss_gegenbauer(SphereContext(3), 5000), InvalidArgument);
}
