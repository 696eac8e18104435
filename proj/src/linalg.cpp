#include "pdthresh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pdthresh/errors.hpp"

namespace pdthresh {

SymmetricMatrix::SymmetricMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InvalidArgument("symmetric matrix must be square");
  if (m_.rows() == 0) throw InvalidArgument("matrix dimension must be >= 1");
  for (double v : m_.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("matrix entries must be finite");
  }
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) m_(i, j) = m_(j, i);
  }
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return SymmetricMatrix(std::move(m));
}

double SymmetricMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : m_.data()) s += v * v;
  return std::sqrt(s);
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eigen(const SymmetricMatrix& m, bool want_vectors) {
  constexpr int kMaxSweeps = 60;
  const std::size_t n = m.dim();
  if (n > 4096) throw InvalidArgument("sym_eigen supports dimension <= 4096");

  Matrix a = m.matrix();
  Matrix v;
  if (want_vectors) {
    v = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  }
  const double target = 1e-12 * m.frobenius_norm();

  EigenDecomposition out;
  double off = off_diagonal_norm(a);
  while (off > target) {
    if (out.sweeps == kMaxSweeps) {
      throw NumericError("Jacobi eigensolver did not converge in 60 sweeps", off);
    }
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    off = off_diagonal_norm(a);
  }
  out.off_norm = off;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(order[i], order[i]);
  if (want_vectors) {
    Matrix sorted(n, n);
    for (std::size_t col = 0; col < n; ++col) {
      for (std::size_t k = 0; k < n; ++k) sorted(k, col) = v(k, order[col]);
    }
    out.vectors = std::move(sorted);
  }
  return out;
}

CorrelationMatrix certify_correlation(const SymmetricMatrix& m, double psd_tol) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (std::abs(m(i, i) - 1.0) > kDiagonalTol) {
      throw CorrelationError("not a correlation matrix (diagonal)",
                             std::numeric_limits<double>::quiet_NaN());
    }
  }
  const auto eig = sym_eigen(m);
  const double min_eig = eig.values.front();
  if (min_eig < -psd_tol) {
    throw CorrelationError("not PSD: min eigenvalue " + std::to_string(min_eig), min_eig);
  }
  const double max_eig = eig.values.back();
  const auto rank = std::count_if(eig.values.begin(), eig.values.end(),
                                  [max_eig](double l) { return l > kRankTol * max_eig; });
  return CorrelationMatrix(m, min_eig, static_cast<int>(rank));
}

namespace {

// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
// diag has size m, sub has size m with sub[i] coupling i and i+1 (sub[m-1] unused).
void tridiagonal_eigenvalues(std::vector<double>& diag, std::vector<double>& sub) {
  const int m = static_cast<int>(diag.size());
  for (int l = 0; l < m; ++l) {
    int iter = 0;
    int k;
    do {
      for (k = l; k < m - 1; ++k) {
        const double dd = std::abs(diag[k]) + std::abs(diag[k + 1]);
        if (std::abs(sub[k]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (k != l) {
        if (iter++ == 60) throw NumericError("tridiagonal QL did not converge", std::abs(sub[l]));
        double g = (diag[l + 1] - diag[l]) / (2.0 * sub[l]);
        double r = std::hypot(g, 1.0);
        g = diag[k] - diag[l] + sub[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = k - 1; i >= l; --i) {
          double f = s * sub[i];
          const double b = c * sub[i];
          r = std::hypot(f, g);
          sub[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            sub[k] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        diag[l] -= p;
        sub[l] = g;
        sub[k] = 0.0;
      }
    } while (k != l);
  }
}

}  // namespace

QuadratureRule gauss_gegenbauer(const SphereContext& ctx, int m_points) {
  if (m_points < 1 || m_points > 2048) {
    throw InvalidArgument("quadrature size must be in [1, 2048]");
  }
  const auto m = static_cast<std::size_t>(m_points);
  std::vector<double> diag(m, 0.0);
  std::vector<double> sub(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    const double c = recurrence_weights(ctx, static_cast<int>(k) - 1).forward;
    const double b = recurrence_weights(ctx, static_cast<int>(k)).backward;
    sub[k - 1] = std::sqrt(c * b);
  }
  tridiagonal_eigenvalues(diag, sub);
  std::sort(diag.begin(), diag.end());

  const auto dims = harmonic_dimensions_real(ctx, m_points);
  std::vector<double> gamma(m + 1);
  QuadratureRule rule{ctx, std::move(diag), std::vector<double>(m)};
  for (std::size_t j = 0; j < m; ++j) {
    double& t = rule.nodes[j];
    // Newton on Gamma_m; the eigenvalue is already accurate to ~1e-15 absolute.
    for (int it = 0; it < 2 && m_points > 1; ++it) {
      const double deriv = eval_derivative(ctx, m_points, t);
      if (deriv == 0.0) break;
      const double step = eval_gegenbauer(ctx, m_points, t) / deriv;
      if (!(std::abs(step) < 1e-10)) break;
      t = std::clamp(t - step, -1.0, 1.0);
    }
    eval_gegenbauer_all(ctx, t, gamma);
    double christoffel = 0.0;
    for (std::size_t k = 0; k < m; ++k) christoffel += dims[k] * gamma[k] * gamma[k];
    rule.weights[j] = 1.0 / christoffel;
  }
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w /= total;
  for (std::size_t j = 1; j < m; ++j) {
    if (!(rule.nodes[j] > rule.nodes[j - 1])) {
      throw NumericError("quadrature nodes are not strictly increasing");
    }
  }
  return rule;
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  std::uint64_t z = seed_ * 0x9E3779B97F4A7C15ULL + (counter + 1) * 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const noexcept {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix random_unit_vectors(const SphereContext& ctx, int num_points, std::uint64_t seed) {
  if (num_points < 1) throw InvalidArgument("num_points must be >= 1");
  const auto n = static_cast<std::size_t>(ctx.n());
  const CounterRng rng(seed);
  Matrix x(static_cast<std::size_t>(num_points), n);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      x(i, j) = rng.normal(i * n + j);
      norm2 += x(i, j) * x(i, j);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t j = 0; j < n; ++j) x(i, j) *= inv;
  }
  return x;
}

namespace {

double clamped_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return std::clamp(s, -1.0, 1.0);
}

}  // namespace

SymmetricMatrix gram_matrix(const Matrix& points) {
  const auto rows = static_cast<std::ptrdiff_t>(points.rows());
  Matrix g(points.rows(), points.rows());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    g(ui, ui) = 1.0;
    for (std::size_t j = ui + 1; j < points.rows(); ++j) {
      g(ui, j) = clamped_dot(points.row(ui), points.row(j));
    }
  }
  return SymmetricMatrix(std::move(g));
}

SymmetricMatrix gram_matrix_serial(const Matrix& points) {
  Matrix g(points.rows(), points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    g(i, i) = 1.0;
    for (std::size_t j = i + 1; j < points.rows(); ++j) {
      g(i, j) = clamped_dot(points.row(i), points.row(j));
    }
  }
  return SymmetricMatrix(std::move(g));
}

CorrelationMatrix random_gram(const SphereContext& ctx, int num_points, std::uint64_t seed) {
  return certify_correlation(gram_matrix(random_unit_vectors(ctx, num_points, seed)));
}

}  // namespace pdthresh
