#pragma once

// Dense symmetric linear algebra: cyclic Jacobi eigensolver, correlation
// matrix certification, Gauss-Gegenbauer quadrature and reproducible random
// Gram matrices.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pdthresh/gegenbauer.hpp"

namespace pdthresh {

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square symmetric matrix. The upper triangle of the input is authoritative
/// and is mirrored into the lower triangle on construction.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix m);

  static SymmetricMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

  double frobenius_norm() const noexcept;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  Matrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;     // ascending
  std::optional<Matrix> vectors;  // columns are eigenvectors, same order as values
  int sweeps = 0;
  double off_norm = 0.0;  // final off-diagonal Frobenius norm
};

/// Cyclic Jacobi. Converges when the off-diagonal Frobenius norm drops to
/// 1e-12 * ||m||_F; throws NumericError after 60 sweeps.
EigenDecomposition sym_eigen(const SymmetricMatrix& m, bool want_vectors = false);

inline constexpr double kDefaultPsdTol = 1e-8;
inline constexpr double kRankTol = 1e-9;
inline constexpr double kDiagonalTol = 1e-10;

/// A symmetric matrix with unit diagonal that passed a PSD check.
class CorrelationMatrix {
 public:
  const SymmetricMatrix& base() const noexcept { return base_; }
  std::size_t dim() const noexcept { return base_.dim(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return base_(i, j); }
  double min_eig() const noexcept { return min_eig_; }
  int numeric_rank() const noexcept { return numeric_rank_; }

 private:
  friend CorrelationMatrix certify_correlation(const SymmetricMatrix&, double);
  CorrelationMatrix(SymmetricMatrix base, double min_eig, int rank)
      : base_(std::move(base)), min_eig_(min_eig), numeric_rank_(rank) {}

  SymmetricMatrix base_;
  double min_eig_;
  int numeric_rank_;
};

/// Throws CorrelationError when the diagonal is not 1 within 1e-10 or the
/// smallest eigenvalue is below -psd_tol.
CorrelationMatrix certify_correlation(const SymmetricMatrix& m, double psd_tol = kDefaultPsdTol);

/// Gauss rule for the probability measure proportional to (1-t^2)^{alpha-1/2} dt.
struct QuadratureRule {
  SphereContext context;
  std::vector<double> nodes;    // strictly increasing, inside (-1, 1)
  std::vector<double> weights;  // positive, summing to 1

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix with off-diagonal
/// sqrt(c_{k-1} b_k); nodes are Newton-polished and weights come from the
/// Christoffel function 1 / sum_k d_k Gamma_k(t)^2.
QuadratureRule gauss_gegenbauer(const SphereContext& ctx, int m_points);

/// Counter-based generator: draw i for key `seed` is
///   splitmix64_finalize(seed * 0x9E3779B97F4A7C15 + (i + 1) * 0xBF58476D1CE4E5B9)
/// where splitmix64_finalize(z) applies z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
/// z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31 (all mod 2^64).
/// Uniforms use the top 53 bits; normals use Box-Muller (cosine branch) on
/// draws 2i and 2i+1.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform in (0, 1].
  double uniform(std::uint64_t counter) const noexcept;
  /// Standard normal built from uniforms 2*counter and 2*counter+1.
  double normal(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t seed_;
};

/// num_points unit vectors in R^n with normalized standard-normal components
/// (component j of point i uses normal draw i*n + j).
Matrix random_unit_vectors(const SphereContext& ctx, int num_points, std::uint64_t seed);

/// Gram matrix of the rows of `points` (OpenMP parallel over rows).
SymmetricMatrix gram_matrix(const Matrix& points);
/// Serial reference for gram_matrix.
SymmetricMatrix gram_matrix_serial(const Matrix& points);

/// Certified Gram matrix of random points on S^{n-1}; rank is at most n.
CorrelationMatrix random_gram(const SphereContext& ctx, int num_points, std::uint64_t seed);

}  // namespace pdthresh
