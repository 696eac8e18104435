#include "pdthresh/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "pdthresh/errors.hpp"

namespace pdthresh {

namespace {

constexpr double kEntrySlack = 1e-9;

double clamp_entry(double v) {
  if (!(std::abs(v) <= 1.0 + kEntrySlack)) {
    throw InvalidArgument("matrix entry outside [-1, 1]: " + std::to_string(v));
  }
  return std::clamp(v, -1.0, 1.0);
}

void check_entries(const SymmetricMatrix& m) {
  for (double v : m.matrix().data()) clamp_entry(v);
}

}  // namespace

Matrix gegenbauer_table(const SphereContext& ctx, std::span<const double> nodes, int max_k) {
  Matrix table(nodes.size(), static_cast<std::size_t>(max_k) + 1);
  const auto count = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    eval_gegenbauer_all(ctx, nodes[ui], table.row(ui));
  }
  return table;
}

Matrix gegenbauer_table_serial(const SphereContext& ctx, std::span<const double> nodes,
                               int max_k) {
  Matrix table(nodes.size(), static_cast<std::size_t>(max_k) + 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) eval_gegenbauer_all(ctx, nodes[i], table.row(i));
  return table;
}

std::vector<double> eval_series_batch(const GegenbauerSeries& f, std::span<const double> points) {
  std::vector<double> out(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = eval_series(f, points[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<double> eval_series_batch_serial(const GegenbauerSeries& f,
                                             std::span<const double> points) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = eval_series(f, points[i]);
  return out;
}

Matrix map_entries(const GegenbauerSeries& f, const SymmetricMatrix& m) {
  check_entries(m);
  const std::size_t n = m.dim();
  Matrix out(n, n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t j = ui; j < n; ++j) out(ui, j) = eval_series(f, clamp_entry(m(ui, j)));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  return out;
}

Matrix map_entries_serial(const GegenbauerSeries& f, const SymmetricMatrix& m) {
  check_entries(m);
  const std::size_t n = m.dim();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) out(i, j) = eval_series(f, clamp_entry(m(i, j)));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  return out;
}

}  // namespace pdthresh
