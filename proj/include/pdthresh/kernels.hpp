#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a *_serial twin that is
// the reference the tests compare against; both produce bit-identical output
// because every element is computed independently in the same order.

#include <span>
#include <vector>

#include "pdthresh/gegenbauer.hpp"
#include "pdthresh/linalg.hpp"

namespace pdthresh {

/// table(i, k) = Gamma_k(nodes[i]) for k = 0..max_k.
Matrix gegenbauer_table(const SphereContext& ctx, std::span<const double> nodes, int max_k);
Matrix gegenbauer_table_serial(const SphereContext& ctx, std::span<const double> nodes, int max_k);

/// values[i] = f(points[i]).
std::vector<double> eval_series_batch(const GegenbauerSeries& f, std::span<const double> points);
std::vector<double> eval_series_batch_serial(const GegenbauerSeries& f,
                                             std::span<const double> points);

/// out(i, j) = f(m(i, j)) over the upper triangle, mirrored. Entries outside
/// [-1, 1] by at most 1e-9 are clamped; larger excursions throw InvalidArgument.
Matrix map_entries(const GegenbauerSeries& f, const SymmetricMatrix& m);
Matrix map_entries_serial(const GegenbauerSeries& f, const SymmetricMatrix& m);

}  // namespace pdthresh
