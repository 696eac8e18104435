#pragma once

// File formats shared by the CLI commands.
//
// Matrix files: plain CSV, one row per line, no header; written with 17
// significant digits.
//
// Coefficient files: JSON object
//   {"n": int, "degree": int, "coeffs": [float...], "threshold_set": {...} | null,
//    "tau": float | null, ...}
// where threshold_set is {"kind": "finite", "points": [...]},
// {"kind": "interval", "lo": x, "hi": y} or
// {"kind": "union", "points": [...], "lo": x, "hi": y}. Extra keys are ignored
// on input.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "pdthresh/faithfulness.hpp"
#include "pdthresh/gegenbauer.hpp"
#include "pdthresh/linalg.hpp"
#include "pdthresh/thresholding.hpp"

namespace pdthresh {

inline constexpr const char* kToolVersion = "1.0.0";

/// %.17g
std::string format_double(double v);

/// Throws InvalidArgument on unreadable files, ragged rows, non-square data
/// or unparsable numbers.
Matrix read_matrix_csv(const std::filesystem::path& path);
/// read_matrix_csv followed by symmetrization (A + A^T) / 2; entries that
/// disagree with their transpose by more than 1e-8 are rejected.
SymmetricMatrix read_symmetric_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

nlohmann::json to_json(const ThresholdSet& k_set);
ThresholdSet threshold_set_from_json(const nlohmann::json& j);

nlohmann::json coefficient_json(const GegenbauerSeries& s,
                                const std::optional<ThresholdSet>& k_set,
                                std::optional<double> tau);
nlohmann::json faithfulness_json(const FaithfulnessResult& r, const std::optional<ThresholdSet>& k_set);

struct CoefficientFile {
  GegenbauerSeries series;
  std::optional<ThresholdSet> threshold_set;
  std::optional<double> tau;
};

CoefficientFile coefficient_file_from_json(const nlohmann::json& j);
CoefficientFile read_coefficient_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json report_json(const ThresholdReport& r);

struct CurvePoint {
  double t;
  double value;
};

/// samples >= 2 uniformly spaced points on [t_min, t_max], endpoints included.
std::vector<CurvePoint> emit_curve(const GegenbauerSeries& s, double t_min, double t_max, int samples);
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

}  // namespace pdthresh
