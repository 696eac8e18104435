#include "pdthresh/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pdthresh/errors.hpp"
#include "pdthresh/kernels.hpp"

namespace pdthresh {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  const auto first = cell.find_first_not_of(" \t\r");
  const auto last = cell.find_last_not_of(" \t\r");
  if (first == std::string::npos) {
    throw InvalidArgument(path.string() + ":" + std::to_string(line) + ": empty cell");
  }
  const std::string trimmed = cell.substr(first, last - first + 1);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size() || errno == ERANGE || !std::isfinite(v)) {
    throw InvalidArgument(path.string() + ":" + std::to_string(line) + ": bad number '" +
                          trimmed + "'");
  }
  return v;
}

}  // namespace

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell, path, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument(path.string() + ": no data");
  if (rows.size() != rows.front().size()) {
    throw InvalidArgument(path.string() + ": matrix is not square");
  }
  Matrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return m;
}

SymmetricMatrix read_symmetric_csv(const std::filesystem::path& path) {
  Matrix m = read_matrix_csv(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-8) {
        throw InvalidArgument(path.string() + ": matrix is not symmetric at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
      }
      m(i, j) = 0.5 * (m(i, j) + m(j, i));
    }
  }
  return SymmetricMatrix(std::move(m));
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

json to_json(const ThresholdSet& k_set) {
  json j{{"kind", to_string(k_set.kind())}, {"symmetric", k_set.symmetric()}};
  if (k_set.kind() != ThresholdSet::Kind::interval) j["points"] = k_set.points();
  if (const auto& r = k_set.range()) {
    j["lo"] = r->first;
    j["hi"] = r->second;
  }
  return j;
}

ThresholdSet threshold_set_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "finite") return ThresholdSet::finite(j.at("points").get<std::vector<double>>());
    if (kind == "interval") return ThresholdSet::interval(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (kind == "union") {
      return ThresholdSet::union_of(j.at("points").get<std::vector<double>>(),
                                    j.at("lo").get<double>(), j.at("hi").get<double>());
    }
    throw InvalidArgument("unknown threshold set kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed threshold_set: ") + e.what());
  }
}

json coefficient_json(const GegenbauerSeries& s, const std::optional<ThresholdSet>& k_set,
                      std::optional<double> tau) {
  json j{{"n", s.context().n()}, {"degree", s.degree()}, {"coeffs", s.coeffs()}};
  j["threshold_set"] = k_set ? to_json(*k_set) : json(nullptr);
  j["tau"] = tau ? json(*tau) : json(nullptr);
  return j;
}

json faithfulness_json(const FaithfulnessResult& r, const std::optional<ThresholdSet>& k_set) {
  json j = coefficient_json(r.optimizer, k_set, r.tau);
  j["degree_used"] = r.degree_used;
  j["residual_sup"] = r.residual_sup;
  j["recovery_norm"] = r.recovery_norm;
  j["diagnostics"] = json{{"status", to_string(r.diagnostics.status)},
                          {"iterations", r.diagnostics.iterations},
                          {"lp_solves", r.diagnostics.lp_solves},
                          {"cutting_rounds", r.diagnostics.cutting_rounds},
                          {"lp_residual", r.diagnostics.lp_residual}};
  return j;
}

CoefficientFile coefficient_file_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    if (j.contains("degree") && j.at("degree").get<int>() != static_cast<int>(coeffs.size()) - 1) {
      throw InvalidArgument("coefficient file: degree does not match the number of coefficients");
    }
    std::optional<ThresholdSet> k_set;
    if (j.contains("threshold_set") && !j.at("threshold_set").is_null()) {
      k_set = threshold_set_from_json(j.at("threshold_set"));
    }
    std::optional<double> tau;
    if (j.contains("tau") && !j.at("tau").is_null()) tau = j.at("tau").get<double>();
    return CoefficientFile{GegenbauerSeries(SphereContext(n), std::move(coeffs)), std::move(k_set), tau};
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed coefficient file: ") + e.what());
  }
}

CoefficientFile read_coefficient_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": invalid JSON: " + e.what());
  }
  return coefficient_file_from_json(j);
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json report_json(const ThresholdReport& r) {
  return json{{"min_eig_before", r.min_eig_before},
              {"min_eig_after", r.min_eig_after},
              {"rank_before", r.rank_before},
              {"tau_used", r.tau_used},
              {"max_abs_entry_change", r.max_abs_entry_change},
              {"sandwich_violations", r.sandwich_violations},
              {"entries_zeroed", r.entries_zeroed},
              {"warnings", r.warnings},
              {"version", kToolVersion}};
}

std::vector<CurvePoint> emit_curve(const GegenbauerSeries& s, double t_min, double t_max, int samples) {
  if (samples < 2) throw InvalidArgument("samples must be >= 2");
  if (!(t_min < t_max)) throw InvalidArgument("need t_min < t_max");
  std::vector<double> ts(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    ts[i] = i + 1 == samples ? t_max : t_min + (t_max - t_min) * i / (samples - 1);
  }
  const auto vals = eval_series_batch(s, ts);
  std::vector<CurvePoint> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = {ts[i], vals[i]};
  return out;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << "t,f\n";
  for (const auto& p : curve) out << format_double(p.t) << ',' << format_double(p.value) << '\n';
}

}  // namespace pdthresh
