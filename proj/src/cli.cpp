#include "pdthresh/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdthresh/errors.hpp"
#include "pdthresh/faithfulness.hpp"
#include "pdthresh/gegenbauer.hpp"
#include "pdthresh/io.hpp"
#include "pdthresh/linalg.hpp"
#include "pdthresh/thresholding.hpp"

namespace pdthresh::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::vector<double> parse_csv_floats(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
      throw InvalidArgument("bad number '" + cell + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty point list");
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("interval must look like LO:HI");
  const auto lo = parse_csv_floats(text.substr(0, colon));
  const auto hi = parse_csv_floats(text.substr(colon + 1));
  if (lo.size() != 1 || hi.size() != 1) throw InvalidArgument("interval must look like LO:HI");
  return {lo[0], hi[0]};
}

// Output files must land in an existing directory.
const CLI::Validator kWritablePath(
    [](std::string& p) -> std::string {
      const fs::path parent = fs::path(p).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) {
        return "directory does not exist: " + parent.string();
      }
      if (fs::is_directory(p)) return "path is a directory: " + p;
      return {};
    },
    "PATH", "WritablePath");

void print(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

struct Options {
  int n = 0;
  int k = 0;
  double t = 0.0;
  double eps = 0.0;
  std::string points;
  std::string interval;
  int degree = 0;
  int kcap = 0;
  double radius = 0.0;
  double theta = 0.0;
  std::string input, output, report, coeffs, out_path;
  bool repair = false;
  int samples = 0;
  double t_min = -1.0, t_max = 1.0;
  int num_points = 0;
  std::uint64_t seed = 0;
};

std::optional<int> opt_int(const CLI::App* app, const char* name, int value) {
  if (app->count(name) == 0) return std::nullopt;
  return value;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positive definite thresholding on spheres: Gegenbauer expansions, faithfulness LPs "
               "and PSD-certified correlation-matrix thresholding.",
               "pdthresh"};
  app.set_version_flag("--version", std::string("pdthresh ") + kToolVersion);
  app.require_subcommand(1);
  Options o;
  std::function<void()> action;

  auto* gegen = app.add_subcommand("gegenbauer", "Evaluate Gamma_k^(n)(t) and its derivative");
  gegen->add_option("--n", o.n, "sphere dimension n (S^{n-1})")->required();
  gegen->add_option("--k", o.k, "degree")->required();
  gegen->add_option("--t", o.t, "point in [-1, 1]")->required();
  gegen->callback([&] {
    action = [&] {
      const SphereContext ctx(o.n);
      print(out, json{{"n", o.n},
                      {"k", o.k},
                      {"t", o.t},
                      {"value", eval_gegenbauer(ctx, o.k, o.t)},
                      {"derivative", eval_derivative(ctx, o.k, o.t)}});
    };
  });

  auto* faith = app.add_subcommand("faithfulness", "Solve the faithfulness LP for a threshold set");
  faith->add_option("--n", o.n, "sphere dimension")->required();
  auto* f_points = faith->add_option("--points", o.points, "comma-separated points of K");
  auto* f_interval = faith->add_option("--interval", o.interval, "K = [LO, HI]");
  f_points->excludes(f_interval);
  faith->add_option("--degree", o.degree, "fixed truncation degree (default: automatic)");
  faith->add_option("--out", o.out_path, "write the coefficient JSON here")->check(kWritablePath);
  faith->callback([&] {
    if (faith->count("--points") + faith->count("--interval") != 1) {
      throw CLI::RequiredError("exactly one of --points and --interval");
    }
    action = [&] {
      const SphereContext ctx(o.n);
      const ThresholdSet k_set = o.points.empty()
                                     ? std::apply(ThresholdSet::interval, parse_range(o.interval))
                                     : ThresholdSet::finite(parse_csv_floats(o.points));
      const auto r = solve_faithfulness(ctx, k_set, opt_int(faith, "--degree", o.degree));
      const json j = faithfulness_json(r, k_set);
      if (!o.out_path.empty()) write_json_file(o.out_path, j);
      print(out, j);
    };
  });

  auto* closed = app.add_subcommand("closed-form", "Closed-form constructions and bounds");
  closed->require_subcommand(1);
  auto* one = closed->add_subcommand("one-point", "f = a_1 Gamma_1 + (1 - a_1) Gamma_2 vanishing at eps");
  one->add_option("--n", o.n)->required();
  one->add_option("--eps", o.eps)->required();
  one->callback([&] {
    action = [&] {
      const auto r = one_point_construction(SphereContext(o.n), o.eps);
      json j = faithfulness_json(r, ThresholdSet::finite({o.eps}));
      j["method"] = "one-point";
      print(out, j);
    };
  });
  auto* two = closed->add_subcommand("two-point", "tau({-eps, eps}) by the odd-degree formula");
  two->add_option("--n", o.n)->required();
  two->add_option("--eps", o.eps)->required();
  two->add_option("--kcap", o.kcap, "scan odd degrees up to 2 kcap - 1");
  two->callback([&] {
    action = [&] {
      const auto r = two_point_faithfulness(SphereContext(o.n), o.eps, opt_int(two, "--kcap", o.kcap));
      json j = faithfulness_json(r.result, ThresholdSet::finite({-o.eps, o.eps}));
      j["method"] = "two-point";
      j["sigma"] = r.sigma;
      j["maximizing_degree"] = r.maximizing_degree;
      j["scanned_to"] = r.scanned_to;
      print(out, j);
    };
  });
  auto* ib = closed->add_subcommand("interval-bound", "Upper bound on lim tau([-eps, eps])");
  ib->add_option("--n", o.n)->required();
  ib->callback([&] {
    action = [&] {
      const auto r = interval_limit_bound(SphereContext(o.n));
      print(out, json{{"n", o.n},
                      {"trivial", r.trivial},
                      {"sigma", r.trivial ? json(nullptr) : json(r.sigma)},
                      {"bound", r.bound},
                      {"maximizing_degree", r.maximizing_degree},
                      {"scanned_to", r.scanned_to}});
    };
  });

  auto* cap = app.add_subcommand("cap-kernel", "Autocorrelation of a spherical cap indicator");
  cap->add_option("--n", o.n)->required();
  cap->add_option("--radius", o.radius, "cap angular radius r in (0, pi/2]")->required();
  o.degree = 200;
  cap->add_option("--degree", o.degree, "truncation degree")->capture_default_str();
  cap->add_option("--out", o.out_path)->check(kWritablePath);
  cap->callback([&] {
    action = [&] {
      if (!(o.radius > 0.0)) throw InvalidArgument("radius must be positive");
      const int quad = std::min(2048, std::max(2 * o.degree,
                                               static_cast<int>(std::ceil(3.0 * M_PI / o.radius)) + 1));
      const auto c = cap_autocorrelation(SphereContext(o.n), o.radius, o.degree, quad);
      json j = coefficient_json(c.series, std::nullopt, c.series.linear_coefficient());
      j["radius"] = c.radius;
      j["support_edge"] = c.support_edge;
      j["quad_points"] = c.quad_points;
      if (!o.out_path.empty()) write_json_file(o.out_path, j);
      print(out, j);
    };
  });

  auto* del = app.add_subcommand("delsarte-bound", "Delsarte LP bound for spherical codes");
  del->add_option("--n", o.n)->required();
  del->add_option("--theta", o.theta, "minimal angle in (0, pi]")->required();
  del->add_option("--degree", o.degree)->required();
  del->callback([&] {
    action = [&] {
      const auto r = delsarte_lp(SphereContext(o.n), o.theta, o.degree);
      print(out, json{{"n", o.n},
                      {"theta", o.theta},
                      {"degree", o.degree},
                      {"bound", r.bound},
                      {"coeffs", r.function.coeffs()},
                      {"grid_points", r.grid_points},
                      {"lp_solves", r.diagnostics.lp_solves},
                      {"lp_residual", r.diagnostics.lp_residual}});
    };
  });

  auto* thr = app.add_subcommand("threshold", "Apply a positive definite thresholder to a correlation matrix");
  thr->add_option("--n", o.n, "sphere dimension of the thresholder")->required();
  thr->add_option("--input", o.input, "correlation matrix CSV")->required()->check(CLI::ExistingFile);
  auto* t_coeffs = thr->add_option("--coeffs", o.coeffs, "coefficient JSON")->check(CLI::ExistingFile);
  auto* t_points = thr->add_option("--points", o.points, "solve for K = these points");
  t_coeffs->excludes(t_points);
  thr->add_option("--output", o.output)->required()->check(kWritablePath);
  thr->add_option("--report", o.report)->check(kWritablePath);
  thr->callback([&] {
    if (thr->count("--coeffs") + thr->count("--points") != 1) {
      throw CLI::RequiredError("exactly one of --coeffs and --points");
    }
    action = [&] {
      const SphereContext ctx(o.n);
      std::vector<std::string> warnings;
      const auto m = certify_input(read_symmetric_csv(o.input), warnings);
      std::optional<GegenbauerSeries> series;
      std::optional<ThresholdSet> k_set;
      if (!o.coeffs.empty()) {
        auto file = read_coefficient_file(o.coeffs);
        if (!(file.series.context() == ctx)) {
          throw InvalidArgument("coefficient file is for n = " +
                                std::to_string(file.series.context().n()) + ", not " +
                                std::to_string(o.n));
        }
        series = std::move(file.series);
        k_set = std::move(file.threshold_set);
      } else {
        k_set = ThresholdSet::finite(parse_csv_floats(o.points));
        series = solve_faithfulness(ctx, *k_set).optimizer;
      }
      auto [after, rep] = apply_entrywise(*series, m, k_set);
      rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());
      write_matrix_csv(o.output, after.base().matrix());
      const json j = report_json(rep);
      if (!o.report.empty()) write_json_file(o.report, j);
      print(out, j);
    };
  });

  auto* hard = app.add_subcommand("hard-threshold", "Zero entries below eps in absolute value");
  hard->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
  hard->add_option("--eps", o.eps)->required();
  hard->add_option("--output", o.output)->required()->check(kWritablePath);
  hard->add_flag("--repair", o.repair, "shrink toward the identity until PSD");
  hard->callback([&] {
    action = [&] {
      std::vector<std::string> warnings;
      const auto m = certify_input(read_symmetric_csv(o.input), warnings);
      auto [after, rep] = hard_threshold(m, o.eps);
      rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());
      json j;
      if (o.repair) {
        const auto [lambda, repaired] = shrinkage_repair(after);
        write_matrix_csv(o.output, repaired.base().matrix());
        j = report_json(rep);
        j["repair_lambda"] = lambda;
        j["min_eig_repaired"] = repaired.min_eig();
      } else {
        write_matrix_csv(o.output, after.matrix());
        j = report_json(rep);
      }
      print(out, j);
    };
  });

  auto* cs = app.add_subcommand("check-structural", "Second-order difference inequality for a series");
  cs->add_option("--coeffs", o.coeffs)->required()->check(CLI::ExistingFile);
  cs->callback([&] {
    action = [&] {
      const auto file = read_coefficient_file(o.coeffs);
      const auto r = structural_check(file.series);
      print(out, json{{"n", file.series.context().n()},
                      {"degree", file.series.degree()},
                      {"ok", r.ok()},
                      {"min_margin", r.min_margin},
                      {"violations", r.violations},
                      {"margins", r.margins}});
    };
  });

  auto* plot = app.add_subcommand("plot-data", "Emit (t, f(t)) samples as CSV");
  auto* p_coeffs = plot->add_option("--coeffs", o.coeffs)->check(CLI::ExistingFile);
  auto* p_n = plot->add_option("--n", o.n);
  auto* p_points = plot->add_option("--points", o.points);
  p_coeffs->excludes(p_n)->excludes(p_points);
  p_n->needs(p_points);
  p_points->needs(p_n);
  plot->add_option("--samples", o.samples)->required();
  plot->add_option("--t-min", o.t_min)->capture_default_str();
  plot->add_option("--t-max", o.t_max)->capture_default_str();
  plot->add_option("--out", o.out_path)->required()->check(kWritablePath);
  plot->callback([&] {
    if (plot->count("--coeffs") + plot->count("--points") != 1) {
      throw CLI::RequiredError("either --coeffs or --n with --points");
    }
    action = [&] {
      std::optional<GegenbauerSeries> series;
      if (!o.coeffs.empty()) {
        series = read_coefficient_file(o.coeffs).series;
      } else {
        series = solve_faithfulness(SphereContext(o.n), ThresholdSet::finite(parse_csv_floats(o.points)))
                     .optimizer;
      }
      write_curve_csv(o.out_path, emit_curve(*series, o.t_min, o.t_max, o.samples));
      print(out, json{{"samples", o.samples}, {"out", o.out_path}});
    };
  });

  auto* rg = app.add_subcommand("random-gram", "Gram matrix of random unit vectors in R^n");
  rg->add_option("--n", o.n)->required();
  rg->add_option("--points", o.num_points, "number of vectors")->required();
  rg->add_option("--seed", o.seed)->required();
  rg->add_option("--out", o.out_path)->required()->check(kWritablePath);
  rg->callback([&] {
    action = [&] {
      const auto g = random_gram(SphereContext(o.n), o.num_points, o.seed);
      write_matrix_csv(o.out_path, g.base().matrix());
      print(out, json{{"n", o.n}, {"points", o.num_points}, {"seed", o.seed}, {"out", o.out_path}});
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "pdthresh " << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return kUsageError;
  }

  try {
    action();
    return kOk;
  } catch (const InvalidArgument& e) {
    err << "error: invalid_argument: " << one_line(e.what()) << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error: domain_error: " << one_line(e.what()) << '\n';
  } catch (const RangeError& e) {
    err << "error: range_error: " << one_line(e.what()) << '\n';
  } catch (const NumericError& e) {
    err << "error: numeric_error: " << one_line(e.what()) << '\n';
  } catch (const CorrelationError& e) {
    err << "error: correlation_error: " << one_line(e.what()) << '\n';
  } catch (const InternalError& e) {
    err << "error: internal_error: " << one_line(e.what()) << '\n';
  } catch (const std::exception& e) {
    err << "error: failure: " << one_line(e.what()) << '\n';
  }
  return kComputationFailure;
}

}  // namespace pdthresh::cli
