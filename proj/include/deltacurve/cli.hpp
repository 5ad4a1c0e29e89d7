#pragma once

// Command-line driver. Exit codes: 0 success, 2 bad input, 3 numerical
// failure, 4 invariant violation.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltacurve/assembly.hpp"
#include "deltacurve/common.hpp"
#include "deltacurve/curve.hpp"
#include "deltacurve/io.hpp"
#include "deltacurve/kernels.hpp"
#include "deltacurve/resolvent.hpp"
#include "deltacurve/scattering.hpp"
#include "deltacurve/spectral.hpp"

namespace deltacurve::cli {

struct RunConfig {
  std::string command;
  std::string curve_path;
  std::size_t n = 256;
  std::vector<double> alpha;
  std::vector<double> lambda;
  std::vector<double> eta{-1.0, -4.0, -16.0, -64.0};
  std::string out = ".";
  std::vector<std::string> tol_overrides;
  bool dump_matrix = false;
  double box_min = -3.0;
  double box_max = 3.0;
  std::size_t box_n = 24;
  double box_exclusion = 0.0;  // 0 means 2 * box spacing
  std::size_t fit_min = 8;
  std::size_t fit_max = 48;
};

namespace detail {

inline Tolerances tolerances(const RunConfig& cfg) {
  Tolerances tol;
  for (const auto& kv : cfg.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol-override expects KEY=VAL, got '" + kv + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("bad tolerance value in '" + kv + "'");
    }
    tol.set(kv.substr(0, eq), v);
  }
  return tol;
}

inline void validate(const RunConfig& cfg) {
  if (cfg.n % 2 != 0 || cfg.n < 16 || cfg.n > 4096)
    throw ConfigError("--n must be even with 16 <= N <= 4096 (got " + std::to_string(cfg.n) + ")");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec || !std::filesystem::is_directory(cfg.out)) throw ConfigError("cannot create output directory '" + cfg.out + "'");
}

inline std::string path(const RunConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.out) / file).string();
}

inline void require_alpha(const RunConfig& cfg) {
  if (cfg.alpha.empty()) throw ConfigError("--alpha is required");
  for (double a : cfg.alpha)
    if (a == 0.0) throw ConfigError("alpha must be nonzero");
}

}  // namespace detail

inline int cmd_spectrum(const RunConfig& cfg, const Curve& curve, const Tolerances& tol) {
  const std::vector<double> lambdas = cfg.lambda.empty() ? std::vector<double>{0.0} : cfg.lambda;
  SpectrumEvaluator ev(curve, cfg.n, tol, false);
  CsvWriter csv(detail::path(cfg, "spectrum.csv"), {"lambda", "k", "nu", "closed_form", "deviation"});
  const double R = ev.grid().comparison_radius();
  double max_dev = 0.0;
  const std::size_t kmax = ev.trusted();
  for (double l : lambdas) {
    if (l > 0.0) throw ConfigError("spectrum needs lambda <= 0");
    const Eigen::VectorXd& v = ev.values(l);
    std::vector<double> closed;
    if (curve.is_circle()) closed = l == 0.0 ? circle_closed_form(R, kmax) : std::vector<double>{k_lambda(l, R)};
    for (std::size_t k = 0; k < kmax; ++k) {
      const double nu = v(static_cast<Eigen::Index>(k));
      if (k < closed.size()) {
        const double dev = std::abs(nu - closed[k]);
        if (k < 20) max_dev = std::max(max_dev, dev);
        csv.row(l, k + 1, nu, closed[k], dev);
      } else {
        csv.row(l, k + 1, nu, "", "");
      }
    }
    if (cfg.dump_matrix)
      write_matrix_csv(b_lambda_matrix(curve, l, ev.grid()), detail::path(cfg, "matrix_lambda" + fmt(l) + ".csv"));
  }
  std::cout << "spectrum: N=" << cfg.n << " trusted=" << kmax;
  if (curve.is_circle()) std::cout << " max_closed_form_deviation(k<=20)=" << fmt(max_dev);
  std::cout << "\n";
  return 0;
}

inline int cmd_bound_states(const RunConfig& cfg, const Curve& curve, const Tolerances& tol) {
  detail::require_alpha(cfg);
  SpectrumEvaluator ev(curve, cfg.n, tol);
  const double ds = d_sigma(curve, ev.grid());
  CsvWriter states(detail::path(cfg, "bound_states.csv"), {"alpha", "k", "lambda", "residual", "multiplicity"});
  CsvWriter counts(detail::path(cfg, "counts.csv"), {"alpha", "n_alpha", "d_sigma", "r", "l", "lower", "upper",
                                                     "asymptotic_lower", "asymptotic_upper", "endpoint_flag",
                                                     "sandwich_holds", "lower_hs", "upper_hs"});
  for (double a : cfg.alpha) {
    const CountReport rep = count_negative(ev, a, ds);
    const auto found = find_bound_states(ev, a);
    if (found.size() != rep.count)
      throw InvariantViolation("bound-state count differs from the eigenvalue count at lambda = 0");
    for (const auto& s : found) {
      const double dist = (ev.values(s.lambda).array() - a).abs().minCoeff();
      if (!(dist < 1e-8)) throw InvariantViolation("Birman-Schwinger residual too large at k=" + std::to_string(s.k));
      states.row(a, s.k, s.lambda, s.residual, s.multiplicity);
    }
    if (rep.asymptotic)
      counts.row(a, rep.count, ds, rep.r, rep.l, rep.lower, rep.upper, rep.asymptotic->lower, rep.asymptotic->upper,
                 rep.endpoint_flag ? 1 : 0, rep.sandwich_holds ? 1 : 0, rep.lower_hs, rep.upper_hs);
    else
      counts.row(a, rep.count, ds, rep.r, rep.l, rep.lower, rep.upper, "", "", rep.endpoint_flag ? 1 : 0,
                 rep.sandwich_holds ? 1 : 0, rep.lower_hs, rep.upper_hs);
    std::cout << "alpha=" << fmt(a) << " N_alpha=" << rep.count << " bounds=[" << rep.lower << "," << rep.upper << "]\n";
  }
  return 0;
}

inline int cmd_scattering(const RunConfig& cfg, const Curve& curve, const Tolerances& tol) {
  detail::require_alpha(cfg);
  const std::vector<double> lambdas = cfg.lambda.empty() ? std::vector<double>{0.5, 1.0, 2.0} : cfg.lambda;
  const ArcGrid grid = make_grid(curve, cfg.n);
  CsvWriter csv(detail::path(cfg, "scattering.csv"), {"alpha", "lambda", "eta", "retained", "unitarity_defect",
                                                      "min_eigenvalue_ratio", "tail_ratio", "condition"});
  CsvWriter eig(detail::path(cfg, "imn_eigenvalues.csv"), {"alpha", "lambda", "k", "mu"});
  bool ok = true;
  for (double a : cfg.alpha) {
    const double eta = choose_eta(curve, grid, a, cfg.eta, tol);
    for (double l : lambdas) {
      const ScatteringBlock b = s_prime(curve, grid, l, a, eta, tol);
      csv.row(a, l, eta, b.retained, b.unitarity_defect, b.min_eigenvalue_ratio, b.tail_ratio, b.condition);
      for (Eigen::Index k = 0; k < b.imn_eigenvalues.size(); ++k) eig.row(a, l, k + 1, b.imn_eigenvalues(k));
      std::cout << "alpha=" << fmt(a) << " lambda=" << fmt(l) << " eta=" << fmt(eta) << " retained=" << b.retained
                << " unitarity_defect=" << fmt(b.unitarity_defect) << "\n";
      ok = ok && b.unitarity_defect < 1e-6 && b.min_eigenvalue_ratio >= -1e-10;
    }
  }
  if (!ok) throw InvariantViolation("scattering block not unitary or Im N not positive semidefinite");
  return 0;
}

inline int cmd_isoperimetric(const RunConfig& cfg, const Curve& curve, const Tolerances& tol) {
  if (curve.is_circle()) throw ConfigError("isoperimetric comparison needs a non-circular curve");
  const std::vector<double> alphas = cfg.alpha.empty() ? std::vector<double>{-0.5} : cfg.alpha;
  for (double a : alphas)
    if (a == 0.0) throw ConfigError("alpha must be nonzero");
  CsvWriter iso(detail::path(cfg, "isoperimetric.csv"), {"alpha", "n", "lambda_curve", "lambda_circle", "gap"});
  bool ok = true;
  for (double a : alphas) {
    const IsoperimetricResult r = isoperimetric_compare(curve, a, cfg.n, tol);
    iso.row(a, cfg.n, r.lambda_curve, r.lambda_circle, r.gap);
    std::cout << "alpha=" << fmt(a) << " lambda_curve=" << fmt(r.lambda_curve) << " lambda_circle=" << fmt(r.lambda_circle)
              << " gap=" << fmt(r.gap) << "\n";
    ok = ok && r.gap > 0.0;
  }
  const ArcGrid grid = make_grid(curve, cfg.n);
  CsvWriter chords(detail::path(cfg, "chord_inequality.csv"), {"u", "lhs", "rhs", "error_estimate"});
  for (double frac : {0.125, 0.25, 0.5}) {
    const ChordAverage c = chord_average_inequality(curve, grid, frac * grid.length);
    chords.row(frac * grid.length, c.lhs, c.rhs, c.error_estimate);
    ok = ok && c.lhs < c.rhs;
  }
  if (!ok) throw InvariantViolation("isoperimetric inequality failed");
  return 0;
}

inline int cmd_probe(const RunConfig& cfg, const Curve& curve, const Tolerances& tol) {
  const double lambda = cfg.lambda.empty() ? -1.0 : cfg.lambda.front();
  const double alpha = cfg.alpha.empty() ? -0.5 : cfg.alpha.front();
  if (alpha == 0.0) throw ConfigError("alpha must be nonzero");
  const ArcGrid grid = make_grid(curve, cfg.n);
  const BoxGrid box = make_box(curve, grid, cfg.box_min, cfg.box_max, cfg.box_n, cfg.box_exclusion);
  const SingularValueProbe p = correction_singular_values(curve, grid, box, lambda, alpha, tol);
  CsvWriter csv(detail::path(cfg, "singular_values.csv"), {"k", "s_correction", "s_trace"});
  for (std::size_t k = 0; k < p.correction.size(); ++k) csv.row(k + 1, p.correction[k], p.trace_map[k]);
  const double slope_k = loglog_slope(p.correction, cfg.fit_min, cfg.fit_max);
  const double slope_g = loglog_slope(p.trace_map, cfg.fit_min, cfg.fit_max);
  nlohmann::ordered_json j;
  j["lambda"] = lambda;
  j["alpha"] = alpha;
  j["n"] = cfg.n;
  j["box"] = {{"min", box.lo}, {"max", box.hi}, {"n", box.n}, {"spacing", box.spacing},
              {"exclusion_radius", box.exclusion_radius}, {"excluded", box.excluded},
              {"kept", box.points.size()}, {"min_distance", box.min_distance}};
  j["fit_window"] = {cfg.fit_min, cfg.fit_max};
  j["slope_correction"] = slope_k;
  j["slope_trace"] = slope_g;
  j["note"] = "box/grid compression of the ambient operator; bounds the singular-value envelope only";
  std::ofstream os(detail::path(cfg, "probe_summary.json"));
  if (!os) throw ConfigError("cannot write probe_summary.json");
  os << j.dump(2) << "\n";
  std::cout << "slope_correction=" << fmt(slope_k) << " slope_trace=" << fmt(slope_g) << "\n";
  return 0;
}

inline int cmd_d_sigma(const RunConfig& cfg, const Curve& curve, const Tolerances&) {
  const ArcGrid grid = make_grid(curve, cfg.n);
  const ArcGrid half = make_grid(curve, cfg.n / 2 < 16 ? 16 : cfg.n / 2);
  CsvWriter csv(detail::path(cfg, "d_sigma.csv"), {"n", "d_sigma", "d_sigma_half_grid", "length", "curvature_bound"});
  const double d = d_sigma(curve, grid);
  csv.row(cfg.n, d, d_sigma(curve, half), curve.length(), curve.curvature_bound());
  std::cout << "d_sigma=" << fmt(d) << "\n";
  return 0;
}

inline int dispatch(const RunConfig& cfg) {
  const Tolerances tol = detail::tolerances(cfg);
  detail::validate(cfg);
  const Curve curve = curve_from_file(cfg.curve_path, tol.reparam);
  if (cfg.command == "spectrum") return cmd_spectrum(cfg, curve, tol);
  if (cfg.command == "bound-states") return cmd_bound_states(cfg, curve, tol);
  if (cfg.command == "scattering") return cmd_scattering(cfg, curve, tol);
  if (cfg.command == "isoperimetric") return cmd_isoperimetric(cfg, curve, tol);
  if (cfg.command == "probe") return cmd_probe(cfg, curve, tol);
  if (cfg.command == "d-sigma") return cmd_d_sigma(cfg, curve, tol);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

inline int run(int argc, char** argv) {
  CLI::App app{"Spectra, bound states and scattering for delta interactions on closed curves"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--curve", cfg.curve_path, "curve config (JSON)")->required();
    sub->add_option("--n", cfg.n, "grid size N (even, 16..4096)");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--tol-override", cfg.tol_overrides, "KEY=VAL tolerance override (repeatable)");
  };
  auto alpha = [&cfg](CLI::App* sub) { sub->add_option("--alpha", cfg.alpha, "coupling(s)")->delimiter(','); };
  auto lambda = [&cfg](CLI::App* sub) { sub->add_option("--lambda", cfg.lambda, "spectral parameter(s)")->delimiter(','); };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues nu_k(lambda) of B_lambda");
  common(spectrum);
  lambda(spectrum);
  spectrum->add_flag("--dump-matrix", cfg.dump_matrix, "write B_lambda as CSV");

  auto* bound = app.add_subcommand("bound-states", "negative eigenvalues and counts");
  common(bound);
  alpha(bound);

  auto* scat = app.add_subcommand("scattering", "scattering block S'(lambda)");
  common(scat);
  alpha(scat);
  lambda(scat);
  scat->add_option("--eta", cfg.eta, "eta candidates")->delimiter(',');

  auto* iso = app.add_subcommand("isoperimetric", "principal energy versus the circle of equal length");
  common(iso);
  alpha(iso);

  auto* probe = app.add_subcommand("probe", "singular values of the resolvent correction");
  common(probe);
  alpha(probe);
  lambda(probe);
  probe->add_option("--box-min", cfg.box_min, "box lower corner (all axes)");
  probe->add_option("--box-max", cfg.box_max, "box upper corner (all axes)");
  probe->add_option("--box-n", cfg.box_n, "box points per axis");
  probe->add_option("--box-exclusion", cfg.box_exclusion, "exclusion radius around the curve (default 2 * spacing)");
  probe->add_option("--fit-min", cfg.fit_min, "first k of the slope fit");
  probe->add_option("--fit-max", cfg.fit_max, "last k of the slope fit");

  auto* ds = app.add_subcommand("d-sigma", "distance d_Sigma to the circle of equal length");
  common(ds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    return dispatch(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace deltacurve::cli
