#ifndef MINSURF_REPORT_HPP
#define MINSURF_REPORT_HPP

// Run manifests, verification records and the suite driver behind the CLI.
//
// Manifest files use the scenario key-value format:
//
//   [run]        scenarios, suites, out, seed
//   [grid]       profile_n, profile_r, eigen_mesh_n, stability_mesh_n,
//                lambda_radii, cutoff_R, random_samples
//   [tolerance]  gauss, fiala, flat, refinement, inequality, jacobi, flux,
//                harmonicity, bochner, coarea, lemma_g, decay, poincare,
//                cross_validation, growth_slack
//   [area]       flat_log_R
//   [green]      epsilon, q, R
//   [mesh]       obj, resolution, C_h
//
// List values are comma separated. Scenarios are builtin ids or paths to
// scenario files (relative to the manifest).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minsurf/ball_geometry.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/geodesic.hpp"
#include "minsurf/greens_function.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/numeric.hpp"
#include "minsurf/scenario_io.hpp"
#include "minsurf/spectrum.hpp"
#include "minsurf/stability_analysis.hpp"
#include "minsurf/surface_models.hpp"
#include "minsurf/test_functions.hpp"

namespace minsurf {

inline const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> k{"gauss", "fiala", "area-bounds", "stability", "lemma-m", "spectrum", "green",
                                          "mesh"};
  return k;
}

struct RunManifest {
  std::vector<std::string> scenarios{"plane", "catenoid(c=1)", "h2-in-h3"};
  std::vector<std::string> suites;  // empty: all
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  std::size_t profile_n = 1024;
  double profile_r = 30.0;  // profiles run to min(r_max, profile_r)
  std::size_t eigen_mesh_n = 4096;
  std::size_t stability_mesh_n = 2048;
  std::vector<double> lambda_radii;  // empty: default exhaustion radii
  std::vector<double> cutoff_R{2.0, 5.0, 10.0};
  int random_samples = 4;  // extra seeded cutoff radii per scenario

  double tol_gauss = 1e-8;
  double tol_fiala = 1e-6;  // relative to max(1, |2 pi chi - int K|)
  double tol_flat = 1e-9;
  double tol_refinement = 0.05;
  double tol_inequality = 1e-8;
  double tol_jacobi = 1e-4;
  double tol_flux = 1e-10;
  double tol_harmonicity = 1e-8;
  double tol_bochner = 1e-8;
  double tol_coarea = 1e-6;
  double tol_lemma_g = 1e-6;
  double tol_decay = 0.05;
  double tol_poincare = 1e-3;
  double tol_cross_validation = 0.02;
  double growth_slack = 0.01;

  double flat_log_R = 20.0;  // flat case checked at R = e^flat_log_R

  double epsilon = 0.1;
  double q = 0.75;
  double green_R = 20.0;

  std::string mesh_obj;
  int mesh_resolution = 212;
  double mesh_C_h = 4.0;

  bool selected(const std::string& suite) const {
    return suites.empty() || std::find(suites.begin(), suites.end(), suite) != suites.end();
  }

  /// Throws ConfigError when a parameter leaves its documented range.
  void validate() const {
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw ConfigError("manifest: " + what);
    };
    need(!scenarios.empty() || !mesh_obj.empty(), "no scenarios selected");
    for (const auto& s : suites) {
      need(std::find(all_suites().begin(), all_suites().end(), s) != all_suites().end(), "unknown suite '" + s + "'");
    }
    need(profile_n >= 64 && profile_n <= (1u << 20), "profile_n must lie in [64, 2^20]");
    need(profile_r > 0.0, "profile_r must be positive");
    need(eigen_mesh_n >= 128 && eigen_mesh_n <= (1u << 20), "eigen_mesh_n must lie in [128, 2^20]");
    need(stability_mesh_n >= 128 && stability_mesh_n <= (1u << 20), "stability_mesh_n must lie in [128, 2^20]");
    need(lambda_radii.empty() || lambda_radii.size() >= 4, "lambda_radii needs at least 4 radii");
    for (double R : cutoff_R) need(R > 0.0, "cutoff radii must be positive");
    need(random_samples >= 0 && random_samples <= 1000, "random_samples must lie in [0, 1000]");
    for (double t : {tol_gauss, tol_fiala, tol_flat, tol_refinement, tol_inequality, tol_jacobi, tol_flux,
                     tol_harmonicity, tol_bochner, tol_coarea, tol_lemma_g, tol_decay, tol_poincare,
                     tol_cross_validation}) {
      need(t > 0.0 && t < 1.0, "tolerances must lie in (0, 1)");
    }
    need(growth_slack >= 0.0 && growth_slack < 1.0, "growth_slack must lie in [0, 1)");
    need(flat_log_R > 1.0 && flat_log_R <= 700.0, "flat_log_R must lie in (1, 700]");
    need(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    need(q > 0.5, "q must exceed 1/2");
    need(green_R >= 2.0, "green R must be >= 2");
    need(mesh_resolution >= 16 && mesh_resolution <= 2048 && mesh_resolution % 2 == 0,
         "mesh resolution must be even and lie in [16, 2048]");
    need(mesh_C_h > 0.0, "mesh C_h must be positive");
  }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const auto a = cur.find_first_not_of(" \t");
    if (a != std::string::npos) out.push_back(cur.substr(a, cur.find_last_not_of(" \t") - a + 1));
    cur.clear();
  };
  int depth = 0;  // commas inside catenoid(c=...) stay put
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      flush();
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

inline std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out;
}

inline std::string join(const std::vector<double>& xs) {
  std::vector<std::string> s;
  for (double x : xs) s.push_back(format_number(x));
  return join(s);
}

}  // namespace detail

inline RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {}) {
  const auto doc = KeyValueDocument::parse(text);
  RunManifest m;
  using Entry = KeyValueDocument::Entry;
  std::map<std::string, std::function<void(const Entry&)>> setters;
  auto num = [&](const char* key, double& dst) {
    setters[key] = [&dst, key](const Entry& e) { dst = KeyValueDocument::to_double(e, key); };
  };
  auto count = [&](const char* key, auto& dst) {
    setters[key] = [&dst, key](const Entry& e) {
      const double v = KeyValueDocument::to_double(e, key);
      if (v != std::floor(v) || v < 0.0) throw ConfigError(std::string("'") + key + "' expects a count", e.line, e.value_column);
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    };
  };
  auto nums = [&](const char* key, std::vector<double>& dst) {
    setters[key] = [&dst, key](const Entry& e) {
      dst.clear();
      for (const auto& item : detail::split_list(e.value)) {
        dst.push_back(KeyValueDocument::to_double(Entry{item, e.line, e.value_column}, key));
      }
    };
  };
  setters["run.scenarios"] = [&](const Entry& e) {
    m.scenarios.clear();
    for (auto s : detail::split_list(e.value)) {
      const bool path = s.find('/') != std::string::npos || s.ends_with(".cfg") || s.ends_with(".ini");
      m.scenarios.push_back(path && !base_dir.empty() ? (base_dir / s).lexically_normal().string() : s);
    }
  };
  setters["run.suites"] = [&](const Entry& e) {
    m.suites = detail::split_list(e.value);
    if (m.suites.size() == 1 && m.suites[0] == "all") m.suites.clear();
  };
  setters["run.out"] = [&](const Entry& e) { m.out_dir = e.value; };
  count("run.seed", m.seed);
  count("grid.profile_n", m.profile_n);
  num("grid.profile_r", m.profile_r);
  count("grid.eigen_mesh_n", m.eigen_mesh_n);
  count("grid.stability_mesh_n", m.stability_mesh_n);
  nums("grid.lambda_radii", m.lambda_radii);
  nums("grid.cutoff_R", m.cutoff_R);
  count("grid.random_samples", m.random_samples);
  num("tolerance.gauss", m.tol_gauss);
  num("tolerance.fiala", m.tol_fiala);
  num("tolerance.flat", m.tol_flat);
  num("tolerance.refinement", m.tol_refinement);
  num("tolerance.inequality", m.tol_inequality);
  num("tolerance.jacobi", m.tol_jacobi);
  num("tolerance.flux", m.tol_flux);
  num("tolerance.harmonicity", m.tol_harmonicity);
  num("tolerance.bochner", m.tol_bochner);
  num("tolerance.coarea", m.tol_coarea);
  num("tolerance.lemma_g", m.tol_lemma_g);
  num("tolerance.decay", m.tol_decay);
  num("tolerance.poincare", m.tol_poincare);
  num("tolerance.cross_validation", m.tol_cross_validation);
  num("tolerance.growth_slack", m.growth_slack);
  num("area.flat_log_R", m.flat_log_R);
  num("green.epsilon", m.epsilon);
  num("green.q", m.q);
  num("green.R", m.green_R);
  setters["mesh.obj"] = [&](const Entry& e) {
    m.mesh_obj = base_dir.empty() ? e.value : (base_dir / e.value).lexically_normal().string();
  };
  count("mesh.resolution", m.mesh_resolution);
  num("mesh.C_h", m.mesh_C_h);

  for (const auto& [key, entry] : doc.entries()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown manifest key '" + key + "'", entry.line, 1);
    it->second(entry);
  }
  m.validate();
  return m;
}

/// Byte-deterministic text form; parse_manifest(serialize_manifest(m)) == m.
inline std::string serialize_manifest(const RunManifest& m) {
  std::ostringstream out;
  out << "[run]\n";
  out << "scenarios = \"" << detail::join(m.scenarios) << "\"\n";
  out << "suites = \"" << (m.suites.empty() ? std::string("all") : detail::join(m.suites)) << "\"\n";
  out << "out = \"" << m.out_dir << "\"\n";
  out << "seed = " << m.seed << "\n";
  out << "\n[grid]\n";
  out << "profile_n = " << m.profile_n << "\n";
  out << "profile_r = " << format_number(m.profile_r) << "\n";
  out << "eigen_mesh_n = " << m.eigen_mesh_n << "\n";
  out << "stability_mesh_n = " << m.stability_mesh_n << "\n";
  if (!m.lambda_radii.empty()) out << "lambda_radii = \"" << detail::join(m.lambda_radii) << "\"\n";
  out << "cutoff_R = \"" << detail::join(m.cutoff_R) << "\"\n";
  out << "random_samples = " << m.random_samples << "\n";
  out << "\n[tolerance]\n";
  const std::pair<const char*, double> tols[] = {
      {"gauss", m.tol_gauss},         {"fiala", m.tol_fiala},       {"flat", m.tol_flat},
      {"refinement", m.tol_refinement}, {"inequality", m.tol_inequality}, {"jacobi", m.tol_jacobi},
      {"flux", m.tol_flux},           {"harmonicity", m.tol_harmonicity}, {"bochner", m.tol_bochner},
      {"coarea", m.tol_coarea},       {"lemma_g", m.tol_lemma_g},   {"decay", m.tol_decay},
      {"poincare", m.tol_poincare},   {"cross_validation", m.tol_cross_validation},
      {"growth_slack", m.growth_slack}};
  for (const auto& [k, v] : tols) out << k << " = " << format_number(v) << "\n";
  out << "\n[area]\n";
  out << "flat_log_R = " << format_number(m.flat_log_R) << "\n";
  out << "\n[green]\n";
  out << "epsilon = " << format_number(m.epsilon) << "\n";
  out << "q = " << format_number(m.q) << "\n";
  out << "R = " << format_number(m.green_R) << "\n";
  out << "\n[mesh]\n";
  if (!m.mesh_obj.empty()) out << "obj = \"" << m.mesh_obj << "\"\n";
  out << "resolution = " << m.mesh_resolution << "\n";
  out << "C_h = " << format_number(m.mesh_C_h) << "\n";
  return out.str();
}

struct VerificationRecord {
  std::string suite;
  std::string scenario;
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  Status status = Status::Inapplicable;
  double runtime = 0.0;  // seconds for the whole suite on this scenario; not part of reports
  std::string note;

  bool pass() const { return status == Status::Pass; }
};

/// lhs <= rhs within tol; pass iff margin >= -tol.
inline VerificationRecord make_record(std::string suite, std::string scenario, std::string check, double lhs, double rhs,
                                      double tol, std::string note = {}) {
  VerificationRecord r;
  r.suite = std::move(suite);
  r.scenario = std::move(scenario);
  r.check = std::move(check);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tolerance = tol;
  r.status = r.margin >= -tol ? Status::Pass : Status::Fail;  // NaN margins fail
  r.note = std::move(note);
  return r;
}

inline VerificationRecord inapplicable(std::string suite, std::string scenario, std::string check, std::string why) {
  VerificationRecord r;
  r.suite = std::move(suite);
  r.scenario = std::move(scenario);
  r.check = std::move(check);
  r.status = Status::Inapplicable;
  r.note = std::move(why);
  return r;
}

struct PlotData {
  std::map<std::string, BallProfile> balls;
  std::map<std::string, BoundReport> overlays;
  std::map<std::string, GreenProfile> greens;
  std::map<std::string, DiscreteBallProfile> discrete;
};

struct RunResult {
  std::vector<VerificationRecord> records;
  std::vector<std::string> errors;
  PlotData plots;
  int exit_code = 0;
};

namespace detail {

struct ScenarioRun {
  std::vector<VerificationRecord> records;
  std::vector<std::string> errors;
  PlotData plots;
};

inline Scenario load_scenario(const std::string& id) {
  if (auto b = find_builtin(id)) return *b;
  std::ifstream in(id);
  if (!in) throw ConfigError("unknown scenario '" + id + "' (not a builtin and not a readable file)");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(id + ": " + e.what());
  }
}

/// Unit-interval draws from the raw engine output, identical on every platform.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double profile_end(const Scenario& sc, const RunManifest& m) { return std::min(sc.surface.r_max, m.profile_r); }

inline void suite_gauss(const Scenario& sc, const RunManifest& m, std::mt19937_64& rng, ScenarioRun& out) {
  const std::string id = sc.id();
  const auto& s = sc.surface;
  auto grid = default_grid(s.r_max, 200);
  for (int i = 0; i < 100; ++i) grid.push_back(s.r_max * (1.0 - unit_draw(rng)));  // (0, r_max]
  double worst_scalar = 0.0;
  double worst_tangent = 0.0;
  for (double r : grid) {
    const auto res = gauss_equation_residual(sc, r);
    const double scale = std::max(1.0, std::abs(gauss_curvature(s, r)));
    worst_scalar = std::max(worst_scalar, std::abs(res.scalar_form) / scale);
    worst_tangent = std::max(worst_tangent, std::abs(res.tangent_form) / scale);
  }
  out.records.push_back(make_record("gauss", id, "gauss_equation_scalar", worst_scalar, 0.0, m.tol_gauss));
  out.records.push_back(make_record("gauss", id, "gauss_equation_tangent", worst_tangent, 0.0, m.tol_gauss));
}

inline const BallProfile& ball(const Scenario& sc, const RunManifest& m, ScenarioRun& out) {
  auto it = out.plots.balls.find(sc.id());
  if (it == out.plots.balls.end()) {
    it = out.plots.balls.emplace(sc.id(), profile(sc.surface, profile_end(sc, m), m.profile_n)).first;
  }
  return it->second;
}

inline void suite_fiala(const Scenario& sc, const RunManifest& m, ScenarioRun& out) {
  const std::string id = sc.id();
  const auto& p = ball(sc, m, out);
  const auto fr = fiala_residual(p, m.tol_fiala);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double scale = std::max(1.0, std::abs(kTwoPi * p.euler - p.total_curv[i]));
    worst = std::max(worst, std::abs(fr.residual[i]) / scale);
  }
  out.records.push_back(make_record("fiala", id, "gauss_bonnet_identity", worst, 0.0, m.tol_fiala));
  out.records.push_back(make_record("fiala", id, "total_curvature_closed_form", p.closed_form_gap, 0.0, 1e-8));
  const auto hc = hessian_comparison_check(p);
  if (hc.status == Status::Inapplicable) {
    out.records.push_back(inapplicable("fiala", id, "hessian_comparison", hc.detail));
  } else {
    const double v = hc.first_violation.value_or(0.0);
    auto r = make_record("fiala", id, "hessian_comparison", hc.status == Status::Pass ? 0.0 : 1.0, 0.0, 0.0, hc.detail);
    if (hc.first_violation) r.note = "first violation at r = " + format_number(v);
    out.records.push_back(r);
  }
}

inline void suite_area(const Scenario& sc, const RunManifest& m, ScenarioRun& out) {
  const std::string id = sc.id();
  const auto& p = ball(sc, m, out);
  AreaBoundOptions opt;
  opt.flat_R = std::exp(m.flat_log_R);
  opt.tolerance = m.tol_flat;
  opt.refinement_tolerance = m.tol_refinement;
  for (AreaCase c : {AreaCase::Flat, AreaCase::ScalarFloor, AreaCase::SectionalFloor}) {
    const auto rep = area_bound_report(sc, p, c, opt);
    const std::string name = to_string(c);
    if (rep.status == Status::Inapplicable) {
      out.records.push_back(inapplicable("area-bounds", id, name, rep.note));
      continue;
    }
    if (c == AreaCase::Flat) {
      double worst = -INFINITY;
      for (std::size_t i = 0; i < rep.radii.size(); ++i) worst = std::max(worst, -rep.margin[i] / rep.bound[i]);
      out.records.push_back(make_record("area-bounds", id, name + "_area_length", worst, 0.0, m.tol_flat));
      out.records.push_back(make_record("area-bounds", id, name + "_disk_ratio", rep.max_area_ratio_gap, 0.0, m.tol_flat));
      continue;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < rep.radii.size(); ++i) worst = std::max(worst, rep.measured[i] / rep.bound[i]);
    out.records.push_back(make_record("area-bounds", id, name + "_bound", worst, 1.0, 0.0));
    const double drift = std::abs(rep.refined_constant - rep.fitted_constant) / rep.fitted_constant;
    out.records.push_back(make_record("area-bounds", id, name + "_C1_refinement", drift, 0.0, m.tol_refinement,
                                      "C1 = " + format_number(rep.fitted_constant)));
    if (c == AreaCase::SectionalFloor) out.plots.overlays[id] = rep;
  }
  if (!out.plots.overlays.count(id)) {
    // overlay still gets A and pi r^2 even without an exponential bound
    BoundReport rep;
    rep.exponent = area_growth_exponent(AreaCase::SectionalFloor);
    out.plots.overlays[id] = rep;
  }
}

inline void suite_stability(const Scenario& sc, const RunManifest& m, ScenarioRun& out) {
  const std::string id = sc.id();
  const auto sr = stability_radius(sc, m.stability_mesh_n);
  const double r_max = sc.surface.r_max;
  if (sc.stable_claim) {
    out.records.push_back(make_record("stability", id, "stable_on_model", r_max, sr.radius, 1e-6 * r_max,
                                      sr.finite ? "unstable beyond R = " + format_number(sr.radius) : ""));
    return;
  }
  if (!sr.finite) {
    out.records.push_back(make_record("stability", id, "instability_detected", 1.0, 0.0, 0.0,
                                      "no negative Dirichlet eigenvalue up to r_max"));
    return;
  }
  const double gap = std::abs(sr.radius - *sr.jacobi_zero) / *sr.jacobi_zero;
  out.records.push_back(make_record("stability", id, "jacobi_zero_agreement", gap, 0.0, m.tol_jacobi,
                                    "stability radius " + format_number(sr.radius)));
}

inline void push_sides(ScenarioRun& out, const std::string& id, const std::string& check, const InequalitySides& s,
                       double tol) {
  if (s.status == Status::Inapplicable) {
    out.records.push_back(inapplicable("lemma-m", id, check, s.note));
  } else {
    out.records.push_back(make_record("lemma-m", id, check, s.lhs, s.rhs, tol * std::max(1.0, std::abs(s.rhs))));
  }
}

inline void suite_lemma_m(const Scenario& sc, const RunManifest& m, std::mt19937_64& rng, ScenarioRun& out) {
  const std::string id = sc.id();
  const double top = profile_end(sc, m);
  std::vector<double> radii;
  for (double R : m.cutoff_R) {
    if (R <= top) radii.push_back(R);
  }
  for (int i = 0; i < m.random_samples; ++i) radii.push_back(1.0 + (top - 1.0) * unit_draw(rng));
  for (double R : radii) {
    const std::string at = "(R=" + format_number(R) + ")";
    for (FloorCase c : {FloorCase::Scalar, FloorCase::Sectional}) {
      const std::string cs = to_string(c);
      push_sides(out, id, "lemma_m_" + cs + at, lemma_m_sides(sc, linear_cutoff(R), R, c), m.tol_inequality);
      push_sides(out, id, "corollary_c1_" + cs + at, corollary_c1_sides(sc, polynomial_cutoff(R, 3.0), R, c),
                 m.tol_inequality);
    }
    push_sides(out, id, "log_cutoff_area" + at, log_cutoff_area_sides(sc, R), m.tol_inequality);
    const auto ex = exp_cutoff_sides(sc, R, std::min(1.0, 0.5 * R));
    push_sides(out, id, "exp_cutoff_annulus" + at, ex.annulus, m.tol_inequality);
    push_sides(out, id, "exp_cutoff_area" + at, ex.area_bound, m.tol_inequality);
  }
}

inline void suite_spectrum(const Scenario& sc, const RunManifest& m, ScenarioRun& out) {
  const std::string id = sc.id();
  SpectrumOptions opt;
  opt.radii = m.lambda_radii;
  opt.mesh_n = m.eigen_mesh_n;
  opt.growth_slack = m.growth_slack;
  const auto rep = spectrum_report(sc, opt);
  const double lam = rep.lambda0.value;
  const double unc = rep.lambda0.uncertainty;
  for (const auto& b : rep.upper_bounds) {
    if (!b.applicable) {
      out.records.push_back(inapplicable("spectrum", id, "upper:" + b.id, b.note));
      continue;
    }
    const double slack = b.id == "volume_growth" ? m.growth_slack : 0.0;
    out.records.push_back(make_record("spectrum", id, "upper:" + b.id, lam - unc, b.value, slack,
                                      "lambda0 = " + format_number(lam) + " +- " + format_number(unc)));
  }
  for (const auto& b : rep.lower_bounds) {
    if (!b.applicable) {
      out.records.push_back(inapplicable("spectrum", id, "lower:" + b.id, b.note));
      continue;
    }
    out.records.push_back(make_record("spectrum", id, "lower:" + b.id, b.value, lam + unc, 0.0,
                                      "lambda0 = " + format_number(lam) + " +- " + format_number(unc)));
  }
  std::string note;
  for (const auto& v : rep.violations) note += (note.empty() ? "" : "; ") + v;
  out.records.push_back(make_record("spectrum", id, "ordering", static_cast<double>(rep.violations.size()), 0.0, 0.0,
                                    note));
}

inline void suite_green(const Scenario& sc, const RunManifest& m, ScenarioRun& out) {
  const std::string id = sc.id();
  auto gp = green_radial(sc.surface);
  if (!gp.nonparabolic) {
    out.records.push_back(inapplicable("green", id, "green_function", gp.note));
    return;
  }
  out.records.push_back(make_record("green", id, "flux", gp.flux_residual, 0.0, m.tol_flux));
  out.records.push_back(make_record("green", id, "harmonicity", gp.harmonicity_residual, 0.0, m.tol_harmonicity));
  double kato = 0.0;
  double logb = 0.0;
  for (double r : gp.grid) {
    if (r < 1e-2) continue;
    kato = std::max(kato, std::abs(kato_bochner_residual(gp, r).residual));
    logb = std::max(logb, std::abs(log_bochner_residual(gp, r).residual));
  }
  out.records.push_back(make_record("green", id, "kato_bochner_saturation", kato, 0.0, m.tol_bochner));
  out.records.push_back(make_record("green", id, "log_bochner_saturation", logb, 0.0, m.tol_bochner));
  const double R = std::min(m.green_R, sc.surface.r_max);
  const auto& G = *gp.fn;
  const auto co = coarea_identity_check(gp, G(R), G(std::min(1.0, R)), [](double) { return 1.0; });
  out.records.push_back(make_record("green", id, "coarea", co.relative_gap, 0.0, m.tol_coarea));

  const auto est = lambda0_estimate(sc.surface, m.lambda_radii.empty() ? default_exhaustion_radii(sc.surface)
                                                                       : m.lambda_radii,
                                    m.eigen_mesh_n);
  const double target = 2.0 * std::sqrt(est.value);
  const auto dr = decay_rate(gp, est.value);
  out.records.push_back(make_record("green", id, "g_sq_decay_rate", std::abs(dr.g_sq_rate - target), 0.0, m.tol_decay,
                                    "rate " + format_number(dr.g_sq_rate) + ", 2 sqrt(lambda0) = " + format_number(target)));
  if (m.green_R >= 2.0 && sc.surface.r_max >= 2.0) {
    const auto lg = lemma_g_partial_integral(gp, m.q, m.green_R);
    out.records.push_back(make_record("green", id, "lemma_g_cauchy_increment", std::abs(lg.increment), 0.0,
                                      m.tol_lemma_g, "I(R) = " + format_number(lg.I_R) + ", I(2R) = " + format_number(lg.I_2R)));
  }
  if (m.green_R + 1.0 <= sc.surface.r_max && m.epsilon * m.epsilon < gp.g_boundary_1) {
    const auto pg = poincare_green_check(sc, gp, m.epsilon, m.green_R, est.value);
    if (pg.status == Status::Inapplicable) {
      out.records.push_back(inapplicable("green", id, "poincare_quotient", pg.note));
    } else {
      out.records.push_back(make_record("green", id, "poincare_quotient", est.value, pg.rayleigh_quotient,
                                        m.tol_poincare));
    }
  } else {
    out.records.push_back(inapplicable("green", id, "poincare_quotient", "epsilon or R out of range for this surface"));
  }
  out.plots.greens[id] = std::move(gp);
}

inline void mesh_records(const std::string& id, const TriangleMesh& mesh, const DiscreteBallProfile& dp,
                         const RunManifest& m, ScenarioRun& out) {
  const auto fr = fiala_discrete_check(dp, 1, m.mesh_C_h);
  if (fr.status == Status::Inapplicable) {
    out.records.push_back(inapplicable("mesh", id, "fiala_discrete", "profile too short"));
  } else {
    out.records.push_back(make_record("mesh", id, "fiala_discrete", fr.max_violation, 0.0, fr.tolerance));
  }
  if (mesh.closed()) {
    const double gb = std::abs(mesh.total_interior_defect() - kTwoPi * mesh.euler_characteristic());
    out.records.push_back(make_record("mesh", id, "discrete_gauss_bonnet", gb, 0.0, 1e-9));
  }
  out.plots.discrete[id] = dp;
}

inline void suite_mesh(const Scenario& sc, const RunManifest& m, ScenarioRun& out) {
  const std::string id = sc.id();
  const auto& s = sc.surface;
  if (id == "plane") {
    const auto mesh = flat_grid_mesh(m.mesh_resolution);
    const auto dist = geodesic_distance(mesh, nearest_vertex(mesh, {0.0, 0.0, 0.0}));
    const auto dp = discrete_profile(mesh, dist, linspace(0.05, 0.95, 19));
    const auto cv = cross_validate(dp, profile(s, 1.0, 64), 1.0, 0.1, 0.95);
    out.records.push_back(make_record("mesh", id, "length_vs_analytic", cv.max_L_rel, 0.0, m.tol_cross_validation));
    out.records.push_back(make_record("mesh", id, "area_vs_analytic", cv.max_A_rel, 0.0, m.tol_cross_validation));
    mesh_records(id, mesh, dp, m, out);
    return;
  }
  if (s.neck_centered && id.rfind("catenoid", 0) == 0) {
    const double c = s.warp(0.0);
    const double extent = std::min(3.5 * c, s.r_max);
    const auto cm = generate_catenoid_mesh(c, extent, m.mesh_resolution);
    const auto dist = geodesic_distance(cm.mesh, cm.neck);
    const auto dp = discrete_profile(cm.mesh, dist, linspace(0.05 * extent, 0.97 * extent, 68));
    const auto cv = cross_validate(dp, profile(s, extent, 64), 2.0, extent / 7.0, extent * 6.0 / 7.0);
    out.records.push_back(make_record("mesh", id, "length_vs_analytic", cv.max_L_rel, 0.0, m.tol_cross_validation));
    out.records.push_back(make_record("mesh", id, "area_vs_analytic", cv.max_A_rel, 0.0, m.tol_cross_validation));
    mesh_records(id, cm.mesh, dp, m, out);
    return;
  }
  out.records.push_back(inapplicable("mesh", id, "mesh_cross_validation", "no reference mesh for this scenario"));
}

inline TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read mesh '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_obj(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void suite_obj(const RunManifest& m, ScenarioRun& out) {
  const std::string id = "obj:" + std::filesystem::path(m.mesh_obj).filename().string();
  const auto mesh = load_obj(m.mesh_obj);
  const auto dist = geodesic_distance(mesh, 0);
  double dmax = 0.0;
  for (double d : dist.d) {
    if (std::isfinite(d)) dmax = std::max(dmax, d);
  }
  const auto dp = discrete_profile(mesh, dist, linspace(dmax / 64.0, dmax, 64));
  mesh_records(id, mesh, dp, m, out);
}

template <class F>
void timed(const std::string& suite, const std::string& scenario, ScenarioRun& out, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t first = out.records.size();
  try {
    body();
  } catch (const std::exception& e) {
    out.errors.push_back(suite + "/" + scenario + ": " + e.what());
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t i = first; i < out.records.size(); ++i) out.records[i].runtime = dt;
}

inline ScenarioRun run_scenario(const std::string& name, const RunManifest& m, std::uint64_t seed) {
  ScenarioRun out;
  Scenario sc;
  try {
    sc = load_scenario(name);
  } catch (const std::exception& e) {
    out.errors.push_back(e.what());
    return out;
  }
  const std::string id = sc.id();
  std::mt19937_64 rng(seed);
  if (m.selected("gauss")) timed("gauss", id, out, [&] { suite_gauss(sc, m, rng, out); });
  if (m.selected("fiala")) timed("fiala", id, out, [&] { suite_fiala(sc, m, out); });
  if (m.selected("area-bounds")) timed("area-bounds", id, out, [&] { suite_area(sc, m, out); });
  if (m.selected("stability")) timed("stability", id, out, [&] { suite_stability(sc, m, out); });
  if (m.selected("lemma-m")) timed("lemma-m", id, out, [&] { suite_lemma_m(sc, m, rng, out); });
  if (m.selected("spectrum")) timed("spectrum", id, out, [&] { suite_spectrum(sc, m, out); });
  if (m.selected("green")) timed("green", id, out, [&] { suite_green(sc, m, out); });
  if (m.selected("mesh")) timed("mesh", id, out, [&] { suite_mesh(sc, m, out); });
  return out;
}

}  // namespace detail

/// Runs the selected suites, one task per scenario, and merges the results in
/// (suite, scenario, check) order. Exit code: 0 all pass or inapplicable,
/// 1 any failure, 2 any numeric or configuration error.
inline RunResult run(const RunManifest& manifest) {
  RunResult res;
  try {
    manifest.validate();
  } catch (const ConfigError& e) {
    res.errors.push_back(e.what());
    res.exit_code = 2;
    return res;
  }
  std::vector<std::future<detail::ScenarioRun>> tasks;
  for (std::size_t i = 0; i < manifest.scenarios.size(); ++i) {
    // per-scenario seeds so that results do not depend on scheduling
    const std::uint64_t seed = manifest.seed + 0x9E3779B97F4A7C15ull * (i + 1);
    tasks.push_back(std::async(std::launch::async, [&manifest, i, seed] {
      return detail::run_scenario(manifest.scenarios[i], manifest, seed);
    }));
  }
  if (!manifest.mesh_obj.empty() && manifest.selected("mesh")) {
    tasks.push_back(std::async(std::launch::async, [&manifest] {
      detail::ScenarioRun out;
      detail::timed("mesh", manifest.mesh_obj, out, [&] { detail::suite_obj(manifest, out); });
      return out;
    }));
  }
  for (auto& t : tasks) {
    auto part = t.get();
    for (auto& r : part.records) res.records.push_back(std::move(r));
    for (auto& e : part.errors) res.errors.push_back(std::move(e));
    res.plots.balls.merge(part.plots.balls);
    res.plots.overlays.merge(part.plots.overlays);
    res.plots.greens.merge(part.plots.greens);
    res.plots.discrete.merge(part.plots.discrete);
  }
  std::stable_sort(res.records.begin(), res.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.suite, a.scenario, a.check) < std::tie(b.suite, b.scenario, b.check);
  });
  std::sort(res.errors.begin(), res.errors.end());
  const bool failed = std::any_of(res.records.begin(), res.records.end(),
                                  [](const auto& r) { return r.status == Status::Fail; });
  res.exit_code = !res.errors.empty() ? 2 : (failed ? 1 : 0);
  return res;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string file_stem(const std::string& id) {
  std::string out;
  for (char c : id) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_';
  return out;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

}  // namespace detail

inline constexpr const char* kRecordCsvHeader = "suite,scenario,check,lhs,rhs,margin,tolerance,status,note\n";

/// Records without runtimes, so that repeated runs compare byte for byte.
inline std::string records_csv(const std::vector<VerificationRecord>& records) {
  std::ostringstream out;
  out << kRecordCsvHeader;
  for (const auto& r : records) {
    out << detail::csv_field(r.suite) << ',' << detail::csv_field(r.scenario) << ',' << detail::csv_field(r.check) << ','
        << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.margin) << ','
        << format_number(r.tolerance) << ',' << to_string(r.status) << ',' << detail::csv_field(r.note) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const VerificationRecord& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["scenario"] = r.scenario;
  j["check"] = r.check;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["tolerance"] = r.tolerance;
  j["status"] = to_string(r.status);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline std::string report_json(const RunManifest& m, const RunResult& res) {
  nlohmann::ordered_json j;
  j["manifest"] = serialize_manifest(m);
  j["exit_code"] = res.exit_code;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : res.records) j["records"].push_back(to_json(r));
  j["errors"] = res.errors;
  return j.dump(2) + "\n";
}

inline constexpr const char* kOverlayCsvHeader = "scenario,r,A,pi_r2,C1_exp_beta_r\n";

/// scenario,r,A,pi_r2,C1_exp_beta_r for every profile; the last column is
/// empty when no exponential bound applies.
inline std::string bounds_overlay_csv(const PlotData& plots) {
  std::ostringstream out;
  out << kOverlayCsvHeader;
  for (const auto& [id, p] : plots.balls) {
    const auto it = plots.overlays.find(id);
    const bool has_bound = it != plots.overlays.end() && std::isfinite(it->second.fitted_constant);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double r = p.grid[i];
      out << detail::csv_field(id) << ',' << format_number(r) << ',' << format_number(p.area[i]) << ','
          << format_number(kPi * r * r) << ',';
      if (has_bound) out << format_number(it->second.fitted_constant * std::exp(it->second.exponent * r));
      out << '\n';
    }
  }
  return out.str();
}

/// Writes one CSV per profile plus records.csv and bounds_overlay.csv into
/// dir; returns the file names written, sorted.
inline std::vector<std::string> emit_plot_data(const std::vector<VerificationRecord>& records, const PlotData& plots,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    detail::write_file(dir / name, text);
    written.push_back(name);
  };
  put("records.csv", records_csv(records));
  put("bounds_overlay.csv", bounds_overlay_csv(plots));
  for (const auto& [id, p] : plots.balls) put("profile_" + detail::file_stem(id) + ".csv", to_csv(p));
  for (const auto& [id, g] : plots.greens) put("green_" + detail::file_stem(id) + ".csv", to_csv(g));
  for (const auto& [id, d] : plots.discrete) put("mesh_profile_" + detail::file_stem(id) + ".csv", to_csv(d));
  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace minsurf

#endif  // MINSURF_REPORT_HPP
