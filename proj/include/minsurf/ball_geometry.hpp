#ifndef MINSURF_BALL_GEOMETRY_HPP
#define MINSURF_BALL_GEOMETRY_HPP

// Geodesic-ball profiles of warped surfaces: circle length, area, total
// curvature and geodesic curvature, with the Gauss-Bonnet / Fiala relation,
// the Hessian comparison ratio and the area-growth bounds for stable
// surfaces.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minsurf/errors.hpp"
#include "minsurf/numeric.hpp"
#include "minsurf/surface_models.hpp"

namespace minsurf {

enum class Status { Pass, Fail, Inapplicable };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inapplicable: return "inapplicable";
  }
  return "?";
}

struct BallProfile {
  WarpedSurface surface;
  std::vector<double> grid;
  std::vector<double> length;      // L(r) = 2 pi f(r)
  std::vector<double> area;        // A(r) = 2 pi int_0^r f
  std::vector<double> total_curv;  // int_{B(r)} K dA
  std::vector<double> kg;          // f'/f on the boundary circle
  int euler = 1;                   // 1 for pole-centered balls, 0 for neck-centered annuli
  double closed_form_gap = 0.0;    // max relative |total_curv - 2 pi (f'(0) - f'(r))|

  std::size_t size() const { return grid.size(); }
};

/// Samples the ball profile on the default grid with n_grid points up to r_max.
inline BallProfile profile(const WarpedSurface& surface, double r_max, std::size_t n_grid) {
  if (n_grid < 16) throw DomainError("profile: n_grid must be >= 16");
  if (!(r_max > 0.0) || r_max > surface.r_max) {
    throw DomainError("profile: r_max " + format_number(r_max) + " outside (0, " + format_number(surface.r_max) + "]");
  }
  BallProfile p;
  p.surface = surface;
  p.grid = default_grid(r_max, n_grid);
  p.euler = surface.neck_centered ? 0 : 1;
  const auto n = p.grid.size();
  p.length.resize(n);
  p.area.resize(n);
  p.total_curv.resize(n);
  p.kg.resize(n);
  const auto& f = surface.warp;
  const auto& f2 = surface.warp_d2;
  const double d1_at_0 = surface.warp_d1(0.0);
  double area = 0.0;
  double curv = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = p.grid[i];
    area += kTwoPi * integrate(f, prev, r, 1e-10, 1e-13).value;
    curv -= kTwoPi * integrate(f2, prev, r, 1e-10, 1e-13).value;
    prev = r;
    const auto w = eval_warp(surface, r);
    p.length[i] = kTwoPi * w.f;
    p.area[i] = area;
    p.total_curv[i] = curv;
    p.kg[i] = w.d1 / w.f;
    const double closed = kTwoPi * (d1_at_0 - w.d1);
    p.closed_form_gap =
        std::max(p.closed_form_gap, std::abs(curv - closed) / std::max(1.0, std::abs(closed)));
    if (!(p.length[i] > 0.0) || !(area > 0.0) || (i > 0 && !(area > p.area[i - 1]))) {
      throw NumericError("profile: L, A must be positive and A increasing (r = " + format_number(r) + ")");
    }
  }
  if (p.closed_form_gap > 1e-8) {
    throw NumericError("profile: quadrature of the total curvature disagrees with 2 pi (f'(0) - f'(r)) by " +
                       format_number(p.closed_form_gap));
  }
  return p;
}

struct FialaResult {
  std::vector<double> residual;  // L'(r) - (2 pi chi - int K)
  double max_abs = 0.0;
  double max_signed = -std::numeric_limits<double>::infinity();
  bool inequality_holds = true;  // residual <= tol everywhere
};

/// L'(r) by a centered difference with step tied to the local grid spacing,
/// improved by one Richardson step.
inline double length_derivative(const BallProfile& p, std::size_t i) {
  const auto& r = p.grid;
  double spacing = i == 0 ? r[0] : r[i] - r[i - 1];
  if (i + 1 < r.size()) spacing = std::min(spacing, r[i + 1] - r[i]);
  const double delta = 0.25 * spacing;
  const auto& f = p.surface.warp;
  const double x = r[i];
  auto central = [&](double h) { return kTwoPi * (f(x + h) - f(x - h)) / (2.0 * h); };
  return (4.0 * central(0.5 * delta) - central(delta)) / 3.0;
}

inline FialaResult fiala_residual(const BallProfile& p, double tol = 1e-6) {
  if (p.size() < 64) throw DomainError("fiala_residual: need at least 64 grid points");
  FialaResult out;
  out.residual.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double res = length_derivative(p, i) - (kTwoPi * p.euler - p.total_curv[i]);
    out.residual[i] = res;
    out.max_abs = std::max(out.max_abs, std::abs(res));
    out.max_signed = std::max(out.max_signed, res);
  }
  out.inequality_holds = out.max_signed <= tol;
  return out;
}

struct ComparisonResult {
  Status status = Status::Pass;
  std::optional<double> first_violation;
  std::string detail;
};

/// 2 pi <= L(r)/r and L(r)/r nondecreasing; requires K <= 0 on the grid.
inline ComparisonResult hessian_comparison_check(const BallProfile& p, double slack = 1e-9) {
  ComparisonResult out;
  if (p.surface.neck_centered) {
    out.status = Status::Inapplicable;
    out.detail = "comparison is stated for pole-centered balls";
    return out;
  }
  for (double r : p.grid) {
    const double k = gauss_curvature(p.surface, r);
    if (k > 1e-12) {
      out.status = Status::Inapplicable;
      out.detail = "K > 0 at r = " + format_number(r);
      return out;
    }
  }
  double prev_ratio = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double ratio = p.length[i] / p.grid[i];
    const bool below = ratio < kTwoPi * (1.0 - slack);
    const bool decreasing = i > 0 && ratio < prev_ratio * (1.0 - slack);
    if (below || decreasing) {
      out.status = Status::Fail;
      out.first_violation = p.grid[i];
      out.detail = below ? "L(r)/r < 2 pi" : "L(r)/r decreased";
      return out;
    }
    prev_ratio = ratio;
  }
  return out;
}

enum class AreaCase { Flat, ScalarFloor, SectionalFloor };

inline const char* to_string(AreaCase c) {
  switch (c) {
    case AreaCase::Flat: return "flat";
    case AreaCase::ScalarFloor: return "scalar_floor";
    case AreaCase::SectionalFloor: return "sectional_floor";
  }
  return "?";
}

/// Exponential rate of the area bound: 2 under S >= -6, 4/sqrt(7) under K >= -1.
inline double area_growth_exponent(AreaCase c) {
  switch (c) {
    case AreaCase::ScalarFloor: return 2.0;
    case AreaCase::SectionalFloor: return 4.0 / std::sqrt(7.0);
    case AreaCase::Flat: break;
  }
  return 0.0;
}

struct BoundReport {
  std::string theorem_id;
  AreaCase area_case = AreaCase::Flat;
  std::vector<double> radii;
  std::vector<double> bound;
  std::vector<double> measured;
  std::vector<double> margin;
  double fitted_constant = std::numeric_limits<double>::quiet_NaN();   // C1
  double refined_constant = std::numeric_limits<double>::quiet_NaN();  // C1 on the doubled grid
  double exponent = 0.0;                                               // beta
  double r_param = 0.0;                                                // R used by the flat case
  double max_area_ratio_gap = 0.0;                                     // max |A / (pi r^2) - 1|, flat case
  Status status = Status::Inapplicable;
  std::string note;
};

struct AreaBoundOptions {
  double flat_R = std::exp(20.0);  // the constant R_0 is not quantified; this is the R checked
  double tolerance = 1e-9;         // relative slack on the flat-case comparisons
  double refinement_tolerance = 0.05;
};

inline BoundReport area_bound_report(const Scenario& sc, const BallProfile& p, AreaCase c,
                                     const AreaBoundOptions& opt = {}) {
  BoundReport rep;
  rep.area_case = c;
  rep.exponent = area_growth_exponent(c);
  rep.theorem_id = c == AreaCase::Flat ? "flat-area-length" : "exponential-area";
  if (!sc.stable_claim) {
    rep.note = "scenario is not stable";
    return rep;
  }
  const auto& am = sc.ambient;
  if (c == AreaCase::Flat && !(am.sectional_alpha && *am.sectional_alpha == 0.0 && am.space_form == "R3")) {
    rep.note = "flat case needs a Euclidean ambient";
    return rep;
  }
  if (c == AreaCase::ScalarFloor && !(am.scalar_alpha && *am.scalar_alpha <= 1.0)) {
    rep.note = "needs S >= -6";
    return rep;
  }
  if (c == AreaCase::SectionalFloor && !(am.sectional_alpha && *am.sectional_alpha <= 1.0)) {
    rep.note = "needs K >= -1";
    return rep;
  }

  if (c == AreaCase::Flat) {
    rep.r_param = opt.flat_R;
    const double factor = 1.0 + 10.0 / std::log(opt.flat_R);
    const double r_cap = std::sqrt(opt.flat_R);
    bool ok = true;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double r = p.grid[i];
      if (r > r_cap) break;
      const double disk = kPi * r * r;
      const double a_bound = disk * factor;
      const double l_bound = kTwoPi * r * factor;
      rep.radii.push_back(r);
      rep.bound.push_back(a_bound);
      rep.measured.push_back(p.area[i]);
      const double margin = std::min({a_bound - p.area[i], l_bound - p.length[i], disk - p.area[i]});
      rep.margin.push_back(margin);
      rep.max_area_ratio_gap = std::max(rep.max_area_ratio_gap, std::abs(p.area[i] / disk - 1.0));
      if (margin < -opt.tolerance * a_bound) ok = false;
    }
    rep.status = ok && !rep.radii.empty() ? Status::Pass : Status::Fail;
    return rep;
  }

  auto fit = [&](const BallProfile& prof) {
    double c1 = 0.0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      c1 = std::max(c1, prof.area[i] * std::exp(-rep.exponent * prof.grid[i]));
    }
    return c1;
  };
  rep.fitted_constant = fit(p);
  const auto refined = profile(p.surface, p.grid.back(), 2 * p.size() - 1);
  rep.refined_constant = fit(refined);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double b = rep.fitted_constant * std::exp(rep.exponent * p.grid[i]);
    rep.radii.push_back(p.grid[i]);
    rep.bound.push_back(b);
    rep.measured.push_back(p.area[i]);
    rep.margin.push_back(b - p.area[i]);
  }
  const bool finite = std::isfinite(rep.fitted_constant) && rep.fitted_constant > 0.0;
  const double drift = std::abs(rep.refined_constant - rep.fitted_constant) / rep.fitted_constant;
  rep.status = finite && drift <= opt.refinement_tolerance ? Status::Pass : Status::Fail;
  return rep;
}

struct GrowthRate {
  double rate = 0.0;
  double width = 0.0;  // two standard errors of the slope
  double r_from = 0.0;
  double r_to = 0.0;
};

/// Tail slope of ln A(r) against r over the last `fraction` of the grid.
inline GrowthRate growth_rate(const BallProfile& p, double fraction = 0.3) {
  if (p.grid.back() < 10.0) throw DomainError("growth_rate: grid must reach r >= 10");
  const std::size_t n = p.size();
  const auto first = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - fraction)));
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = std::min(first, n - 3); i < n; ++i) {
    const double y = std::log(p.area[i]);
    if (!ys.empty() && !(y > ys.back())) throw NumericError("growth_rate: ln A is not increasing");
    xs.push_back(p.grid[i]);
    ys.push_back(y);
  }
  const auto f = fit_line(xs, ys);
  return {f.slope, 2.0 * f.slope_stderr, xs.front(), xs.back()};
}

/// CSV with columns r, L, A, totalK, kg, bound, margin; the last two are
/// empty unless a report covering that radius is supplied.
inline std::string to_csv(const BallProfile& p, const BoundReport* rep = nullptr) {
  std::ostringstream out;
  out << "r,L,A,totalK,kg,bound,margin\n";
  std::size_t j = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << format_number(p.grid[i]) << ',' << format_number(p.length[i]) << ',' << format_number(p.area[i]) << ','
        << format_number(p.total_curv[i]) << ',' << format_number(p.kg[i]) << ',';
    if (rep && j < rep->radii.size() && rep->radii[j] == p.grid[i]) {
      out << format_number(rep->bound[j]) << ',' << format_number(rep->margin[j]);
      ++j;
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const BallProfile& p) {
  nlohmann::ordered_json j;
  j["surface"] = p.surface.name;
  j["euler"] = p.euler;
  j["r"] = p.grid;
  j["L"] = p.length;
  j["A"] = p.area;
  j["totalK"] = p.total_curv;
  j["kg"] = p.kg;
  return j;
}

inline nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["theorem_id"] = r.theorem_id;
  j["case"] = to_string(r.area_case);
  j["status"] = to_string(r.status);
  j["note"] = r.note;
  j["exponent"] = r.exponent;
  if (std::isfinite(r.fitted_constant)) {
    j["fitted_constant"] = r.fitted_constant;
    j["refined_constant"] = r.refined_constant;
  }
  if (r.area_case == AreaCase::Flat) {
    j["R"] = r.r_param;
    j["max_area_ratio_gap"] = r.max_area_ratio_gap;
  }
  j["r"] = r.radii;
  j["bound"] = r.bound;
  j["measured"] = r.measured;
  j["margin"] = r.margin;
  return j;
}

}  // namespace minsurf

#endif  // MINSURF_BALL_GEOMETRY_HPP
