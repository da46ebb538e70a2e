#ifndef MINSURF_SURFACE_MODELS_HPP
#define MINSURF_SURFACE_MODELS_HPP

// Rotationally symmetric model surfaces dr^2 + f(r)^2 dtheta^2 together with
// the extrinsic data of an immersion into a 3-manifold and the curvature
// floors assumed on the ambient space.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/expr.hpp"
#include "minsurf/numeric.hpp"

namespace minsurf {

/// Asymptotic class of the warp, used to close improper integrals of 1/f.
struct GrowthClass {
  enum class Kind { Unknown, Polynomial, Exponential };
  Kind kind = Kind::Unknown;
  double rate = 0.0;  // degree for Polynomial, exponent k in f ~ C e^{k r} for Exponential

  static GrowthClass polynomial(double degree) { return {Kind::Polynomial, degree}; }
  static GrowthClass exponential(double k) { return {Kind::Exponential, k}; }

  std::string to_string() const {
    switch (kind) {
      case Kind::Polynomial: return "poly:" + format_number(rate);
      case Kind::Exponential: return "exp:" + format_number(rate);
      case Kind::Unknown: break;
    }
    return "unknown";
  }
};

/// Warped-product metric dr^2 + f(r)^2 dtheta^2 on [0, r_max].
struct WarpedSurface {
  std::string name;
  RealFunction warp;
  RealFunction warp_d1;
  RealFunction warp_d2;
  double r_max = 0.0;
  bool neck_centered = false;  // f(0) > 0, r is signed distance from a neck circle
  GrowthClass growth;
  std::optional<std::string> warp_text;  // present when built from an expression

  static WarpedSurface from_expression(std::string name, const std::string& text, double r_max,
                                       GrowthClass growth = {}, bool neck_centered = false) {
    const auto f = Expression::parse(text);
    const auto f1 = f.derivative();
    const auto f2 = f1.derivative();
    WarpedSurface s;
    s.name = std::move(name);
    s.warp = f;
    s.warp_d1 = f1;
    s.warp_d2 = f2;
    s.r_max = r_max;
    s.neck_centered = neck_centered;
    s.growth = growth;
    s.warp_text = text;
    return s;
  }

  static WarpedSurface from_functions(std::string name, RealFunction f, RealFunction f1, RealFunction f2,
                                      double r_max, GrowthClass growth = {}, bool neck_centered = false) {
    WarpedSurface s;
    s.name = std::move(name);
    s.warp = std::move(f);
    s.warp_d1 = std::move(f1);
    s.warp_d2 = std::move(f2);
    s.r_max = r_max;
    s.neck_centered = neck_centered;
    s.growth = growth;
    return s;
  }

  /// c f(r / c): the metric scaled by c^2.
  WarpedSurface scaled(double c) const {
    WarpedSurface s = *this;
    s.name = name + "*" + format_number(c);
    s.warp = [f = warp, c](double r) { return c * f(r / c); };
    s.warp_d1 = [f = warp_d1, c](double r) { return f(r / c); };
    s.warp_d2 = [f = warp_d2, c](double r) { return f(r / c) / c; };
    s.r_max = c * r_max;
    s.warp_text.reset();
    return s;
  }
};

struct WarpSample {
  double f;
  double d1;
  double d2;
};

/// (f, f', f'') at r. At r = 0 the expressions are evaluated directly; for a
/// smooth pole this is the one-sided limit (0, 1, f''(0+)).
inline WarpSample eval_warp(const WarpedSurface& s, double r) {
  if (!(r >= 0.0) || r > s.r_max) {
    throw DomainError("eval_warp: r = " + format_number(r) + " outside [0, " + format_number(s.r_max) +
                      "] for " + s.name);
  }
  return {s.warp(r), s.warp_d1(r), s.warp_d2(r)};
}

/// Gauss curvature K = -f''/f of the warped metric.
inline double gauss_curvature(const WarpedSurface& s, double r) {
  if (r == 0.0 && !s.neck_centered) {
    throw PoleError("gauss_curvature: pointwise formula undefined at the pole; use the ball profile limit");
  }
  const auto w = eval_warp(s, r);
  return -w.d2 / w.f;
}

/// Second fundamental form and normal curvature data along the radius.
struct ExtrinsicProfile {
  RealFunction h_sq;         // |h|^2
  RealFunction ric_nn;       // Ric(nu, nu)
  RealFunction tangent_sec;  // R_1212
  std::optional<std::string> h_sq_text;
  std::optional<std::string> ric_nn_text;
  std::optional<std::string> scalar_text;  // S, when declared

  /// Ambient scalar curvature along Sigma implied by tangent_sec + ric_nn = S/2.
  double scalar(double r) const { return 2.0 * (tangent_sec(r) + ric_nn(r)); }
};

/// Curvature floors of the ambient 3-manifold. alpha_curv >= 0 is the
/// curvature scale: S >= -6 alpha or sectional K >= -alpha.
struct AmbientBounds {
  std::optional<double> scalar_alpha;
  std::optional<double> sectional_alpha;
  int dimension = 3;
  std::string space_form;  // "R3", "H3" or empty when the ambient is not a space form

  std::optional<double> scalar_floor() const {
    if (!scalar_alpha) return std::nullopt;
    return -6.0 * *scalar_alpha;
  }
  std::optional<double> sectional_floor() const {
    if (!sectional_alpha) return std::nullopt;
    return -*sectional_alpha;
  }
};

struct Scenario {
  WarpedSurface surface;
  ExtrinsicProfile extrinsic;
  AmbientBounds ambient;
  bool stable_claim = false;

  const std::string& id() const { return surface.name; }

  /// Stability potential V = |h|^2 + Ric(nu, nu).
  double potential(double r) const { return extrinsic.h_sq(r) + extrinsic.ric_nn(r); }
};

struct GaussResidual {
  double scalar_form;   // K - [S/2 - Ric(nu,nu) - |h|^2/2]
  double tangent_form;  // K - [R_1212 - |h|^2/2]
};

inline GaussResidual gauss_equation_residual(const Scenario& sc, double r) {
  const auto& ex = sc.extrinsic;
  if (!ex.h_sq || !ex.ric_nn || !ex.tangent_sec) {
    throw ConfigError("gauss_equation_residual: scenario " + sc.id() + " lacks extrinsic data");
  }
  if (!(r > 0.0) && !sc.surface.neck_centered) throw PoleError("gauss_equation_residual needs r > 0");
  const double k = gauss_curvature(sc.surface, r);
  const double h2 = ex.h_sq(r);
  return {k - (0.5 * ex.scalar(r) - ex.ric_nn(r) - 0.5 * h2), k - (ex.tangent_sec(r) - 0.5 * h2)};
}

namespace detail {

inline double relative_gap(double a, double b, double scale) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b), scale});
}

}  // namespace detail

/// Enforces the WarpedSurface/ExtrinsicProfile/Scenario invariants on a sample
/// grid of 200 radii; throws InvariantError with the failing residual.
inline void validate(const Scenario& sc) {
  const auto& s = sc.surface;
  if (!(s.r_max > 0.0)) throw InvariantError("r_max must be positive", s.r_max);
  if (!s.warp || !s.warp_d1 || !s.warp_d2) throw ConfigError("surface " + s.name + " has no warp");
  const auto grid = default_grid(s.r_max, 200);
  for (double r : grid) {
    const double f = s.warp(r);
    if (!(f > 0.0)) throw InvariantError("warp must be positive at r = " + format_number(r), f);
  }
  if (s.neck_centered) {
    const double f0 = s.warp(0.0);
    if (!(f0 > 0.0)) throw InvariantError("neck-centered warp must be positive at the neck", f0);
  } else {
    const double f0 = s.warp(0.0);
    const double d0 = s.warp_d1(0.0);
    if (std::abs(f0) > 1e-12) throw InvariantError("smooth pole requires f(0) = 0", f0);
    if (std::abs(d0 - 1.0) > 1e-9) throw InvariantError("smooth pole requires f'(0) = 1", d0 - 1.0);
  }
  // Analytic derivatives against centered differences. The step is large
  // enough that roundoff in the second difference stays below 1e-8.
  for (double r : grid) {
    const double h = 1e-4;
    if (r - h < 0.0 || r + h > s.r_max) continue;
    const double fp = s.warp(r + h);
    const double fm = s.warp(r - h);
    const double f0 = s.warp(r);
    const double fd1 = (fp - fm) / (2.0 * h);
    const double fd2 = (fp - 2.0 * f0 + fm) / (h * h);
    const double scale = std::abs(f0);
    const double g1 = detail::relative_gap(s.warp_d1(r), fd1, scale);
    if (g1 > 1e-6) throw InvariantError("warp_d1 disagrees with finite differences at r = " + format_number(r), g1);
    const double g2 = detail::relative_gap(s.warp_d2(r), fd2, scale);
    if (g2 > 1e-6) throw InvariantError("warp_d2 disagrees with finite differences at r = " + format_number(r), g2);
  }
  const auto& ex = sc.extrinsic;
  if (!ex.h_sq || !ex.ric_nn || !ex.tangent_sec) throw ConfigError("scenario " + s.name + " lacks extrinsic data");
  for (double r : grid) {
    const double h2 = ex.h_sq(r);
    if (!(h2 >= 0.0)) throw InvariantError("|h|^2 must be nonnegative at r = " + format_number(r), h2);
    const auto res = gauss_equation_residual(sc, r);
    const double scale = std::max(1.0, std::abs(gauss_curvature(s, r)));
    if (std::abs(res.scalar_form) > 1e-8 * scale || std::abs(res.tangent_form) > 1e-8 * scale) {
      throw InvariantError("Gauss equation violated at r = " + format_number(r),
                           std::max(std::abs(res.scalar_form), std::abs(res.tangent_form)));
    }
  }
  const auto& am = sc.ambient;
  if (!am.scalar_alpha && !am.sectional_alpha) throw ConfigError("ambient bounds need at least one curvature floor");
  if (am.scalar_alpha && *am.scalar_alpha < 0.0) throw InvariantError("alpha_curv must be >= 0", *am.scalar_alpha);
  if (am.sectional_alpha && *am.sectional_alpha < 0.0) {
    throw InvariantError("alpha_curv must be >= 0", *am.sectional_alpha);
  }
  if (am.dimension < 3) throw InvariantError("ambient dimension must be >= 3", am.dimension);
}

/// Builds a scenario from expression texts. When `scalar_text` is empty the
/// tangential sectional curvature is taken from the Gauss equation itself.
inline Scenario make_scenario(WarpedSurface surface, const std::string& h_sq_text, const std::string& ric_nn_text,
                              const std::optional<std::string>& scalar_text, AmbientBounds ambient,
                              bool stable_claim) {
  Scenario sc;
  const auto h = Expression::parse(h_sq_text);
  const auto ric = Expression::parse(ric_nn_text);
  sc.extrinsic.h_sq = h;
  sc.extrinsic.ric_nn = ric;
  sc.extrinsic.h_sq_text = h_sq_text;
  sc.extrinsic.ric_nn_text = ric_nn_text;
  if (scalar_text) {
    const auto s = Expression::parse(*scalar_text);
    sc.extrinsic.tangent_sec = [s, ric](double r) { return 0.5 * s(r) - ric(r); };
    sc.extrinsic.scalar_text = scalar_text;
  } else {
    sc.extrinsic.tangent_sec = [f = surface.warp, f2 = surface.warp_d2, h](double r) {
      return -f2(r) / f(r) + 0.5 * h(r);
    };
  }
  sc.surface = std::move(surface);
  sc.ambient = std::move(ambient);
  sc.stable_claim = stable_claim;
  return sc;
}

inline Scenario plane_scenario() {
  auto s = WarpedSurface::from_expression("plane", "r", 1e5, GrowthClass::polynomial(1.0));
  return make_scenario(std::move(s), "0", "0", std::string("0"), AmbientBounds{0.0, 0.0, 3, "R3"}, true);
}

/// Neck-centered catenoid of neck radius c in R^3, f(s) = sqrt(c^2 + s^2).
inline Scenario catenoid_scenario(double c) {
  if (!(c > 0.0)) throw DomainError("catenoid neck radius must be positive");
  const std::string cc = format_number(c * c);
  auto s = WarpedSurface::from_expression("catenoid(c=" + format_number(c) + ")", "sqrt(" + cc + "+r^2)", 10.0,
                                          GrowthClass::polynomial(1.0), true);
  const std::string h_sq = format_number(2.0 * c * c) + "/(" + cc + "+r^2)^2";
  return make_scenario(std::move(s), h_sq, "0", std::string("0"), AmbientBounds{0.0, 0.0, 3, "R3"}, false);
}

/// Totally geodesic hyperbolic plane in H^3.
inline Scenario h2_in_h3_scenario() {
  auto s = WarpedSurface::from_expression("h2-in-h3", "sinh(r)", 40.0, GrowthClass::exponential(1.0));
  return make_scenario(std::move(s), "0", "-2", std::string("-6"), AmbientBounds{1.0, 1.0, 3, "H3"}, true);
}

inline std::vector<Scenario> builtin_catalog() {
  return {plane_scenario(), catenoid_scenario(1.0), h2_in_h3_scenario()};
}

inline std::optional<Scenario> find_builtin(const std::string& name) {
  for (auto& sc : builtin_catalog()) {
    if (sc.id() == name) return sc;
  }
  const std::string prefix = "catenoid(c=";
  if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
    const auto num = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    try {
      std::size_t used = 0;
      const double c = std::stod(num, &used);
      if (used == num.size()) return catenoid_scenario(c);
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace minsurf

#endif  // MINSURF_SURFACE_MODELS_HPP
