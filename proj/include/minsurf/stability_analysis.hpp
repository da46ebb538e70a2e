#ifndef MINSURF_STABILITY_ANALYSIS_HPP
#define MINSURF_STABILITY_ANALYSIS_HPP

// The stability operator -Delta - V, V = |h|^2 + Ric(nu, nu), restricted to
// angular Fourier modes e^{i m theta} on geodesic balls of a warped surface:
//
//   -(1/f)(f w')' + (m^2/f^2) w - V w = lambda w,   w(R) = 0.
//
// Two independent routes: a symmetric tridiagonal finite-volume
// discretization (Sturm bisection + inverse iteration) and a Pruefer-angle
// shooting integrator that counts zeros of the radial solution.

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>

#include "minsurf/ball_geometry.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/numeric.hpp"
#include "minsurf/surface_models.hpp"
#include "minsurf/test_functions.hpp"

namespace minsurf {

struct RadialOperator {
  WarpedSurface surface;
  RealFunction potential;  // V(r)
  int mode = 0;            // angular index m

  static RadialOperator jacobi(const Scenario& sc, int m = 0) {
    if (m < 0) throw DomainError("mode must be nonnegative");
    return {sc.surface, [sc](double r) { return sc.potential(r); }, m};
  }

  static RadialOperator laplacian(const WarpedSurface& s, int m = 0) {
    if (m < 0) throw DomainError("mode must be nonnegative");
    return {s, [](double) { return 0.0; }, m};
  }
};

struct EigenResult {
  double lambda = 0.0;
  double R = 0.0;
  int m = 0;
  std::vector<double> r;             // cell centres followed by R
  std::vector<double> eigenfunction; // max-normalized, positive, 0 at R
  std::string solver = "finite_difference";
  std::size_t mesh_n = 0;
  bool cross_validated = false;
  double shooting_delta = 0.0;  // bracket half-width used by the shooting check
};

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (d, e) below x.
inline std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
  std::size_t count = 0;
  double q = d[0] - x;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (q == 0.0) q = 1e-300;
    q = d[i] - x - e[i - 1] * e[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

/// Solves (T - shift I) y = b for symmetric tridiagonal T (no pivoting; the
/// caller guarantees T - shift I is positive semidefinite).
inline std::vector<double> tridiagonal_solve(const std::vector<double>& d, const std::vector<double>& e, double shift,
                                             std::vector<double> b) {
  const auto n = d.size();
  std::vector<double> c(n, 0.0);
  double piv = d[0] - shift;
  if (piv == 0.0) piv = 1e-300;
  c[0] = n > 1 ? e[0] / piv : 0.0;
  b[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = d[i] - shift - e[i - 1] * c[i - 1];
    if (piv == 0.0) piv = 1e-300;
    if (i + 1 < n) c[i] = e[i] / piv;
    b[i] = (b[i] - e[i - 1] * b[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) b[i] -= c[i] * b[i + 1];
  return b;
}

using PruferState = std::array<double, 1>;

/// Integrates the scaled Pruefer angle of (f w')' + f (lambda + V - m^2/f^2) w = 0,
/// w = rho sin(theta), w' / s = rho cos(theta) with a constant scale s > 0:
///   theta' = s cos^2 + ((lambda + V - m^2/f^2) / s) sin^2 + (f'/f) sin cos.
/// The right-hand side stays bounded where w grows exponentially, so the
/// integration is not stiff. Calls `on_zero(r)` at each interior zero of w
/// (theta crossing k pi) until it returns false. Returns the zero count in (0, R].
template <class OnZero>
std::size_t prufer_shoot(const RadialOperator& op, double lambda, double R, OnZero&& on_zero) {
  namespace odeint = boost::numeric::odeint;
  const auto& s = op.surface;
  const double m2 = static_cast<double>(op.mode) * op.mode;
  const double r0 = s.neck_centered ? 0.0 : 1e-5 * std::min(1.0, R);
  const double scale = std::sqrt(std::max(1.0, std::abs(lambda + op.potential(std::max(r0, 0.5 * R)))));
  auto rhs = [&](const PruferState& th, PruferState& dth, double r) {
    const double f = s.warp(r);
    const double q = lambda + op.potential(r) - (m2 > 0.0 ? m2 / (f * f) : 0.0);
    const double c = std::cos(th[0]);
    const double sn = std::sin(th[0]);
    dth[0] = scale * c * c + q / scale * sn * sn + s.warp_d1(r) / f * sn * c;
  };

  PruferState th{0.5 * kPi};
  if (!s.neck_centered) {
    if (op.mode == 0) {
      // w ~ 1 - (lambda + V(0)) r^2 / 4
      const double k = lambda + op.potential(r0);
      th[0] = std::atan2(1.0 - 0.25 * k * r0 * r0, -0.5 * k * r0 / scale);
    } else {
      // w ~ r^m
      th[0] = std::atan2(r0, static_cast<double>(op.mode) / scale);
    }
  }

  auto stepper = odeint::make_dense_output(1e-12, 1e-10, odeint::runge_kutta_dopri5<PruferState>());
  stepper.initialize(th, r0, 1e-3 * (R - r0));
  std::size_t zeros = 0;
  double next_multiple = kPi;  // theta starts in (0, pi)
  std::size_t steps = 0;
  try {
    while (stepper.current_time() < R) {
      const auto [t0, t1] = stepper.do_step(rhs);
      if (++steps > 2'000'000) throw NumericError("shooting: step budget exhausted");
      if (t1 - t0 < 1e-14 * R) throw NumericError("shooting: step-size collapse at r = " + format_number(t0));
      const double t_end = std::min(t1, R);
      PruferState at_end;
      stepper.calc_state(t_end, at_end);
      while (at_end[0] >= next_multiple) {
        // locate the crossing inside [t0, t_end]
        double lo = t0;
        double hi = t_end;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          PruferState x;
          stepper.calc_state(mid, x);
          if (x[0] >= next_multiple) hi = mid; else lo = mid;
        }
        ++zeros;
        next_multiple += kPi;
        if (!on_zero(0.5 * (lo + hi))) return zeros;
      }
    }
  } catch (const NumericError&) {
    throw;
  } catch (const std::exception& ex) {
    throw NumericError(std::string("shooting: integrator failure: ") + ex.what());
  }
  return zeros;
}

}  // namespace detail

/// Number of zeros in (0, R] of the regular radial solution at spectral parameter lambda.
inline std::size_t shooting_zero_count(const RadialOperator& op, double lambda, double R) {
  return detail::prufer_shoot(op, lambda, R, [](double) { return true; });
}

/// Lowest Dirichlet eigenvalue on B(R) in mode op.mode.
inline EigenResult dirichlet_eigen(const RadialOperator& op, double R, std::size_t mesh_n, bool cross_validate = true) {
  const auto& s = op.surface;
  if (!(R > 0.0) || R > s.r_max) throw DomainError("dirichlet_eigen: R outside (0, r_max]");
  if (mesh_n < 128) throw DomainError("dirichlet_eigen: mesh_n must be >= 128");
  const std::size_t n = mesh_n;
  const double h = R / static_cast<double>(n);
  const double m2 = static_cast<double>(op.mode) * op.mode;

  // Cell-centred finite volumes in the measure f dr; zero flux through r = 0
  // (f(0) = 0 at a pole, reflection symmetry at a neck); ghost cell for w(R) = 0.
  std::vector<double> face(n + 1);
  std::vector<double> centre(n);
  std::vector<double> fc(n);
  face[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) face[i] = s.warp(static_cast<double>(i) * h);
  for (std::size_t i = 0; i < n; ++i) {
    centre[i] = (static_cast<double>(i) + 0.5) * h;
    fc[i] = s.warp(centre[i]);
  }
  std::vector<double> d(n);
  std::vector<double> e(n > 0 ? n - 1 : 0);
  const double ih2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    const double right = i + 1 == n ? 2.0 * face[n] : face[i + 1];
    const double k = (face[i] + right) * ih2 + (m2 / (fc[i] * fc[i]) - op.potential(centre[i])) * fc[i];
    d[i] = k / fc[i];
    if (i + 1 < n) e[i] = -face[i + 1] * ih2 / std::sqrt(fc[i] * fc[i + 1]);
  }

  // Sturm bisection for the smallest eigenvalue.
  double lo = d[0];
  double hi = d[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double rad = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - rad);
    hi = std::min(hi, d[i]);
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::sturm_count(d, e, mid) >= 1) hi = mid; else lo = mid;
  }
  const double lambda = 0.5 * (lo + hi);

  // Inverse iteration with a shift just below the spectrum.
  std::vector<double> y(n, 1.0);
  for (int it = 0; it < 3; ++it) {
    y = detail::tridiagonal_solve(d, e, lo, std::move(y));
    double norm = 0.0;
    for (double v : y) norm = std::max(norm, std::abs(v));
    for (double& v : y) v /= norm;
  }
  EigenResult res;
  res.lambda = lambda;
  res.R = R;
  res.m = op.mode;
  res.mesh_n = mesh_n;
  res.r = centre;
  res.r.push_back(R);
  res.eigenfunction.resize(n + 1);
  double amp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res.eigenfunction[i] = y[i] / std::sqrt(fc[i]);
    if (std::abs(res.eigenfunction[i]) > std::abs(amp)) amp = res.eigenfunction[i];
  }
  for (std::size_t i = 0; i < n; ++i) res.eigenfunction[i] /= amp;
  res.eigenfunction[n] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (res.eigenfunction[i] < -1e-10) throw NumericError("dirichlet_eigen: ground state changes sign");
  }

  if (cross_validate) {
    const double delta = 1e-4 * (1.0 + std::abs(lambda));
    const auto below = shooting_zero_count(op, lambda - delta, R);
    const auto above = shooting_zero_count(op, lambda + delta, R);
    if (below != 0 || above < 1) {
      throw NumericError("dirichlet_eigen: discretization and shooting disagree (lambda = " + format_number(lambda) +
                         ", zeros below/above = " + std::to_string(below) + "/" + std::to_string(above) + ")");
    }
    res.cross_validated = true;
    res.shooting_delta = delta;
  }
  return res;
}

/// First zero in (0, R] of the central Jacobi field u'' + (f'/f) u' + V u = 0,
/// u = 1, u' = 0 at the center; empty when u stays positive.
inline std::optional<double> positive_jacobi_solution(const Scenario& sc, double R) {
  if (!(R > 0.0) || R > sc.surface.r_max) throw DomainError("positive_jacobi_solution: R outside (0, r_max]");
  const auto op = RadialOperator::jacobi(sc, 0);
  std::optional<double> first;
  detail::prufer_shoot(op, 0.0, R, [&](double r) {
    first = r;
    return false;
  });
  return first;
}

struct StabilityRadius {
  double radius = 0.0;  // r_max when stable on the whole model
  bool finite = false;
  std::optional<double> jacobi_zero;
};

/// Largest R with nonnegative ground Dirichlet eigenvalue, cross-checked
/// against the first zero of the central Jacobi field.
inline StabilityRadius stability_radius(const Scenario& sc, std::size_t mesh_n = 2048) {
  const double r_max = sc.surface.r_max;
  const auto op = RadialOperator::jacobi(sc, 0);
  auto ground = [&](double R) { return dirichlet_eigen(op, R, mesh_n, false).lambda; };
  StabilityRadius out;
  out.jacobi_zero = positive_jacobi_solution(sc, r_max);
  if (ground(r_max) >= 0.0) {
    if (out.jacobi_zero) {
      throw NumericError("stability_radius: eigenvalue nonnegative on B(r_max) but the Jacobi field vanishes at " +
                         format_number(*out.jacobi_zero));
    }
    out.radius = r_max;
    return out;
  }
  if (!out.jacobi_zero) throw NumericError("stability_radius: negative eigenvalue but positive Jacobi field");
  double lo = r_max;
  while (ground(lo) < 0.0) {
    lo *= 0.5;
    if (lo < 1e-6) throw NumericError("stability_radius: instability at arbitrarily small radii");
  }
  const double hi = std::min(r_max, 2.0 * lo);
  out.radius = bisect([&](double R) { return ground(R); }, lo, hi, 1e-6);
  out.finite = true;
  const double gap = std::abs(out.radius - *out.jacobi_zero) / *out.jacobi_zero;
  if (gap > 1e-4) {
    throw NumericError("stability_radius: eigenvalue sign change at " + format_number(out.radius) +
                       " but Jacobi zero at " + format_number(*out.jacobi_zero));
  }
  return out;
}

struct QuadraticForm {
  double value = 0.0;     // Q
  double gradient = 0.0;  // int (phi')^2 dA
  double potential = 0.0; // int V phi^2 dA
};

/// Q(phi) = int_{B(R)} (phi')^2 - V phi^2 dA with dA = 2 pi f dr.
inline QuadraticForm quadratic_form(const Scenario& sc, const TestFunction& phi, double R) {
  if (R > sc.surface.r_max) throw DomainError("quadratic_form: R beyond r_max");
  const auto breaks = phi.breakpoints(R);
  const auto& f = sc.surface.warp;
  QuadraticForm q;
  q.gradient = integrate_pieces([&](double r) { const double d = phi.d1(r); return d * d * kTwoPi * f(r); }, breaks).value;
  q.potential = integrate_pieces([&](double r) { const double v = phi(r); return sc.potential(r) * v * v * kTwoPi * f(r); }, breaks).value;
  q.value = q.gradient - q.potential;
  return q;
}

enum class FloorCase { Scalar, Sectional };

inline const char* to_string(FloorCase c) { return c == FloorCase::Scalar ? "scalar" : "sectional"; }

struct InequalitySides {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double tolerance = 1e-8;
  Status status = Status::Inapplicable;
  std::string note;

  void settle() {
    margin = rhs - lhs;
    tolerance = 1e-8 * std::max(1.0, std::abs(rhs));
    status = margin >= -tolerance ? Status::Pass : Status::Fail;
  }
};

namespace detail {

inline std::optional<double> floor_alpha(const Scenario& sc, FloorCase c) {
  return c == FloorCase::Scalar ? sc.ambient.scalar_alpha : sc.ambient.sectional_alpha;
}

struct PhiIntegrals {
  double grad_sq = 0.0;  // int (phi')^2 dA
  double phi_sq = 0.0;   // int phi^2 dA
  double phi_dd = 0.0;   // int phi phi'' dA
};

inline PhiIntegrals phi_integrals(const WarpedSurface& s, const TestFunction& phi, double R) {
  const auto breaks = phi.breakpoints(R);
  const auto& f = s.warp;
  PhiIntegrals out;
  out.grad_sq = integrate_pieces([&](double r) { const double d = phi.d1(r); return d * d * kTwoPi * f(r); }, breaks).value;
  out.phi_sq = integrate_pieces([&](double r) { const double v = phi(r); return v * v * kTwoPi * f(r); }, breaks).value;
  out.phi_dd = integrate_pieces([&](double r) { return phi(r) * phi.d2(r) * kTwoPi * f(r); }, breaks).value;
  return out;
}

}  // namespace detail

/// Both sides of the integrated Gauss-Bonnet / stability inequality
///   -c int_0^R phi phi' L' dr <= c pi phi(0)^2 + int (phi')^2 + k alpha int phi^2
/// with (c, k) = (2, 3) under S >= -6 alpha and (4, 4) under K >= -alpha.
inline InequalitySides lemma_m_sides(const Scenario& sc, const TestFunction& phi, double R, FloorCase c) {
  InequalitySides out;
  out.check = std::string("lemma_m_") + to_string(c);
  const auto alpha = detail::floor_alpha(sc, c);
  if (!sc.stable_claim) {
    out.note = "scenario is not stable";
    return out;
  }
  if (!alpha) {
    out.note = std::string("no ") + to_string(c) + " floor declared";
    return out;
  }
  if (std::abs(phi(R)) > 1e-14) throw DomainError("lemma_m_sides: phi(R) must vanish");
  const double cc = c == FloorCase::Scalar ? 2.0 : 4.0;
  const double kk = c == FloorCase::Scalar ? 3.0 : 4.0;
  const auto& s = sc.surface;
  const auto breaks = phi.breakpoints(R);
  const double cross = integrate_pieces([&](double r) { return phi(r) * phi.d1(r) * kTwoPi * s.warp_d1(r); }, breaks).value;
  const auto in = detail::phi_integrals(s, phi, R);
  const double p0 = phi(0.0);
  out.lhs = -cc * cross;
  out.rhs = cc * kPi * p0 * p0 + in.grad_sq + kk * *alpha * in.phi_sq;
  out.settle();
  return out;
}

/// Integrated-by-parts form for C^2 phi:
///   scalar:    int (phi')^2 + 2 int phi phi''  <= 2 pi phi(0)^2 + 3 alpha int phi^2
///   sectional: 3 int (phi')^2 + 4 int phi phi'' <= 4 pi phi(0)^2 + 4 alpha int phi^2
inline InequalitySides corollary_c1_sides(const Scenario& sc, const TestFunction& phi, double R, FloorCase c) {
  InequalitySides out;
  out.check = std::string("corollary_c1_") + to_string(c);
  const auto alpha = detail::floor_alpha(sc, c);
  if (!sc.stable_claim) {
    out.note = "scenario is not stable";
    return out;
  }
  if (!alpha) {
    out.note = std::string("no ") + to_string(c) + " floor declared";
    return out;
  }
  if (std::abs(phi(R)) > 1e-14) throw DomainError("corollary_c1_sides: phi(R) must vanish");
  const auto in = detail::phi_integrals(sc.surface, phi, R);
  const double p0 = phi(0.0);
  if (c == FloorCase::Scalar) {
    out.lhs = in.grad_sq + 2.0 * in.phi_dd;
    out.rhs = kTwoPi * p0 * p0 + 3.0 * *alpha * in.phi_sq;
  } else {
    out.lhs = 3.0 * in.grad_sq + 4.0 * in.phi_dd;
    out.rhs = 4.0 * kPi * p0 * p0 + 4.0 * *alpha * in.phi_sq;
  }
  out.settle();
  return out;
}

/// Flat-ambient consequence with the log cutoff:
///   int_{B(R)} [ln(R+1) - ln(r+1)] / (r+1)^2 dA <= pi ln^2(R+1).
inline InequalitySides log_cutoff_area_sides(const Scenario& sc, double R) {
  InequalitySides out;
  out.check = "log_cutoff_area";
  if (!sc.stable_claim) {
    out.note = "scenario is not stable";
    return out;
  }
  if (!(sc.ambient.sectional_alpha && *sc.ambient.sectional_alpha == 0.0)) {
    out.note = "needs a flat ambient";
    return out;
  }
  const auto phi = log_cutoff(R);
  const auto in = detail::phi_integrals(sc.surface, phi, R);
  out.lhs = in.phi_dd;
  const double l = std::log1p(R);
  out.rhs = kPi * l * l;
  out.settle();
  return out;
}

struct ExpCutoffSides {
  InequalitySides annulus;     // the two-annulus inequality at (t, eta)
  InequalitySides area_bound;  // A(t) <= (4 pi / 3) t^2 e^{a t}
  double a = 4.0 / std::sqrt(7.0);
};

/// Exponentially weighted cutoff under K >= -1 with a = 4/sqrt(7):
///   (3/eta^2) int_{B(t)\B(t-eta)} e^{-ar} + (7a/eta) int_{B(t)\B(t-eta)} psi e^{-ar}
///     <= 4 pi + (4/eta) L(t-eta) e^{-a(t-eta)},
/// plus the consequence A(t) <= (4 pi/3) t^2 e^{a t}.
inline ExpCutoffSides exp_cutoff_sides(const Scenario& sc, double t, double eta) {
  ExpCutoffSides out;
  out.annulus.check = "exp_cutoff_annulus";
  out.area_bound.check = "exp_cutoff_area";
  const double a = out.a;
  if (!sc.stable_claim || !(sc.ambient.sectional_alpha && *sc.ambient.sectional_alpha <= 1.0)) {
    out.annulus.note = out.area_bound.note = "needs a stable surface with K >= -1";
    return out;
  }
  if (!(eta > 0.0) || !(eta <= t) || t > sc.surface.r_max) throw DomainError("exp_cutoff_sides: need 0 < eta <= t <= r_max");
  const auto psi = plateau_cutoff(t, eta);
  const auto& f = sc.surface.warp;
  const double plain = integrate([&](double r) { return std::exp(-a * r) * kTwoPi * f(r); }, t - eta, t).value;
  const double weighted = integrate([&](double r) { return psi(r) * std::exp(-a * r) * kTwoPi * f(r); }, t - eta, t).value;
  out.annulus.lhs = 3.0 / (eta * eta) * plain + 7.0 * a / eta * weighted;
  out.annulus.rhs = 4.0 * kPi + 4.0 / eta * kTwoPi * f(t - eta) * std::exp(-a * (t - eta));
  out.annulus.settle();
  out.area_bound.lhs = kTwoPi * integrate(f, 0.0, t).value;
  out.area_bound.rhs = 4.0 * kPi / 3.0 * t * t * std::exp(a * t);
  out.area_bound.settle();
  return out;
}

inline nlohmann::ordered_json to_json(const EigenResult& e) {
  nlohmann::ordered_json j;
  j["lambda"] = e.lambda;
  j["R"] = e.R;
  j["m"] = e.m;
  j["solver"] = e.solver;
  j["mesh_n"] = e.mesh_n;
  j["cross_validated"] = e.cross_validated;
  j["shooting_delta"] = e.shooting_delta;
  j["r"] = e.r;
  j["eigenfunction"] = e.eigenfunction;
  return j;
}

/// One CSV row: scenario, test_function, R, lhs, rhs, margin, pass.
inline std::string inequality_csv_row(const std::string& scenario, const std::string& test_function, double R,
                                      const InequalitySides& s) {
  std::ostringstream out;
  out << scenario << ',' << test_function << ',' << format_number(R) << ',' << format_number(s.lhs) << ','
      << format_number(s.rhs) << ',' << format_number(s.margin) << ',' << to_string(s.status) << '\n';
  return out.str();
}

inline constexpr const char* kInequalityCsvHeader = "scenario,test_function,R,lhs,rhs,margin,pass\n";

}  // namespace minsurf

#endif  // MINSURF_STABILITY_ANALYSIS_HPP
