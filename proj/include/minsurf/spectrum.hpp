#ifndef MINSURF_SPECTRUM_HPP
#define MINSURF_SPECTRUM_HPP

// Bottom of the spectrum lambda_0 by Dirichlet exhaustion, and the
// closed-form upper/lower bounds it is compared against.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

#include "minsurf/ball_geometry.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/numeric.hpp"
#include "minsurf/stability_analysis.hpp"
#include "minsurf/surface_models.hpp"

namespace minsurf {

using Rational = boost::rational<long long>;

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

struct Lambda0Estimate {
  double value = 0.0;
  double uncertainty = 0.0;
  std::vector<double> radii;
  std::vector<double> lambdas;  // lambda_1(B(R)) per radius
};

namespace detail {

/// Least-squares intercept of y = a + b / R^2.
inline double inverse_square_intercept(std::span<const double> R, std::span<const double> y) {
  std::vector<double> x(R.size());
  for (std::size_t i = 0; i < R.size(); ++i) x[i] = 1.0 / (R[i] * R[i]);
  return fit_line(x, y).intercept;
}

}  // namespace detail

/// lambda_0 from lambda_1(B(R)) (V = 0, m = 0) over increasing radii,
/// extrapolated with a + b/R^2 on the three largest radii. The uncertainty is
/// the change against the same fit one radius earlier.
inline Lambda0Estimate lambda0_estimate(const WarpedSurface& surface, const std::vector<double>& R_list,
                                        std::size_t mesh_n = 4096) {
  if (R_list.size() < 4) throw DomainError("lambda0_estimate: need at least 4 radii");
  for (std::size_t i = 1; i < R_list.size(); ++i) {
    if (!(R_list[i] > R_list[i - 1])) throw DomainError("lambda0_estimate: radii must increase");
  }
  const auto op = RadialOperator::laplacian(surface, 0);
  Lambda0Estimate est;
  est.radii = R_list;
  for (double R : R_list) est.lambdas.push_back(dirichlet_eigen(op, R, mesh_n, false).lambda);
  for (std::size_t i = 1; i < est.lambdas.size(); ++i) {
    if (!(est.lambdas[i] < est.lambdas[i - 1])) {
      throw NumericError("lambda0_estimate: lambda_1(B(R)) not decreasing at R = " + format_number(R_list[i]));
    }
  }
  const std::size_t n = R_list.size();
  const std::span<const double> R(est.radii);
  const std::span<const double> y(est.lambdas);
  const double last = detail::inverse_square_intercept(R.subspan(n - 3), y.subspan(n - 3));
  const double prev = detail::inverse_square_intercept(R.subspan(n - 4, 3), y.subspan(n - 4, 3));
  est.value = std::max(0.0, last);
  est.uncertainty = std::abs(last - prev);
  return est;
}

/// Radii used when none are given: four radii ending at min(r_max, 30).
inline std::vector<double> default_exhaustion_radii(const WarpedSurface& s) {
  const double top = std::min(s.r_max, 30.0);
  return {0.5 * top, 2.0 * top / 3.0, 5.0 * top / 6.0, top};
}

struct VolumeGrowthBound {
  double rate = 0.0;
  double rate_width = 0.0;
  double bound = 0.0;  // rate^2 / 4
};

/// (1/4) (growth rate of A)^2.
inline VolumeGrowthBound volume_growth_upper(const BallProfile& prof) {
  const auto g = growth_rate(prof);
  return {g.rate, g.width, 0.25 * g.rate * g.rate};
}

enum class BccCase { ScalarFloor, SectionalFloor };

/// 1 under S >= -6, 4/7 under K >= -1.
inline Rational bcc_upper_bound(BccCase c) { return c == BccCase::ScalarFloor ? Rational(1) : Rational(4, 7); }

/// The earlier sectional-case constant 4/3, kept for comparison.
inline Rational prior_sectional_upper_bound() { return Rational(4, 3); }

/// 2 n (n-1)^2 kappa / (6n - n^2 - 1) for 2 <= n <= 5.
inline Rational hypersurface_upper_bound(int n, const Rational& kappa) {
  if (n < 2 || n > 5) throw DomainError("hypersurface_upper_bound: n must lie in [2, 5], got " + std::to_string(n));
  if (kappa < 0) throw DomainError("hypersurface_upper_bound: kappa must be nonnegative");
  const long long nn = n;
  return Rational(2 * nn * (nn - 1) * (nn - 1), 6 * nn - nn * nn - 1) * kappa;
}

/// (m-1)^2 / 4 for minimal m-submanifolds of hyperbolic space.
inline Rational minimal_submanifold_lower_bound(int m) {
  if (m < 1) throw DomainError("minimal_submanifold_lower_bound: m must be >= 1");
  return Rational((m - 1) * (m - 1), 4);
}

struct SpectrumBound {
  std::string id;
  double value = 0.0;
  std::optional<Rational> exact;
  bool applicable = false;
  bool satisfied = true;
  std::string note;
};

struct SpectrumReport {
  std::string scenario;
  Lambda0Estimate lambda0;
  VolumeGrowthBound growth;
  std::vector<SpectrumBound> upper_bounds;
  std::vector<SpectrumBound> lower_bounds;
  std::vector<std::string> violations;
  bool pass = true;
};

struct SpectrumOptions {
  std::vector<double> radii;  // empty: default_exhaustion_radii
  std::size_t mesh_n = 4096;
  std::size_t profile_n = 2048;
  double growth_slack = 0.01;
};

inline SpectrumReport spectrum_report(const Scenario& sc, const SpectrumOptions& opt = {}) {
  SpectrumReport rep;
  rep.scenario = sc.id();
  const auto radii = opt.radii.empty() ? default_exhaustion_radii(sc.surface) : opt.radii;
  rep.lambda0 = lambda0_estimate(sc.surface, radii, opt.mesh_n);
  const double lam = rep.lambda0.value;
  const double unc = rep.lambda0.uncertainty;

  const double prof_end = std::min(sc.surface.r_max, 30.0);
  if (prof_end >= 10.0) {
    rep.growth = volume_growth_upper(profile(sc.surface, prof_end, opt.profile_n));
  }

  const auto& am = sc.ambient;
  auto rational_bound = [&](std::string id, Rational q, std::optional<double> alpha, std::string why) {
    SpectrumBound b;
    b.id = std::move(id);
    if (sc.stable_claim && alpha) {
      // a floor -alpha rescales to -1, so every constant scales by alpha
      b.applicable = true;
      b.value = to_double(q) * *alpha;
      if (*alpha == std::round(*alpha) && *alpha < 1e6) {
        b.exact = q * Rational(static_cast<long long>(*alpha));
      }
    } else {
      b.note = std::move(why);
    }
    return b;
  };
  rep.upper_bounds.push_back(rational_bound("bcc_scalar", bcc_upper_bound(BccCase::ScalarFloor), am.scalar_alpha,
                                            sc.stable_claim ? "no scalar floor" : "unstable"));
  rep.upper_bounds.push_back(rational_bound("bcc_sectional", bcc_upper_bound(BccCase::SectionalFloor), am.sectional_alpha,
                                            sc.stable_claim ? "no sectional floor" : "unstable"));
  rep.upper_bounds.push_back(rational_bound("hypersurface(n=2)", hypersurface_upper_bound(2, Rational(1)),
                                            am.sectional_alpha, sc.stable_claim ? "no sectional floor" : "unstable"));
  {
    SpectrumBound b;
    b.id = "area_growth_beta";
    if (sc.stable_claim && am.sectional_alpha) {
      const double beta = area_growth_exponent(AreaCase::SectionalFloor);
      b.applicable = true;
      b.value = 0.25 * beta * beta * *am.sectional_alpha;
    } else {
      b.note = sc.stable_claim ? "no sectional floor" : "unstable";
    }
    rep.upper_bounds.push_back(b);
  }
  {
    SpectrumBound b;
    b.id = "volume_growth";
    b.applicable = prof_end >= 10.0;
    b.value = rep.growth.bound;
    if (!b.applicable) b.note = "profile too short for a growth rate";
    rep.upper_bounds.push_back(b);
  }

  {
    SpectrumBound b;
    b.id = "nonnegative";
    b.exact = Rational(0);
    b.applicable = true;
    rep.lower_bounds.push_back(b);
  }
  {
    SpectrumBound b;
    b.id = "cheung_leung(m=2)";
    b.exact = minimal_submanifold_lower_bound(2);
    b.value = to_double(*b.exact);
    b.applicable = am.space_form == "H3";
    if (!b.applicable) b.note = "ambient is not hyperbolic space";
    rep.lower_bounds.push_back(b);
  }

  for (auto& b : rep.upper_bounds) {
    if (!b.applicable) continue;
    const double slack = b.id == "volume_growth" ? opt.growth_slack : 0.0;
    b.satisfied = lam - unc <= b.value + slack;
    if (!b.satisfied) rep.violations.push_back("lambda0 above " + b.id);
  }
  for (auto& b : rep.lower_bounds) {
    if (!b.applicable) continue;
    b.satisfied = b.value <= lam + unc;
    if (!b.satisfied) rep.violations.push_back("lambda0 below " + b.id);
  }
  for (const auto& lo : rep.lower_bounds) {
    for (const auto& up : rep.upper_bounds) {
      if (lo.applicable && up.applicable && up.id != "volume_growth" && lo.value > up.value) {
        rep.violations.push_back(lo.id + " exceeds " + up.id);
      }
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

inline nlohmann::ordered_json to_json(const SpectrumBound& b) {
  nlohmann::ordered_json j;
  j["id"] = b.id;
  j["value"] = b.value;
  if (b.exact) j["exact"] = to_string(*b.exact);
  j["applicable"] = b.applicable;
  j["satisfied"] = b.satisfied;
  if (!b.note.empty()) j["note"] = b.note;
  return j;
}

inline nlohmann::ordered_json to_json(const SpectrumReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["lambda0"] = r.lambda0.value;
  j["lambda0_uncertainty"] = r.lambda0.uncertainty;
  j["radii"] = r.lambda0.radii;
  j["lambda1"] = r.lambda0.lambdas;
  j["growth_rate"] = r.growth.rate;
  j["growth_bound"] = r.growth.bound;
  j["upper_bounds"] = nlohmann::ordered_json::array();
  for (const auto& b : r.upper_bounds) j["upper_bounds"].push_back(to_json(b));
  j["lower_bounds"] = nlohmann::ordered_json::array();
  for (const auto& b : r.lower_bounds) j["lower_bounds"].push_back(to_json(b));
  j["violations"] = r.violations;
  j["pass"] = r.pass;
  return j;
}

/// scenario,bound_id,value,applicable,satisfied
inline std::string to_csv(const SpectrumReport& r) {
  std::ostringstream out;
  out << "scenario,bound_id,value,applicable,satisfied\n";
  auto row = [&](const SpectrumBound& b) {
    out << r.scenario << ',' << b.id << ',' << format_number(b.value) << ',' << (b.applicable ? "true" : "false") << ','
        << (b.satisfied ? "true" : "false") << '\n';
  };
  out << r.scenario << ",lambda0," << format_number(r.lambda0.value) << ",true,true\n";
  for (const auto& b : r.lower_bounds) row(b);
  for (const auto& b : r.upper_bounds) row(b);
  return out.str();
}

}  // namespace minsurf

#endif  // MINSURF_SPECTRUM_HPP
