#ifndef MINSURF_NUMERIC_HPP
#define MINSURF_NUMERIC_HPP

// Shared numerical plumbing: adaptive quadrature, deterministic sums, grids,
// least-squares fits and round-trip number formatting.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "minsurf/errors.hpp"

namespace minsurf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using RealFunction = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15/31) on [a, b]: greedy bisection of the panel
/// with the largest error until the total is below max(abs_tol, rel_tol * L1).
/// Only Boost's single-panel rule is used; its error output is in units of
/// the reference interval [-1, 1] and is rescaled here.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-12) {
  if (a == b) return {};
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Panel {
    double lo, hi, value, err, l1;
  };
  auto eval = [&](double lo, double hi) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err, &l1);
    return Panel{lo, hi, v, err * std::abs(hi - lo) * 0.5, l1};
  };
  const double rel = std::max(rel_tol, 1e-14);
  std::vector<Panel> panels{eval(a, b)};
  auto less_err = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  double value = 0.0;
  double err = 0.0;
  for (int iter = 0;; ++iter) {
    value = 0.0;
    err = 0.0;
    double l1 = 0.0;
    for (const auto& p : panels) {
      value += p.value;
      err += p.err;
      l1 += p.l1;
    }
    if (!std::isfinite(value)) {
      throw NumericError("quadrature produced a non-finite value on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
    }
    if (err <= std::max(abs_tol, rel * l1)) break;
    if (iter >= 4000) {
      throw NumericError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                         "], error estimate " + std::to_string(err));
    }
    std::pop_heap(panels.begin(), panels.end(), less_err);
    const Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > std::min(worst.lo, worst.hi) && mid < std::max(worst.lo, worst.hi))) {
      throw NumericError("quadrature cannot subdivide further near " + std::to_string(worst.lo));
    }
    panels.push_back(eval(worst.lo, mid));
    std::push_heap(panels.begin(), panels.end(), less_err);
    panels.push_back(eval(mid, worst.hi));
    std::push_heap(panels.begin(), panels.end(), less_err);
  }
  return {value, err};
}

/// Sum of integrals over consecutive breakpoints; pieces are reduced in order.
template <class F>
QuadResult integrate_pieces(F&& f, std::span<const double> breaks, double abs_tol = 1e-10,
                            double rel_tol = 1e-12) {
  QuadResult total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    const auto piece = integrate(f, breaks[i], breaks[i + 1], abs_tol, rel_tol);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

/// Integral over [a, inf) for decaying integrands (tanh-sinh family).
template <class F>
QuadResult integrate_to_infinity(F&& f, double a, double rel_tol = 1e-10) {
  boost::math::quadrature::exp_sinh<double> rule;
  double err = 0.0;
  double l1 = 0.0;
  auto shifted = [&](double t) { return f(a + t); };
  const double value =
      rule.integrate(shifted, 0.0, std::numeric_limits<double>::infinity(), rel_tol, &err, &l1);
  if (!std::isfinite(value)) throw NumericError("tail quadrature produced a non-finite value");
  return {value, err};
}

/// Pairwise (cascade) summation; the reduction order depends only on size.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const auto half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("fit_line needs at least two matching samples");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("fit_line needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      sse += e * e;
    }
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = b;
  return out;
}

/// Default radius grid: geometric spacing on (0, 1] to resolve the pole,
/// uniform beyond r = 1. All n points are strictly positive and increasing.
inline std::vector<double> default_grid(double r_max, std::size_t n) {
  if (n < 2 || !(r_max > 0.0)) throw DomainError("default_grid needs n >= 2 and r_max > 0");
  const double knee = std::min(1.0, r_max);
  const double r_first = 1e-3 * knee;
  std::size_t n_geo = r_max <= 1.0 ? n : std::max<std::size_t>(8, n / 8);
  n_geo = std::min(n_geo, n);
  std::vector<double> grid;
  grid.reserve(n);
  const double ratio = n_geo > 1 ? std::pow(knee / r_first, 1.0 / static_cast<double>(n_geo - 1)) : 1.0;
  double r = r_first;
  for (std::size_t i = 0; i < n_geo; ++i) {
    grid.push_back(i + 1 == n_geo ? knee : r);
    r *= ratio;
  }
  const std::size_t n_uni = n - n_geo;
  for (std::size_t i = 1; i <= n_uni; ++i) {
    grid.push_back(knee + (r_max - knee) * static_cast<double>(i) / static_cast<double>(n_uni));
  }
  grid.back() = r_max;
  return grid;
}

/// Bisection for a sign change of g on [lo, hi]; stops at |hi - lo| <= tol.
template <class G>
double bisect(G&& g, double lo, double hi, double tol) {
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) throw NumericError("bisect: interval does not bracket a root");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace minsurf

#endif  // MINSURF_NUMERIC_HPP
