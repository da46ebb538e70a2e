#ifndef MINSURF_GREENS_FUNCTION_HPP
#define MINSURF_GREENS_FUNCTION_HPP

// Minimal positive Green's function of a nonparabolic warped surface with
// pole at the center:
//
//   G(r) = (1/2pi) int_r^inf dt / f(t),   |grad G| = 1 / (2 pi f).

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include "minsurf/ball_geometry.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/numeric.hpp"
#include "minsurf/surface_models.hpp"

namespace minsurf {

enum class Parabolicity { Nonparabolic, Parabolic, Indeterminate };

inline const char* to_string(Parabolicity p) {
  switch (p) {
    case Parabolicity::Nonparabolic: return "nonparabolic";
    case Parabolicity::Parabolic: return "parabolic";
    case Parabolicity::Indeterminate: return "indeterminate";
  }
  return "?";
}

namespace detail {

/// int_X^inf dt / f(t) from the declared growth class; empty when the class
/// says the integral diverges or cannot decide.
inline std::optional<double> inverse_warp_tail(const WarpedSurface& s, double X, std::string* method = nullptr) {
  const auto& g = s.growth;
  if (g.kind == GrowthClass::Kind::Exponential && g.rate > 0.0) {
    if (method) *method = "exponential tail 1/(k f)";
    return 1.0 / (g.rate * s.warp(X));
  }
  if (g.kind == GrowthClass::Kind::Polynomial) {
    if (g.rate <= 1.0) return std::nullopt;
    if (method) *method = "polynomial tail X/((p-1) f)";
    return X / ((g.rate - 1.0) * s.warp(X));
  }
  // undeclared growth: in u = ln t the integrand is e^u / f(e^u); integrate up
  // to the largest u (at most 600) where f is finite and close with a power-law tail C u^-p when the local exponent
  // clearly exceeds 1
  try {
    auto g = [&](double u) {
      const double t = std::exp(u);
      const double f = s.warp(t);
      return std::isinf(f) ? 0.0 : t / f;
    };
    const double u0 = std::log(X);
    double U = 600.0;
    while (U > 10.0 && !std::isfinite(s.warp(std::exp(U)))) U *= 0.8;
    if (!(u0 < 0.5 * U)) return std::nullopt;
    const double head = integrate(g, u0, U, 1e-300, 1e-10).value;
    const double gU = g(U);
    double tail = 0.0;
    if (gU > 0.0) {
      const double p = -std::log(gU / g(0.9 * U)) / std::log(1.0 / 0.9);
      if (!(p > 1.05)) return std::nullopt;
      tail = U * gU / (p - 1.0);
    }
    if (!std::isfinite(head + tail)) return std::nullopt;
    if (method) *method = "log-variable quadrature with power-law tail";
    return head + tail;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

struct NonparabolicityResult {
  Parabolicity verdict = Parabolicity::Indeterminate;
  double head = 0.0;  // int_{r0}^{r_max} dt / f
  double tail = 0.0;  // int_{r_max}^inf dt / f
  std::string method;
};

/// Decides nonparabolicity from int^inf dt/f < inf.
inline NonparabolicityResult nonparabolicity_test(const WarpedSurface& s) {
  NonparabolicityResult out;
  const double r0 = std::min(1.0, 0.5 * s.r_max);
  out.head = integrate([&](double t) { return 1.0 / s.warp(t); }, r0, s.r_max, 1e-12, 1e-12).value;
  const auto& g = s.growth;
  if (g.kind == GrowthClass::Kind::Polynomial && g.rate <= 1.0) {
    out.verdict = Parabolicity::Parabolic;
    out.method = "polynomial growth of degree <= 1";
    return out;
  }
  const auto tail = detail::inverse_warp_tail(s, s.r_max, &out.method);
  if (!tail) {
    out.method = "tail undecided";
    return out;
  }
  out.tail = *tail;
  out.verdict = Parabolicity::Nonparabolic;
  return out;
}

/// Evaluable G(r) backed by a cumulative quadrature table.
class GreenFunction {
 public:
  GreenFunction(WarpedSurface s, double tail, std::size_t table_n = 4096) : s_(std::move(s)), tail_(tail) {
    nodes_ = default_grid(s_.r_max, table_n);
    H_.assign(nodes_.size(), 0.0);
    for (std::size_t i = nodes_.size() - 1; i-- > 0;) {
      H_[i] = H_[i + 1] + piece(nodes_[i], nodes_[i + 1]);
    }
  }

  const WarpedSurface& surface() const { return s_; }

  /// G(r); beyond r_max the declared growth tail continues it.
  double operator()(double r) const {
    if (!(r > 0.0)) throw PoleError("Green's function is singular at the pole");
    if (r >= s_.r_max) {
      if (r == s_.r_max) return tail_ / kTwoPi;
      const auto t = detail::inverse_warp_tail(s_, r);
      if (!t) throw NumericError("Green's function: no tail beyond r_max");
      return *t / kTwoPi;
    }
    if (r < nodes_.front()) return (H_.front() + piece(r, nodes_.front()) + tail_) / kTwoPi;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    const auto j = static_cast<std::size_t>(it - nodes_.begin());
    return (H_[j] + piece(r, nodes_[j]) + tail_) / kTwoPi;
  }

  /// |grad G| = 1/(2 pi f).
  double grad(double r) const { return 1.0 / (kTwoPi * s_.warp(r)); }

  /// G(r + k h) - G(r) without cancellation.
  double increment(double r, double dr) const {
    return dr >= 0.0 ? -piece(r, r + dr) / kTwoPi : piece(r + dr, r) / kTwoPi;
  }

  /// r with G(r) = t.
  double inverse(double t) const {
    if (!(t > 0.0)) throw DomainError("Green's function level must be positive");
    double lo = nodes_.front();
    if ((*this)(lo) < t) {
      while ((*this)(lo) < t) {
        lo *= 0.5;
        if (lo < 1e-300) throw DomainError("Green's function level above its range");
      }
    }
    double hi = s_.r_max;
    while ((*this)(hi) > t) {
      hi *= 2.0;
      if (hi > 1e6 * s_.r_max) throw DomainError("Green's function level below its range");
    }
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve([&](double r) { return (*this)(r) - t; }, lo, hi,
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (a + b);
  }

 private:
  double piece(double a, double b) const {
    if (a == b) return 0.0;
    return integrate([&](double t) { return 1.0 / s_.warp(t); }, a, b, 1e-300, 1e-13).value;
  }

  WarpedSurface s_;
  double tail_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> H_;  // int_{node}^{r_max} dt / f
};

struct GreenProfile {
  bool nonparabolic = false;
  std::string note;
  std::vector<double> grid;
  std::vector<double> G;
  std::vector<double> grad_norm;
  std::vector<double> v;  // ln G
  double g_boundary_1 = 0.0;
  double flux_residual = 0.0;         // max |L G' + 1| with G' from a stencil of G
  double harmonicity_residual = 0.0;  // max relative |G'' + (f'/f) G'|
  std::shared_ptr<const GreenFunction> fn;
};

/// G on the profile grid plus harmonicity and flux checks.
inline GreenProfile green_radial(const WarpedSurface& s, std::size_t n_grid = 512) {
  GreenProfile gp;
  const auto np = nonparabolicity_test(s);
  if (np.verdict != Parabolicity::Nonparabolic) {
    gp.note = std::string("surface is ") + to_string(np.verdict);
    return gp;
  }
  if (s.neck_centered) {
    gp.note = "Green's function with pole needs a pole-centered surface";
    return gp;
  }
  gp.nonparabolic = true;
  gp.fn = std::make_shared<const GreenFunction>(s, np.tail);
  const auto& G = *gp.fn;
  gp.grid = default_grid(s.r_max, n_grid);
  for (double r : gp.grid) {
    const double g = G(r);
    gp.G.push_back(g);
    gp.grad_norm.push_back(G.grad(r));
    gp.v.push_back(std::log(g));
  }
  for (std::size_t i = 1; i < gp.G.size(); ++i) {
    if (!(gp.G[i] < gp.G[i - 1])) throw NumericError("Green's function not strictly decreasing");
  }
  gp.g_boundary_1 = s.r_max >= 1.0 ? G(1.0) : std::nan("");

  for (double r : gp.grid) {
    const double h = 2e-3 * std::min(1.0, r);
    if (r + 2.0 * h > s.r_max) continue;
    const double dp2 = G.increment(r, 2.0 * h);
    const double dp1 = G.increment(r, h);
    const double dm1 = G.increment(r, -h);
    const double dm2 = G.increment(r, -2.0 * h);
    const double d1 = (-dp2 + 8.0 * dp1 - 8.0 * dm1 + dm2) / (12.0 * h);
    const double d2 = (-dp2 + 16.0 * dp1 + 16.0 * dm1 - dm2) / (12.0 * h * h);
    const double f = s.warp(r);
    const double k = s.warp_d1(r) / f;
    gp.flux_residual = std::max(gp.flux_residual, std::abs(kTwoPi * f * d1 + 1.0));
    const double scale = std::abs(d2) + std::abs(k * d1);
    if (scale > 0.0) gp.harmonicity_residual = std::max(gp.harmonicity_residual, std::abs(d2 + k * d1) / scale);
  }
  if (gp.harmonicity_residual > 1e-8) {
    throw NumericError("Green's function harmonicity residual " + format_number(gp.harmonicity_residual));
  }
  return gp;
}

struct CoareaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_gap = 0.0;
  bool pass = false;
};

/// int_{a < G < b} |grad G|^2 w(G) dA against int_a^b w.
inline CoareaCheck coarea_identity_check(const GreenProfile& gp, double a, double b, const RealFunction& weight) {
  if (!gp.nonparabolic) throw DomainError("coarea_identity_check: no Green's function");
  if (!(a > 0.0) || !(a <= b)) throw DomainError("coarea_identity_check: need 0 < a <= b");
  CoareaCheck out;
  if (a == b) {
    out.pass = true;
    return out;
  }
  const auto& G = *gp.fn;
  const double r_hi = G.inverse(a);
  const double r_lo = G.inverse(b);
  const auto& s = G.surface();
  out.lhs = integrate([&](double r) { const double g = G.grad(r); return g * g * weight(G(r)) * kTwoPi * s.warp(r); },
                      r_lo, r_hi, 1e-300, 1e-12).value;
  out.rhs = integrate(weight, a, b, 1e-300, 1e-12).value;
  out.relative_gap = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.rhs), 1e-300);
  out.pass = out.relative_gap <= 1e-6;
  return out;
}

struct BochnerResidual {
  double residual = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  Status status = Status::Inapplicable;
};

/// Delta|grad G| - [ |grad|grad G||^2 / |grad G| + K |grad G| ] at n = 2.
inline BochnerResidual kato_bochner_residual(const GreenProfile& gp, double r) {
  BochnerResidual out;
  if (!gp.nonparabolic) return out;
  const auto& s = gp.fn->surface();
  const auto w = eval_warp(s, r);
  const double k = w.d1 / w.f;
  const double u = 1.0 / (kTwoPi * w.f);
  const double du = -k * u;
  const double dk = w.d2 / w.f - k * k;
  const double ddu = -dk * u - k * du;
  const double K = -w.d2 / w.f;
  out.lhs = ddu + k * du;
  out.rhs = du * du / u + K * u;
  out.residual = out.lhs - out.rhs;
  out.status = out.residual >= -1e-8 ? Status::Pass : Status::Fail;
  return out;
}

/// (1/2) Delta|grad v|^2 - [ 2|grad|grad v||^2 + |grad v|^4 + K |grad v|^2 ],
/// v = ln G, n = 2.
inline BochnerResidual log_bochner_residual(const GreenProfile& gp, double r) {
  BochnerResidual out;
  if (!gp.nonparabolic) return out;
  const auto& G = *gp.fn;
  const auto& s = G.surface();
  const auto w = eval_warp(s, r);
  const double k = w.d1 / w.f;
  const double dk = w.d2 / w.f - k * k;
  const double K = -w.d2 / w.f;
  const double a = G.grad(r) / G(r);  // |grad v|
  const double da = -k * a + a * a;
  const double dda = -dk * a - k * da + 2.0 * a * da;
  // (1/2)(a^2)'' + (k/2)(a^2)'
  out.lhs = a * dda + da * da + k * a * da;
  out.rhs = 2.0 * da * da + a * a * a * a + K * a * a;
  out.residual = out.lhs - out.rhs;
  const double scale = std::max({1.0, std::abs(out.lhs), std::abs(out.rhs)});
  out.status = out.residual >= -1e-8 * scale ? Status::Pass : Status::Fail;
  return out;
}

enum class LemmaGVariant { OnePlusInverse, Normalized, Cubed };

inline const char* to_string(LemmaGVariant v) {
  switch (v) {
    case LemmaGVariant::OnePlusInverse: return "ln(1+1/G)";
    case LemmaGVariant::Normalized: return "ln(A/G)";
    case LemmaGVariant::Cubed: return "|grad G|^3/G^2";
  }
  return "?";
}

struct LemmaGResult {
  LemmaGVariant variant = LemmaGVariant::OnePlusInverse;
  double q = 0.0;
  double R = 0.0;
  double I_R = 0.0;
  double I_2R = 0.0;
  double increment = 0.0;  // I(2R) - I(R)
  double A = 0.0;          // e^4 G(1) for the normalized variant
};

/// I(R) = int_{B(R)\B(1)} |grad G|^4 / (G^3 ln^{2q}(1 + 1/G)) dA, or the
/// ln(A/G) weight with A = e^4 G(1), or the |grad G|^3 / G^2 integrand;
/// reports I(R), I(2R) and the Cauchy increment.
inline LemmaGResult lemma_g_partial_integral(const GreenProfile& gp, double q, double R,
                                             LemmaGVariant variant = LemmaGVariant::OnePlusInverse) {
  if (!(q > 0.5)) throw DomainError("lemma_g_partial_integral: q must exceed 1/2");
  if (!(R >= 2.0)) throw DomainError("lemma_g_partial_integral: R must be >= 2");
  if (!gp.nonparabolic) throw DomainError("lemma_g_partial_integral: no Green's function");
  const auto& G = *gp.fn;
  const auto& s = G.surface();
  LemmaGResult out;
  out.variant = variant;
  out.q = q;
  out.R = R;
  out.A = std::exp(4.0) * gp.g_boundary_1;
  auto integrand = [&](double r) {
    const double g = G.grad(r);
    const double Gr = G(r);
    const double dA = kTwoPi * s.warp(r);
    switch (variant) {
      case LemmaGVariant::OnePlusInverse:
        return g * g * g * g / (Gr * Gr * Gr * std::pow(std::log1p(1.0 / Gr), 2.0 * q)) * dA;
      case LemmaGVariant::Normalized:
        return g * g * g * g / (Gr * Gr * Gr * std::pow(std::log(out.A / Gr), 2.0 * q)) * dA;
      case LemmaGVariant::Cubed:
        return g * g * g / (Gr * Gr) * dA;
    }
    return 0.0;
  };
  out.I_R = integrate(integrand, 1.0, R, 1e-300, 1e-11).value;
  out.increment = integrate(integrand, R, 2.0 * R, 1e-300, 1e-11).value;
  out.I_2R = out.I_R + out.increment;
  return out;
}

struct DecayRates {
  double g_sq_rate = 0.0;     // fitted rate of int_{Sigma\B(R)} G^2 dA
  double grad_sq_rate = 0.0;  // fitted rate of int_{Sigma\B(R)} |grad G|^2 dA
  double grad_sq_outside_1 = 0.0;
  double required = 0.0;      // 2 sqrt(lambda0) - 0.05
  double R_from = 0.0;
  double R_to = 0.0;
  Status status = Status::Inapplicable;
  std::string note;
};

/// Exponential decay rates of the G^2 and |grad G|^2 tails, fitted over
/// R in [R_from, R_to]; beyond r_max each tail integrand is extrapolated by
/// its local exponential rate at r_max.
inline DecayRates decay_rate(const GreenProfile& gp, double lambda0, double R_from = 10.0, double R_to = 30.0) {
  DecayRates out;
  if (!gp.nonparabolic) {
    out.note = gp.note;
    return out;
  }
  const auto& G = *gp.fn;
  const auto& s = G.surface();
  const double X = s.r_max;
  R_to = std::min(R_to, 0.75 * X);
  R_from = std::min(R_from, 0.5 * R_to);
  out.R_from = R_from;
  out.R_to = R_to;
  out.required = 2.0 * std::sqrt(std::max(lambda0, 0.0)) - 0.05;

  auto tail_of = [&](const RealFunction& h, double R) {
    const double head = integrate(h, R, X, 1e-300, 1e-11).value;
    const double d = 1e-3;
    const double rate = (std::log(h(X - d)) - std::log(h(X))) / d;
    if (!(rate > 0.0)) throw NumericError("decay_rate: tail integrand not decaying at r_max");
    return head + h(X) / rate;
  };
  RealFunction g_sq = [&](double r) { const double v = G(r); return v * v * kTwoPi * s.warp(r); };
  RealFunction grad_sq = [&](double r) { const double g = G.grad(r); return g * g * kTwoPi * s.warp(r); };

  std::vector<double> Rs = linspace(R_from, R_to, 21);
  std::vector<double> lg;
  std::vector<double> lgrad;
  for (double R : Rs) {
    lg.push_back(std::log(tail_of(g_sq, R)));
    lgrad.push_back(std::log(tail_of(grad_sq, R)));
  }
  out.g_sq_rate = -fit_line(Rs, lg).slope;
  out.grad_sq_rate = -fit_line(Rs, lgrad).slope;
  out.grad_sq_outside_1 = tail_of(grad_sq, 1.0);
  const bool ok = std::isfinite(out.grad_sq_outside_1) && out.g_sq_rate >= out.required &&
                  out.grad_sq_rate >= out.required;
  out.status = ok ? Status::Pass : Status::Fail;
  if (!ok) out.note = "tail decays slower than 2 sqrt(lambda0) - 0.05";
  return out;
}

/// chi(G): 1 above eps, (ln G - ln eps^2) / (-ln eps) between eps^2 and eps, 0 below.
struct CutoffPair {
  double epsilon = 0.0;
  double R = 0.0;

  double chi(double G) const {
    if (G >= epsilon) return 1.0;
    if (G <= epsilon * epsilon) return 0.0;
    return (std::log(G) - 2.0 * std::log(epsilon)) / -std::log(epsilon);
  }
  /// d chi / dG
  double chi_d(double G) const {
    if (G >= epsilon || G <= epsilon * epsilon) return 0.0;
    return 1.0 / (G * -std::log(epsilon));
  }
  double psi(double r) const {
    if (r <= 1.0) return 0.0;
    if (r <= 2.0) return r - 1.0;
    if (r <= R) return 1.0;
    if (r <= R + 1.0) return R + 1.0 - r;
    return 0.0;
  }
  double psi_d(double r) const {
    if (r > 1.0 && r < 2.0) return 1.0;
    if (r > R && r < R + 1.0) return -1.0;
    return 0.0;
  }
};

struct PoincareGreenResult {
  double rayleigh_quotient = 0.0;
  double lambda0 = 0.0;
  double divergence_witness = 0.0;  // int_{B(R)\B(2)} |grad G| dA
  Status status = Status::Inapplicable;
  std::string note;
};

/// Rayleigh quotient of |grad G|^{1/2} chi psi against lambda0.
inline PoincareGreenResult poincare_green_check(const Scenario& sc, const GreenProfile& gp, double epsilon, double R,
                                                double lambda0) {
  PoincareGreenResult out;
  out.lambda0 = lambda0;
  if (!sc.stable_claim) {
    out.note = "scenario is not stable";
    return out;
  }
  if (!gp.nonparabolic) {
    out.note = gp.note;
    return out;
  }
  if (!(epsilon > 0.0) || !(epsilon * epsilon < gp.g_boundary_1)) {
    throw DomainError("poincare_green_check: need 0 < eps < sqrt(G(1))");
  }
  if (!(R >= 2.0) || R + 1.0 > sc.surface.r_max) throw DomainError("poincare_green_check: need 2 <= R <= r_max - 1");
  const auto& G = *gp.fn;
  const auto& s = sc.surface;
  const CutoffPair cp{epsilon, R};
  std::vector<double> breaks{1.0, 2.0, R, R + 1.0};
  for (double level : {epsilon, epsilon * epsilon}) {
    if (level < gp.g_boundary_1) {
      const double r = G.inverse(level);
      if (r > 1.0 && r < R + 1.0) breaks.push_back(r);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  auto phi = [&](double r) { return std::sqrt(G.grad(r)) * cp.chi(G(r)) * cp.psi(r); };
  auto dphi = [&](double r) {
    const double g = G.grad(r);
    const double Gr = G(r);
    const double k = s.warp_d1(r) / s.warp(r);
    const double sg = std::sqrt(g);
    const double chi = cp.chi(Gr);
    const double psi = cp.psi(r);
    return -0.5 * k * sg * chi * psi + sg * (cp.chi_d(Gr) * -g * psi + chi * cp.psi_d(r));
  };
  const double num = integrate_pieces([&](double r) { const double d = dphi(r); return d * d * kTwoPi * s.warp(r); },
                                      breaks, 1e-300, 1e-11).value;
  const double den = integrate_pieces([&](double r) { const double p = phi(r); return p * p * kTwoPi * s.warp(r); },
                                      breaks, 1e-300, 1e-11).value;
  out.rayleigh_quotient = num / den;
  out.divergence_witness =
      integrate([&](double r) { return G.grad(r) * kTwoPi * s.warp(r); }, 2.0, R, 1e-300, 1e-13).value;
  out.status = out.rayleigh_quotient >= lambda0 - 1e-3 ? Status::Pass : Status::Fail;
  return out;
}

/// r,G,gradG,v
inline std::string to_csv(const GreenProfile& gp) {
  std::ostringstream out;
  out << "r,G,gradG,v\n";
  for (std::size_t i = 0; i < gp.grid.size(); ++i) {
    out << format_number(gp.grid[i]) << ',' << format_number(gp.G[i]) << ',' << format_number(gp.grad_norm[i]) << ','
        << format_number(gp.v[i]) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const GreenProfile& gp) {
  nlohmann::ordered_json j;
  j["nonparabolic"] = gp.nonparabolic;
  if (!gp.note.empty()) j["note"] = gp.note;
  if (gp.nonparabolic) {
    j["g_boundary_1"] = gp.g_boundary_1;
    j["flux_residual"] = gp.flux_residual;
    j["harmonicity_residual"] = gp.harmonicity_residual;
  }
  return j;
}

}  // namespace minsurf

#endif  // MINSURF_GREENS_FUNCTION_HPP
