// Acceptance run: one line per criterion, nonzero exit when an outcome
// differs from its expectation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "minsurf/minsurf.hpp"

using namespace minsurf;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget;        // seconds; 0 = unbudgeted
  bool expected_pass;   // false: known to be unattainable, see README
  std::function<Outcome()> body;
};

class Detail {
 public:
  Detail& check(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!ok) failed_.push_back(what);
    return *this;
  }
  Detail& note(const std::string& key, double v) {
    out_ << (out_.tellp() > 0 ? " " : "") << key << "=" << format_number(v);
    return *this;
  }
  Outcome done() const {
    std::string d = out_.str();
    for (const auto& f : failed_) d += " [miss: " + f + "]";
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::ostringstream out_;
  std::vector<std::string> failed_;
};

WarpedSurface sinh_surface(double r_max) {
  return WarpedSurface::from_expression("sinh", "sinh(r)", r_max, GrowthClass::exponential(1.0));
}

Outcome flat_sharpness() {
  Detail d;
  const auto sc = plane_scenario();
  AreaBoundOptions opt;
  opt.flat_R = std::exp(20.0);
  const auto p = profile(sc.surface, std::sqrt(opt.flat_R), 1024);
  const auto rep = area_bound_report(sc, p, AreaCase::Flat, opt);
  d.note("max|A/pi r^2 - 1|", rep.max_area_ratio_gap);
  d.check(rep.max_area_ratio_gap <= 1e-9, "area ratio");
  double worst = INFINITY;
  const double factor = 1.0 + 10.0 / std::log(opt.flat_R);
  for (std::size_t i = 0; i < p.size(); ++i) worst = std::min(worst, 2 * pi * p.grid[i] * factor - p.length[i]);
  d.note("min L-margin", worst);
  d.check(worst >= 0.0, "length bound");
  d.check(rep.status == Status::Pass, "report status");
  return d.done();
}

Outcome fiala_identity() {
  Detail d;
  const WarpedSurface warps[] = {
      plane_scenario().surface,
      sinh_surface(5.0),
      WarpedSurface::from_expression("r+r^3", "r + r^3", 5.0),
      WarpedSurface::from_expression("sinh(2r)/2", "sinh(2*r)/2", 5.0),
  };
  for (const auto& s : warps) {
    const double top = std::min(s.r_max, 30.0);
    const auto res = fiala_residual(profile(s, top, 1024));
    d.note(s.name, res.max_abs);
    d.check(res.max_abs < 1e-6, s.name);
  }
  return d.done();
}

Outcome hyperbolic_spectrum() {
  Detail d;
  const auto s = sinh_surface(40.0);
  const auto est = lambda0_estimate(s, {15.0, 20.0, 25.0, 30.0}, 4096);
  const auto vg = volume_growth_upper(profile(s, 30.0, 1024));
  d.note("lambda0", est.value).note("pm", est.uncertainty).note("growth_bound", vg.bound);
  d.check(std::abs(est.value - 0.25) <= 1e-3, "lambda0");
  d.check(std::abs(vg.bound - 0.25) <= 1e-2, "volume growth");
  return d.done();
}

Outcome exact_constants() {
  Detail d;
  const auto sec = bcc_upper_bound(BccCase::SectionalFloor);
  const auto h2 = hypersurface_upper_bound(2, Rational(1));
  const auto h5 = hypersurface_upper_bound(5, Rational(1));
  bool n6_rejected = false;
  try {
    hypersurface_upper_bound(6, Rational(1));
  } catch (const DomainError&) {
    n6_rejected = true;
  }
  d.check(sec == Rational(4, 7), "bcc sectional = 4/7");
  d.check(h2 == Rational(4, 7), "n=2 -> 4/7");
  d.check(h5 == Rational(40), "n=5 -> 40");
  d.check(n6_rejected, "n=6 domain error");
  return {d.done().pass, "bcc=" + to_string(sec) + " n2=" + to_string(h2) + " n5=" + to_string(h5) +
                             (n6_rejected ? " n6=domain-error" : " n6=accepted")};
}

Outcome hyperbolic_ordering() {
  Detail d;
  const auto rep = spectrum_report(h2_in_h3_scenario());
  double lower = NAN, sec = NAN, sca = NAN;
  for (const auto& b : rep.lower_bounds)
    if (b.id == "cheung_leung(m=2)" && b.applicable) lower = b.value;
  for (const auto& b : rep.upper_bounds) {
    if (b.id == "bcc_sectional" && b.applicable) sec = b.value;
    if (b.id == "bcc_scalar" && b.applicable) sca = b.value;
  }
  const double lam = rep.lambda0.value;
  const double unc = rep.lambda0.uncertainty;
  d.note("lower", lower).note("lambda0", lam).note("pm", unc).note("sectional", sec).note("scalar", sca);
  d.check(lower <= lam + unc, "1/4 <= lambda0");
  d.check(lam - unc <= sec, "lambda0 <= 4/7");
  d.check(sec <= sca, "4/7 <= 1");
  d.check(rep.pass, "report pass");
  return d.done();
}

Outcome stability_dichotomy() {
  Detail d;
  const auto plane = plane_scenario();
  const auto h2 = h2_in_h3_scenario();
  const auto rp = stability_radius(plane);
  const auto rh = stability_radius(h2);
  const auto rc = stability_radius(catenoid_scenario(1.0));
  d.note("plane", rp.radius).note("h2-in-h3", rh.radius).note("catenoid", rc.radius);
  d.check(rp.radius == plane.surface.r_max && !rp.finite, "plane stable");
  d.check(rh.radius == h2.surface.r_max && !rh.finite, "h2-in-h3 stable");
  d.check(rc.finite && rc.jacobi_zero.has_value(), "catenoid finite");
  if (rc.jacobi_zero) {
    const double gap = std::abs(rc.radius - *rc.jacobi_zero) / *rc.jacobi_zero;
    d.note("jacobi_zero", *rc.jacobi_zero).note("rel_gap", gap);
    d.check(gap <= 1e-4, "criteria agree");
  }
  return d.done();
}

Outcome lemma_instances() {
  Detail d;
  const auto plane = plane_scenario();
  double closed_err = 0.0;
  for (double R : {1.0, 2.0, 5.0, 10.0}) {
    const auto s = lemma_m_sides(plane, linear_cutoff(R), R, FloorCase::Scalar);
    const auto k = lemma_m_sides(plane, linear_cutoff(R), R, FloorCase::Sectional);
    closed_err = std::max({closed_err, std::abs(s.lhs - 2 * pi), std::abs(s.rhs - 3 * pi), std::abs(k.lhs - 4 * pi),
                           std::abs(k.rhs - 5 * pi)});
  }
  d.note("closed_form_err", closed_err);
  d.check(closed_err <= 1e-8, "closed forms");

  int instances = 0;
  double worst = INFINITY;
  auto take = [&](const InequalitySides& s) {
    if (s.status == Status::Inapplicable) return;
    ++instances;
    worst = std::min(worst, s.rhs + 1e-8 - s.lhs);
  };
  for (const auto& sc : builtin_catalog()) {
    if (!sc.stable_claim) continue;
    for (double R : {1.0, 2.0, 5.0, 10.0}) {
      for (auto c : {FloorCase::Scalar, FloorCase::Sectional}) {
        take(lemma_m_sides(sc, linear_cutoff(R), R, c));
        take(lemma_m_sides(sc, polynomial_cutoff(R, 3.0), R, c));
        take(corollary_c1_sides(sc, polynomial_cutoff(R, 2.0), R, c));
        take(corollary_c1_sides(sc, polynomial_cutoff(R, 3.0), R, c));
      }
      take(log_cutoff_area_sides(sc, R));
      const auto e = exp_cutoff_sides(sc, R, std::min(1.0, R / 2.0));
      take(e.annulus);
      take(e.area_bound);
    }
  }
  d.note("instances", instances).note("min(rhs+1e-8-lhs)", worst);
  d.check(instances > 0 && worst >= 0.0, "quadrature instances");
  return d.done();
}

Outcome green_identities() {
  Detail d;
  const auto s = sinh_surface(40.0);
  const auto gp = green_radial(s);
  d.check(gp.nonparabolic, "nonparabolic");
  if (!gp.nonparabolic) return d.done();
  d.note("flux", gp.flux_residual);
  d.check(gp.flux_residual < 1e-10, "flux");
  double kato = 0.0;
  for (std::size_t i = 1; i + 1 < gp.grid.size(); ++i) {
    const auto k = kato_bochner_residual(gp, gp.grid[i]);
    kato = std::max(kato, std::abs(k.residual) / std::max(1.0, std::abs(k.lhs)));
  }
  d.note("kato", kato);
  d.check(kato < 1e-8, "kato saturation");
  double incr = 0.0;
  for (double R : {20.0, 40.0, 80.0}) incr = std::max(incr, lemma_g_partial_integral(gp, 0.75, R).increment);
  d.note("max_increment(R>=20)", incr);
  d.check(incr < 1e-6, "Cauchy increments");
  const auto dr = decay_rate(gp, 0.25);
  d.note("g_sq_rate", dr.g_sq_rate);
  d.check(std::abs(dr.g_sq_rate - 1.0) <= 0.05, "decay rate");
  return d.done();
}

Outcome exponential_area() {
  Detail d;
  const auto sc = h2_in_h3_scenario();
  const auto p = profile(sc.surface, 30.0, 1024);
  const auto g = growth_rate(p);
  const auto rep = area_bound_report(sc, p, AreaCase::SectionalFloor);
  const double drift = std::abs(rep.refined_constant - rep.fitted_constant) / rep.fitted_constant;
  d.note("rate", g.rate).note("C1", rep.fitted_constant).note("C1_refined", rep.refined_constant).note("drift", drift);
  d.check(std::abs(g.rate - 1.0) <= 0.02, "rate = 1");
  d.check(g.rate <= 4.0 / std::sqrt(7.0) - 0.4, "rate below 4/sqrt7 - 0.4");
  d.check(drift <= 0.05, "C1 stable");
  return d.done();
}

Outcome mesh_cross_validation() {
  Detail d;
  const auto sc = catenoid_scenario(1.0);
  const auto cm = generate_catenoid_mesh(1.0, 3.5, 212);
  const auto dist = geodesic_distance(cm.mesh, cm.neck);
  const auto dp = discrete_profile(cm.mesh, dist, linspace(0.5, 3.0, 26));
  const auto cv = cross_validate(dp, profile(sc.surface, 3.5, 1024), 2.0, 0.5, 3.0);
  d.note("faces", static_cast<double>(cm.mesh.num_faces())).note("L_err", cv.max_L_rel).note("A_err", cv.max_A_rel);
  d.check(cm.mesh.num_faces() >= 100000, "100k faces");
  d.check(cv.max_L_rel < 0.02 && cv.max_A_rel < 0.02, "catenoid within 2%");

  const auto cat_f = fiala_discrete_check(discrete_profile(cm.mesh, dist, linspace(0.25, 3.25, 31)), 1);
  const auto flat = flat_grid_mesh(128);
  const auto flat_f = fiala_discrete_check(
      discrete_profile(flat, geodesic_distance(flat, nearest_vertex(flat, {0, 0, 0})), linspace(0.05, 0.95, 19)), 1);
  const auto sphere = icosphere_mesh(5);
  const auto sph_f = fiala_discrete_check(
      discrete_profile(sphere, geodesic_distance(sphere, nearest_vertex(sphere, {0, 0, 1})), linspace(0.1, 3.0, 30)), 1);
  d.check(flat_f.status == Status::Pass, "fiala flat");
  d.check(cat_f.status == Status::Pass, "fiala catenoid");
  d.check(sph_f.status == Status::Pass, "fiala sphere");

  std::vector<TriangleMesh> levels;
  for (int s = 3; s <= 6; ++s) levels.push_back(icosphere_mesh(s));
  const auto conv = self_convergence(levels, 0);
  for (std::size_t i = 0; i < conv.ratios.size(); ++i) {
    d.note("ratio" + std::to_string(i), conv.ratios[i]);
    d.check(conv.ratios[i] >= 1.5 && conv.ratios[i] <= 2.5, "self-convergence ratio");
  }
  return d.done();
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "flat-case sharpness", 1.0, true, flat_sharpness},
      {2, "Gauss-Bonnet/Fiala identity", 1.0, true, fiala_identity},
      {3, "hyperbolic plane spectrum", 10.0, true, hyperbolic_spectrum},
      {4, "exact bound constants", 0.0, true, exact_constants},
      {5, "spectrum ordering on h2-in-h3", 0.0, true, hyperbolic_ordering},
      {6, "stability dichotomy", 0.0, true, stability_dichotomy},
      {7, "cutoff inequality instances", 0.0, true, lemma_instances},
      {8, "Green's function identities", 0.0, false, green_identities},
      {9, "exponential area bound", 5.0, true, exponential_area},
      {10, "mesh cross-validation", 60.0, true, mesh_cross_validation},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0 && secs >= c.budget) {
      o.pass = false;
      o.detail += " [miss: runtime budget " + format_number(c.budget) + " s]";
    }
    const bool as_expected = o.pass == c.expected_pass;
    if (!as_expected) ++unexpected;
    std::printf("%s #%d %s (%.2f s)%s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                c.expected_pass ? "" : (o.pass ? " [unexpected pass]" : " [known failure]"), o.detail.c_str());
  }
  std::printf("%d criteria, %d outcome(s) differ from expectation\n", static_cast<int>(criteria.size()), unexpected);
  return unexpected == 0 ? 0 : 1;
}
