#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "minsurf/ball_geometry.hpp"

using namespace minsurf;

namespace {

constexpr double pi = std::numbers::pi;

WarpedSurface sinh_surface(double r_max = 40.0) {
  return WarpedSurface::from_expression("sinh", "sinh(r)", r_max, GrowthClass::exponential(1.0));
}

}  // namespace

TEST(Profile, PlaneClosedForm) {
  const auto p = profile(plane_scenario().surface, 10.0, 1024);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p.grid[i];
    EXPECT_NEAR(p.length[i], 2 * pi * r, 1e-12 * r);
    EXPECT_NEAR(p.area[i], pi * r * r, 1e-12 * r * r);
  }
  const auto q = profile(plane_scenario().surface, 2.0, 64);
  EXPECT_NEAR(q.length.back(), 4 * pi, 1e-12);
  EXPECT_NEAR(q.area.back(), 4 * pi, 1e-12);
}

TEST(Profile, SinhClosedForm) {
  const auto p = profile(sinh_surface(), 5.0, 1024);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p.grid[i];
    EXPECT_NEAR(p.length[i], 2 * pi * std::sinh(r), 1e-10 * std::cosh(r));
    EXPECT_NEAR(p.area[i], 2 * pi * (std::cosh(r) - 1.0), 1e-9 * std::cosh(r));
    EXPECT_NEAR(p.total_curv[i], 2 * pi * (1.0 - std::cosh(r)), 1e-8 * std::cosh(r));
  }
}

TEST(Profile, RejectsBadArguments) {
  EXPECT_THROW(profile(sinh_surface(), 50.0, 1024), DomainError);
  EXPECT_THROW(profile(sinh_surface(), 5.0, 4), DomainError);
}

TEST(Fiala, IdentityOnPoleCenteredWarps) {
  const WarpedSurface warps[] = {
      plane_scenario().surface,
      sinh_surface(5.0),
      WarpedSurface::from_expression("cubic", "r + r^3", 5.0),
      WarpedSurface::from_expression("sinh2", "sinh(2*r)/2", 5.0),
  };
  for (const auto& s : warps) {
    const auto p = profile(s, s.r_max, 1024);
    const auto res = fiala_residual(p);
    EXPECT_LT(res.max_abs, 1e-6) << s.name;
    EXPECT_TRUE(res.inequality_holds) << s.name;
  }
}

TEST(Fiala, NeckCenteredUsesEulerZero) {
  const auto p = profile(catenoid_scenario(1.0).surface, 5.0, 512);
  EXPECT_EQ(p.euler, 0);
  EXPECT_TRUE(fiala_residual(p).inequality_holds);
}

TEST(Profile, CoareaAreaDerivativeIsLength) {
  const auto p = profile(sinh_surface(), 8.0, 1024);
  std::size_t checked = 0;
  for (std::size_t i = 2; i + 2 < p.size(); ++i) {
    const double h = p.grid[i + 1] - p.grid[i];
    if (std::abs(p.grid[i] - p.grid[i - 2] - 2 * h) > 1e-9 * h) continue;  // uniform part only
    const double d = (p.area[i - 2] - 8 * p.area[i - 1] + 8 * p.area[i + 1] - p.area[i + 2]) / (12 * h);
    EXPECT_NEAR(d, p.length[i], 1e-6 * p.length[i]) << "r=" << p.grid[i];
    ++checked;
  }
  EXPECT_GT(checked, 800u);
}

TEST(Profile, TotalCurvatureClosedFormGap) {
  for (const auto& s : {sinh_surface(10.0), WarpedSurface::from_expression("cubic", "r + r^3", 5.0)}) {
    EXPECT_LT(profile(s, s.r_max, 1024).closed_form_gap, 1e-8) << s.name;
  }
}

TEST(Hessian, PlaneAndSinhPass) {
  EXPECT_EQ(hessian_comparison_check(profile(plane_scenario().surface, 10.0, 256)).status, Status::Pass);
  EXPECT_EQ(hessian_comparison_check(profile(sinh_surface(), 10.0, 256)).status, Status::Pass);
}

TEST(Hessian, PositiveCurvatureIsInapplicable) {
  const auto s = WarpedSurface::from_expression("sphere-cap", "sin(r)", 1.5);
  const auto res = hessian_comparison_check(profile(s, 1.5, 256));
  EXPECT_EQ(res.status, Status::Inapplicable);
}

TEST(AreaBound, FlatCaseIsSharpOnPlane) {
  const auto sc = plane_scenario();
  const auto p = profile(sc.surface, 30.0, 1024);
  const auto rep = area_bound_report(sc, p, AreaCase::Flat);
  EXPECT_EQ(rep.status, Status::Pass);
  EXPECT_LT(rep.max_area_ratio_gap, 1e-9);
}

TEST(AreaBound, ExponentialCasesOnHyperbolicPlane) {
  const auto sc = h2_in_h3_scenario();
  const auto p = profile(sc.surface, 30.0, 1024);
  const auto sec = area_bound_report(sc, p, AreaCase::SectionalFloor);
  EXPECT_EQ(sec.status, Status::Pass);
  EXPECT_NEAR(sec.exponent, 4.0 / std::sqrt(7.0), 1e-15);
  EXPECT_LT(std::abs(sec.refined_constant - sec.fitted_constant) / sec.fitted_constant, 0.05);
  for (std::size_t i = 0; i < sec.radii.size(); ++i) EXPECT_LE(sec.measured[i], sec.bound[i] * (1 + 1e-12));
  EXPECT_EQ(area_bound_report(sc, p, AreaCase::ScalarFloor).status, Status::Pass);
  EXPECT_EQ(area_bound_report(sc, p, AreaCase::Flat).status, Status::Inapplicable);
}

TEST(AreaBound, UnstableScenarioIsInapplicable) {
  const auto sc = catenoid_scenario(1.0);
  const auto rep = area_bound_report(sc, profile(sc.surface, 5.0, 256), AreaCase::SectionalFloor);
  EXPECT_EQ(rep.status, Status::Inapplicable);
}

TEST(GrowthRate, SinhIsOne) {
  const auto g = growth_rate(profile(sinh_surface(), 30.0, 1024));
  EXPECT_NEAR(g.rate, 1.0, 0.01);
}

TEST(GrowthRate, DoubleExponential) {
  // A = pi (cosh 2R - 1) / 2 ~ e^{2R}
  const auto s = WarpedSurface::from_expression("sinh2", "sinh(2*r)/2", 20.0, GrowthClass::exponential(2.0));
  EXPECT_NEAR(growth_rate(profile(s, 20.0, 1024)).rate, 2.0, 0.02);
}

TEST(GrowthRate, PlaneTendsToZero) {
  const auto g = growth_rate(profile(plane_scenario().surface, 1000.0, 1024));
  EXPECT_LT(g.rate, 0.01);
}

TEST(GrowthRate, StableSectionalScenariosStayBelowExponent) {
  for (const auto& sc : builtin_catalog()) {
    if (!sc.stable_claim || sc.ambient.sectional_floor() != -1.0) continue;
    const auto g = growth_rate(profile(sc.surface, std::min(sc.surface.r_max, 30.0), 1024));
    EXPECT_LE(g.rate, 4.0 / std::sqrt(7.0) + 0.02) << sc.id();
  }
}
