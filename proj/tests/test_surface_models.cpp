#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "minsurf/scenario_io.hpp"
#include "minsurf/surface_models.hpp"

using namespace minsurf;

namespace {

void expect_warp(const Scenario& sc, double r, double f, double d1, double d2) {
  const auto w = eval_warp(sc.surface, r);
  EXPECT_NEAR(w.f, f, 1e-14);
  EXPECT_NEAR(w.d1, d1, 1e-14);
  EXPECT_NEAR(w.d2, d2, 1e-14);
}

// second difference of f, independent of the symbolic derivative
double fd_curvature(const WarpedSurface& s, double r) {
  const double h = 1e-4;
  const double f0 = s.warp(r);
  return -(s.warp(r + h) - 2.0 * f0 + s.warp(r - h)) / (h * h) / f0;
}

}  // namespace

TEST(EvalWarp, CatalogValues) {
  expect_warp(plane_scenario(), 3.0, 3.0, 1.0, 0.0);
  expect_warp(h2_in_h3_scenario(), 0.0, 0.0, 1.0, 0.0);
  expect_warp(catenoid_scenario(1.0), 0.0, 1.0, 0.0, 1.0);
}

TEST(GaussCurvature, ClosedForms) {
  EXPECT_EQ(gauss_curvature(plane_scenario().surface, 7.0), 0.0);
  EXPECT_NEAR(gauss_curvature(h2_in_h3_scenario().surface, 1.0), -1.0, 1e-14);
  const auto cat = catenoid_scenario(1.0).surface;
  EXPECT_NEAR(gauss_curvature(cat, 0.5), -0.64, 1e-14);
  EXPECT_NEAR(fd_curvature(cat, 0.5), -0.64, 1e-6);
}

TEST(GaussCurvature, PoleIsRejected) { EXPECT_THROW(gauss_curvature(h2_in_h3_scenario().surface, 0.0), PoleError); }

TEST(GaussEquation, ResidualVanishesOnCatalogAtRandomRadii) {
  std::mt19937_64 rng(7);
  for (const auto& sc : builtin_catalog()) {
    const double top = std::min(sc.surface.r_max, 20.0);
    for (int i = 0; i < 100; ++i) {
      const double r = 1e-3 + (top - 1e-3) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const auto g = gauss_equation_residual(sc, r);
      const double scale = std::max(1.0, std::abs(gauss_curvature(sc.surface, r)));
      EXPECT_LT(std::abs(g.scalar_form) / scale, 1e-8) << sc.id() << " r=" << r;
      EXPECT_LT(std::abs(g.tangent_form) / scale, 1e-8) << sc.id() << " r=" << r;
    }
  }
}

TEST(GaussEquation, CatenoidHandValue) {
  // K = -|h|^2 / 2 at r = 1, c = 1: K = -1/4, |h|^2 = 1/2
  const auto sc = catenoid_scenario(1.0);
  EXPECT_NEAR(sc.extrinsic.h_sq(1.0), 0.5, 1e-15);
  EXPECT_NEAR(gauss_curvature(sc.surface, 1.0), -0.25, 1e-15);
  EXPECT_NEAR(gauss_equation_residual(sc, 1.0).scalar_form, 0.0, 1e-15);
}

TEST(Catalog, Contents) {
  const auto cat = builtin_catalog();
  ASSERT_EQ(cat.size(), 3u);
  EXPECT_EQ(cat[0].id(), "plane");
  EXPECT_TRUE(cat[0].stable_claim);
  EXPECT_EQ(cat[1].id(), "catenoid(c=1)");
  EXPECT_FALSE(cat[1].stable_claim);
  EXPECT_TRUE(cat[1].surface.neck_centered);
  EXPECT_EQ(cat[2].id(), "h2-in-h3");
  EXPECT_EQ(cat[2].ambient.sectional_floor().value(), -1.0);
  EXPECT_EQ(cat[2].ambient.scalar_floor().value(), -6.0);
  EXPECT_NEAR(cat[2].potential(3.0), -2.0, 1e-15);
  for (const auto& sc : cat) EXPECT_NO_THROW(validate(sc));
}

TEST(Catalog, FindBuiltinParsesNeckRadius) {
  const auto sc = find_builtin("catenoid(c=2)");
  ASSERT_TRUE(sc.has_value());
  EXPECT_NEAR(sc->surface.warp(0.0), 2.0, 1e-15);
  EXPECT_FALSE(find_builtin("torus").has_value());
}

TEST(ParseScenario, Builtin) {
  const auto sc = parse_scenario("[surface]\nbuiltin = plane\n");
  EXPECT_EQ(sc.id(), "plane");
  EXPECT_TRUE(sc.stable_claim);
}

TEST(ParseScenario, ExpressionMatchesCatalogEntry) {
  const auto sc = parse_scenario(
      "[surface]\nf = \"sinh(r)\"\nr_max = 40\nstable_claim = true\n"
      "[extrinsic]\nh_sq = \"0\"\nric_nn = \"-2\"\n[ambient]\nsectional_floor = 1\n");
  const auto ref = h2_in_h3_scenario();
  for (double r : {0.5, 2.0, 10.0}) {
    EXPECT_NEAR(sc.surface.warp(r), ref.surface.warp(r), 1e-12 * ref.surface.warp(r));
    EXPECT_EQ(sc.potential(r), ref.potential(r));
  }
  EXPECT_EQ(sc.ambient.sectional_floor().value(), -1.0);
}

TEST(ParseScenario, RejectsNegativeWarp) {
  const char* text = "[surface]\nf = \"-r\"\n[extrinsic]\nh_sq = \"0\"\nric_nn = \"0\"\n[ambient]\nsectional_floor = 0\n";
  EXPECT_THROW(parse_scenario(text), InvariantError);
}

TEST(ParseScenario, ErrorsCarryLocation) {
  try {
    parse_scenario("[surface]\nf = \"sinh(r\"\n[extrinsic]\nh_sq = \"0\"\nric_nn = \"0\"\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
  }
  try {
    parse_scenario("[surface]\nbuiltin = plane\ncolour = red\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParseScenario, RoundTripPreservesValues) {
  const char* text =
      "[surface]\nname = cubic\nf = \"r + r^3\"\nr_max = 5\ngrowth = poly:3\n"
      "[extrinsic]\nh_sq = \"0\"\nric_nn = \"0\"\n[ambient]\nsectional_floor = 1\n";
  const auto a = parse_scenario(text);
  const auto b = parse_scenario(serialize_scenario(a));
  EXPECT_EQ(serialize_scenario(a), serialize_scenario(b));
  for (double r : {0.1, 1.0, 4.9}) {
    EXPECT_NEAR(a.surface.warp(r), b.surface.warp(r), 1e-12);
    EXPECT_NEAR(a.surface.warp_d2(r), b.surface.warp_d2(r), 1e-12);
    EXPECT_NEAR(a.potential(r), b.potential(r), 1e-12);
  }
  EXPECT_EQ(b.surface.growth.kind, GrowthClass::Kind::Polynomial);
}

TEST(ParseScenario, CatalogRoundTrip) {
  for (const auto& sc : {plane_scenario(), h2_in_h3_scenario(), catenoid_scenario(1.5)}) {
    const auto back = parse_scenario(serialize_scenario(sc));
    EXPECT_EQ(back.stable_claim, sc.stable_claim);
    EXPECT_EQ(back.surface.neck_centered, sc.surface.neck_centered);
    for (double r : {0.25, 1.0, 3.0}) EXPECT_NEAR(back.potential(r), sc.potential(r), 1e-12);
  }
}

TEST(Symbolic, DerivativesAgreeWithFiniteDifferences) {
  const auto s = WarpedSurface::from_expression("w", "sinh(2*r)/2 + r^3", 5.0);
  for (double r : {0.3, 1.0, 2.5}) {
    const double h = 1e-5;
    EXPECT_NEAR(s.warp_d1(r), (s.warp(r + h) - s.warp(r - h)) / (2 * h), 1e-5 * std::max(1.0, s.warp(r)));
  }
}
