#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "minsurf/stability_analysis.hpp"

using namespace minsurf;

namespace {

constexpr double pi = std::numbers::pi;

double bessel_zero_sq(int order) {
  const double j = boost::math::cyl_bessel_j_zero(static_cast<double>(order), 1);
  return j * j;
}

}  // namespace

TEST(DirichletEigen, DiskModeZeroMatchesBesselZero) {
  const auto op = RadialOperator::laplacian(plane_scenario().surface, 0);
  const auto e = dirichlet_eigen(op, 1.0, 4096);
  EXPECT_NEAR(e.lambda, bessel_zero_sq(0), 1e-4 * bessel_zero_sq(0));
  EXPECT_NEAR(e.lambda, 5.7832, 1e-4);
  EXPECT_TRUE(e.cross_validated);
}

TEST(DirichletEigen, DiskModeOneMatchesBesselZero) {
  const auto op = RadialOperator::laplacian(plane_scenario().surface, 1);
  const auto e = dirichlet_eigen(op, 1.0, 4096);
  EXPECT_NEAR(e.lambda, bessel_zero_sq(1), 1e-4 * bessel_zero_sq(1));
  EXPECT_NEAR(e.lambda, 14.682, 1e-3);
}

TEST(DirichletEigen, ScalesAsInverseSquareRadius) {
  const auto op = RadialOperator::laplacian(plane_scenario().surface, 0);
  const double l1 = dirichlet_eigen(op, 1.0, 2048).lambda;
  const double l3 = dirichlet_eigen(op, 3.0, 2048).lambda;
  EXPECT_NEAR(l3 * 9.0, l1, 1e-10 * l1);
}

TEST(DirichletEigen, ConstantPotentialShiftsSpectrum) {
  const auto sc = h2_in_h3_scenario();
  for (double R : {1.0, 4.0, 12.0}) {
    const double jac = dirichlet_eigen(RadialOperator::jacobi(sc, 0), R, 2048).lambda;
    const double free = dirichlet_eigen(RadialOperator::laplacian(sc.surface, 0), R, 2048).lambda;
    EXPECT_NEAR(jac, free + 2.0, 1e-9 * (free + 2.0)) << "R=" << R;
    EXPECT_GT(jac, 0.0);
  }
}

TEST(DirichletEigen, SecondOrderConvergence) {
  const auto op = RadialOperator::laplacian(plane_scenario().surface, 0);
  const double exact = bessel_zero_sq(0);
  const double e1 = std::abs(dirichlet_eigen(op, 1.0, 256, false).lambda - exact);
  const double e2 = std::abs(dirichlet_eigen(op, 1.0, 512, false).lambda - exact);
  const double e3 = std::abs(dirichlet_eigen(op, 1.0, 1024, false).lambda - exact);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.2);
}

TEST(DirichletEigen, DomainMonotonicity) {
  for (const auto& sc : builtin_catalog()) {
    const auto op = RadialOperator::jacobi(sc, 0);
    double prev = INFINITY;
    for (int k = 1; k <= 10; ++k) {
      const double R = 0.5 * k;
      const double l = dirichlet_eigen(op, R, 1024).lambda;
      EXPECT_LT(l, prev) << sc.id() << " R=" << R;
      prev = l;
    }
  }
}

TEST(DirichletEigen, ModeMonotonicity) {
  for (const auto& sc : builtin_catalog()) {
    double prev = -INFINITY;
    for (int m = 0; m <= 4; ++m) {
      const double l = dirichlet_eigen(RadialOperator::jacobi(sc, m), 3.0, 1024).lambda;
      EXPECT_GE(l, prev) << sc.id() << " m=" << m;
      prev = l;
    }
  }
}

TEST(DirichletEigen, EigenfunctionIsPositiveAndVanishesAtBoundary) {
  const auto e = dirichlet_eigen(RadialOperator::jacobi(catenoid_scenario(1.0), 0), 2.0, 512);
  ASSERT_EQ(e.r.size(), e.eigenfunction.size());
  EXPECT_EQ(e.eigenfunction.back(), 0.0);
  for (std::size_t i = 0; i + 1 < e.eigenfunction.size(); ++i) EXPECT_GT(e.eigenfunction[i], 0.0);
}

TEST(DirichletEigen, RejectsNegativeMode) { EXPECT_THROW(RadialOperator::jacobi(plane_scenario(), -1), DomainError); }

TEST(JacobiField, StableScenariosHaveNoZero) {
  EXPECT_FALSE(positive_jacobi_solution(plane_scenario(), 100.0).has_value());
  EXPECT_FALSE(positive_jacobi_solution(h2_in_h3_scenario(), 40.0).has_value());
  EXPECT_TRUE(positive_jacobi_solution(catenoid_scenario(1.0), 10.0).has_value());
}

TEST(StabilityRadius, Dichotomy) {
  const auto plane = plane_scenario();
  EXPECT_EQ(stability_radius(plane).radius, plane.surface.r_max);
  const auto h2 = h2_in_h3_scenario();
  EXPECT_EQ(stability_radius(h2).radius, h2.surface.r_max);
  const auto cat = stability_radius(catenoid_scenario(1.0));
  ASSERT_TRUE(cat.finite);
  ASSERT_TRUE(cat.jacobi_zero.has_value());
  EXPECT_LT(std::abs(cat.radius - *cat.jacobi_zero) / *cat.jacobi_zero, 1e-4);
}

TEST(StabilityRadius, ScalesWithNeckRadius) {
  // the catenoid of neck c is the unit catenoid scaled by c
  const double r1 = stability_radius(catenoid_scenario(1.0)).radius;
  const auto c2 = catenoid_scenario(2.0);
  auto scaled = c2;
  scaled.surface.r_max = 20.0;
  EXPECT_NEAR(stability_radius(scaled).radius, 2.0 * r1, 1e-4 * r1);
}

TEST(CriterionEquivalence, EigenvalueSignMatchesJacobiZero) {
  for (const auto& sc : builtin_catalog()) {
    const auto op = RadialOperator::jacobi(sc, 0);
    const double top = std::min(sc.surface.r_max, 10.0);
    for (int k = 1; k <= 20; ++k) {
      const double R = top * k / 20.0;
      const bool negative = dirichlet_eigen(op, R, 1024, false).lambda < 0.0;
      const auto zero = positive_jacobi_solution(sc, R);
      // radii within the bracket tolerance of the zero are ambiguous
      if (zero && std::abs(*zero - R) < 1e-3) continue;
      EXPECT_EQ(negative, zero.has_value()) << sc.id() << " R=" << R;
    }
  }
}

TEST(QuadraticForm, PlaneLinearCutoffIsPi) {
  for (double R : {1.0, 5.0, 50.0}) {
    const auto q = quadratic_form(plane_scenario(), linear_cutoff(R), R);
    EXPECT_NEAR(q.value, pi, 1e-10);
    EXPECT_EQ(q.potential, 0.0);
  }
}

TEST(QuadraticForm, HyperbolicPlaneIsGradientPlusTwiceMass) {
  const auto sc = h2_in_h3_scenario();
  const auto phi = polynomial_cutoff(6.0, 2.0);
  const auto q = quadratic_form(sc, phi, 6.0);
  const double mass = integrate([&](double r) { return phi(r) * phi(r) * 2 * pi * std::sinh(r); }, 0.0, 6.0).value;
  EXPECT_NEAR(q.value, q.gradient + 2.0 * mass, 1e-9 * q.value);
  EXPECT_GT(q.value, 0.0);
}

TEST(QuadraticForm, NonnegativeOnStableScenariosForEveryCutoff) {
  for (const auto& sc : builtin_catalog()) {
    if (!sc.stable_claim) continue;
    const double R = std::min(8.0, sc.surface.r_max);
    const TestFunction phis[] = {linear_cutoff(R), polynomial_cutoff(R, 3.0), log_cutoff(R), plateau_cutoff(R, 1.0),
                                 exp_cutoff(R, 1.0, 4.0 / std::sqrt(7.0))};
    for (const auto& phi : phis) EXPECT_GE(quadratic_form(sc, phi, R).value, -1e-8) << sc.id() << " " << phi.name();
  }
}

TEST(QuadraticForm, CatenoidGroundStateBeyondStabilityRadiusIsNegative) {
  const auto sc = catenoid_scenario(1.0);
  const double R_stab = stability_radius(sc).radius;
  const double R = 1.5 * R_stab;
  const auto e = dirichlet_eigen(RadialOperator::jacobi(sc, 0), R, 256);
  ASSERT_LT(e.lambda, 0.0);
  const auto phi = sampled_function(e.r, e.eigenfunction);
  EXPECT_LT(quadratic_form(sc, phi, R).value, 0.0);
}

TEST(LemmaM, PlaneLinearCutoffClosedForms) {
  const auto sc = plane_scenario();
  for (double R : {1.0, 3.0, 20.0}) {
    const auto s = lemma_m_sides(sc, linear_cutoff(R), R, FloorCase::Scalar);
    EXPECT_NEAR(s.lhs, 2 * pi, 1e-8);
    EXPECT_NEAR(s.rhs, 3 * pi, 1e-8);
    const auto k = lemma_m_sides(sc, linear_cutoff(R), R, FloorCase::Sectional);
    EXPECT_NEAR(k.lhs, 4 * pi, 1e-8);
    EXPECT_NEAR(k.rhs, 5 * pi, 1e-8);
    EXPECT_EQ(k.status, Status::Pass);
  }
}

TEST(LemmaM, HyperbolicPlaneQuadrature) {
  const auto s = lemma_m_sides(h2_in_h3_scenario(), linear_cutoff(2.0), 2.0, FloorCase::Sectional);
  EXPECT_EQ(s.status, Status::Pass);
  EXPECT_LE(s.lhs, s.rhs + 1e-8);
}

TEST(LemmaM, UnstableScenarioIsInapplicable) {
  const auto s = lemma_m_sides(catenoid_scenario(1.0), linear_cutoff(2.0), 2.0, FloorCase::Scalar);
  EXPECT_EQ(s.status, Status::Inapplicable);
}

TEST(LemmaM, RequiresVanishingAtR) {
  EXPECT_THROW(lemma_m_sides(plane_scenario(), linear_cutoff(3.0), 2.0, FloorCase::Scalar), DomainError);
}

TEST(CorollaryC1, PlaneQuadraticCutoffClosedForm) {
  // phi = (1 - r/R)^2: int (phi')^2 dA = 2 pi/3, int phi phi'' dA = pi/3, phi(0) = 1
  const double R = 4.0;
  const auto s = corollary_c1_sides(plane_scenario(), polynomial_cutoff(R, 2.0), R, FloorCase::Sectional);
  EXPECT_NEAR(s.lhs, 3 * 2 * pi / 3 + 4 * pi / 3, 1e-8);
  EXPECT_NEAR(s.rhs, 4 * pi, 1e-8);
  EXPECT_EQ(s.status, Status::Pass);
}

TEST(CorollaryC1, HyperbolicPlaneHolds) {
  for (auto c : {FloorCase::Scalar, FloorCase::Sectional}) {
    for (double R : {2.0, 5.0, 10.0}) {
      const auto s = corollary_c1_sides(h2_in_h3_scenario(), polynomial_cutoff(R, 2.0), R, c);
      EXPECT_EQ(s.status, Status::Pass) << to_string(c) << " R=" << R;
    }
  }
}

TEST(CorollaryC1, LogCutoffAreaBound) {
  for (double R : {2.0, 10.0, 100.0}) {
    const auto s = log_cutoff_area_sides(plane_scenario(), R);
    EXPECT_EQ(s.status, Status::Pass);
    EXPECT_LE(s.lhs, s.rhs);
  }
  EXPECT_EQ(log_cutoff_area_sides(h2_in_h3_scenario(), 5.0).status, Status::Inapplicable);
}

TEST(ExpCutoff, HyperbolicPlaneAtFiveAndOne) {
  const auto s = exp_cutoff_sides(h2_in_h3_scenario(), 5.0, 1.0);
  EXPECT_EQ(s.annulus.status, Status::Pass);
  EXPECT_EQ(s.area_bound.status, Status::Pass);
}

TEST(ExpCutoff, AreaConsequenceScan) {
  const double a = 4.0 / std::sqrt(7.0);
  for (int k = 1; k <= 100; ++k) {
    const double t = 0.1 * k;
    const auto s = exp_cutoff_sides(h2_in_h3_scenario(), t, std::min(1.0, t));
    EXPECT_NEAR(s.area_bound.lhs, 2 * pi * (std::cosh(t) - 1.0), 1e-9 * std::cosh(t));
    EXPECT_NEAR(s.area_bound.rhs, 4 * pi / 3 * t * t * std::exp(a * t), 1e-12 * s.area_bound.rhs);
    EXPECT_EQ(s.area_bound.status, Status::Pass) << "t=" << t;
    const auto p = exp_cutoff_sides(plane_scenario(), t, std::min(1.0, t));
    EXPECT_EQ(p.area_bound.status, Status::Pass) << "t=" << t;
  }
}

TEST(Export, InequalityCsvRow) {
  const auto s = lemma_m_sides(plane_scenario(), linear_cutoff(2.0), 2.0, FloorCase::Scalar);
  const auto row = inequality_csv_row("plane", "linear_cutoff(R=2)", 2.0, s);
  EXPECT_EQ(row.rfind("plane,linear_cutoff(R=2),2,", 0), 0u);
  EXPECT_NE(row.find(",pass\n"), std::string::npos);
}
