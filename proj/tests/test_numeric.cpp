#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "minsurf/numeric.hpp"

using namespace minsurf;

TEST(Quadrature, PolynomialIsExact) {
  const auto q = integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(q.value, 8.0, 1e-13);
}

TEST(Quadrature, PeakedIntegrandConverges) {
  // int_0^1 dx / (1e-4 + x^2) = 100 atan(100)
  const auto q = integrate([](double x) { return 1.0 / (1e-4 + x * x); }, 0.0, 1.0);
  EXPECT_NEAR(q.value, 100.0 * std::atan(100.0), 1e-8);
}

TEST(Quadrature, EmptyInterval) { EXPECT_EQ(integrate([](double) { return 1.0; }, 2.0, 2.0).value, 0.0); }

TEST(Quadrature, PiecesSumAcrossKink) {
  const std::vector<double> breaks{-1.0, 0.0, 1.0};
  const auto q = integrate_pieces([](double x) { return std::abs(x); }, breaks);
  EXPECT_NEAR(q.value, 1.0, 1e-14);
}

TEST(Quadrature, TailOfExponential) {
  const auto q = integrate_to_infinity([](double x) { return std::exp(-2.0 * x); }, 1.0);
  EXPECT_NEAR(q.value, 0.5 * std::exp(-2.0), 1e-12);
}

TEST(FitLine, RecoversLine) {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.5, 1e-14);
  EXPECT_NEAR(f.intercept, -1.0, 1e-14);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
}

TEST(FitLine, RejectsDegenerateInput) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(fit_line(one, one), DomainError);
  const std::vector<double> same{1.0, 1.0, 1.0};
  EXPECT_THROW(fit_line(same, same), DomainError);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(4.0), "4");
  EXPECT_EQ(format_number(NAN), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(PairwiseSum, MatchesPlainSum) {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(xs), 999.0 * 1000.0 / 2.0);
}

TEST(Grid, DefaultGridIsIncreasingAndEndsAtRmax) {
  const auto g = default_grid(30.0, 1024);
  ASSERT_EQ(g.size(), 1024u);
  EXPECT_GT(g.front(), 0.0);
  EXPECT_EQ(g.back(), 30.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(Bisect, FindsRoot) {
  const double r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  EXPECT_NEAR(r, std::sqrt(2.0), 1e-13);
  EXPECT_THROW(bisect([](double x) { return x * x + 1.0; }, 0.0, 1.0, 1e-6), NumericError);
}
