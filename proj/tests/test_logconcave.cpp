#include "gen.hpp"

#include <gtest/gtest.h>

using namespace riesz;
using riesz::testing::Gen;

namespace {

// -log of the Asplund sum at x by brute-force inf-convolution:
// inf_y phi(x - y) + t psi(y / t).
double inf_convolution(const LogConcave& f, const LogConcave& g, double t, double x) {
  double best = kInf;
  for (int k = -20000; k <= 20000; ++k) {
    const double y = 12.0 * k / 20000;
    best = std::min(best, f.phi(make_point(x - y)) + t * g.phi(make_point(y / t)));
  }
  return best;
}

}  // namespace

TEST(LogConcave, TotalMassOfAnalyticFamilies) {
  EXPECT_NEAR(LogConcave::gaussian(1, 2).total_mass(), std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(LogConcave::gaussian(2, 0.5, 1).total_mass(), 4 * kPi * std::exp(1.0), 1e-10);
  EXPECT_NEAR(LogConcave::exponential(1, 2, 1).total_mass(), std::exp(1.0), 1e-12);
  EXPECT_NEAR(LogConcave::exponential(2, 2).total_mass(), kPi / 2, 1e-12);
  EXPECT_NEAR(LogConcave::indicator(SupportSet::box(-1, 2, 0, 0.5), 3).total_mass(), 4.5, 1e-12);
  EXPECT_NEAR(LogConcave::indicator(SupportSet::regular_polygon(4, 1)).total_mass(), 2, 1e-12);
}

TEST(LogConcave, RejectsImproperData) {
  EXPECT_THROW(LogConcave::gaussian(1, 0), Error);
  EXPECT_THROW(LogConcave::exponential(1, -1), Error);
  EXPECT_THROW(LogConcave::indicator(SupportSet::interval(0, kInf)), Error);
  const GridSpec s = GridSpec::line(-1, 1, 21);
  EXPECT_THROW(LogConcave::from_grid(GridFunction::sample(s, [](const Point& x) { return -x(0) * x(0); })), Error);
}

TEST(LogConcave, ClosedFormConjugates) {
  Gen gen(1);
  const auto ga = LogConcave::gaussian(1, 2, 0.5);
  const auto ex = LogConcave::exponential(1, 1.5, 0.25);
  const auto ind = LogConcave::indicator(SupportSet::interval(-1, 3), 2);
  for (int k = 0; k < 50; ++k) {
    const double y = gen.uniform(-4, 4);
    EXPECT_NEAR(ga.conjugate(make_point(y)), y * y / 4 + 0.5, 1e-12);
    EXPECT_EQ(ex.conjugate(make_point(y)), std::abs(y) <= 1.5 ? 0.25 : kInf);
    EXPECT_NEAR(ind.conjugate(make_point(y)), (y > 0 ? 3 * y : -y) + std::log(2.0), 1e-12);
  }
}

TEST(LogConcave, GridBackedConjugateMatchesAnalytic) {
  const auto ga = LogConcave::gaussian(1, 1);
  const GridSpec s = GridSpec::line(-8, 8, 801);
  const auto grid = LogConcave::from_grid(ga.sample_phi(s));
  for (double y : {-2.0, -0.5, 0.0, 1.0, 3.0}) EXPECT_NEAR(grid.conjugate(make_point(y)), y * y / 2, 1e-3);
  EXPECT_NEAR(grid.total_mass(), std::sqrt(2 * kPi), 1e-6);
}

TEST(LogConcave, TransformationsActOnMass) {
  const auto f = LogConcave::gaussian(2, 1);
  const double m = f.total_mass();
  EXPECT_NEAR(f.scaled(3).total_mass(), 3 * m, 1e-12);
  EXPECT_NEAR(f.dilated(2).total_mass(), m / 4, 1e-12);
  EXPECT_NEAR(f.translated(make_point(1, -2)).total_mass(), m, 1e-12);
  // t.f = e^{-t phi(x/t)}: for the Gaussian this is e^{-|x|^2/(2t)}.
  EXPECT_NEAR(f.epi_scaled(2).total_mass(), 4 * kPi, 1e-10);
  // e^{b2} (b1 . f) = e^{b2} e^{-|x|^2/(2 b1)}
  EXPECT_NEAR(f.proportional(0.5, 1).total_mass(), std::exp(1.0) * kPi, 1e-10);
  EXPECT_THROW(f.dilated(0), Error);
}

TEST(LogConcave, SupportAndGrowth) {
  const auto ind = LogConcave::indicator(SupportSet::interval(-1, 2));
  EXPECT_EQ(support_set(ind).lo(), -1);
  EXPECT_EQ(support_set(ind).hi(), 2);
  EXPECT_FALSE(support_set(LogConcave::gaussian(2, 1)).bounded());
  Gen gen(4);
  for (const auto& f : {LogConcave::gaussian(1, 0.3), LogConcave::exponential(1, 0.7, 1), ind}) {
    const auto c = growth_certificate(f);
    EXPECT_GT(c.b, 0);
    for (int k = 0; k < 200; ++k) {
      const Point x = make_point(gen.uniform(-30, 30));
      EXPECT_GE(f.phi(x), c.b * x.norm() + c.c - 1e-12);
    }
  }
}

TEST(LogConcave, GridSupportIsHalfCellDilatedHull) {
  const GridSpec s = GridSpec::line(-2, 2, 41);
  const auto chi = GridFunction::sample(s, [](const Point& x) { return std::abs(x(0)) <= 1 + 1e-12 ? 0.0 : kInf; });
  const SupportSet k = grid_support(chi);
  EXPECT_NEAR(k.lo(), -1.05, 1e-12);
  EXPECT_NEAR(k.hi(), 1.05, 1e-12);
}

TEST(Asplund, ClosedFormsForMatchingFamilies) {
  const auto a = LogConcave::indicator(SupportSet::interval(-1, 1));
  const auto b = LogConcave::indicator(SupportSet::interval(-2, 2));
  const auto s = asplund_sum(a, b, 0.5);
  EXPECT_NEAR(support_set(s).hi(), 2, 1e-12);
  EXPECT_NEAR(support_set(s).lo(), -2, 1e-12);
  const auto g = asplund_sum(LogConcave::gaussian(1, 1), LogConcave::gaussian(1, 2), 1.0);
  // 1/a = 1/1 + 1/2
  EXPECT_NEAR(g.phi(make_point(1.0)), 1.0 / 3, 1e-12);
}

TEST(Asplund, GridRouteMatchesClosedForm) {
  const auto g1 = LogConcave::gaussian(1, 1);
  AsplundOptions opt;
  opt.force_grid = true;
  const auto grid = asplund_sum(g1, g1, 1.0, opt);
  const auto exact = asplund_sum(g1, g1, 1.0);
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) EXPECT_NEAR(grid.phi(make_point(x)), exact.phi(make_point(x)), 5e-3);
  EXPECT_NEAR(grid.total_mass(), exact.total_mass(), 1e-3 * exact.total_mass());
}

TEST(Asplund, MixedFamiliesMatchInfConvolution) {
  const auto ex = LogConcave::exponential(1, 1);
  const auto ga = LogConcave::gaussian(1, 1);
  for (double t : {0.25, 1.0}) {
    const auto s = asplund_sum(ex, ga, t);
    for (double x : {-2.0, -0.3, 0.0, 1.0, 2.5}) EXPECT_NEAR(s.phi(make_point(x)), inf_convolution(ex, ga, t, x), 5e-3);
  }
}

TEST(Asplund, ZeroWeightReturnsFirstArgument) {
  const auto ex = LogConcave::exponential(1, 2);
  const auto s = asplund_sum(ex, LogConcave::gaussian(1, 1), 0.0);
  EXPECT_EQ(s.phi(make_point(1.0)), ex.phi(make_point(1.0)));
  EXPECT_THROW(asplund_sum(ex, ex, -1.0), Error);
}

TEST(Growth, GaussianAgainstItself) {
  const auto g = LogConcave::gaussian(1, 1);
  const auto c = check_growth_condition(g, g);
  EXPECT_DOUBLE_EQ(c.beta1, 1);
  EXPECT_NEAR(c.beta2, 0, 1e-12);
  EXPECT_LE(c.max_violation, 1e-12);
}

TEST(Growth, WiderConjugateDomainIsViolated) {
  // g* is finite where f* is not only when dom f* is larger; here it is the reverse.
  const auto ex = LogConcave::exponential(1, 1);
  const auto ga = LogConcave::gaussian(1, 1);
  EXPECT_EQ(check_growth_condition(ga, ex).max_violation, kInf);
  const auto c = check_growth_condition(ex, ga);
  EXPECT_TRUE(std::isfinite(c.max_violation));
}

TEST(SupportSet, SupportAndRadialFunctions) {
  const SupportSet box = SupportSet::box(-1, 2, -0.5, 1);
  EXPECT_NEAR(box.support_function(make_point(1, 0)), 2, 1e-12);
  EXPECT_NEAR(box.support_function(make_point(0, -1)), 0.5, 1e-12);
  EXPECT_NEAR(box.radial_function(make_point(-1, 0)), 1, 1e-12);
  EXPECT_THROW(box.support_function(make_point(1, 1)), Error);
  const SupportSet oct = SupportSet::regular_polygon(8, 2);
  EXPECT_NEAR(oct.radial_function(oct.vertices()[0].normalized()), 2, 1e-12);
  EXPECT_THROW(SupportSet::interval(1, 2).radial_function(make_point(1.0)), Error);
}

TEST(SupportSet, MinkowskiSumAndHausdorff) {
  const SupportSet a = SupportSet::box(-1, 1, -1, 1);
  const SupportSet b = SupportSet::box(-0.5, 0.5, -2, 2);
  const SupportSet s = a.minkowski_sum(b, 2);
  Gen gen(12);
  for (int k = 0; k < 50; ++k) {
    const double th = gen.uniform(0, 2 * kPi);
    const Point u = make_point(std::cos(th), std::sin(th));
    EXPECT_NEAR(s.support_function(u), a.support_function(u) + 2 * b.support_function(u), 1e-12);
  }
  EXPECT_NEAR(a.hausdorff(a.scaled(2)), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(SupportSet::interval(-1, 1).hausdorff(SupportSet::interval(-1, 3)), 2, 1e-12);
}
