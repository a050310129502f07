#include "gen.hpp"

#include <gtest/gtest.h>

using namespace riesz;
using riesz::testing::Gen;

namespace {

QuadratureConfig cfg(double alpha, QuadMethod m = QuadMethod::DirectDiagonalCorrected) {
  QuadratureConfig q;
  q.alpha = alpha;
  q.method = m;
  return q;
}

// I_alpha(1_[-1,1]) = int int |x - y|^{alpha - 1} = 2^{alpha + 2} / (alpha (alpha + 1)).
double interval_energy(double alpha) { return std::pow(2.0, alpha + 2) / (alpha * (alpha + 1)); }

}  // namespace

TEST(Numerics, GaussLegendreIsExactForPolynomials) {
  std::vector<double> x, w;
  numerics::gauss_legendre(8, x, w);
  for (int p = 0; p <= 15; ++p) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p);
    EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << "degree " << p;
  }
}

TEST(Numerics, UpperGammaSpecialCases) {
  for (double s : {0.5, 1.0, 2.5, 4.0}) EXPECT_NEAR(numerics::upper_gamma(s, 0), std::tgamma(s), 1e-12 * std::tgamma(s));
  for (double x : {0.1, 1.0, 7.0, 30.0}) EXPECT_NEAR(numerics::upper_gamma(1, x), std::exp(-x), 1e-13);
  // Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x))
  for (double x : {0.2, 2.0, 9.0}) EXPECT_NEAR(numerics::upper_gamma(0.5, x), std::sqrt(kPi) * std::erfc(std::sqrt(x)), 1e-12);
  // Gamma(3, x) = (x^2 + 2x + 2) e^{-x}
  for (double x : {0.5, 3.0, 12.0}) EXPECT_NEAR(numerics::upper_gamma(3, x), (x * x + 2 * x + 2) * std::exp(-x), 1e-12);
}

TEST(Numerics, CounterUniformIsReproducibleAndInRange) {
  double mean = 0;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    const double u = numerics::uniform(42, k);
    ASSERT_GE(u, 0);
    ASSERT_LT(u, 1);
    EXPECT_EQ(u, numerics::uniform(42, k));
    mean += u;
  }
  EXPECT_NEAR(mean / 100000, 0.5, 5e-3);
  EXPECT_NE(numerics::uniform(1, 0), numerics::uniform(2, 0));
}

TEST(Energy, IntervalClosedFormAcrossAlpha) {
  const auto f = LogConcave::indicator(SupportSet::interval(-1, 1));
  for (double alpha : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const auto r = riesz_energy(f, cfg(alpha));
    EXPECT_NEAR(r.value, interval_energy(alpha), 1e-3 * interval_energy(alpha)) << "alpha " << alpha;
  }
}

TEST(Energy, OneDimensionalOracles) {
  EXPECT_NEAR(riesz_energy(LogConcave::exponential(1, 1), cfg(1)).value, 4, 4e-3);
  EXPECT_NEAR(riesz_energy(LogConcave::gaussian(1, 1), cfg(1)).value, 2 * kPi, 2 * kPi * 1e-3);
  // alpha = 2: int int |x - y| e^{-x^2/2 - y^2/2} = 2 pi E|Z1 - Z2| = 4 sqrt(pi)
  EXPECT_NEAR(riesz_energy(LogConcave::gaussian(1, 1), cfg(2)).value, 4 * std::sqrt(kPi), 4e-3);
}

TEST(Energy, UnitDiscOracles) {
  // A 256-gon is within 1e-4 of the unit disc in area; the curved edge
  // costs O(h), which the reported error has to cover.
  const auto disc = LogConcave::indicator(SupportSet::regular_polygon(256, 1));
  const auto r = riesz_energy(disc, cfg(2));
  EXPECT_LE(std::abs(r.value - unit_ball_energy(2, 2)), r.estimated_error + 1e-3 * unit_ball_energy(2, 2));
  EXPECT_NEAR(unit_ball_energy(1, 1), 4, 1e-12);
  EXPECT_NEAR(unit_ball_energy(1, 2), 8.0 / 3, 1e-12);
}

TEST(Energy, SquareDirectEpsilonAndMonteCarloAgree) {
  const auto sq = LogConcave::indicator(SupportSet::box(-1, 1, -1, 1));
  const auto d = riesz_energy(sq, cfg(1));
  const auto e = riesz_energy(sq, cfg(1, QuadMethod::EpsilonRegularized));
  QuadratureConfig mc = cfg(1, QuadMethod::MonteCarlo);
  mc.mc_samples = 2'000'000;
  const auto m = riesz_energy(sq, mc);
  EXPECT_LE(std::abs(d.value - e.value), std::max(d.estimated_error, e.estimated_error) + 1e-12);
  EXPECT_LE(std::abs(d.value - m.value), 4 * m.estimated_error + d.estimated_error);
  EXPECT_GT(m.estimated_error, 0);
}

TEST(Energy, MonteCarloIsSeeded) {
  const auto g = LogConcave::gaussian(1, 1);
  QuadratureConfig mc = cfg(1, QuadMethod::MonteCarlo);
  mc.mc_samples = 100000;
  const double a = riesz_energy(g, mc).value;
  EXPECT_EQ(a, riesz_energy(g, mc).value);
  mc.seed += 1;
  EXPECT_NE(a, riesz_energy(g, mc).value);
}

TEST(Energy, HomogeneityInTheScalarFactor) {
  Gen gen(31);
  for (int k = 0; k < 10; ++k) {
    const auto f = LogConcave::gaussian(1 + k % 2, gen.uniform(0.5, 2), gen.uniform(-1, 1));
    const double c = gen.uniform(0.1, 5), alpha = gen.uniform(0.5, 2);
    const double e = riesz_energy(f, cfg(alpha)).value;
    EXPECT_NEAR(riesz_energy(f.scaled(c), cfg(alpha)).value, c * c * e, 1e-12 * c * c * e);
  }
}

TEST(Energy, DilationLaw) {
  Gen gen(32);
  const std::vector<LogConcave> fs{LogConcave::exponential(1, 1), LogConcave::gaussian(2, 1),
                                   LogConcave::indicator(SupportSet::box(-1, 1, -0.5, 0.5))};
  for (const auto& f : fs) {
    const double c = gen.uniform(0.3, 3), alpha = gen.uniform(0.5, 2.5);
    const double e = riesz_energy(f, cfg(alpha)).value;
    const double want = std::pow(c, -(f.dim() + alpha)) * e;
    EXPECT_NEAR(riesz_energy(f.dilated(c), cfg(alpha)).value, want, 1e-3 * want);
  }
}

TEST(Energy, TranslationInvarianceWithinTail) {
  Gen gen(33);
  for (int k = 0; k < 6; ++k) {
    const int dim = 1 + k % 2;
    const auto f = k % 3 == 0 ? LogConcave::exponential(dim, 1) : LogConcave::gaussian(dim, gen.uniform(0.5, 2));
    const auto g = f.translated(gen.point(dim, 2));
    const auto ef = riesz_energy(f, cfg(1)), eg = riesz_energy(g, cfg(1));
    EXPECT_LE(std::abs(ef.value - eg.value), ef.tail_bound + eg.tail_bound + 1e-12 * ef.value);
  }
}

TEST(Energy, MonotoneOnOrderedPairs) {
  Gen gen(34);
  for (int k = 0; k < 30; ++k) {
    const double l = -gen.uniform(0.2, 1), r = gen.uniform(0.2, 1);
    const auto f = LogConcave::indicator(SupportSet::interval(l, r), gen.uniform(0.2, 1));
    const auto g = LogConcave::indicator(SupportSet::interval(l - gen.uniform(0, 1), r + gen.uniform(0, 1)),
                                         gen.uniform(1, 2));
    EXPECT_LE(riesz_energy(f, cfg(1.5)).value, riesz_energy(g, cfg(1.5)).value);
  }
}

TEST(Energy, ErrorEstimateCoversTheTruth) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto r = riesz_energy(LogConcave::indicator(SupportSet::interval(-1, 1)), cfg(alpha));
    EXPECT_LE(std::abs(r.value - interval_energy(alpha)), r.estimated_error + r.tail_bound + 1e-12);
  }
}

TEST(Energy, TailBoundCertifiesTruncation) {
  const auto g = LogConcave::gaussian(1, 1);
  const GridSpec small = GridSpec::line(-3, 3, 257);
  const double bound = tail_bound(g, small, 1);
  // Exact truncation loss of (int f)^2 for alpha = 1.
  const double inside = std::sqrt(2 * kPi) * std::erf(3 / std::sqrt(2.0));
  EXPECT_GE(bound, 2 * kPi - inside * inside);
  EXPECT_EQ(tail_bound(LogConcave::indicator(SupportSet::interval(-1, 1)), small, 1), 0);
}

TEST(Energy, PotentialOfIntervalIsClosedForm) {
  // alpha = 2: int_{-1}^{1} |x - y| dx = 1 + y^2 for |y| <= 1.
  const auto f = LogConcave::indicator(SupportSet::interval(-1, 1));
  for (double y : {-0.5, 0.0, 0.3, 1.0}) EXPECT_NEAR(riesz_potential(f, make_point(y), cfg(2)), 1 + y * y, 1e-4);
  // alpha = 1/2: int |x - y|^{-1/2} = 2 (sqrt(1 + y) + sqrt(1 - y)).
  for (double y : {0.0, 0.4}) {
    EXPECT_NEAR(riesz_potential(f, make_point(y), cfg(0.5)), 2 * (std::sqrt(1 + y) + std::sqrt(1 - y)), 1e-3);
  }
}

TEST(Energy, InvalidAlphaIsRejected) {
  const auto f = LogConcave::gaussian(1, 1);
  for (double a : {0.0, -1.0, std::nan("")}) {
    try {
      riesz_energy(f, cfg(a));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidAlpha);
    }
  }
}

TEST(Energy, ResultsDoNotDependOnThreadCount) {
  const auto g = LogConcave::gaussian(2, 1);
  set_threads(1);
  const double a = riesz_energy(g, cfg(1)).value;
  set_threads(3);
  const double b = riesz_energy(g, cfg(1)).value;
  set_threads(1);
  EXPECT_EQ(a, b);
}
