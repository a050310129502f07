#include "gen.hpp"

#include <gtest/gtest.h>

using namespace riesz;
using riesz::testing::Gen;

namespace {

// Lower convex hull of (x_i, v_i) evaluated back at the x_i.
std::vector<double> lower_hull_1d(const std::vector<double>& x, const std::vector<double>& v) {
  std::vector<int> h;
  auto cross = [&](int o, int a, int b) {
    return (x[a] - x[o]) * (v[b] - v[o]) - (v[a] - v[o]) * (x[b] - x[o]);
  };
  for (int i = 0; i < int(x.size()); ++i) {
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), i) <= 0) h.pop_back();
    h.push_back(i);
  }
  std::vector<double> out(x.size());
  for (std::size_t s = 0; s + 1 < h.size(); ++s)
    for (int i = h[s]; i <= h[s + 1]; ++i) {
      const double t = (x[i] - x[h[s]]) / (x[h[s + 1]] - x[h[s]]);
      out[i] = (1 - t) * v[h[s]] + t * v[h[s + 1]];
    }
  return out;
}

}  // namespace

TEST(ExtendedValue, SaturatesAndRefusesImproperValues) {
  const ExtendedValueT<double> a(1.5), inf = ExtendedValueT<double>::infinity();
  EXPECT_EQ((a + 2.0).value(), 3.5);
  EXPECT_FALSE((a + inf).is_finite());
  EXPECT_FALSE((3.0 * inf).is_finite());
  EXPECT_THROW(ExtendedValueT<double>(-kInf), Error);
  EXPECT_THROW(ExtendedValueT<double>(std::nan("")), Error);
  EXPECT_THROW(0.0 * a, Error);
}

TEST(GridSpec, RejectsEvenOrTinyNodeCounts) {
  EXPECT_THROW(GridSpec::line(-1, 1, 4), Error);
  EXPECT_THROW(GridSpec::line(-1, 1, 1), Error);
  EXPECT_THROW(GridSpec::line(1, -1, 5), Error);
  EXPECT_NO_THROW(GridSpec::line(-1, 1, 5));
}

TEST(GridSpec, SymmetricBoxHasExactCentreAndMirrorNodes) {
  const GridSpec s = GridSpec::cube(1, 0.7, 101);
  EXPECT_EQ(s.coord(0, 50), 0.0);
  for (int i = 0; i < 101; ++i) EXPECT_EQ(s.coord(0, i), -s.coord(0, 100 - i));
}

TEST(Legendre, QuadraticWithinSamplingError) {
  const GridSpec s = GridSpec::line(-2, 2, 401);
  const auto phi = GridFunction::sample(s, [](const Point& x) { return 0.5 * x(0) * x(0); });
  const GridSpec dual = GridSpec::line(-1, 1, 201);
  const auto conj = legendre_transform(phi, dual);
  const double h = s.h(0);
  for (Index j = 0; j < dual.size(); ++j) {
    const double y = dual.point(j)(0);
    EXPECT_LE(std::abs(conj(j) - 0.5 * y * y), h * h / 8 + 1e-14);
  }
}

TEST(Legendre, AbsoluteValueConjugateIsIndicatorOfUnitBall) {
  const GridSpec s = GridSpec::line(-4, 4, 81);
  const auto phi = GridFunction::sample(s, [](const Point& x) { return std::abs(x(0)); });
  const GridSpec dual = GridSpec::line(-2, 2, 41);
  const auto conj = legendre_transform(phi, dual);
  for (Index j = 0; j < dual.size(); ++j) {
    const double y = dual.point(j)(0);
    // Over [-4, 4] the sup is max(0, 4|y| - 4).
    EXPECT_NEAR(conj(j), std::max(0.0, 4 * std::abs(y) - 4), 1e-12);
  }
}

TEST(Legendre, FastMatchesBruteForceOnRandomSamples) {
  Gen gen(101);
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = 1 + trial % 2;
    const GridSpec s = GridSpec::cube(dim, 2, dim == 1 ? 129 : 33);
    const GridFunction phi = trial % 3 == 0 ? gen.wiggly(s) : gen.convex(s);
    const GridSpec dual = GridSpec::cube(dim, gen.uniform(1, 5), dim == 1 ? 65 : 25);
    const auto fast = legendre_transform(phi, dual);
    const auto brute = legendre_transform_brute(phi, dual);
    for (Index j = 0; j < dual.size(); ++j)
      EXPECT_NEAR(fast(j), brute(j), 1e-11 * std::max(1.0, std::abs(brute(j)))) << "trial " << trial;
  }
}

TEST(Legendre, ConjugateIsConvexAndFenchelYoungHolds) {
  Gen gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = 1 + trial % 2;
    const GridSpec s = GridSpec::cube(dim, 2, dim == 1 ? 129 : 33);
    const GridFunction phi = gen.convex(s);
    const GridSpec dual = default_dual_spec(phi);
    const auto conj = legendre_transform(phi, dual);
    EXPECT_TRUE(conj.is_convex(1e-9));
    for (int probe = 0; probe < 50; ++probe) {
      const Index i = gen.integer(0, int(s.size()) - 1), j = gen.integer(0, int(dual.size()) - 1);
      EXPECT_GE(phi(i) + conj(j) + 1e-12, s.point(i).dot(dual.point(j)));
    }
  }
}

TEST(Legendre, BiconjugateOfNonConvexSampleIsLowerHull) {
  const GridSpec s = GridSpec::line(-3, 3, 241);
  Gen gen(3);
  for (int trial = 0; trial < 5; ++trial) {
    const GridFunction w = gen.wiggly(s);
    std::vector<double> x(s.size()), v(s.size());
    for (Index k = 0; k < s.size(); ++k) {
      x[k] = s.point(k)(0);
      v[k] = w(k);
    }
    const auto hull = lower_hull_1d(x, v);
    // The dual covers every chord slope; with slope spacing d the envelope
    // sits at most (d/2)(box width) below the hull.
    const GridSpec dual = GridSpec::line(-20, 20, 20001);
    const auto bi = legendre_transform_brute(legendre_transform_brute(w, dual), s);
    const double tol = 0.5 * dual.h(0) * 6;
    for (Index k = 0; k < s.size(); ++k) EXPECT_NEAR(bi(k), hull[k], tol) << "node " << k;
    for (Index k = 0; k < s.size(); ++k) EXPECT_LE(bi(k), w(k) + 1e-12);
  }
}

TEST(Legendre, BiconjugateRecoversConvexFunctions) {
  Gen gen(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 2;
    const GridSpec s = GridSpec::cube(dim, 2, dim == 1 ? 257 : 65);
    const GridFunction phi = gen.convex(s);
    const auto bi = biconjugate(phi);
    for (Index k = 0; k < s.size(); ++k) {
      const Point x = s.point(k);
      if (x.cwiseAbs().maxCoeff() <= 1) EXPECT_LE(std::abs(bi(k) - phi(k)), s.h(0)) << "trial " << trial;
    }
  }
}

TEST(Legendre, IndicatorOfBoxGivesSupportFunction) {
  const GridSpec s = GridSpec::cube(2, 3, 61);
  const SupportSet box = SupportSet::box(-1, 2, -0.5, 1);
  const auto chi = GridFunction::sample(s, [&](const Point& x) { return box.contains(x, 1e-9) ? 0.0 : kInf; });
  const GridSpec dual = GridSpec::cube(2, 4, 41);
  const auto h = legendre_transform(chi, dual);
  for (Index j = 0; j < dual.size(); ++j) EXPECT_NEAR(h(j), box.support_value(dual.point(j)), 1e-12);
}

TEST(Legendre, DualGridTooSmallWhenSupLeavesTheBox) {
  // Fine primal so that the sampled conjugate is curved at the dual edge.
  const GridSpec s = GridSpec::line(-2, 2, 2001);
  const auto phi = GridFunction::sample(s, [](const Point& x) { return x(0) * x(0); });
  const GridSpec narrow = GridSpec::line(-1, 1, 51);
  try {
    biconjugate(phi, narrow);
    FAIL() << "expected DualGridTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DualGridTooSmall);
  }
}

TEST(Legendre, AffineBoundaryContinuesToInfinity) {
  // |x| conjugated on a wide dual and back: the affine pieces extend.
  const GridSpec s = GridSpec::line(-2, 2, 101);
  const auto phi = GridFunction::sample(s, [](const Point& x) { return std::abs(x(0)); });
  const auto bi = biconjugate(phi);
  for (Index k = 0; k < s.size(); ++k) EXPECT_NEAR(bi(k), phi(k), 1e-12);
}

TEST(Legendre, AsplundCombinationOfQuadratics) {
  const GridSpec s = GridSpec::line(-2, 2, 201);
  const auto q = GridFunction::sample(s, [](const Point& x) { return 0.5 * x(0) * x(0); });
  const GridSpec dual = GridSpec::line(-4, 4, 401);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto c = asplund_combine(q, q, 1.0, t, dual);
    for (Index k = 0; k < s.size(); ++k) {
      const double x = s.point(k)(0);
      EXPECT_NEAR(c(k), x * x / (2 * (1 + t)), 1e-3);
    }
  }
  EXPECT_THROW(asplund_combine(q, q, 0.0, 1.0, dual), Error);
}

TEST(GridCalculus, EpiScaleOfQuadratic) {
  const GridSpec s = GridSpec::line(-2, 2, 201);
  const auto q = GridFunction::sample(s, [](const Point& x) { return 0.5 * x(0) * x(0); });
  const auto e = epi_scale(q, 2.0);
  // Linear interpolation of the quadratic: error at most t h^2 / 8.
  const double h = s.h(0);
  for (Index k = 0; k < s.size(); ++k) EXPECT_NEAR(e(k), s.point(k)(0) * s.point(k)(0) / 4, 2 * h * h / 8 + 1e-12);
  EXPECT_THROW(epi_scale(q, -1.0), Error);
}

TEST(GridCalculus, SubgradientUsesMidpointAtKinks) {
  const GridSpec s = GridSpec::line(-1, 1, 21);
  const auto a = GridFunction::sample(s, [](const Point& x) { return 3 * std::abs(x(0)); });
  EXPECT_DOUBLE_EQ(subgradient(a, make_point(0.0))(0), 0.0);
  EXPECT_NEAR(subgradient(a, make_point(0.5))(0), 3.0, 1e-12);
  EXPECT_NEAR(subgradient(a, make_point(-1.0))(0), -3.0, 1e-12);
  EXPECT_THROW(subgradient(a, make_point(5.0)), Error);
}

TEST(GridCalculus, InterpolationIsExactForBilinear) {
  const GridSpec s = GridSpec::cube(2, 1, 11);
  const auto f = GridFunction::sample(s, [](const Point& x) { return 1 + 2 * x(0) - x(1) + x(0) * x(1); });
  Gen gen(9);
  for (int k = 0; k < 100; ++k) {
    const Point x = gen.point(2, 1);
    EXPECT_NEAR(interpolate(f, x), 1 + 2 * x(0) - x(1) + x(0) * x(1), 1e-12);
  }
  EXPECT_EQ(interpolate(f, make_point(2.0, 0.0)), kInf);
}

TEST(GridCalculus, ConvexityCheck) {
  const GridSpec s = GridSpec::line(-1, 1, 21);
  EXPECT_TRUE(GridFunction::sample(s, [](const Point& x) { return x(0) * x(0); }).is_convex(1e-12));
  EXPECT_FALSE(GridFunction::sample(s, [](const Point& x) { return -x(0) * x(0); }).is_convex(1e-12));
}

TEST(GridCalculus, SinglePrecisionInstantiation) {
  using S = GridSpecT<float>;
  const S s = S::line(-2.f, 2.f, 101);
  const auto phi = GridFunctionT<float>::sample(s, [](const PointT<float>& x) { return 0.5f * x(0) * x(0); });
  const auto conj = legendre_transform(phi, S::line(-1.f, 1.f, 51));
  EXPECT_NEAR(conj(25), 0.0f, 1e-5f);
  EXPECT_NEAR(conj(0), 0.5f, 1e-3f);
}
