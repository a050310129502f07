#include "gen.hpp"

#include <gtest/gtest.h>

using namespace riesz;
using riesz::testing::Gen;

namespace {

QuadratureConfig cfg(double alpha) {
  QuadratureConfig q;
  q.alpha = alpha;
  return q;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(DiscreteMeasure, MergesIdenticalLocationsAndSorts) {
  const DiscreteMeasure m(Ambient::Euclidean, 1, {{make_point(2.0), 1}, {make_point(-1.0), 2}, {make_point(2.0), 0.5}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.atoms()[0].x(0), -1);
  EXPECT_EQ(m.atoms()[1].w, 1.5);
  EXPECT_EQ(m.total_mass(), 3.5);
  EXPECT_EQ(m.reflected().atoms()[0].x(0), -2);
  EXPECT_EQ(m.scaled(2).total_mass(), 7);
}

TEST(DiscreteMeasure, BinningKeepsMassAndMirrorSymmetry) {
  Gen gen(50);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 2;
    const DiscreteMeasure mu = symmetrize(DiscreteMeasure(Ambient::Euclidean, dim, gen.atoms(dim, 30, 3)));
    const DiscreteMeasure b = mu.binned(gen.uniform(0.1, 1));
    EXPECT_NEAR(b.total_mass(), mu.total_mass(), 1e-12 * mu.total_mass());
    EXPECT_LE(b.size(), mu.size());
    EXPECT_EQ(admissibility(b).evenness_defect, 0);
  }
}

TEST(EnergyMeasure, MassEqualsEnergy) {
  const std::vector<LogConcave> fs{LogConcave::indicator(SupportSet::interval(-1, 1)), LogConcave::exponential(1, 1),
                                   LogConcave::gaussian(1, 1), LogConcave::gaussian(2, 1),
                                   LogConcave::indicator(SupportSet::box(-1, 1, -1, 1))};
  for (double alpha : {1.0, 2.0})
    for (const auto& f : fs) {
      const double e = riesz_energy(f, cfg(alpha)).value;
      EXPECT_NEAR(riesz_energy_measure(f, cfg(alpha)).total_mass(), e, 1e-3 * e) << f.describe();
    }
}

TEST(EnergyMeasure, IndicatorIsOneOriginAtom) {
  const auto f = LogConcave::indicator(SupportSet::box(-1, 2, -1, 1));
  const auto r = riesz_energy_measure(f, cfg(1));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.atoms()[0].x.norm(), 0);
  EXPECT_NEAR(r.atoms()[0].w, riesz_energy(f, cfg(1)).value, 1e-12);
}

TEST(EnergyMeasure, GaussianProfile) {
  // The gradient of |x|^2/2 is the identity and I_1(f, y) = sqrt(2 pi) in 1-D,
  // so the density is sqrt(2 pi) e^{-y^2/2}.
  const auto r = riesz_energy_measure(LogConcave::gaussian(1, 1), cfg(1));
  EXPECT_NEAR(r.integrate([](const Point& y) { return std::abs(y(0)); }), 2 * std::sqrt(2 * kPi), 1e-2);
  EXPECT_NEAR(r.integrate([](const Point& y) { return y(0) * y(0); }), 2 * kPi, 1e-2);
  EXPECT_NEAR(r.integrate([](const Point& y) { return y(0); }), 0, 1e-12);
}

TEST(EnergyMeasure, ExponentialSplitsBetweenSlopes) {
  // grad |x| = sign x, so the atoms sit at +-1 (and 0 at the kink node).
  const auto r = riesz_energy_measure(LogConcave::exponential(1, 1), cfg(1));
  const double e = riesz_energy(LogConcave::exponential(1, 1), cfg(1)).value;
  double at_pm1 = 0;
  for (const auto& a : r.atoms())
    if (std::abs(std::abs(a.x(0)) - 1) < 1e-9) at_pm1 += a.w;
  EXPECT_NEAR(at_pm1, e, 1e-2 * e);
}

TEST(EnergyMeasure, SphericalMeasureOfInterval) {
  const auto f = LogConcave::indicator(SupportSet::interval(-1, 1));
  const auto s = spherical_energy_measure(f, cfg(1));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.ambient(), Ambient::Sphere);
  // Endpoint potentials: int_{-1}^{1} |x - 1|^0 = 2 at both ends.
  for (const auto& a : s.atoms()) EXPECT_NEAR(a.w, 2, 1e-9);
}

TEST(EnergyMeasure, SphericalMeasureOfSquareHasFourFacets) {
  const auto sq = LogConcave::indicator(SupportSet::box(-1, 1, -1, 1));
  const auto s = spherical_energy_measure(sq, cfg(1));
  ASSERT_EQ(s.size(), 4u);
  for (const auto& a : s.atoms()) EXPECT_NEAR(a.w, s.atoms()[0].w, 1e-9 * a.w);
  EXPECT_EQ(admissibility(DiscreteMeasure(Ambient::Euclidean, 2, s.atoms())).evenness_defect, 0);
}

TEST(Admissibility, RejectsConcentratedAndEmpty) {
  const DiscreteMeasure line(Ambient::Euclidean, 2, {{make_point(1, 1), 1}, {make_point(-1, -1), 1}});
  EXPECT_TRUE(admissibility(line).concentrated);
  EXPECT_EQ(code_of([&] { require_admissible(line); }), ErrorCode::InadmissibleMeasure);
  EXPECT_EQ(code_of([] { require_admissible(DiscreteMeasure(Ambient::Euclidean, 1, {})); }), ErrorCode::EmptyMeasure);
  const DiscreteMeasure odd(Ambient::Euclidean, 1, {{make_point(1.0), 1}, {make_point(-1.0), 2}});
  EXPECT_FALSE(admissibility(odd).even);
  EXPECT_EQ(code_of([&] { require_admissible(odd); }), ErrorCode::InadmissibleMeasure);
  EXPECT_EQ(code_of([] { admissibility(DiscreteMeasure(Ambient::Sphere, 1, {{make_point(1.0), 1}})); }),
            ErrorCode::AmbientMismatch);
}

TEST(Admissibility, OnlyAtomsAtTheOriginAreConcentrated) {
  const DiscreteMeasure origin(Ambient::Euclidean, 1, {{make_point(0.0), 4}});
  EXPECT_TRUE(admissibility(origin).concentrated);
}

TEST(Admissibility, SquareVerticesMinimalMomentOnDiagonal) {
  // Atoms at (+-1, +-1): sum |<x_i,u>| is 2 on the axes and sqrt(2) on the diagonals.
  std::vector<Atom> atoms;
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) atoms.push_back({make_point(a, b), 0.5});
  const auto r = admissibility(DiscreteMeasure(Ambient::Euclidean, 2, atoms));
  EXPECT_NEAR(r.min_directional_moment, std::sqrt(2.0), 1e-9);
  EXPECT_TRUE(r.admissible());
}

TEST(Admissibility, SymmetrizeAlwaysPassesEvenness) {
  Gen gen(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 1 + trial % 2;
    const DiscreteMeasure mu(Ambient::Euclidean, dim, gen.atoms(dim, 1 + trial % 11, 4));
    const DiscreteMeasure s = symmetrize(mu);
    EXPECT_EQ(admissibility(s).evenness_defect, 0);
    EXPECT_NEAR(s.total_mass(), mu.total_mass(), 1e-12 * mu.total_mass());
  }
}

TEST(CompareMeasures, IdenticalMeasuresHaveZeroResiduals) {
  Gen gen(8);
  const DiscreteMeasure mu = symmetrize(DiscreteMeasure(Ambient::Euclidean, 2, gen.atoms(2, 12, 2)));
  const auto c = compare_measures(mu, mu, 4);
  EXPECT_EQ(c.mass_residual, 0);
  EXPECT_EQ(c.moment_residual, 0);
  EXPECT_EQ(c.box_residual, 0);
  const auto d = compare_measures(mu, mu.scaled(1.1), 4);
  EXPECT_GT(d.mass_residual, 0.05);
}

TEST(MongeAmpere, GaussianDensityIsConsistent) {
  const auto d = monge_ampere_diagnostic(LogConcave::gaussian(1, 1), cfg(1));
  EXPECT_GT(d.compared_cells, 0);
  EXPECT_LT(d.mean_relative_deviation, 5e-2);
}
