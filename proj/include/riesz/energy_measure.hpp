#pragma once

#include "riesz/quadrature.hpp"

#include <optional>
#include <vector>

namespace riesz {

enum class Ambient { Euclidean, Sphere };
const char* to_string(Ambient a);

struct Atom {
  Point x;
  double w = 0;
};

// Finite atomic measure on R^n or S^{n-1}. Atoms are kept sorted
// lexicographically with bitwise-identical locations merged.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(Ambient ambient, int dim, std::vector<Atom> atoms);

  Ambient ambient() const { return ambient_; }
  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;

  DiscreteMeasure reflected() const;
  DiscreteMeasure scaled(double c) const;
  // Merge atoms sharing a cell of the mirror-symmetric lattice of width
  // `cell`; merged atoms sit at the cell centre.
  DiscreteMeasure binned(double cell) const;
  // Integral of g against the measure.
  template <class Fn>
  double integrate(Fn&& g) const {
    double s = 0;
    for (const auto& a : atoms_) s += a.w * g(a.x);
    return s;
  }

 private:
  Ambient ambient_ = Ambient::Euclidean;
  int dim_ = 1;
  std::vector<Atom> atoms_;
};

// Push-forward of f(y) I(f, y) dy under the gradient of phi.
DiscreteMeasure riesz_energy_measure(const LogConcave& f, const QuadratureConfig& cfg,
                                     std::optional<double> cell = std::nullopt);
// Atoms at outward facet normals weighted by the boundary integrals of f I(f, .).
DiscreteMeasure spherical_energy_measure(const LogConcave& f, const QuadratureConfig& cfg);

struct AdmissibilityReport {
  double total_mass = 0;
  double evenness_defect = 0;
  double min_directional_moment = 0;
  Point min_direction;
  double first_moment = 0;
  bool even = false;          // defect <= 1e-12 |mu| max|x|
  bool concentrated = false;  // min moment <= 1e-9 first moment
  bool admissible() const { return even && !concentrated; }
};

AdmissibilityReport admissibility(const DiscreteMeasure& mu);
// Throws EmptyMeasure or InadmissibleMeasure.
void require_admissible(const DiscreteMeasure& mu);

// 720 equally spaced directions in 2-D, {-1, +1} in 1-D.
std::vector<Point> direction_net(int dim);

struct MeasureComparison {
  double mass_residual = 0;
  double moment_residual = 0;
  double box_residual = 0;
  int degree = 0;
};
MeasureComparison compare_measures(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int degree);

DiscreteMeasure symmetrize(const DiscreteMeasure& mu);

// Density check: on a dual lattice where phi* is twice differentiable,
// I(f, grad phi*(z)) f(grad phi*(z)) det D^2 phi*(z) against the atom histogram.
struct MongeAmpereDiagnostic {
  double max_relative_deviation = 0;
  double mean_relative_deviation = 0;
  int compared_cells = 0;
};
MongeAmpereDiagnostic monge_ampere_diagnostic(const LogConcave& f, const QuadratureConfig& cfg);

}  // namespace riesz
