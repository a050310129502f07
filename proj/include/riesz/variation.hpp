#pragma once

#include "riesz/quadrature.hpp"

#include <functional>
#include <string>
#include <vector>

namespace riesz {

enum class VariationRoute { ClosedFF, BoundaryFF, GeneralFG, Proportional, FiniteDifference };
const char* to_string(VariationRoute r);

struct FiniteDifferenceRow {
  double t = 0;
  double energy = 0;    // I(f (+) t.g)
  double quotient = 0;  // (energy - baseline) / (2t)
};

struct VariationReport {
  double value = 0;
  VariationRoute route = VariationRoute::ClosedFF;
  double interior_term = 0;
  double boundary_term = 0;
  double estimated_error = 0;
  // Finite differences: baseline energy, quotients and the Richardson tableau
  // (row k extrapolates k + 1 quotients).
  double baseline = 0;
  double baseline_error = 0;
  std::vector<FiniteDifferenceRow> table;
  std::vector<std::vector<double>> richardson;
  // General route: set when the growth check reports a violation.
  bool growth_verified = true;
  std::string warning;
  // Translation applied to f so that the origin is interior to its support.
  Point shift;
};

VariationReport delta_ff_closed(const LogConcave& f, const QuadratureConfig& cfg);
VariationReport delta_ff_boundary_form(const LogConcave& f, const QuadratureConfig& cfg);
VariationReport delta_fg_general(const LogConcave& f, const LogConcave& g, const QuadratureConfig& cfg);
VariationReport delta_fg_proportional(const LogConcave& f, double beta1, double beta2, const QuadratureConfig& cfg);
VariationReport delta_finite_difference(const LogConcave& f, const LogConcave& g, const std::vector<double>& t_list,
                                        const QuadratureConfig& cfg);

struct BoundaryIntegral {
  double value = 0;
  double estimated_error = 0;
};

// int over the boundary of K_f of weight(nu(x)) f(x) I(f, x). Whole-space
// supports give exactly 0; in 1-D only finite endpoints contribute.
BoundaryIntegral boundary_quadrature(const LogConcave& f, const std::function<double(const Point&)>& weight,
                                     const QuadratureConfig& cfg);

// Per-facet boundary integrals of f(x) I(f, x) (weight 1): one entry per
// finite endpoint in 1-D, per polygon edge in 2-D.
struct FacetIntegral {
  SupportSet::Facet facet;
  double value = 0;
};
std::vector<FacetIntegral> facet_integrals(const LogConcave& f, const QuadratureConfig& cfg);

}  // namespace riesz
