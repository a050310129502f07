#pragma once

#include "riesz/grid.hpp"
#include "riesz/support.hpp"

#include <optional>
#include <string>
#include <variant>

namespace riesz {

// phi(x) >= b|x| + c with b > 0.
struct GrowthCertificate {
  double b = 0;
  double c = 0;
};

// Least-violation pair for psi* <= beta1 phi* + beta2 on a dual lattice.
struct GrowthCondition {
  double beta1 = 1;
  double beta2 = 0;
  double max_violation = 0;
  // beta2 is fitted on the inner half of the lattice; violation is measured on all of it.
  GridSpec checked_on;
};

// Per-node trapezoid weights on the finite region of phi: every node owns
// half a cell towards each finite neighbour along each axis.
Eigen::ArrayXd trapezoid_weights(const GridFunction& phi);

// f = e^{-phi}, phi proper convex lsc with 0 < J(f) < inf.
class LogConcave {
 public:
  struct Gaussian {  // e^{-a|x-center|^2/2 + b}
    double a = 1, b = 0;
    Point center;
  };
  struct Exponential {  // e^{-b|x-center| + c}
    double b = 1, c = 0;
    Point center;
  };
  struct Indicator {  // m * 1_K
    SupportSet set;
    double m = 1;
  };
  struct Grid {
    GridFunction phi;
    GridFunction conj;  // on the cached dual lattice
  };
  using Backing = std::variant<Gaussian, Exponential, Indicator, Grid>;

  static LogConcave gaussian(int dim, double a, double b = 0, std::optional<Point> center = std::nullopt);
  static LogConcave exponential(int dim, double b, double c = 0, std::optional<Point> center = std::nullopt);
  static LogConcave indicator(const SupportSet& k, double m = 1);
  // Grid-backed f vanishes outside the lattice box.
  static LogConcave from_grid(const GridFunction& phi);
  static LogConcave from_grid(const GridFunction& phi, const GridSpec& dual);

  int dim() const { return dim_; }
  const Backing& backing() const { return backing_; }
  bool is_grid() const { return std::holds_alternative<Grid>(backing_); }

  double phi(const Point& x) const;
  double value(const Point& x) const { return std::exp(-phi(x)); }
  double conjugate(const Point& y) const;
  // Element of the subdifferential (midpoint convention at kinks).
  Point gradient(const Point& x) const;

  const SupportSet& support() const { return support_; }
  double total_mass() const { return mass_; }
  bool has_growth_certificate() const { return growth_.has_value(); }
  GrowthCertificate growth_certificate() const;

  // Box used for quadrature: analytic families are truncated where f has
  // decayed far below double precision relative to its peak.
  GridSpec integration_grid(int nodes_per_axis = 0) const;
  static int default_nodes(int dim) { return dim == 1 ? 513 : 129; }
  GridFunction sample_phi(const GridSpec& spec) const;
  // Bound on |grad phi| over the integration box (sizes dual lattices).
  double slope_bound() const;

  LogConcave translated(const Point& x0) const;
  LogConcave scaled(double c) const;      // c f
  LogConcave dilated(double c) const;     // f(c x)
  LogConcave epi_scaled(double t) const;  // t.f = e^{-t phi(x/t)}
  // e^{beta2} (beta1 . f)
  LogConcave proportional(double beta1, double beta2) const;

  std::string describe() const;

 private:
  LogConcave(int dim, Backing b);
  void finish();

  int dim_ = 1;
  Backing backing_;
  SupportSet support_;
  double mass_ = 0;
  std::optional<GrowthCertificate> growth_;
};

SupportSet support_set(const LogConcave& f);
double total_mass(const LogConcave& f);
GrowthCertificate growth_certificate(const LogConcave& f);
double support_function(const SupportSet& k, const Point& u);
double radial_function(const SupportSet& k, const Point& u);

// Grid support: hull of finite nodes dilated by half a cell, clipped to the box.
SupportSet grid_support(const GridFunction& phi);
std::optional<GrowthCertificate> grid_growth_certificate(const GridFunction& phi);

struct AsplundOptions {
  // Force the lattice route even when a closed form exists.
  bool force_grid = false;
  std::optional<GridSpec> dual;
  std::optional<GridSpec> primal;
};

// f (+) t.g = e^{-(phi* + t psi*)*}.
LogConcave asplund_sum(const LogConcave& f, const LogConcave& g, double t, const AsplundOptions& opt = {});

// Symmetric dual cube whose node set contains +-slope exactly, with ~25% margin.
GridSpec slope_dual_spec(int dim, double slope, int nodes);

// Conjugate of f sampled on a dual lattice (closed form when analytic).
GridFunction conjugate_on(const LogConcave& f, const GridSpec& dual);

GrowthCondition check_growth_condition(const LogConcave& f, const LogConcave& g,
                                       std::optional<double> beta1_hint = std::nullopt,
                                       std::optional<GridSpec> dual = std::nullopt);

}  // namespace riesz
