#pragma once

#include "riesz/logconcave.hpp"

#include <cstdint>
#include <vector>

namespace riesz {

enum class QuadMethod { DirectDiagonalCorrected, EpsilonRegularized, MonteCarlo };

const char* to_string(QuadMethod m);
QuadMethod parse_quad_method(const std::string& s);

struct QuadratureConfig {
  QuadMethod method = QuadMethod::DirectDiagonalCorrected;
  // Decreasing; empty means (4h)^2, (2h)^2, h^2 with h the finest spacing.
  std::vector<double> epsilon_schedule;
  std::int64_t mc_samples = 1'000'000;
  std::uint64_t seed = 20240601;
  double alpha = 1.0;
  // Nodes per axis for analytic backings; 0 selects 513 (n=1) or 129 (n=2).
  int nodes = 0;

  void validate() const;
};

struct EnergyReport {
  double value = 0;
  double estimated_error = 0;
  QuadMethod method_used = QuadMethod::DirectDiagonalCorrected;
  double tail_bound = 0;
};

// f sampled on its integration lattice.
struct SampledFunction {
  GridSpec spec;
  Eigen::ArrayXd phi;
  Eigen::ArrayXd f;  // e^{-phi}, 0 where phi = +inf
  Eigen::ArrayXd w;  // trapezoid weights on the finite region
  Eigen::ArrayXd w_box;  // trapezoid weights of the whole box
};

SampledFunction sample(const LogConcave& f, const GridSpec& spec);
SampledFunction sample(const LogConcave& f, const QuadratureConfig& cfg);

// Potentials I_alpha(f, x_i) at every node with f > 0 (zero elsewhere).
struct PotentialField {
  SampledFunction s;
  Eigen::ArrayXd potential;
  EnergyReport energy;
};

// Shared by energy, weighted energies, variations and energy measures.
// Monte Carlo configurations fall back to the direct rule for the field.
PotentialField potential_field(const LogConcave& f, const QuadratureConfig& cfg);

double riesz_potential(const LogConcave& f, const Point& y, const QuadratureConfig& cfg);
// Same rule, reusing the lattice of an existing field.
double riesz_potential(const PotentialField& pf, const LogConcave& f, const Point& y, const QuadratureConfig& cfg);
EnergyReport riesz_energy(const LogConcave& f, const QuadratureConfig& cfg);
EnergyReport chord_energy(const SupportSet& k, const QuadratureConfig& cfg);

// sum_i W_i w_i f_i I_i over the integration lattice of f. `w` is a node
// field on that lattice; nodes with f = 0 contribute nothing.
double weighted_energy(const LogConcave& f, const Eigen::ArrayXd& w, const QuadratureConfig& cfg);
// w = phi, certified through the growth bound t e^{-t/2} <= 2/e.
double weighted_energy_phi(const LogConcave& f, const QuadratureConfig& cfg);
double weighted_energy(const PotentialField& pf, const Eigen::ArrayXd& w);

// Certified truncation bound for integrating over `box` only.
double tail_bound(const LogConcave& f, const GridSpec& box, double alpha);

// I_alpha(1_B) for the unit ball.
double unit_ball_energy(int dim, double alpha);

// Exact integral of |x - y|^{alpha - n} (or its eps-regularized form) over a box.
double box_kernel_integral(const GridSpec& box, const Point& y, double alpha, double eps);

namespace numerics {
// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
// Upper incomplete gamma Gamma(s, x) for s > 0, x >= 0.
double upper_gamma(double s, double x);
// Counter-based uniform in [0, 1).
double uniform(std::uint64_t seed, std::uint64_t counter);
}  // namespace numerics

}  // namespace riesz
