#pragma once

#include "riesz/energy_measure.hpp"

#include <optional>
#include <vector>

namespace riesz {

// phi(x) = max_k max(<a_k,x> + b_k, <-a_k,x> + b_k) = max_k |<a_k,x>| + b_k.
// Piece 0 is the frozen zero piece (a = 0, b = 0), so phi >= 0.
struct AffinePiece {
  Point a;
  double b = 0;
};

class MaxAffineEven {
 public:
  explicit MaxAffineEven(int dim, std::vector<AffinePiece> extra = {});

  int dim() const { return dim_; }
  // Including the zero piece at index 0.
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  double operator()(const Point& x) const;
  // Lowest index among the maximising pieces.
  std::size_t active_piece(const Point& x) const;
  double max_slope() const;  // max_k |a_k|_inf

  // phi* is the lower convex envelope of {(+-a_k, -b_k)}; +inf outside the
  // slope hull. Exact at the lattice nodes in 1-D; in 2-D the supremum is
  // taken over a primal lattice.
  GridFunction conjugate_on(const GridSpec& dual) const;
  // Cube of half-width max_slope().
  GridSpec natural_dual(int nodes) const;
  // phi + kappa for kappa >= 0 (the zero piece stays inactive).
  MaxAffineEven shifted(double kappa) const;

 private:
  int dim_;
  std::vector<AffinePiece> pieces_;
};

// sum_i w_i phi(x_i).
double objective(const MaxAffineEven& phi, const DiscreteMeasure& mu);

// d objective / d(a_k, b_k) through the active pieces.
struct PieceSubgradient {
  std::vector<Point> da;
  std::vector<double> db;
};
PieceSubgradient objective_subgradient(const MaxAffineEven& phi, const DiscreteMeasure& mu);

// I(e^{-phi*}) with phi* on the natural dual lattice (cfg.nodes per axis).
double constraint_value(const MaxAffineEven& phi, const QuadratureConfig& cfg);

// t0 with I(1_{t0 B}) = 1, and the feasible point (1/2) log tau + t0 |x|
// (|x| replaced by a circumscribed 128-gon gauge in 2-D).
double feasible_slope(int dim, double alpha);
MaxAffineEven feasible_point(int dim, double tau, double alpha);

struct SolverConfig {
  std::optional<double> tau;  // defaults to |mu|
  std::vector<double> penalty_weights{1e2, 1e3, 1e4, 1e5};
  double step_scale = 0.25;  // preconditioned step: eta_i = step_scale * d_i^2 / n
  double momentum = 0.8;
  int max_iters = 4000;      // per penalty stage
  int restarts = 2;
  std::uint64_t seed = 20240601;
  QuadratureConfig quad;

  void validate() const;
};

struct TestFunction {
  Point centre;
  double radius = 1;
  // Even tensor bump: beta((x - c)/r) + beta((x + c)/r), beta(s) = prod (1 - s_j^2)_+^2.
  double operator()(const Point& x) const;
};
std::vector<TestFunction> default_test_functions(const DiscreteMeasure& mu);

struct VerificationReport {
  MeasureComparison comparison;
  std::vector<double> stationarity;  // one residual per test function
  double max_stationarity = 0;
  int skipped = 0;  // test functions with negligible mass under mu
};

// Residuals of r against mu; verify_solution takes r = riesz_energy_measure(f).
VerificationReport verify_measures(const DiscreteMeasure& mu, const DiscreteMeasure& r,
                                   std::optional<std::vector<TestFunction>> zetas = std::nullopt);
VerificationReport verify_solution(const LogConcave& f, const DiscreteMeasure& mu, const QuadratureConfig& cfg,
                                   std::optional<std::vector<TestFunction>> zetas = std::nullopt);

struct SolverResult {
  MaxAffineEven phi0{1};
  std::vector<double> objective_trace;
  std::vector<double> stage_best;  // best feasible objective after each penalty stage
  double objective = 0;
  double tau = 0;
  double constraint_value = 0;
  double constraint_error = 0;  // quadrature error estimate
  bool active = false;
  double min_phi0 = 0;  // min of phi0 over the atoms
  int iterations = 0;
  std::uint64_t best_seed = 0;
  GridSpec dual;
  LogConcave f_solution = LogConcave::gaussian(1, 1);
  // Energy measure of f_solution, read off the pieces of phi0*.
  DiscreteMeasure energy_measure;
  VerificationReport verification;
};

// f = (|mu| / I(e^{-phi0*}))^{1/2} e^{-phi0*}.
LogConcave rescale_solution(const MaxAffineEven& phi0, const DiscreteMeasure& mu, const QuadratureConfig& cfg);

SolverResult solve(const DiscreteMeasure& mu, const SolverConfig& cfg);

}  // namespace riesz
