#pragma once

#include "riesz/io.hpp"
#include "riesz/minkowski.hpp"
#include "riesz/variation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace riesz {

// Everything a command needs; a run is reproducible from this alone.
struct RunConfig {
  std::string command;  // conjugate, energy, potential, variation, measure,
                        // sphere-measure, admissibility, solve, verify, plotdata
  double alpha = 1;
  int dim = 1;
  int nodes = 0;  // 0: 513 (n=1) or 129 (n=2)
  std::string method = "direct";
  std::uint64_t seed = 20240601;
  std::int64_t mc_samples = 1'000'000;
  std::vector<double> epsilon;
  int threads = 1;

  std::string f, g;     // function records
  std::string mu;       // measure file
  std::string input;    // grid / measure / report file
  std::string output;   // output file, or directory for solve
  std::vector<double> at;  // potential evaluation point
  std::vector<std::string> routes;
  std::vector<double> t_list{0.02, 0.01};
  std::optional<double> beta1, beta2;
  std::optional<double> bin;  // measure cell width
  std::optional<double> dual_half;
  int dual_nodes = 0;  // 0: same as the input grid

  std::optional<double> tau;
  std::vector<double> penalty_weights{1e2, 1e3, 1e4, 1e5};
  int max_iters = 4000;
  int restarts = 2;
  double step_scale = 0.25;
  double momentum = 0.8;

  QuadratureConfig quadrature() const;
  SolverConfig solver() const;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
};

// Ordered report. Reals carry an error estimate or the token `exact`.
class Report {
 public:
  void value(const std::string& key, double v, std::optional<double> error = std::nullopt);
  void count(const std::string& key, long long v);
  void flag(const std::string& key, bool v);
  void text(const std::string& key, const std::string& v);

  std::string to_text() const;  // key=value lines
  std::string to_json() const;  // one JSON object with the same content

  struct Entry {
    std::string key;
    std::string rendered;
    enum class Kind { Real, Integer, Bool, Text } kind;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

// Public exit-code map.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitFormat = 2,
  kExitDualGridTooSmall = 3,
  kExitInvalidAlpha = 4,
  kExitOriginNotInterior = 5,
  kExitInadmissible = 6,
  kExitNoFeasiblePoint = 7,
  kExitVerificationFailed = 8,
  kExitRoutesDisagree = 9,
};
int exit_code(ErrorCode c);

// Residual thresholds for a verified Minkowski solution.
struct VerificationThresholds {
  double moment = 5e-2;
  double stationarity = 5e-2;
  double energy = 1e-6;  // |I(f) - |mu|| / |mu|
};

struct Outcome {
  int code = kExitOk;
  Report report;
  std::string error;  // message when code != 0 because of an exception
  std::string csv;    // plotdata output
};

// Runs one command. Library errors become exit codes; files named in the
// config are read and written here.
Outcome execute(const RunConfig& rc);

// |a - b| <= 2e-2 max(1, |a|, |b|) + ea + eb; equal infinities agree.
bool routes_agree(double a, double ea, double b, double eb);

}  // namespace riesz
