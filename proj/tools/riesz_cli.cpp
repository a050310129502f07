// Command-line front-end: parses flags into a RunConfig and runs it.

#include "riesz/app.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace riesz;

int main(int argc, char** argv) {
  CLI::App app{"Riesz alpha-energy toolkit for log-concave functions"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  RunConfig rc;
  bool json = false;
  std::string config_file, dump_config;
  std::vector<std::string> routes_csv;
  std::string t_csv, at_csv, eps_csv, penalties_csv;

  app.add_option("--alpha", rc.alpha, "Riesz exponent alpha > 0");
  app.add_option("--dim", rc.dim, "Dimension (1 or 2)");
  app.add_option("--grid", rc.nodes, "Nodes per axis for analytic functions (odd; 0 = default)");
  app.add_option("--method", rc.method, "Quadrature: direct, epsilon, mc");
  app.add_option("--seed", rc.seed, "Seed for Monte Carlo and solver restarts");
  app.add_option("--threads", rc.threads, "Worker threads (results do not depend on it)");
  app.add_option("--mc-samples", rc.mc_samples, "Monte Carlo sample count");
  app.add_option("--epsilon", eps_csv, "Comma-separated decreasing epsilon schedule");
  app.add_flag("--json", json, "Emit the report as one JSON object");
  app.add_option("--config", config_file, "Run the configuration in this JSON file instead of a subcommand");
  app.add_option("--dump-config", dump_config, "Write the effective run configuration as JSON");

  auto* conj = app.add_subcommand("conjugate", "Legendre transform of a grid file");
  conj->add_option("--in", rc.input, "Input grid file")->required();
  conj->add_option("--out", rc.output, "Output grid file");
  conj->add_option("--dual-half", rc.dual_half, "Half-width of the dual cube");
  conj->add_option("--dual-nodes", rc.dual_nodes, "Nodes per axis of the dual cube");

  auto* energy = app.add_subcommand("energy", "Riesz alpha-energy of f");
  energy->add_option("--f,--analytic", rc.f, "Function record")->required();

  auto* pot = app.add_subcommand("potential", "Riesz alpha-potential of f at a point");
  pot->add_option("--f,--analytic", rc.f, "Function record")->required();
  pot->add_option("--at", at_csv, "Point, comma-separated")->required();

  auto* var = app.add_subcommand("variation", "First variation of the energy by every requested route");
  var->add_option("--f", rc.f, "Function record")->required();
  var->add_option("--g", rc.g, "Perturbation record (default: g = f)");
  var->add_option("--routes", routes_csv, "closed, boundary, general, proportional, fd")->delimiter(',');
  var->add_option("--t", t_csv, "Comma-separated decreasing finite-difference steps");
  var->add_option("--beta1", rc.beta1, "Proportional perturbation g = e^{beta2} (beta1 . f)");
  var->add_option("--beta2", rc.beta2, "See --beta1");

  auto* meas = app.add_subcommand("measure", "Riesz alpha-energy measure of f");
  meas->add_option("--f", rc.f, "Function record")->required();
  meas->add_option("--bin", rc.bin, "Bin atoms on a mirror-symmetric lattice of this width");
  meas->add_option("--out", rc.output, "Output measure file");

  auto* smeas = app.add_subcommand("sphere-measure", "Spherical energy measure of f");
  smeas->add_option("--f", rc.f, "Function record")->required();
  smeas->add_option("--out", rc.output, "Output measure file");

  auto* adm = app.add_subcommand("admissibility", "Admissibility of a measure as Minkowski data");
  adm->add_option("--mu", rc.mu, "Measure file")->required();

  auto* sol = app.add_subcommand("solve", "Solve the even Minkowski problem for a measure");
  sol->add_option("--mu", rc.mu, "Measure file")->required();
  sol->add_option("--out", rc.output, "Output directory (solution.grid, solution.measure, report.txt)");
  sol->add_option("--tau", rc.tau, "Constraint level (default: total mass)");
  sol->add_option("--penalties", penalties_csv, "Comma-separated increasing penalty weights");
  sol->add_option("--max-iters", rc.max_iters, "Iterations per penalty stage");
  sol->add_option("--restarts", rc.restarts, "Seeded restarts");
  sol->add_option("--step-scale", rc.step_scale, "Preconditioned step scale");
  sol->add_option("--momentum", rc.momentum, "Momentum in [0, 1)");

  auto* ver = app.add_subcommand("verify", "Compare the energy measure of f with a measure");
  ver->add_option("--f", rc.f, "Function record")->required();
  ver->add_option("--mu", rc.mu, "Measure file")->required();

  auto* plot = app.add_subcommand("plotdata", "CSV from a grid, measure or report file");
  plot->add_option("--in", rc.input, "Input file")->required();
  plot->add_option("--out", rc.output, "Output CSV (default: stdout)");

  for (auto* s : {conj, energy, pot, var, meas, smeas, adm, sol, ver, plot}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFormat;
  }

  auto split = [](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');) out.push_back(parse_double(t));
    return out;
  };
  if (config_file.empty() && app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitFormat;
  }
  try {
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      if (!is) fail(ErrorCode::FormatError, "cannot open " + config_file);
      std::stringstream buf;
      buf << is.rdbuf();
      rc = RunConfig::from_json(buf.str());
    } else {
      rc.command = app.get_subcommands().front()->get_name();
      if (!eps_csv.empty()) rc.epsilon = split(eps_csv);
      if (!t_csv.empty()) rc.t_list = split(t_csv);
      if (!at_csv.empty()) rc.at = split(at_csv);
      if (!penalties_csv.empty()) rc.penalty_weights = split(penalties_csv);
      rc.routes = routes_csv;
    }
    if (!dump_config.empty()) {
      std::ofstream os(dump_config);
      if (!os) fail(ErrorCode::FormatError, "cannot write " + dump_config);
      os << rc.to_json() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.code());
  }

  const Outcome out = execute(rc);
  if (rc.command == "plotdata" && rc.output.empty() && out.code == 0) {
    std::cout << out.csv;
  } else {
    std::cout << (json ? out.report.to_json() : out.report.to_text());
  }
  if (!out.error.empty()) std::cerr << out.error << '\n';
  return out.code;
}
