#include "riesz/app.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace riesz {

using ojson = nlohmann::ordered_json;

QuadratureConfig RunConfig::quadrature() const {
  QuadratureConfig q;
  q.method = parse_quad_method(method);
  q.epsilon_schedule = epsilon;
  q.mc_samples = mc_samples;
  q.seed = seed;
  q.alpha = alpha;
  q.nodes = nodes;
  q.validate();
  return q;
}

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.tau = tau;
  s.penalty_weights = penalty_weights;
  s.max_iters = max_iters;
  s.restarts = restarts;
  s.step_scale = step_scale;
  s.momentum = momentum;
  s.seed = seed;
  s.quad = quadrature();
  s.validate();
  return s;
}

namespace {

template <class T>
ojson opt(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

template <class T>
void get_opt(const ojson& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j[key].is_null()) out.reset();
  else out = j[key].get<T>();
}

template <class T>
void get(const ojson& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

}  // namespace

std::string RunConfig::to_json() const {
  ojson j;
  j["command"] = command;
  j["alpha"] = alpha;
  j["dim"] = dim;
  j["nodes"] = nodes;
  j["method"] = method;
  j["seed"] = seed;
  j["mc_samples"] = mc_samples;
  j["epsilon"] = epsilon;
  j["threads"] = threads;
  j["f"] = f;
  j["g"] = g;
  j["mu"] = mu;
  j["input"] = input;
  j["output"] = output;
  j["at"] = at;
  j["routes"] = routes;
  j["t_list"] = t_list;
  j["beta1"] = opt(beta1);
  j["beta2"] = opt(beta2);
  j["bin"] = opt(bin);
  j["dual_half"] = opt(dual_half);
  j["dual_nodes"] = dual_nodes;
  j["tau"] = opt(tau);
  j["penalty_weights"] = penalty_weights;
  j["max_iters"] = max_iters;
  j["restarts"] = restarts;
  j["step_scale"] = step_scale;
  j["momentum"] = momentum;
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  RunConfig c;
  try {
    const ojson j = ojson::parse(text);
    if (!j.is_object()) fail(ErrorCode::FormatError, "run config must be a JSON object");
    get(j, "command", c.command);
    get(j, "alpha", c.alpha);
    get(j, "dim", c.dim);
    get(j, "nodes", c.nodes);
    get(j, "method", c.method);
    get(j, "seed", c.seed);
    get(j, "mc_samples", c.mc_samples);
    get(j, "epsilon", c.epsilon);
    get(j, "threads", c.threads);
    get(j, "f", c.f);
    get(j, "g", c.g);
    get(j, "mu", c.mu);
    get(j, "input", c.input);
    get(j, "output", c.output);
    get(j, "at", c.at);
    get(j, "routes", c.routes);
    get(j, "t_list", c.t_list);
    get_opt(j, "beta1", c.beta1);
    get_opt(j, "beta2", c.beta2);
    get_opt(j, "bin", c.bin);
    get_opt(j, "dual_half", c.dual_half);
    get(j, "dual_nodes", c.dual_nodes);
    get_opt(j, "tau", c.tau);
    get(j, "penalty_weights", c.penalty_weights);
    get(j, "max_iters", c.max_iters);
    get(j, "restarts", c.restarts);
    get(j, "step_scale", c.step_scale);
    get(j, "momentum", c.momentum);
  } catch (const ojson::exception& e) {
    fail(ErrorCode::FormatError, std::string("run config: ") + e.what());
  }
  return c;
}

void Report::value(const std::string& key, double v, std::optional<double> error) {
  entries_.push_back({key, format_double(v), Entry::Kind::Real});
  entries_.push_back({key + "_error", error ? format_double(*error) : "exact", Entry::Kind::Real});
}

void Report::count(const std::string& key, long long v) {
  entries_.push_back({key, std::to_string(v), Entry::Kind::Integer});
}

void Report::flag(const std::string& key, bool v) {
  entries_.push_back({key, v ? "true" : "false", Entry::Kind::Bool});
}

void Report::text(const std::string& key, const std::string& v) { entries_.push_back({key, v, Entry::Kind::Text}); }

std::string Report::to_text() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + '=' + e.rendered + '\n';
  return out;
}

std::string Report::to_json() const {
  ojson j = ojson::object();
  for (const auto& e : entries_) {
    switch (e.kind) {
      case Entry::Kind::Real:
        // Infinities and the `exact` token stay strings.
        if (e.rendered == "exact" || e.rendered.find("inf") != std::string::npos) j[e.key] = e.rendered;
        else j[e.key] = parse_double(e.rendered);
        break;
      case Entry::Kind::Integer: j[e.key] = std::stoll(e.rendered); break;
      case Entry::Kind::Bool: j[e.key] = e.rendered == "true"; break;
      case Entry::Kind::Text: j[e.key] = e.rendered; break;
    }
  }
  return j.dump() + '\n';
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::FormatError: return kExitFormat;
    case ErrorCode::DualGridTooSmall: return kExitDualGridTooSmall;
    case ErrorCode::InvalidAlpha: return kExitInvalidAlpha;
    case ErrorCode::OriginNotInterior: return kExitOriginNotInterior;
    case ErrorCode::InadmissibleMeasure:
    case ErrorCode::EmptyMeasure: return kExitInadmissible;
    case ErrorCode::NoFeasiblePoint: return kExitNoFeasiblePoint;
    default: return kExitOther;
  }
}

bool routes_agree(double a, double ea, double b, double eb) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 2e-2 * std::max({1.0, std::abs(a), std::abs(b)}) + ea + eb;
}

namespace {

Point point_from(const std::vector<double>& v, int dim) {
  if (static_cast<int>(v.size()) != dim) fail(ErrorCode::InvalidArgument, "point needs one coordinate per dimension");
  return dim == 1 ? make_point(v[0]) : make_point(v[0], v[1]);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::FormatError, "cannot write " + path);
  os << text;
}

void report_energy(Report& r, const std::string& key, const EnergyReport& e) {
  r.value(key, e.value, e.estimated_error);
  r.value(key + "_tail_bound", e.tail_bound, std::nullopt);
  r.text(key + "_method", to_string(e.method_used));
}

void report_measure(Report& r, const DiscreteMeasure& mu) {
  r.count("atoms", static_cast<long long>(mu.size()));
  r.value("mass", mu.total_mass(), std::nullopt);
}

Outcome cmd_conjugate(const RunConfig& rc) {
  const GridFunction phi = load_grid(rc.input);
  GridSpec dual = default_dual_spec(phi);
  if (rc.dual_half) {
    const int n = rc.dual_nodes > 0 ? rc.dual_nodes : phi.spec().nodes[0];
    dual = GridSpec::cube(phi.dim(), *rc.dual_half, n);
  } else if (rc.dual_nodes > 0) {
    dual = GridSpec::cube(phi.dim(), dual.hi[0], rc.dual_nodes);
  }
  const GridFunction conj = legendre_transform_checked(phi, dual);
  if (!rc.output.empty()) save_grid(rc.output, conj);
  Outcome out;
  out.report.count("dim", phi.dim());
  out.report.count("input_nodes", static_cast<long long>(phi.size()));
  out.report.count("output_nodes", static_cast<long long>(conj.size()));
  out.report.value("dual_half_width", dual.hi[0]);
  out.report.count("finite_outputs", static_cast<long long>(conj.finite_count()));
  out.report.value("min_value", conj.min_value());
  if (!rc.output.empty()) out.report.text("output", rc.output);
  return out;
}

Outcome cmd_energy(const RunConfig& rc) {
  const QuadratureConfig q = rc.quadrature();
  const LogConcave f = parse_function(rc.f, rc.dim);
  Outcome out;
  out.report.text("f", f.describe());
  out.report.value("alpha", q.alpha);
  report_energy(out.report, "energy", riesz_energy(f, q));
  return out;
}

Outcome cmd_potential(const RunConfig& rc) {
  const QuadratureConfig q = rc.quadrature();
  const LogConcave f = parse_function(rc.f, rc.dim);
  const Point y = point_from(rc.at, rc.dim);
  const double v = riesz_potential(f, y, q);
  // Error: difference to the half-resolution lattice for analytic f, the
  // relative energy error for lattice-backed f.
  double err = 0;
  if (!f.is_grid()) {
    QuadratureConfig c = q;
    const int n = q.nodes > 0 ? q.nodes : LogConcave::default_nodes(rc.dim);
    c.nodes = (n - 1) / 2 + 1;
    if (c.nodes % 2 == 0) ++c.nodes;
    err = std::abs(v - riesz_potential(f, y, c));
  } else {
    const EnergyReport e = riesz_energy(f, q);
    err = e.value > 0 ? std::abs(v) * e.estimated_error / e.value : 0;
  }
  Outcome out;
  out.report.text("f", f.describe());
  out.report.value("alpha", q.alpha);
  for (int a = 0; a < rc.dim; ++a) out.report.value(a == 0 ? "y0" : "y1", y(a));
  out.report.value("potential", v, err);
  return out;
}

Outcome cmd_variation(const RunConfig& rc) {
  const QuadratureConfig q = rc.quadrature();
  const LogConcave f = parse_function(rc.f, rc.dim);
  const bool same = rc.g.empty() && !rc.beta1;
  std::optional<LogConcave> g;
  if (rc.beta1) {
    if (!rc.g.empty()) fail(ErrorCode::InvalidArgument, "give either --g or --beta1, not both");
    g = f.proportional(*rc.beta1, rc.beta2.value_or(0));
  } else if (!rc.g.empty()) {
    g = parse_function(rc.g, rc.dim);
  }
  const LogConcave& gg = g ? *g : f;
  std::vector<std::string> routes = rc.routes;
  if (routes.empty()) {
    if (same) routes = {"closed", "boundary", "fd"};
    else if (rc.beta1) routes = {"proportional", "general", "fd"};
    else routes = {"general", "fd"};
  }
  struct Row {
    std::string name;
    VariationReport rep;
  };
  std::vector<Row> rows;
  for (const auto& name : routes) {
    if ((name == "closed" || name == "boundary") && !same)
      fail(ErrorCode::InvalidArgument, "route " + name + " needs g = f");
    if (name == "proportional" && !rc.beta1) fail(ErrorCode::InvalidArgument, "route proportional needs --beta1");
    if (name == "closed") rows.push_back({name, delta_ff_closed(f, q)});
    else if (name == "boundary") rows.push_back({name, delta_ff_boundary_form(f, q)});
    else if (name == "general") rows.push_back({name, delta_fg_general(f, gg, q)});
    else if (name == "proportional") rows.push_back({name, delta_fg_proportional(f, *rc.beta1, rc.beta2.value_or(0), q)});
    else if (name == "fd") rows.push_back({name, delta_finite_difference(f, gg, rc.t_list, q)});
    else fail(ErrorCode::InvalidArgument, "unknown route " + name);
  }
  Outcome out;
  Report& r = out.report;
  r.text("f", f.describe());
  r.text("g", gg.describe());
  r.value("alpha", q.alpha);
  for (const auto& row : rows) {
    const auto& v = row.rep;
    const std::string p = row.name + '.';
    r.text(p + "route", to_string(v.route));
    r.value(p + "value", v.value, v.estimated_error);
    r.value(p + "interior", v.interior_term, v.estimated_error);
    r.value(p + "boundary", v.boundary_term, v.estimated_error);
    if (v.shift.size() > 0 && v.shift.norm() > 0)
      for (Index a = 0; a < v.shift.size(); ++a) r.value(p + "shift" + std::to_string(a), v.shift(a));
    if (!v.warning.empty()) r.text(p + "warning", v.warning);
    if (v.route == VariationRoute::FiniteDifference) {
      r.value(p + "baseline", v.baseline, v.baseline_error);
      for (std::size_t k = 0; k < v.table.size(); ++k) {
        const std::string q2 = p + "t" + std::to_string(k) + '.';
        r.value(q2 + "t", v.table[k].t);
        r.value(q2 + "quotient", v.table[k].quotient, v.estimated_error);
      }
    }
  }
  bool all = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const auto& a = rows[i].rep;
      const auto& b = rows[j].rep;
      const bool ok = routes_agree(a.value, a.estimated_error, b.value, b.estimated_error);
      all = all && ok;
      r.flag("agree." + rows[i].name + '.' + rows[j].name, ok);
      if (!ok) r.value("diff." + rows[i].name + '.' + rows[j].name, a.value - b.value, a.estimated_error + b.estimated_error);
    }
  }
  r.flag("routes_agree", all);
  if (!all) out.code = kExitRoutesDisagree;
  return out;
}

Outcome cmd_measure(const RunConfig& rc, bool sphere) {
  const QuadratureConfig q = rc.quadrature();
  const LogConcave f = parse_function(rc.f, rc.dim);
  const DiscreteMeasure mu = sphere ? spherical_energy_measure(f, q) : riesz_energy_measure(f, q, rc.bin);
  if (!rc.output.empty()) save_measure(rc.output, mu);
  Outcome out;
  Report& r = out.report;
  r.text("f", f.describe());
  r.value("alpha", q.alpha);
  r.text("ambient", to_string(mu.ambient()));
  report_measure(r, mu);
  if (!sphere) {
    const EnergyReport e = riesz_energy(f, q);
    report_energy(r, "energy", e);
    r.value("mass_residual", e.value > 0 ? std::abs(mu.total_mass() - e.value) / e.value : 0.0,
            e.value > 0 ? e.estimated_error / e.value : 0.0);
  }
  if (!rc.output.empty()) r.text("output", rc.output);
  return out;
}

void report_admissibility(Report& r, const AdmissibilityReport& a) {
  r.value("total_mass", a.total_mass);
  r.value("evenness_defect", a.evenness_defect);
  r.value("min_directional_moment", a.min_directional_moment);
  for (Index k = 0; k < a.min_direction.size(); ++k)
    r.value("min_direction" + std::to_string(k), a.min_direction(k));
  r.value("first_moment", a.first_moment);
  r.flag("even", a.even);
  r.flag("concentrated", a.concentrated);
  r.flag("admissible", a.admissible());
}

Outcome cmd_admissibility(const RunConfig& rc) {
  const DiscreteMeasure mu = load_measure(rc.mu);
  const AdmissibilityReport a = admissibility(mu);
  Outcome out;
  report_measure(out.report, mu);
  report_admissibility(out.report, a);
  if (!a.admissible()) out.code = kExitInadmissible;
  return out;
}

void report_verification(Report& r, const VerificationReport& v) {
  r.value("mass_residual", v.comparison.mass_residual);
  r.value("moment_residual", v.comparison.moment_residual);
  r.count("moment_degree", v.comparison.degree);
  r.value("box_residual", v.comparison.box_residual);
  r.value("max_stationarity", v.max_stationarity);
  r.count("test_functions", static_cast<long long>(v.stationarity.size()));
  r.count("test_functions_skipped", v.skipped);
}

bool passes(const VerificationReport& v, const VerificationThresholds& t) {
  return v.comparison.moment_residual <= t.moment && v.max_stationarity <= t.stationarity;
}

Outcome cmd_solve(const RunConfig& rc) {
  const SolverConfig sc = rc.solver();
  const DiscreteMeasure mu = load_measure(rc.mu);
  const SolverResult res = solve(mu, sc);
  const QuadratureConfig q = sc.quad;
  const EnergyReport er = riesz_energy(res.f_solution, q);
  const double e = er.value;
  const VerificationThresholds th;
  const double energy_gap = std::abs(e - mu.total_mass()) / mu.total_mass();

  Outcome out;
  Report& r = out.report;
  report_measure(r, mu);
  r.value("alpha", q.alpha);
  r.value("tau", res.tau);
  r.value("objective", res.objective, std::nullopt);
  r.value("constraint", res.constraint_value, res.constraint_error);
  r.flag("active", res.active);
  r.value("min_phi0", res.min_phi0);
  r.count("pieces", static_cast<long long>(res.phi0.pieces().size()));
  r.count("iterations", res.iterations);
  r.count("best_seed", static_cast<long long>(res.best_seed));
  for (std::size_t k = 0; k < res.stage_best.size(); ++k)
    r.value("stage_best" + std::to_string(k), res.stage_best[k], std::nullopt);
  r.value("solution_energy", e, er.estimated_error);
  r.value("solution_energy_gap", energy_gap);
  report_verification(r, res.verification);
  const bool ok = passes(res.verification, th) && energy_gap <= th.energy;
  r.flag("verified", ok);

  if (!rc.output.empty()) {
    std::filesystem::create_directories(rc.output);
    const auto dir = std::filesystem::path(rc.output);
    save_grid((dir / "solution.grid").string(), std::get<LogConcave::Grid>(res.f_solution.backing()).phi);
    save_measure((dir / "solution.measure").string(), res.energy_measure);
    write_text((dir / "report.txt").string(), r.to_text());
    r.text("output", rc.output);
  }
  if (!ok) out.code = kExitVerificationFailed;
  return out;
}

Outcome cmd_verify(const RunConfig& rc) {
  const QuadratureConfig q = rc.quadrature();
  const LogConcave f = parse_function(rc.f, rc.dim);
  const DiscreteMeasure mu = load_measure(rc.mu);
  const VerificationReport v = verify_solution(f, mu, q);
  Outcome out;
  out.report.text("f", f.describe());
  report_measure(out.report, mu);
  report_verification(out.report, v);
  const bool ok = passes(v, VerificationThresholds{});
  out.report.flag("verified", ok);
  if (!ok) out.code = kExitVerificationFailed;
  return out;
}

// CSV for external plotting: grid -> coordinates and value, measure ->
// coordinates and weight, report -> key and value (route and value for
// variation tables).
Outcome cmd_plotdata(const RunConfig& rc) {
  std::ifstream is(rc.input);
  if (!is) fail(ErrorCode::FormatError, "cannot open " + rc.input);
  std::string first;
  is >> first;
  is.seekg(0);
  std::ostringstream csv;
  Outcome out;
  if (first == "measure") {
    const DiscreteMeasure mu = read_measure(is);
    csv << (mu.dim() == 1 ? "x,weight\n" : "x,y,weight\n");
    for (const auto& a : mu.atoms()) {
      for (Index i = 0; i < a.x.size(); ++i) csv << format_double(a.x(i)) << ',';
      csv << format_double(a.w) << '\n';
    }
    out.report.text("kind", "measure");
    out.report.count("rows", static_cast<long long>(mu.size()));
  } else if (first.find('=') != std::string::npos) {
    std::vector<std::pair<std::string, std::string>> kv;
    for (std::string line; std::getline(is, line);) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(ErrorCode::FormatError, "report lines must be key=value");
      kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    bool table = false;
    for (const auto& [k, v] : kv)
      if (k.size() > 6 && k.compare(k.size() - 6, 6, ".value") == 0) table = true;
    csv << (table ? "route,value\n" : "key,value\n");
    long long rows = 0;
    for (const auto& [k, v] : kv) {
      if (table) {
        if (k.size() > 6 && k.compare(k.size() - 6, 6, ".value") == 0) {
          csv << k.substr(0, k.size() - 6) << ',' << v << '\n';
          ++rows;
        }
      } else {
        csv << k << ',' << v << '\n';
        ++rows;
      }
    }
    out.report.text("kind", table ? "variation" : "report");
    out.report.count("rows", rows);
  } else {
    const GridFunction phi = read_grid(is);
    const auto& s = phi.spec();
    csv << (s.dim == 1 ? "x,value\n" : "x,y,value\n");
    for (Index k = 0; k < phi.size(); ++k) {
      const Point p = s.point(k);
      for (Index i = 0; i < p.size(); ++i) csv << format_double(p(i)) << ',';
      csv << format_double(phi(k)) << '\n';
    }
    out.report.text("kind", "grid");
    out.report.count("rows", static_cast<long long>(phi.size()));
  }
  out.csv = csv.str();
  if (!rc.output.empty()) {
    write_text(rc.output, out.csv);
    out.report.text("output", rc.output);
  }
  return out;
}

}  // namespace

Outcome execute(const RunConfig& rc) {
  const int saved = threads();
  set_threads(rc.threads);
  Outcome out;
  try {
    if (rc.dim != 1 && rc.dim != 2) fail(ErrorCode::InvalidArgument, "--dim must be 1 or 2");
    if (!(rc.alpha > 0)) fail(ErrorCode::InvalidAlpha, "alpha must be positive");
    const std::string& c = rc.command;
    if (c == "conjugate") out = cmd_conjugate(rc);
    else if (c == "energy") out = cmd_energy(rc);
    else if (c == "potential") out = cmd_potential(rc);
    else if (c == "variation") out = cmd_variation(rc);
    else if (c == "measure") out = cmd_measure(rc, false);
    else if (c == "sphere-measure") out = cmd_measure(rc, true);
    else if (c == "admissibility") out = cmd_admissibility(rc);
    else if (c == "solve") out = cmd_solve(rc);
    else if (c == "verify") out = cmd_verify(rc);
    else if (c == "plotdata") out = cmd_plotdata(rc);
    else fail(ErrorCode::InvalidArgument, "unknown command " + c);
  } catch (const Error& e) {
    out = Outcome{};
    out.code = exit_code(e.code());
    out.error = e.what();
    out.report.text("error", to_string(e.code()));
    out.report.text("message", e.what());
  }
  set_threads(saved);
  return out;
}

}  // namespace riesz
