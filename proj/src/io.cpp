#include "riesz/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace riesz {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::FormatError, what); }

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) bad("cannot open " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) bad("cannot write " + path);
  return os;
}

std::string next_token(std::istream& is, const char* what) {
  std::string t;
  if (!(is >> t)) bad(std::string("unexpected end of input reading ") + what);
  return t;
}

int parse_int(std::string_view t) {
  int v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) bad("not an integer: " + std::string(t));
  return v;
}

std::string resolve(const std::string& name, const std::string& base_dir) {
  if (base_dir.empty() || std::filesystem::path(name).is_absolute()) return name;
  return (std::filesystem::path(base_dir) / name).string();
}

// "[a,b]" -> (a, b)
std::pair<double, double> parse_bracket(std::string_view t) {
  if (t.size() < 5 || t.front() != '[' || t.back() != ']') bad("expected [l,r], got " + std::string(t));
  const auto comma = t.find(',');
  if (comma == std::string_view::npos) bad("expected [l,r], got " + std::string(t));
  return {parse_double(t.substr(1, comma - 1)), parse_double(t.substr(comma + 1, t.size() - comma - 2))};
}

// Re-raise construction failures of parsed data as format errors.
template <class Fn>
auto checked(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::FormatError) throw;
    bad(e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (v == 0) return "0";  // also folds -0
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(std::string_view t) {
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) bad("not a number: " + std::string(t));
  return v;
}

void write_grid(std::ostream& os, const GridFunction& phi) {
  const auto& s = phi.spec();
  os << s.dim;
  for (int a = 0; a < s.dim; ++a) os << ' ' << s.nodes[a];
  for (int a = 0; a < s.dim; ++a) os << ' ' << format_double(s.lo[a]) << ' ' << format_double(s.hi[a]);
  os << '\n';
  for (Index k = 0; k < phi.size(); ++k) os << format_double(phi(k)) << '\n';
}

GridFunction read_grid(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) bad("empty grid file");
  std::istringstream hs(header);
  const int dim = parse_int(next_token(hs, "grid dimension"));
  if (dim != 1 && dim != 2) bad("grid dimension must be 1 or 2");
  GridSpec s;
  s.dim = dim;
  for (int a = 0; a < dim; ++a) s.nodes[a] = parse_int(next_token(hs, "node count"));
  for (int a = 0; a < dim; ++a) {
    s.lo[a] = parse_double(next_token(hs, "box"));
    s.hi[a] = parse_double(next_token(hs, "box"));
  }
  std::string extra;
  if (hs >> extra) bad("trailing tokens in grid header");
  checked([&] {
    s.validate();
    return 0;
  });
  Eigen::ArrayXd v(s.size());
  for (Index k = 0; k < s.size(); ++k) v(k) = parse_double(next_token(is, "grid value"));
  if (is >> extra) bad("more grid values than nodes");
  return checked([&] { return GridFunction(s, std::move(v)); });
}

void save_grid(const std::string& path, const GridFunction& phi) {
  auto os = open_out(path);
  write_grid(os, phi);
}

GridFunction load_grid(const std::string& path) {
  auto is = open_in(path);
  return read_grid(is);
}

void write_measure(std::ostream& os, const DiscreteMeasure& mu) {
  os << "measure " << to_string(mu.ambient()) << ' ' << mu.dim() << '\n';
  for (const auto& a : mu.atoms()) {
    for (Index i = 0; i < a.x.size(); ++i) os << format_double(a.x(i)) << ' ';
    os << format_double(a.w) << '\n';
  }
}

DiscreteMeasure read_measure(std::istream& is) {
  if (next_token(is, "measure header") != "measure") bad("measure file must start with `measure`");
  const std::string amb = next_token(is, "ambient");
  Ambient ambient;
  if (amb == "euclidean") ambient = Ambient::Euclidean;
  else if (amb == "sphere") ambient = Ambient::Sphere;
  else bad("unknown ambient " + amb);
  const int dim = parse_int(next_token(is, "dimension"));
  if (dim != 1 && dim != 2) bad("measure dimension must be 1 or 2");
  std::vector<Atom> atoms;
  std::string t;
  while (is >> t) {
    Atom a;
    a.x = zero_point(dim);
    a.x(0) = parse_double(t);
    if (dim == 2) a.x(1) = parse_double(next_token(is, "atom"));
    a.w = parse_double(next_token(is, "weight"));
    atoms.push_back(std::move(a));
  }
  return checked([&] { return DiscreteMeasure(ambient, dim, std::move(atoms)); });
}

void save_measure(const std::string& path, const DiscreteMeasure& mu) {
  auto os = open_out(path);
  write_measure(os, mu);
}

DiscreteMeasure load_measure(const std::string& path) {
  auto is = open_in(path);
  return read_measure(is);
}

void write_support(std::ostream& os, const SupportSet& k) {
  switch (k.kind()) {
    case SupportSet::Kind::Interval:
      os << "interval " << format_double(k.lo()) << ' ' << format_double(k.hi()) << '\n';
      return;
    case SupportSet::Kind::WholePlane: os << "whole " << k.dim() << '\n'; return;
    case SupportSet::Kind::Polygon:
      os << "polygon " << k.vertices().size() << '\n';
      for (const auto& v : k.vertices()) os << format_double(v.x()) << ' ' << format_double(v.y()) << '\n';
      return;
  }
}

SupportSet read_support(std::istream& is) {
  const std::string kind = next_token(is, "support kind");
  return checked([&] {
    if (kind == "interval") {
      const double l = parse_double(next_token(is, "interval"));
      return SupportSet::interval(l, parse_double(next_token(is, "interval")));
    }
    if (kind == "whole") return SupportSet::whole(parse_int(next_token(is, "dimension")));
    if (kind != "polygon") bad("unknown support kind " + kind);
    const int n = parse_int(next_token(is, "vertex count"));
    if (n < 3) bad("a polygon needs at least three vertices");
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < n; ++i) {
      const double x = parse_double(next_token(is, "vertex"));
      pts.emplace_back(x, parse_double(next_token(is, "vertex")));
    }
    return SupportSet::polygon(pts);
  });
}

SupportSet load_support(const std::string& path) {
  auto is = open_in(path);
  return read_support(is);
}

LogConcave parse_function(const std::string& record, int dim, const std::string& base_dir) {
  std::istringstream is(record);
  std::vector<std::string> tok;
  for (std::string t; is >> t;) tok.push_back(t);
  if (tok.empty()) bad("empty function record");
  const std::string& kind = tok[0];
  auto arg = [&](std::size_t i, double def) { return i < tok.size() ? parse_double(tok[i]) : def; };
  return checked([&] {
    if (kind == "gaussian") {
      if (tok.size() < 2 || tok.size() > 3) bad("usage: gaussian a [b]");
      return LogConcave::gaussian(dim, arg(1, 1), arg(2, 0));
    }
    if (kind == "exponential") {
      if (tok.size() < 2 || tok.size() > 3) bad("usage: exponential b [c]");
      return LogConcave::exponential(dim, arg(1, 1), arg(2, 0));
    }
    if (kind == "indicator") {
      if (tok.size() < 2 || tok.size() > 3) bad("usage: indicator [l,r] [m] | indicator <support-file> [m]");
      const std::string& body = tok[1];
      SupportSet k = SupportSet::whole(dim);
      if (!body.empty() && body.front() == '[') {
        const auto x = body.find("]x[");
        if (dim == 1) {
          if (x != std::string::npos) bad("a box needs dimension 2");
          const auto [l, r] = parse_bracket(body);
          k = SupportSet::interval(l, r);
        } else {
          if (x == std::string::npos) bad("expected [lx,rx]x[ly,ry] in dimension 2");
          const auto [lx, rx] = parse_bracket(std::string_view(body).substr(0, x + 1));
          const auto [ly, ry] = parse_bracket(std::string_view(body).substr(x + 2));
          k = SupportSet::box(lx, rx, ly, ry);
        }
      } else {
        k = load_support(resolve(body, base_dir));
      }
      if (k.dim() != dim) bad("support dimension differs from --dim");
      return LogConcave::indicator(k, arg(2, 1));
    }
    if (kind == "grid" ? tok.size() != 2 : tok.size() != 1) bad("unknown function record: " + record);
    const GridFunction phi = load_grid(resolve(kind == "grid" ? tok[1] : kind, base_dir));
    if (phi.dim() != dim) bad("grid dimension differs from --dim");
    return LogConcave::from_grid(phi);
  });
}

std::string function_record(const LogConcave& f, const std::string& side_file) {
  const auto& b = f.backing();
  auto centred = [](const Point& c) { return c.size() == 0 || c.norm() == 0; };
  if (const auto* g = std::get_if<LogConcave::Gaussian>(&b); g && centred(g->center))
    return "gaussian " + format_double(g->a) + ' ' + format_double(g->b);
  if (const auto* e = std::get_if<LogConcave::Exponential>(&b); e && centred(e->center))
    return "exponential " + format_double(e->b) + ' ' + format_double(e->c);
  if (const auto* ind = std::get_if<LogConcave::Indicator>(&b)) {
    const std::string m = ind->m == 1 ? "" : ' ' + format_double(ind->m);
    if (ind->set.kind() == SupportSet::Kind::Interval && ind->set.bounded())
      return "indicator [" + format_double(ind->set.lo()) + ',' + format_double(ind->set.hi()) + ']' + m;
    auto os = open_out(side_file);
    write_support(os, ind->set);
    return "indicator " + side_file + m;
  }
  // Everything else goes through a lattice sample of phi.
  const GridFunction phi =
      f.is_grid() ? std::get<LogConcave::Grid>(b).phi : f.sample_phi(f.integration_grid());
  save_grid(side_file, phi);
  return "grid " + side_file;
}

}  // namespace riesz
