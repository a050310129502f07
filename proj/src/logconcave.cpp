#include "riesz/logconcave.hpp"

#include <sstream>

namespace riesz {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Point center_or_zero(int dim, const std::optional<Point>& c) {
  if (!c) return zero_point(dim);
  if (c->size() != dim) fail(ErrorCode::SpecMismatch, "centre dimension differs");
  return *c;
}

void check_dim(int dim) {
  if (dim != 1 && dim != 2) fail(ErrorCode::SpecMismatch, "dimension must be 1 or 2");
}

// Symmetric box [-lo..hi] per axis around a centre.
GridSpec centred_box(const Point& c, double half, int n) {
  if (c.size() == 1) return GridSpec::line(c(0) - half, c(0) + half, n);
  return GridSpec::rect(c(0) - half, c(0) + half, c(1) - half, c(1) + half, n, n);
}

}  // namespace

Eigen::ArrayXd trapezoid_weights(const GridFunction& phi) {
  const auto& s = phi.spec();
  Eigen::ArrayXd w(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    if (!phi.finite(k)) {
      w(k) = 0;
      continue;
    }
    const auto ij = s.unflat(k);
    double wk = 1;
    for (int a = 0; a < s.dim; ++a) {
      double own = 0;
      for (int dir : {-1, +1}) {
        auto c = ij;
        c[a] += dir;
        if (c[a] >= 0 && c[a] < s.nodes[a] && phi.finite(s.flat(c[0], c[1]))) own += 0.5;
      }
      wk *= own * s.h(a);
    }
    w(k) = wk;
  }
  return w;
}

SupportSet grid_support(const GridFunction& phi) {
  const auto& s = phi.spec();
  if (s.dim == 1) {
    int first = -1, last = -1;
    for (int i = 0; i < s.nodes[0]; ++i)
      if (phi.finite(i)) {
        if (first < 0) first = i;
        last = i;
      }
    const double h = s.h(0);
    return SupportSet::interval(std::max(s.lo[0], s.coord(0, first) - h / 2),
                                std::min(s.hi[0], s.coord(0, last) + h / 2));
  }
  std::vector<Eigen::Vector2d> pts;
  const double hx = s.h(0) / 2, hy = s.h(1) / 2;
  for (Index k = 0; k < s.size(); ++k) {
    if (!phi.finite(k)) continue;
    const auto p = s.point(k);
    for (double dx : {-hx, hx})
      for (double dy : {-hy, hy})
        pts.emplace_back(std::clamp(p(0) + dx, s.lo[0], s.hi[0]), std::clamp(p(1) + dy, s.lo[1], s.hi[1]));
  }
  return SupportSet::polygon(pts);
}

std::optional<GrowthCertificate> grid_growth_certificate(const GridFunction& phi) {
  const auto& s = phi.spec();
  double rmax = 0;
  bool touches = false;
  for (Index k = 0; k < s.size(); ++k) {
    if (!phi.finite(k)) continue;
    rmax = std::max(rmax, s.point(k).norm());
    touches = touches || s.on_boundary(k);
  }
  // Radial slope on the outer half of the finite region (tangent-line rule).
  const double r = rmax / 2;
  double b = kInf;
  for (Index k = 0; k < s.size(); ++k) {
    if (!phi.finite(k)) continue;
    const Point x = s.point(k);
    const double nx = x.norm();
    if (nx < r || nx == 0) continue;
    Point g;
    try {
      g = subgradient_at_node(phi, k);
    } catch (const Error&) {
      continue;
    }
    b = std::min(b, g.dot(x) / nx);
  }
  if (!(b > 0) || !std::isfinite(b)) {
    if (touches) return std::nullopt;
    b = 1;
  }
  double c = kInf;
  for (Index k = 0; k < s.size(); ++k)
    if (phi.finite(k)) c = std::min(c, phi(k) - b * s.point(k).norm());
  return GrowthCertificate{b, c};
}

LogConcave::LogConcave(int dim, Backing b) : dim_(dim), backing_(std::move(b)) { finish(); }

LogConcave LogConcave::gaussian(int dim, double a, double b, std::optional<Point> center) {
  check_dim(dim);
  if (!(a > 0) || !std::isfinite(a) || !std::isfinite(b)) fail(ErrorCode::ImproperFunction, "gaussian needs a > 0");
  return LogConcave(dim, Gaussian{a, b, center_or_zero(dim, center)});
}

LogConcave LogConcave::exponential(int dim, double b, double c, std::optional<Point> center) {
  check_dim(dim);
  if (!(b > 0) || !std::isfinite(b) || !std::isfinite(c)) fail(ErrorCode::ImproperFunction, "exponential needs b > 0");
  return LogConcave(dim, Exponential{b, c, center_or_zero(dim, center)});
}

LogConcave LogConcave::indicator(const SupportSet& k, double m) {
  if (!(m > 0) || !std::isfinite(m)) fail(ErrorCode::ImproperFunction, "indicator scale must be positive");
  if (!k.bounded() || !k.has_interior())
    fail(ErrorCode::ImproperFunction, "indicator needs a bounded body with interior");
  return LogConcave(k.dim(), Indicator{k, m});
}

LogConcave LogConcave::from_grid(const GridFunction& phi) { return from_grid(phi, default_dual_spec(phi)); }

LogConcave LogConcave::from_grid(const GridFunction& phi, const GridSpec& dual) {
  if (!phi.is_convex()) fail(ErrorCode::ImproperFunction, "grid function is not convex");
  return LogConcave(phi.dim(), Grid{phi, legendre_transform(phi, dual)});
}

void LogConcave::finish() {
  std::visit(Overloaded{
                 [&](const Gaussian& g) {
                   support_ = SupportSet::whole(dim_);
                   mass_ = std::exp(g.b) * std::pow(2 * kPi / g.a, dim_ / 2.0);
                   const double r = 3 / std::sqrt(g.a);
                   growth_ = GrowthCertificate{g.a * r, -g.a * r * r / 2 - g.b - g.a * r * g.center.norm()};
                 },
                 [&](const Exponential& e) {
                   support_ = SupportSet::whole(dim_);
                   mass_ = std::exp(e.c) * (dim_ == 1 ? 2 / e.b : 2 * kPi / (e.b * e.b));
                   growth_ = GrowthCertificate{e.b, -e.c - e.b * e.center.norm()};
                 },
                 [&](const Indicator& ind) {
                   support_ = ind.set;
                   mass_ = ind.m * ind.set.volume();
                   growth_ = GrowthCertificate{1.0, -ind.set.circumradius() - std::log(ind.m)};
                 },
                 [&](const Grid& g) {
                   support_ = grid_support(g.phi);
                   const Eigen::ArrayXd w = trapezoid_weights(g.phi);
                   double m = 0;
                   for (Index k = 0; k < w.size(); ++k)
                     if (w(k) > 0) m += w(k) * std::exp(-g.phi(k));
                   mass_ = m;
                   growth_ = grid_growth_certificate(g.phi);
                 },
             },
             backing_);
  if (!(mass_ > 0) || !std::isfinite(mass_)) fail(ErrorCode::ImproperFunction, "total mass must be positive and finite");
}

double LogConcave::phi(const Point& x) const {
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return g.a * (x - g.center).squaredNorm() / 2 - g.b; },
                        [&](const Exponential& e) { return e.b * (x - e.center).norm() - e.c; },
                        [&](const Indicator& ind) {
                          return ind.set.contains(x, 1e-12 * std::max(1.0, x.norm())) ? -std::log(ind.m) : kInf;
                        },
                        [&](const Grid& g) { return interpolate(g.phi, x); },
                    },
                    backing_);
}

double LogConcave::conjugate(const Point& y) const {
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return g.center.dot(y) + y.squaredNorm() / (2 * g.a) + g.b; },
                        [&](const Exponential& e) {
                          return y.norm() <= e.b * (1 + 1e-12) ? e.center.dot(y) + e.c : kInf;
                        },
                        [&](const Indicator& ind) { return ind.set.support_value(y) + std::log(ind.m); },
                        [&](const Grid& g) {
                          if (g.conj.spec().contains(y)) return interpolate(g.conj, y);
                          double best = -kInf;
                          const auto& s = g.phi.spec();
                          for (Index k = 0; k < s.size(); ++k)
                            if (g.phi.finite(k)) best = std::max(best, s.point(k).dot(y) - g.phi(k));
                          return best;
                        },
                    },
                    backing_);
}

Point LogConcave::gradient(const Point& x) const {
  return std::visit(Overloaded{
                        [&](const Gaussian& g) -> Point { return g.a * (x - g.center); },
                        [&](const Exponential& e) -> Point {
                          const Point d = x - e.center;
                          const double n = d.norm();
                          return n > 0 ? Point(e.b * d / n) : zero_point(dim_);
                        },
                        [&](const Indicator&) -> Point { return zero_point(dim_); },
                        [&](const Grid& g) -> Point { return subgradient(g.phi, x); },
                    },
                    backing_);
}

GrowthCertificate LogConcave::growth_certificate() const {
  if (!growth_) fail(ErrorCode::CertificateNotFound, "grid function is not coercive on its box");
  return *growth_;
}

GridSpec LogConcave::integration_grid(int nodes) const {
  const int n = nodes > 0 ? nodes : default_nodes(dim_);
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return centred_box(g.center, 6 / std::sqrt(g.a), n); },
                        [&](const Exponential& e) { return centred_box(e.center, 15 / e.b, n); },
                        [&](const Indicator& ind) {
                          double lo[2], hi[2];
                          ind.set.bounding_box(lo, hi);
                          return dim_ == 1 ? GridSpec::line(lo[0], hi[0], n)
                                           : GridSpec::rect(lo[0], hi[0], lo[1], hi[1], n, n);
                        },
                        [&](const Grid& g) { return g.phi.spec(); },
                    },
                    backing_);
}

GridFunction LogConcave::sample_phi(const GridSpec& spec) const {
  if (spec.dim != dim_) fail(ErrorCode::SpecMismatch, "sampling grid dimension differs");
  if (const auto* g = std::get_if<Grid>(&backing_))
    if (g->phi.spec() == spec) return g->phi;
  Eigen::ArrayXd v(spec.size());
  for (Index k = 0; k < spec.size(); ++k) v(k) = phi(spec.point(k));
  for (Index k = 0; k < v.size(); ++k)
    if (std::isfinite(v(k))) return GridFunction(spec, std::move(v));
  fail(ErrorCode::ImproperFunction, "function has no finite value on the sampling grid");
}

double LogConcave::slope_bound() const {
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return 6 * std::sqrt(g.a); },
                        [&](const Exponential& e) { return e.b; },
                        [&](const Indicator&) { return 0.0; },
                        [&](const Grid& g) { return g.phi.max_slope(); },
                    },
                    backing_);
}

LogConcave LogConcave::translated(const Point& x0) const {
  if (x0.size() != dim_) fail(ErrorCode::SpecMismatch, "translation dimension differs");
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return gaussian(dim_, g.a, g.b, Point(g.center + x0)); },
                        [&](const Exponential& e) { return exponential(dim_, e.b, e.c, Point(e.center + x0)); },
                        [&](const Indicator& ind) { return indicator(ind.set.translated(x0), ind.m); },
                        [&](const Grid& g) {
                          GridFunction moved(g.phi.spec().translated(x0), g.phi.values(), g.phi.convexity_tol());
                          return from_grid(moved, g.conj.spec());
                        },
                    },
                    backing_);
}

LogConcave LogConcave::scaled(double c) const {
  if (!(c > 0)) fail(ErrorCode::NonpositiveScale, "c f needs c > 0");
  const double lc = std::log(c);
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return gaussian(dim_, g.a, g.b + lc, g.center); },
                        [&](const Exponential& e) { return exponential(dim_, e.b, e.c + lc, e.center); },
                        [&](const Indicator& ind) { return indicator(ind.set, ind.m * c); },
                        [&](const Grid& g) {
                          Eigen::ArrayXd v = g.phi.values();
                          for (Index k = 0; k < v.size(); ++k)
                            if (std::isfinite(v(k))) v(k) -= lc;
                          return from_grid(GridFunction(g.phi.spec(), v), g.conj.spec());
                        },
                    },
                    backing_);
}

LogConcave LogConcave::dilated(double c) const {
  if (!(c > 0)) fail(ErrorCode::NonpositiveScale, "f(c x) needs c > 0");
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return gaussian(dim_, g.a * c * c, g.b, Point(g.center / c)); },
                        [&](const Exponential& e) { return exponential(dim_, e.b * c, e.c, Point(e.center / c)); },
                        [&](const Indicator& ind) { return indicator(ind.set.scaled(1 / c), ind.m); },
                        [&](const Grid& g) {
                          GridSpec s = g.phi.spec();
                          for (int a = 0; a < dim_; ++a) {
                            s.lo[a] /= c;
                            s.hi[a] /= c;
                          }
                          GridSpec d = g.conj.spec();
                          for (int a = 0; a < dim_; ++a) {
                            d.lo[a] *= c;
                            d.hi[a] *= c;
                          }
                          return from_grid(GridFunction(s, g.phi.values()), d);
                        },
                    },
                    backing_);
}

LogConcave LogConcave::epi_scaled(double t) const {
  if (!(t > 0)) fail(ErrorCode::NonpositiveScale, "epi-scaling needs t > 0");
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return gaussian(dim_, g.a / t, t * g.b, Point(t * g.center)); },
                        [&](const Exponential& e) { return exponential(dim_, e.b, t * e.c, Point(t * e.center)); },
                        [&](const Indicator& ind) { return indicator(ind.set.scaled(t), std::pow(ind.m, t)); },
                        [&](const Grid& g) {
                          // Node x of the scaled box carries t*phi(x/t): no interpolation needed.
                          GridSpec s = g.phi.spec();
                          for (int a = 0; a < dim_; ++a) {
                            s.lo[a] *= t;
                            s.hi[a] *= t;
                          }
                          Eigen::ArrayXd v = g.phi.values();
                          for (Index k = 0; k < v.size(); ++k)
                            if (std::isfinite(v(k))) v(k) *= t;
                          return from_grid(GridFunction(s, v), g.conj.spec());
                        },
                    },
                    backing_);
}

LogConcave LogConcave::proportional(double beta1, double beta2) const {
  if (!(beta1 > 0)) fail(ErrorCode::NonpositiveBeta1, "beta1 must be positive");
  return epi_scaled(beta1).scaled(std::exp(beta2));
}

std::string LogConcave::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Gaussian& g) { os << "gaussian " << g.a << ' ' << g.b; },
                 [&](const Exponential& e) { os << "exponential " << e.b << ' ' << e.c; },
                 [&](const Indicator& ind) {
                   os << "indicator";
                   if (ind.set.dim() == 1) os << " [" << ind.set.lo() << ',' << ind.set.hi() << ']';
                   else os << " polygon(" << ind.set.vertices().size() << ')';
                   if (ind.m != 1) os << " scale " << ind.m;
                 },
                 [&](const Grid& g) { os << "grid " << g.phi.size() << " nodes"; },
             },
             backing_);
  return os.str();
}

SupportSet support_set(const LogConcave& f) { return f.support(); }
double total_mass(const LogConcave& f) { return f.total_mass(); }
GrowthCertificate growth_certificate(const LogConcave& f) { return f.growth_certificate(); }
double support_function(const SupportSet& k, const Point& u) { return k.support_function(u); }
double radial_function(const SupportSet& k, const Point& u) { return k.radial_function(u); }

GridSpec slope_dual_spec(int dim, double slope, int nodes) {
  // Place the slope bound exactly on a node with a ~25% margin beyond it.
  const int half_nodes = (nodes - 1) / 2;
  const int k = std::max(1, static_cast<int>(std::floor(half_nodes / 1.25)));
  const double s = slope > 0 ? slope : 1.0;
  const double half = s / k * half_nodes;
  return GridSpec::cube(dim, half, nodes);
}

GridFunction conjugate_on(const LogConcave& f, const GridSpec& dual) {
  if (dual.dim != f.dim()) fail(ErrorCode::SpecMismatch, "dual grid dimension differs");
  if (const auto* g = std::get_if<LogConcave::Grid>(&f.backing())) {
    if (g->conj.spec() == dual) return g->conj;
    return legendre_transform(g->phi, dual);
  }
  Eigen::ArrayXd v(dual.size());
  for (Index k = 0; k < dual.size(); ++k) v(k) = f.conjugate(dual.point(k));
  return GridFunction(dual, std::move(v));
}

LogConcave asplund_sum(const LogConcave& f, const LogConcave& g, double t, const AsplundOptions& opt) {
  if (f.dim() != g.dim()) fail(ErrorCode::SpecMismatch, "asplund sum of functions of different dimension");
  if (!(t >= 0)) fail(ErrorCode::NonpositiveScale, "asplund weight must be non-negative");
  using G = LogConcave::Gaussian;
  using E = LogConcave::Exponential;
  using I = LogConcave::Indicator;
  const int n = f.dim();
  if (!opt.force_grid) {
    if (t == 0 && !f.is_grid()) return f;
    const auto& fb = f.backing();
    const auto& gb = g.backing();
    if (const auto* a = std::get_if<I>(&fb))
      if (const auto* b = std::get_if<I>(&gb))
        return LogConcave::indicator(a->set.minkowski_sum(b->set, t), a->m * std::pow(b->m, t));
    if (const auto* a = std::get_if<G>(&fb))
      if (const auto* b = std::get_if<G>(&gb))
        return LogConcave::gaussian(n, 1 / (1 / a->a + t / b->a), a->b + t * b->b, Point(a->center + t * b->center));
    if (const auto* a = std::get_if<E>(&fb))
      if (const auto* b = std::get_if<E>(&gb))
        return LogConcave::exponential(n, t > 0 ? std::min(a->b, b->b) : a->b, a->c + t * b->c,
                                       Point(a->center + t * b->center));
  }

  GridSpec primal;
  if (opt.primal) {
    primal = *opt.primal;
  } else {
    const GridSpec fs = f.integration_grid();
    const GridSpec gs = g.integration_grid();
    primal = fs;
    for (int a = 0; a < n; ++a) {
      primal.lo[a] = fs.lo[a] + t * gs.lo[a];
      primal.hi[a] = fs.hi[a] + t * gs.hi[a];
    }
  }
  const GridSpec dual =
      opt.dual ? *opt.dual : slope_dual_spec(n, std::max(f.slope_bound(), g.slope_bound()), primal.nodes[0]);
  const GridFunction combined = combine_conjugates(conjugate_on(f, dual), conjugate_on(g, dual), 1.0, t, primal);
  return LogConcave::from_grid(combined, dual);
}

GrowthCondition check_growth_condition(const LogConcave& f, const LogConcave& g, std::optional<double> beta1_hint,
                                       std::optional<GridSpec> dual) {
  const int n = f.dim();
  const GridSpec spec =
      dual ? *dual : GridSpec::cube(n, 2 * std::max({f.slope_bound(), g.slope_bound(), 1.0}), LogConcave::default_nodes(n));
  const GridFunction fs = conjugate_on(f, spec);
  const GridFunction gs = conjugate_on(g, spec);

  std::vector<double> candidates;
  if (beta1_hint && *beta1_hint > 0) candidates.push_back(*beta1_hint);
  for (int k = -24; k <= 24; ++k) candidates.push_back(k == 0 ? 1.0 : std::pow(10.0, k / 8.0));

  auto inner = [&](Index k) {
    const Point y = spec.point(k);
    for (int a = 0; a < n; ++a) {
      const double mid = (spec.lo[a] + spec.hi[a]) / 2, half = (spec.hi[a] - spec.lo[a]) / 2;
      if (std::abs(y(a) - mid) > half / 2) return false;
    }
    return true;
  };

  GrowthCondition best;
  best.max_violation = kInf;
  best.checked_on = spec;
  bool have = false;
  for (double b1 : candidates) {
    double b2 = -kInf;
    for (Index k = 0; k < spec.size(); ++k) {
      if (!inner(k) || !fs.finite(k)) continue;
      b2 = std::max(b2, gs.finite(k) ? gs(k) - b1 * fs(k) : kInf);
    }
    if (b2 == -kInf) b2 = 0.0;
    double viol = b2 == kInf ? kInf : 0.0;
    for (Index k = 0; k < spec.size() && std::isfinite(viol); ++k) {
      if (!fs.finite(k)) continue;
      const double d = gs.finite(k) ? gs(k) - b1 * fs(k) - b2 : kInf;
      viol = std::max(viol, d);
    }
    const bool better = !have || viol < best.max_violation ||
                        (viol == best.max_violation && b1 < best.beta1);
    if (better) {
      best.beta1 = b1;
      best.beta2 = b2;
      best.max_violation = viol;
      have = true;
    }
  }
  return best;
}

}  // namespace riesz
