#include "riesz/variation.hpp"

namespace riesz {

const char* to_string(VariationRoute r) {
  switch (r) {
    case VariationRoute::ClosedFF: return "closed_ff";
    case VariationRoute::BoundaryFF: return "boundary_ff";
    case VariationRoute::GeneralFG: return "general_fg";
    case VariationRoute::Proportional: return "proportional";
    case VariationRoute::FiniteDifference: return "finite_difference";
  }
  return "unknown";
}

namespace {

// Value of f on the closure of its support, taken from inside for lattice backings.
double boundary_value(const LogConcave& f, const PotentialField& pf, const Point& x) {
  if (!f.is_grid()) return f.value(x);
  const auto& s = pf.s.spec;
  double best = kInf, val = 0;
  for (Index k = 0; k < s.size(); ++k) {
    if (!(pf.s.f(k) > 0)) continue;
    const double d = (s.point(k) - x).squaredNorm();
    if (d < best) {
      best = d;
      val = pf.s.f(k);
    }
  }
  return val;
}

double edge_sum(const LogConcave& f, const PotentialField& pf, const SupportSet::Facet& e, double w, int pieces,
                const QuadratureConfig& cfg) {
  double acc = 0;
  for (int k = 0; k < pieces; ++k) {
    const double s = (k + 0.5) / pieces;
    const Point x = (1 - s) * e.a + s * e.b;
    const double fx = boundary_value(f, pf, x);
    if (fx > 0) acc += fx * riesz_potential(pf, f, x, cfg);
  }
  return w * acc * e.measure / pieces;
}

BoundaryIntegral boundary_on_field(const LogConcave& f, const PotentialField& pf,
                                   const std::function<double(const Point&)>& weight, const QuadratureConfig& cfg) {
  BoundaryIntegral r;
  const SupportSet& k = f.support();
  if (k.kind() == SupportSet::Kind::WholePlane) return r;
  if (k.dim() == 1) {
    for (int side : {-1, 1}) {
      const double e = side < 0 ? k.lo() : k.hi();
      if (!std::isfinite(e)) continue;
      const Point x = make_point(e);
      const double fx = boundary_value(f, pf, x);
      if (!(fx > 0)) continue;
      const double w = weight(make_point(double(side)));
      r.value += w * fx * riesz_potential(pf, f, x, cfg);
    }
    return r;
  }
  // Composite midpoint rule per edge; the difference to the half-resolution
  // rule estimates the O(length^2) error.
  const double spacing = std::min(pf.s.spec.h(0), pf.s.spec.h(1));
  double coarse = 0;
  for (const auto& e : k.facets()) {
    const double w = weight(e.normal);
    if (w == 0) continue;
    const int pieces = std::clamp(static_cast<int>(std::ceil(e.measure / (4 * spacing))), 2, 64) & ~1;
    r.value += edge_sum(f, pf, e, w, pieces, cfg);
    coarse += edge_sum(f, pf, e, w, pieces / 2, cfg);
  }
  r.estimated_error = std::abs(r.value - coarse) / 3;
  return r;
}

// Translation making the origin interior to K_f (zero when it already is).
Point interior_shift(const LogConcave& f) {
  const SupportSet& k = f.support();
  if (!k.has_interior()) fail(ErrorCode::OriginNotInterior, "support of f has empty interior");
  if (k.origin_interior()) return zero_point(f.dim());
  if (!k.bounded()) fail(ErrorCode::OriginNotInterior, "cannot centre an unbounded support");
  return -k.centroid();
}

// Both integrals of the variational formula with psi* = conj and h_{K_g} = h.
VariationReport integral_route(const LogConcave& f0, const std::function<double(const Point&)>& conj,
                               const std::function<double(const Point&)>& h, const QuadratureConfig& cfg,
                               VariationRoute route) {
  VariationReport r;
  r.route = route;
  r.shift = interior_shift(f0);
  const LogConcave f = r.shift.norm() > 0 ? f0.translated(r.shift) : f0;
  const PotentialField pf = potential_field(f, cfg);
  const auto& s = pf.s;
  double interior = 0;
  for (Index k = 0; k < s.spec.size(); ++k) {
    const double m = s.w(k) * s.f(k) * pf.potential(k);
    if (!(m > 0)) continue;
    const double c = conj(f.gradient(s.spec.point(k)));
    interior += c * m;
  }
  const BoundaryIntegral b = boundary_on_field(f, pf, h, cfg);
  r.interior_term = interior;
  r.boundary_term = b.value;
  r.value = interior + b.value;
  r.estimated_error = pf.energy.estimated_error + b.estimated_error;
  if (!std::isfinite(r.value)) r.warning = "variation is infinite: psi* or h_{K_g} is infinite where f carries energy";
  return r;
}

}  // namespace

BoundaryIntegral boundary_quadrature(const LogConcave& f, const std::function<double(const Point&)>& weight,
                                     const QuadratureConfig& cfg) {
  if (f.support().kind() == SupportSet::Kind::WholePlane) return {};
  return boundary_on_field(f, potential_field(f, cfg), weight, cfg);
}

std::vector<FacetIntegral> facet_integrals(const LogConcave& f, const QuadratureConfig& cfg) {
  std::vector<FacetIntegral> out;
  const SupportSet& k = f.support();
  if (k.kind() == SupportSet::Kind::WholePlane) return out;
  const PotentialField pf = potential_field(f, cfg);
  if (k.dim() == 1) {
    for (int side : {-1, 1}) {
      const double e = side < 0 ? k.lo() : k.hi();
      if (!std::isfinite(e)) continue;
      const Point x = make_point(e);
      const double fx = boundary_value(f, pf, x);
      SupportSet::Facet fc{make_point(double(side)), x, x, 1.0};
      out.push_back({fc, fx > 0 ? fx * riesz_potential(pf, f, x, cfg) : 0.0});
    }
    return out;
  }
  const double spacing = std::min(pf.s.spec.h(0), pf.s.spec.h(1));
  for (const auto& e : k.facets()) {
    const int pieces = std::clamp(static_cast<int>(std::ceil(e.measure / (4 * spacing))), 2, 64) & ~1;
    out.push_back({e, edge_sum(f, pf, e, 1.0, pieces, cfg)});
  }
  return out;
}

VariationReport delta_ff_closed(const LogConcave& f, const QuadratureConfig& cfg) {
  const PotentialField pf = potential_field(f, cfg);
  Eigen::ArrayXd phi = pf.s.phi;
  for (Index k = 0; k < phi.size(); ++k)
    if (!std::isfinite(phi(k))) phi(k) = 0;
  const double n = f.dim();
  VariationReport r;
  r.route = VariationRoute::ClosedFF;
  r.value = (n + cfg.alpha) / 2 * pf.energy.value - weighted_energy(pf, phi);
  r.interior_term = r.value;
  r.estimated_error = (n + cfg.alpha) / 2 * pf.energy.estimated_error;
  return r;
}

VariationReport delta_ff_boundary_form(const LogConcave& f, const QuadratureConfig& cfg) {
  return delta_fg_general(f, f, cfg);
}

VariationReport delta_fg_general(const LogConcave& f, const LogConcave& g, const QuadratureConfig& cfg) {
  if (f.dim() != g.dim()) fail(ErrorCode::SpecMismatch, "f and g live in different dimensions");
  const SupportSet& kg = g.support();
  auto conj = [&](const Point& y) { return g.conjugate(y); };
  auto h = [&](const Point& u) { return kg.support_function(u); };
  VariationReport r = integral_route(f, conj, h, cfg, VariationRoute::GeneralFG);
  if (&f != &g) {
    const GrowthCondition gc = check_growth_condition(f, g);
    if (gc.max_violation > 1e-9) {
      r.growth_verified = false;
      if (!r.warning.empty()) r.warning += "; ";
      r.warning += "GrowthConditionUnverified: violation " + std::to_string(gc.max_violation);
    }
  } else {
    r.route = VariationRoute::BoundaryFF;
  }
  return r;
}

VariationReport delta_fg_proportional(const LogConcave& f, double beta1, double beta2, const QuadratureConfig& cfg) {
  if (!(beta1 > 0)) fail(ErrorCode::NonpositiveBeta1, "beta1 must be positive");
  const PotentialField pf = potential_field(f, cfg);
  Eigen::ArrayXd phi = pf.s.phi;
  for (Index k = 0; k < phi.size(); ++k)
    if (!std::isfinite(phi(k))) phi(k) = 0;
  const double n = f.dim();
  const double e = pf.energy.value;
  const double closed = (n + cfg.alpha) / 2 * e - weighted_energy(pf, phi);
  VariationReport r;
  r.route = VariationRoute::Proportional;
  r.interior_term = beta1 * closed + beta2 * e;
  r.value = r.interior_term;
  r.estimated_error = (beta1 * (n + cfg.alpha) / 2 + std::abs(beta2)) * pf.energy.estimated_error;
  return r;
}

VariationReport delta_finite_difference(const LogConcave& f, const LogConcave& g, const std::vector<double>& t_list,
                                        const QuadratureConfig& cfg) {
  if (t_list.empty()) fail(ErrorCode::InvalidArgument, "empty step list");
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    if (!(t_list[k] > 0 && t_list[k] <= 0.25)) fail(ErrorCode::InvalidArgument, "steps must lie in (0, 0.25]");
    if (k > 0 && !(t_list[k] < t_list[k - 1])) fail(ErrorCode::InvalidArgument, "steps must be decreasing");
  }
  VariationReport r;
  r.route = VariationRoute::FiniteDifference;
  std::vector<LogConcave> sums;
  for (double t : t_list) sums.push_back(asplund_sum(f, g, t));
  // The baseline goes through the same route as the perturbed functions.
  AsplundOptions base_opt;
  base_opt.force_grid = sums.front().is_grid() && !f.is_grid();
  const EnergyReport base = riesz_energy(asplund_sum(f, g, 0.0, base_opt), cfg);
  r.baseline = base.value;
  r.baseline_error = base.estimated_error;
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    const double e = riesz_energy(sums[k], cfg).value;
    r.table.push_back({t_list[k], e, (e - r.baseline) / (2 * t_list[k])});
  }
  // Neville tableau for extrapolation to t = 0 of a polynomial in t.
  std::vector<double> row;
  for (const auto& fr : r.table) row.push_back(fr.quotient);
  r.richardson.push_back(row);
  for (std::size_t level = 1; level < t_list.size(); ++level) {
    const auto& prev = r.richardson.back();
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      const double ta = t_list[i], tb = t_list[i + level];
      next.push_back((ta * prev[i + 1] - tb * prev[i]) / (ta - tb));
    }
    r.richardson.push_back(next);
  }
  r.value = r.richardson.back().front();
  r.interior_term = r.value;
  r.estimated_error = r.richardson.size() > 1 ? std::abs(r.value - r.richardson[r.richardson.size() - 2].back())
                                              : std::abs(r.value);
  return r;
}

}  // namespace riesz
