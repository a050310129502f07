#include "riesz/minkowski.hpp"

namespace riesz {

MaxAffineEven::MaxAffineEven(int dim, std::vector<AffinePiece> extra) : dim_(dim) {
  if (dim < 1 || dim > 2) fail(ErrorCode::SpecMismatch, "dimension must be 1 or 2");
  pieces_.push_back({zero_point(dim), 0.0});
  for (auto& p : extra) {
    if (p.a.size() != dim) fail(ErrorCode::SpecMismatch, "piece slope has the wrong dimension");
    if (!p.a.allFinite() || !std::isfinite(p.b)) fail(ErrorCode::InvalidArgument, "pieces must be finite");
    pieces_.push_back(std::move(p));
  }
}

double MaxAffineEven::operator()(const Point& x) const {
  double v = 0;
  for (const auto& p : pieces_) v = std::max(v, std::abs(p.a.dot(x)) + p.b);
  return v;
}

std::size_t MaxAffineEven::active_piece(const Point& x) const {
  std::size_t best = 0;
  double v = 0;
  for (std::size_t k = 1; k < pieces_.size(); ++k) {
    const double c = std::abs(pieces_[k].a.dot(x)) + pieces_[k].b;
    if (c > v) {
      v = c;
      best = k;
    }
  }
  return best;
}

double MaxAffineEven::max_slope() const {
  double m = 0;
  for (const auto& p : pieces_) m = std::max(m, p.a.cwiseAbs().maxCoeff());
  return m;
}

GridSpec MaxAffineEven::natural_dual(int nodes) const {
  const double half = max_slope();
  if (!(half > 0)) fail(ErrorCode::ConjugateNotIntegrable, "phi has no slope; its conjugate lives on a point");
  return GridSpec::cube(dim_, half, nodes);
}

MaxAffineEven MaxAffineEven::shifted(double kappa) const {
  if (!(kappa >= 0)) fail(ErrorCode::InvalidArgument, "shift must be non-negative");
  std::vector<AffinePiece> extra;
  for (std::size_t k = 1; k < pieces_.size(); ++k) extra.push_back({pieces_[k].a, pieces_[k].b + kappa});
  extra.push_back({zero_point(dim_), kappa});
  return MaxAffineEven(dim_, std::move(extra));
}

namespace {

// Lower convex hull of (s, c) points sorted by s.
std::vector<std::pair<double, double>> lower_hull(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> h;
  for (const auto& p : pts) {
    if (!h.empty() && h.back().first == p.first) continue;  // sorted: keep the lowest c
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h.back();
      const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross <= 0) h.pop_back();
      else break;
    }
    h.push_back(p);
  }
  return h;
}

}  // namespace

GridFunction MaxAffineEven::conjugate_on(const GridSpec& dual) const {
  if (dual.dim != dim_) fail(ErrorCode::SpecMismatch, "dual lattice dimension differs");
  Eigen::ArrayXd out(dual.size());
  if (dim_ == 1) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : pieces_) {
      pts.emplace_back(p.a(0), -p.b);
      pts.emplace_back(-p.a(0), -p.b);
    }
    const auto h = lower_hull(pts);
    const double tol = 1e-12 * std::max(1.0, max_slope());
    for (Index k = 0; k < dual.size(); ++k) {
      const double y = dual.coord(0, static_cast<int>(k));
      if (y < h.front().first - tol || y > h.back().first + tol) {
        out(k) = kInf;
        continue;
      }
      const double yc = std::clamp(y, h.front().first, h.back().first);
      auto it = std::lower_bound(h.begin(), h.end(), std::make_pair(yc, -kInf));
      if (it == h.end()) it = h.end() - 1;
      if (it->first == yc || it == h.begin()) {
        out(k) = it->second;
        continue;
      }
      const auto& a = *(it - 1);
      const auto& b = *it;
      const double s = (yc - a.first) / (b.first - a.first);
      out(k) = (1 - s) * a.second + s * b.second;
    }
    return GridFunction(dual, std::move(out));
  }
  // 2-D: sup over a primal lattice large enough to hold the vertices of phi
  // for dual points away from the edge of the slope hull.
  double bmin = 0, bmax = 0;
  for (const auto& p : pieces_) {
    bmin = std::min(bmin, p.b);
    bmax = std::max(bmax, p.b);
  }
  double inr = kInf;
  for (int k = 0; k < 720; ++k) {
    const double th = kPi * k / 360;
    const Point u = make_point(std::cos(th), std::sin(th));
    double hk = 0;
    for (const auto& p : pieces_) hk = std::max(hk, std::abs(p.a.dot(u)));
    inr = std::min(inr, hk);
  }
  if (!(inr > 0)) fail(ErrorCode::ConjugateNotIntegrable, "slope hull has empty interior");
  const double r = 4 * (bmax - bmin + 1) / inr;
  const GridSpec primal = GridSpec::cube(2, r, 257);
  const GridFunction sampled = GridFunction::sample(primal, [&](const Point& x) { return (*this)(x); });
  const GridFunction conj = legendre_transform(sampled, dual);
  // Outside the slope hull phi* = +inf.
  for (Index k = 0; k < dual.size(); ++k) {
    const Point y = dual.point(k);
    bool inside = false;
    double best = 0;
    for (int j = 0; j < 720 && !inside; ++j) {
      const double th = kPi * j / 360;
      const Point u = make_point(std::cos(th), std::sin(th));
      double hk = 0;
      for (const auto& p : pieces_) hk = std::max(hk, std::abs(p.a.dot(u)));
      best = std::max(best, y.dot(u) - hk);
    }
    inside = best <= 1e-12 * std::max(1.0, max_slope());
    out(k) = inside ? conj(k) : kInf;
  }
  return GridFunction(dual, std::move(out));
}

double objective(const MaxAffineEven& phi, const DiscreteMeasure& mu) {
  if (mu.empty()) fail(ErrorCode::EmptyMeasure, "measure has no atoms");
  if (mu.dim() != phi.dim()) fail(ErrorCode::SpecMismatch, "measure and phi differ in dimension");
  return mu.integrate([&](const Point& x) { return phi(x); });
}

PieceSubgradient objective_subgradient(const MaxAffineEven& phi, const DiscreteMeasure& mu) {
  if (mu.empty()) fail(ErrorCode::EmptyMeasure, "measure has no atoms");
  PieceSubgradient g;
  g.da.assign(phi.pieces().size(), zero_point(phi.dim()));
  g.db.assign(phi.pieces().size(), 0.0);
  for (const auto& at : mu.atoms()) {
    const std::size_t k = phi.active_piece(at.x);
    const double s = phi.pieces()[k].a.dot(at.x) >= 0 ? 1.0 : -1.0;
    g.da[k] += at.w * s * at.x;
    g.db[k] += at.w;
  }
  return g;
}

double constraint_value(const MaxAffineEven& phi, const QuadratureConfig& cfg) {
  const int nodes = cfg.nodes > 0 ? cfg.nodes : LogConcave::default_nodes(phi.dim());
  const GridFunction conj = phi.conjugate_on(phi.natural_dual(nodes));
  return riesz_energy(LogConcave::from_grid(conj), cfg).value;
}

double feasible_slope(int dim, double alpha) { return std::pow(unit_ball_energy(dim, alpha), -1 / (dim + alpha)); }

MaxAffineEven feasible_point(int dim, double tau, double alpha) {
  if (!(tau > 0)) fail(ErrorCode::InvalidArgument, "tau must be positive");
  const double t0 = feasible_slope(dim, alpha);
  const double b = 0.5 * std::log(tau);
  std::vector<AffinePiece> pieces;
  if (dim == 1) {
    pieces.push_back({make_point(t0), b});
  } else {
    const int m = 128;
    const double rc = 1 / std::cos(kPi / m);
    for (int k = 0; k < m / 2; ++k) {
      const double th = 2 * kPi * k / m;
      pieces.push_back({make_point(t0 * rc * std::cos(th), t0 * rc * std::sin(th)), b});
    }
  }
  return MaxAffineEven(dim, std::move(pieces));
}

void SolverConfig::validate() const {
  if (tau && !(*tau > 0 && std::isfinite(*tau))) fail(ErrorCode::InvalidArgument, "tau must be positive");
  if (penalty_weights.empty()) fail(ErrorCode::InvalidArgument, "penalty schedule is empty");
  for (std::size_t k = 0; k < penalty_weights.size(); ++k) {
    if (!(penalty_weights[k] > 2) || !std::isfinite(penalty_weights[k]))
      fail(ErrorCode::InvalidArgument, "penalty weights must be finite and > 2");
    if (k > 0 && !(penalty_weights[k] > penalty_weights[k - 1]))
      fail(ErrorCode::InvalidArgument, "penalty weights must increase");
  }
  if (!(step_scale > 0) || !std::isfinite(step_scale)) fail(ErrorCode::InvalidArgument, "step scale must be positive");
  if (!(momentum >= 0 && momentum < 1)) fail(ErrorCode::InvalidArgument, "momentum must lie in [0, 1)");
  if (max_iters < 1 || restarts < 1) fail(ErrorCode::InvalidArgument, "iteration counts must be positive");
  quad.validate();
}

double TestFunction::operator()(const Point& x) const {
  auto bump = [&](const Point& c) {
    double v = 1;
    for (Index j = 0; j < x.size(); ++j) {
      const double s = (x(j) - c(j)) / radius;
      if (std::abs(s) >= 1) return 0.0;
      v *= (1 - s * s) * (1 - s * s);
    }
    return v;
  };
  if (centre.norm() == 0) return bump(centre);
  return bump(centre) + bump(Point(-centre));
}

std::vector<TestFunction> default_test_functions(const DiscreteMeasure& mu) {
  double reach = 0;
  for (const auto& a : mu.atoms()) reach = std::max(reach, a.x.cwiseAbs().maxCoeff());
  reach = std::max(reach, 1e-12);
  std::vector<TestFunction> out;
  const int n = mu.dim();
  for (int level = 0; level <= 3; ++level) {
    const double r = reach / (1 << level);
    const int m = 1 << level;
    // Centres on r Z^n within the box, one per reflection pair.
    for (int i = -m; i <= m; ++i) {
      for (int j = (n == 2 ? -m : 0); j <= (n == 2 ? m : 0); ++j) {
        const bool rep = i > 0 || (i == 0 && j >= 0);
        if (!rep) continue;
        out.push_back({n == 1 ? make_point(i * r) : make_point(i * r, j * r), r});
      }
    }
  }
  return out;
}

VerificationReport verify_solution(const LogConcave& f, const DiscreteMeasure& mu, const QuadratureConfig& cfg,
                                   std::optional<std::vector<TestFunction>> zetas) {
  return verify_measures(mu, riesz_energy_measure(f, cfg), std::move(zetas));
}

VerificationReport verify_measures(const DiscreteMeasure& mu, const DiscreteMeasure& r,
                                   std::optional<std::vector<TestFunction>> zetas) {
  VerificationReport v;
  v.comparison = compare_measures(mu, r, 4);
  const auto tests = zetas ? *zetas : default_test_functions(mu);
  const double mass = mu.total_mass();
  for (const auto& z : tests) {
    const double norm = mu.integrate([&](const Point& x) { return std::abs(z(x)); });
    if (!(norm > 1e-12 * mass)) {
      ++v.skipped;
      continue;
    }
    const double res = std::abs(mu.integrate(z) - r.integrate(z)) / norm;
    v.stationarity.push_back(res);
    v.max_stationarity = std::max(v.max_stationarity, res);
  }
  return v;
}

LogConcave rescale_solution(const MaxAffineEven& phi0, const DiscreteMeasure& mu, const QuadratureConfig& cfg) {
  const int nodes = cfg.nodes > 0 ? cfg.nodes : LogConcave::default_nodes(phi0.dim());
  const LogConcave g = LogConcave::from_grid(phi0.conjugate_on(phi0.natural_dual(nodes)));
  const double e = riesz_energy(g, cfg).value;
  if (!(e > 0) || !std::isfinite(e)) fail(ErrorCode::NoFeasiblePoint, "constraint value is not positive and finite");
  return g.scaled(std::sqrt(mu.total_mass() / e));
}

namespace {

// One decision variable per reflection orbit {x, -x} of the atoms.
struct Orbits {
  int dim = 1;
  std::vector<Point> x;
  std::vector<double> w;  // orbit mass
  std::vector<double> step;  // preconditioned step per orbit
  double mass = 0;
  double inradius = 0;  // min over directions of max_i |<x_i, u>|
};

Orbits make_orbits(const DiscreteMeasure& mu, double step_scale) {
  Orbits o;
  o.dim = mu.dim();
  o.mass = mu.total_mass();
  // Reflection pairs are matched up to round-off (the evenness check admits
  // defects of that size); the representative is the symmetrised location.
  const auto& atoms = mu.atoms();
  std::vector<char> used(atoms.size(), 0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    const Point& xa = atoms[i].x;
    const double tol = 1e-12 * std::max(1.0, xa.norm());
    Point rep = xa;
    double w = atoms[i].w;
    if (xa.norm() > tol) {
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        if (used[j] || (atoms[j].x + xa).norm() > tol) continue;
        used[j] = 1;
        rep = (xa - atoms[j].x) / 2;
        w += atoms[j].w;
        break;
      }
      for (Index c = 0; c < rep.size(); ++c) {
        if (std::abs(rep(c)) <= tol) continue;
        if (rep(c) < 0) rep = -rep;
        break;
      }
    }
    o.x.push_back(rep);
    o.w.push_back(w);
  }
  const std::size_t m = o.x.size();
  o.step.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double d = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) d = std::min({d, (o.x[i] - o.x[j]).norm(), (o.x[i] + o.x[j]).norm()});
    }
    if (o.x[i].norm() > 0) d = std::min(d, 2 * o.x[i].norm());
    if (!std::isfinite(d)) d = std::max(o.x[i].norm(), 1.0);
    o.step[i] = step_scale * d * d / o.dim;
  }
  o.inradius = kInf;
  for (const auto& u : direction_net(o.dim)) {
    double h = 0;
    for (const auto& x : o.x) h = std::max(h, std::abs(x.dot(u)));
    o.inradius = std::min(o.inradius, h);
  }
  return o;
}

double plane(const Orbits& o, const std::vector<double>& v, std::size_t i, const Point& y) {
  return std::abs(o.x[i].dot(y)) - v[i];
}

// Lowest-index maximiser of |<x_i, y>| - v_i.
std::size_t argmax_orbit(const Orbits& o, const std::vector<double>& v, const Point& y) {
  std::size_t best = 0;
  double bv = -kInf;
  for (std::size_t i = 0; i < o.x.size(); ++i) {
    const double c = plane(o, v, i, y);
    if (c > bv) {
      bv = c;
      best = i;
    }
  }
  return best;
}

struct Evaluation {
  double energy = 0;
  double energy_error = 0;
  std::vector<double> share;  // energy-measure mass per orbit
  GridFunction conj;
};

GridSpec solver_dual(const Orbits& o, const std::vector<double>& v, int nodes) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  // Decay margin: e^{-25} is below the 1-D quadrature error; the coarser
  // 2-D lattice trades margin for resolution.
  const double margin = o.dim == 1 ? 25 : 12;
  const double half = (margin + *hi - *lo) / o.inradius;
  return GridSpec::cube(o.dim, half, nodes);
}

Evaluation evaluate(const Orbits& o, const std::vector<double>& v, const GridSpec& dual, const QuadratureConfig& cfg) {
  Eigen::ArrayXd vals(dual.size());
  std::vector<std::size_t> owner(dual.size());
  for (Index k = 0; k < dual.size(); ++k) {
    const Point y = dual.point(k);
    owner[k] = argmax_orbit(o, v, y);
    vals(k) = plane(o, v, owner[k], y);
  }
  Evaluation e{0, 0, std::vector<double>(o.x.size(), 0.0), GridFunction(dual, vals)};
  const LogConcave f = LogConcave::from_grid(e.conj);
  QuadratureConfig qc = cfg;
  qc.method = QuadMethod::DirectDiagonalCorrected;
  const PotentialField pf = potential_field(f, qc);
  e.energy = pf.energy.value;
  e.energy_error = pf.energy.estimated_error;
  const Eigen::ArrayXd g = pf.s.f * pf.potential;  // integrand at the nodes

  if (o.dim == 1) {
    // Split every cell exactly at the breakpoints of the max-affine function,
    // integrating the linear interpolant of g.
    const double h = dual.h(0);
    for (int k = 0; k + 1 < dual.nodes[0]; ++k) {
      const double y0 = dual.coord(0, k), y1 = dual.coord(0, k + 1);
      auto gi = [&](double y) { return g(k) + (g(k + 1) - g(k)) * (y - y0) / h; };
      double s = y0;
      std::size_t cur = owner[k];
      while (s < y1) {
        // Next breakpoint: the earliest point >= s where a steeper plane takes
        // over (ties go to the steepest). Cells never straddle the origin.
        const double sj = y0 >= 0 ? 1.0 : -1.0;
        double next = y1, slope_next = -kInf;
        std::size_t who = cur;
        const double xa = sj * std::abs(o.x[cur](0));
        for (std::size_t j = 0; j < o.x.size(); ++j) {
          const double xb = sj * std::abs(o.x[j](0));
          if (j == cur || xb <= xa) continue;
          const double yc = std::max(s, (v[j] - v[cur]) / (xb - xa));
          if (yc < next || (yc == next && yc < y1 && xb > slope_next)) {
            next = yc;
            slope_next = xb;
            who = j;
          }
        }
        e.share[cur] += (next - s) * (gi(s) + gi(next)) / 2;
        s = next;
        cur = who;
        if (next >= y1) break;
      }
    }
  } else {
    // Bilinear integrand on every cell, split on a 4 x 4 sub-lattice.
    const int m = 4;
    const double h0 = dual.h(0), h1 = dual.h(1);
    for (int i = 0; i + 1 < dual.nodes[0]; ++i) {
      for (int j = 0; j + 1 < dual.nodes[1]; ++j) {
        const double g00 = g(dual.flat(i, j)), g10 = g(dual.flat(i + 1, j)), g01 = g(dual.flat(i, j + 1)),
                     g11 = g(dual.flat(i + 1, j + 1));
        const std::size_t o00 = owner[dual.flat(i, j)];
        if (o00 == owner[dual.flat(i + 1, j)] && o00 == owner[dual.flat(i, j + 1)] &&
            o00 == owner[dual.flat(i + 1, j + 1)]) {
          e.share[o00] += h0 * h1 * (g00 + g10 + g01 + g11) / 4;
          continue;
        }
        for (int a = 0; a < m; ++a) {
          for (int b = 0; b < m; ++b) {
            const double s = (a + 0.5) / m, t = (b + 0.5) / m;
            const double gv = (1 - s) * (1 - t) * g00 + s * (1 - t) * g10 + (1 - s) * t * g01 + s * t * g11;
            const Point y = make_point(dual.coord(0, i) + s * h0, dual.coord(1, j) + t * h1);
            e.share[argmax_orbit(o, v, y)] += gv * h0 * h1 / (m * m);
          }
        }
      }
    }
  }
  return e;
}

struct RunState {
  std::vector<double> v;
  double energy = 0;
  double objective = 0;
  int iterations = 0;
  GridSpec dual;
  std::vector<double> trace;
  std::vector<double> stage_best;
};

double weighted_sum(const Orbits& o, const std::vector<double>& v) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += o.w[i] * v[i];
  return s;
}

// Penalised objective sum w v / |mu| + rho/2 ((tau - I)_+ / tau)^2.
double penalised(const Orbits& o, const std::vector<double>& v, double energy, double tau, double rho) {
  const double gap = std::max(0.0, tau - energy) / tau;
  return weighted_sum(o, v) / o.mass + rho / 2 * gap * gap;
}

// Exact minimiser along v + kappa 1: the energy scales by e^{2 kappa}.
double ones_shift(const std::vector<double>& v, double energy, double tau, double rho) {
  const double s = (1 + std::sqrt(1 - 2 / rho)) / 2;
  double kappa = 0.5 * std::log(s * tau / energy);
  const double vmin = *std::min_element(v.begin(), v.end());
  return std::max(kappa, -vmin);
}

RunState run(const Orbits& o, std::vector<double> v, double tau, const SolverConfig& cfg, int nodes) {
  RunState st;
  const std::size_t m = v.size();
  for (double rho : cfg.penalty_weights) {
    GridSpec dual = solver_dual(o, v, nodes);
    Evaluation ev = evaluate(o, v, dual, cfg.quad);
    if (!(ev.energy > 0) || !std::isfinite(ev.energy)) fail(ErrorCode::NoFeasiblePoint, "energy vanished");
    {
      const double k = ones_shift(v, ev.energy, tau, rho);
      for (auto& x : v) x += k;
      ev.energy *= std::exp(2 * k);
      for (auto& s : ev.share) s *= std::exp(2 * k);
    }
    double pen = penalised(o, v, ev.energy, tau, rho);
    std::vector<double> prev = v, window;
    double eta = 1.0;
    for (int it = 0; it < cfg.max_iters; ++it) {
      ++st.iterations;
      std::vector<double> cand(m);
      double worst = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = (ev.share[i] / ev.energy) / (o.w[i] / o.mass);
        worst = std::max(worst, std::abs(r - 1));
        // Log-ratio step, bounded so that orbits of negligible mass cannot run away.
        const double d = std::clamp(std::log(std::max(r, 1e-300)), -1.0, 1.0);
        cand[i] = std::max(0.0, v[i] + eta * o.step[i] * d + cfg.momentum * (v[i] - prev[i]));
      }
      if (worst < 1e-9) break;
      Evaluation ne = evaluate(o, cand, dual, cfg.quad);
      const double k = ones_shift(cand, ne.energy, tau, rho);
      for (auto& x : cand) x += k;
      ne.energy *= std::exp(2 * k);
      for (auto& s : ne.share) s *= std::exp(2 * k);
      const double npen = penalised(o, cand, ne.energy, tau, rho);
      if (npen > pen + 1e-15 * std::abs(pen)) {
        // Restart the momentum and shrink the step.
        prev = v;
        eta *= 0.5;
        if (eta < 1e-6) break;
        continue;
      }
      eta = std::min(1.0, eta * 1.05);
      prev = v;
      v = std::move(cand);
      ev = std::move(ne);
      pen = npen;
      st.trace.push_back(weighted_sum(o, v));
      window.push_back(pen);
      if (window.size() > 50) {
        const double old = window[window.size() - 51];
        if (std::abs(old - pen) <= 1e-6 * std::abs(pen)) break;
      }
    }
    // Objective of the feasible point obtained by lifting v until I >= tau.
    const double lifted = weighted_sum(o, v) + o.mass * std::max(0.0, 0.5 * std::log(tau / ev.energy));
    st.stage_best.push_back(st.stage_best.empty() ? lifted : std::min(st.stage_best.back(), lifted));
    st.energy = ev.energy;
    st.dual = dual;
  }
  // Polish on the optimality system: E = tau, and w_i = 2 lambda share_i on
  // the free orbits; orbits pinned at v = 0 carry a nonnegative multiplier.
  {
    const GridSpec dual = solver_dual(o, v, nodes);
    std::vector<double> r(m);
    for (int it = 0; it < cfg.max_iters; ++it) {
      Evaluation ev = evaluate(o, v, dual, cfg.quad);
      const double k = 0.5 * std::log(tau / ev.energy);
      st.dual = dual;
      ++st.iterations;
      if (*std::max_element(v.begin(), v.end()) + k <= 0) {
        // Inactive constraint: phi0 = 0 on the atoms is optimal.
        std::fill(v.begin(), v.end(), 0.0);
        st.energy = evaluate(o, v, dual, cfg.quad).energy;
        break;
      }
      double shares = 0, weights = 0;
      for (std::size_t i = 0; i < m; ++i) {
        v[i] += k;
        r[i] = (ev.share[i] / ev.energy) / (o.w[i] / o.mass);
      }
      std::vector<char> free(m);
      double moved = 0;  // net change of v by the shift after projection
      for (std::size_t i = 0; i < m; ++i) {
        free[i] = v[i] > 0 || r[i] >= 1;
        const double c = std::max(v[i], 0.0);
        moved = std::max(moved, std::abs(c - (v[i] - k)));
        v[i] = c;
        if (free[i]) {
          shares += ev.share[i] / ev.energy;
          weights += o.w[i] / o.mass;
        }
      }
      double worst = moved;
      for (std::size_t i = 0; i < m; ++i) {
        if (!free[i]) continue;
        r[i] *= weights / shares;
        worst = std::max(worst, std::abs(r[i] - 1));
      }
      st.energy = ev.energy * std::exp(2 * k);
      if (worst < 1e-6) break;
      for (std::size_t i = 0; i < m; ++i)
        if (free[i]) v[i] = std::max(0.0, v[i] + 0.5 * o.step[i] * std::clamp(std::log(std::max(r[i], 1e-300)), -1.0, 1.0));
    }
  }
  st.v = std::move(v);
  st.objective = weighted_sum(o, st.v);
  return st;
}

}  // namespace

SolverResult solve(const DiscreteMeasure& mu, const SolverConfig& cfg) {
  cfg.validate();
  if (mu.ambient() != Ambient::Euclidean) fail(ErrorCode::AmbientMismatch, "Minkowski data must be euclidean");
  require_admissible(mu);
  const int n = mu.dim();
  const double tau = cfg.tau ? *cfg.tau : mu.total_mass();
  const double alpha = cfg.quad.alpha;
  const int nodes = cfg.quad.nodes > 0 ? cfg.quad.nodes : (n == 1 ? 513 : 65);
  const Orbits o = make_orbits(mu, cfg.step_scale);

  // Warm start from (1/2) log tau + t0 |x| with seeded slope perturbations.
  const double t0 = feasible_slope(n, alpha);
  const double base = 0.5 * std::log(tau);
  std::optional<RunState> best;
  std::uint64_t best_seed = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
    std::vector<double> v(o.x.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double jitter = r == 0 ? 1.0 : 0.75 + 0.5 * numerics::uniform(seed, i);
      v[i] = std::max(0.0, base + t0 * jitter * o.x[i].norm());
    }
    RunState st = run(o, std::move(v), tau, cfg, nodes);
    if (!best || st.objective < best->objective) {
      best = std::move(st);
      best_seed = seed;
    }
  }

  // Make the constraint active: shifting every value by kappa scales the energy by e^{2 kappa}.
  RunState& st = *best;
  double kappa = 0.5 * std::log(tau / st.energy);
  const double vmin = *std::min_element(st.v.begin(), st.v.end());
  kappa = std::max(kappa, -vmin);
  for (auto& x : st.v) x += kappa;

  SolverResult res;
  res.tau = tau;
  res.best_seed = best_seed;
  res.iterations = st.iterations;
  res.objective_trace = st.trace;
  res.stage_best = st.stage_best;
  res.dual = st.dual;
  const Evaluation ev = evaluate(o, st.v, st.dual, cfg.quad);
  res.constraint_value = ev.energy;
  res.constraint_error = ev.energy_error;
  res.active = std::abs(ev.energy - tau) / tau <= 1e-3;
  if (!(ev.energy > 0) || !std::isfinite(ev.energy)) fail(ErrorCode::NoFeasiblePoint, "constraint is not reachable");

  // phi0 = phi0** restricted to the dual box: one piece per lattice node where
  // phi0* is not locally affine, plus the lattice boundary (the walls).
  const GridSpec& d = st.dual;
  const auto& vals = ev.conj.values();
  std::vector<AffinePiece> pieces;
  const double tol = 1e-12 * std::max(1.0, vals.abs().maxCoeff());
  for (Index k = 0; k < d.size(); ++k) {
    const Point y = d.point(k);
    bool rep = y(0) > 0 || (n == 2 && y(0) == 0 && y(1) > 0);
    if (!rep) continue;
    bool keep = d.on_boundary(k);
    if (!keep) {
      const auto ij = d.unflat(k);
      const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
      for (int q = 0; q < (n == 1 ? 1 : 4) && !keep; ++q) {
        const double c = vals(k);
        const double p = vals(d.flat(ij[0] + dirs[q][0], ij[1] + dirs[q][1]));
        const double mm = vals(d.flat(ij[0] - dirs[q][0], ij[1] - dirs[q][1]));
        keep = p - 2 * c + mm > tol;
      }
    }
    if (keep) pieces.push_back({y, -vals(k)});
  }
  pieces.push_back({zero_point(n), -vals(d.size() / 2)});  // centre node
  res.phi0 = MaxAffineEven(n, std::move(pieces));
  res.objective = objective(res.phi0, mu);
  res.min_phi0 = kInf;
  for (const auto& a : mu.atoms()) res.min_phi0 = std::min(res.min_phi0, res.phi0(a.x));

  // Rescale on the solver's own lattice so the energy contract is exact.
  const LogConcave g = LogConcave::from_grid(ev.conj);
  QuadratureConfig qc = cfg.quad;
  qc.nodes = nodes;
  const double e = riesz_energy(g, qc).value;
  res.f_solution = g.scaled(std::sqrt(mu.total_mass() / e));
  // On the cell of orbit i the gradient of phi0* is +-x_i, so the energy
  // measure of f_solution is read off the cell shares, scaled like f^2.
  std::vector<Atom> atoms;
  const double c = mu.total_mass() / ev.energy;
  for (std::size_t i = 0; i < o.x.size(); ++i) {
    if (!(ev.share[i] > 0)) continue;
    if (o.x[i].norm() == 0) {
      atoms.push_back({o.x[i], c * ev.share[i]});
    } else {
      atoms.push_back({o.x[i], c * ev.share[i] / 2});
      atoms.push_back({Point(-o.x[i]), c * ev.share[i] / 2});
    }
  }
  res.energy_measure = DiscreteMeasure(Ambient::Euclidean, n, std::move(atoms));
  res.verification = verify_measures(mu, res.energy_measure);
  return res;
}

}  // namespace riesz
