#include "riesz/energy_measure.hpp"

#include <array>

#include "riesz/variation.hpp"

namespace riesz {

const char* to_string(Ambient a) { return a == Ambient::Euclidean ? "euclidean" : "sphere"; }

namespace {

bool lex_less(const Point& a, const Point& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (b(i) < a(i)) return false;
  }
  return false;
}

bool same_point(const Point& a, const Point& b) {
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

// Sum of weights in ascending order so the result does not depend on input order.
double stable_sum(std::vector<double> w) {
  std::sort(w.begin(), w.end());
  double s = 0;
  for (double v : w) s += v;
  return s;
}

std::vector<Atom> normalise(std::vector<Atom> atoms) {
  for (auto& a : atoms)
    for (Index i = 0; i < a.x.size(); ++i)
      if (a.x(i) == 0) a.x(i) = 0.0;  // drop the sign of -0
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return lex_less(a.x, b.x); });
  std::vector<Atom> out;
  std::vector<double> pending;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    pending.push_back(atoms[i].w);
    if (i + 1 == atoms.size() || !same_point(atoms[i].x, atoms[i + 1].x)) {
      out.push_back({atoms[i].x, stable_sum(pending)});
      pending.clear();
    }
  }
  return out;
}

std::int64_t mirror_cell(double g, double cell) {
  return g >= 0 ? static_cast<std::int64_t>(std::floor(g / cell)) : -static_cast<std::int64_t>(std::floor(-g / cell)) - 1;
}

double cell_centre(std::int64_t k, double cell) {
  return k >= 0 ? (double(k) + 0.5) * cell : -(double(-k - 1) + 0.5) * cell;
}

// Exact 1-D Wasserstein-1 distance between mu and its reflection.
double evenness_defect_1d(const DiscreteMeasure& mu) {
  std::vector<std::pair<double, double>> ev;  // (location, signed mass)
  for (const auto& a : mu.atoms()) {
    ev.emplace_back(a.x(0), a.w);
    ev.emplace_back(a.x(0) == 0 ? 0.0 : -a.x(0), -a.w);
  }
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double cdf = 0, acc = 0;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    cdf += ev[i].second;
    acc += std::abs(cdf) * (ev[i + 1].first - ev[i].first);
  }
  return acc;
}

// Exact matches first, then greedy nearest-neighbour transport of the rest.
double evenness_defect_2d(const DiscreteMeasure& mu) {
  const DiscreteMeasure r = mu.reflected();
  std::vector<Atom> a = mu.atoms(), b = r.atoms();
  std::size_t i = 0, j = 0;
  std::vector<Atom> ra, rb;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && lex_less(a[i].x, b[j].x))) {
      ra.push_back(a[i++]);
    } else if (i == a.size() || lex_less(b[j].x, a[i].x)) {
      rb.push_back(b[j++]);
    } else {
      const double m = std::min(a[i].w, b[j].w);
      if (a[i].w > m) ra.push_back({a[i].x, a[i].w - m});
      if (b[j].w > m) rb.push_back({b[j].x, b[j].w - m});
      ++i;
      ++j;
    }
  }
  double cost = 0;
  for (auto& p : ra) {
    while (p.w > 0) {
      double best = kInf;
      std::size_t bi = rb.size();
      for (std::size_t k = 0; k < rb.size(); ++k) {
        if (!(rb[k].w > 0)) continue;
        const double d = (rb[k].x - p.x).norm();
        if (d < best) {
          best = d;
          bi = k;
        }
      }
      if (bi == rb.size()) break;
      const double m = std::min(p.w, rb[bi].w);
      cost += m * best;
      p.w -= m;
      rb[bi].w -= m;
    }
  }
  return cost;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Ambient ambient, int dim, std::vector<Atom> atoms) : ambient_(ambient), dim_(dim) {
  if (dim < 1 || dim > 2) fail(ErrorCode::SpecMismatch, "measure dimension must be 1 or 2");
  for (const auto& a : atoms) {
    if (a.x.size() != dim) fail(ErrorCode::SpecMismatch, "atom dimension mismatch");
    if (!a.x.allFinite()) fail(ErrorCode::InvalidArgument, "atom location is not finite");
    if (!(a.w > 0) || !std::isfinite(a.w)) fail(ErrorCode::InvalidArgument, "atom weights must be positive and finite");
    if (ambient == Ambient::Sphere && std::abs(a.x.norm() - 1) > 1e-12)
      fail(ErrorCode::NonUnitDirection, "sphere atoms must be unit vectors");
  }
  atoms_ = normalise(std::move(atoms));
}

double DiscreteMeasure::total_mass() const {
  std::vector<double> w;
  for (const auto& a : atoms_) w.push_back(a.w);
  return stable_sum(std::move(w));
}

DiscreteMeasure DiscreteMeasure::reflected() const {
  std::vector<Atom> r;
  for (const auto& a : atoms_) r.push_back({Point(-a.x), a.w});
  return DiscreteMeasure(ambient_, dim_, std::move(r));
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
  if (!(c > 0)) fail(ErrorCode::NonpositiveScale, "measure scale must be positive");
  std::vector<Atom> r;
  for (const auto& a : atoms_) r.push_back({a.x, c * a.w});
  return DiscreteMeasure(ambient_, dim_, std::move(r));
}

DiscreteMeasure DiscreteMeasure::binned(double cell) const {
  if (!(cell > 0) || !std::isfinite(cell)) fail(ErrorCode::InvalidArgument, "bin width must be positive");
  if (ambient_ != Ambient::Euclidean) fail(ErrorCode::AmbientMismatch, "binning needs a euclidean measure");
  // Cells have an edge at 0; an atom on that edge is split evenly between
  // both neighbours so the binning commutes with reflection.
  std::vector<Atom> r;
  for (const auto& a : atoms_) {
    std::vector<Atom> parts{{Point(dim_), a.w}};
    for (int i = 0; i < dim_; ++i) {
      if (a.x(i) == 0) {
        std::vector<Atom> split;
        for (auto p : parts) {
          p.w /= 2;
          p.x(i) = cell / 2;
          split.push_back(p);
          p.x(i) = -cell / 2;
          split.push_back(p);
        }
        parts = std::move(split);
      } else {
        for (auto& p : parts) p.x(i) = cell_centre(mirror_cell(a.x(i), cell), cell);
      }
    }
    r.insert(r.end(), parts.begin(), parts.end());
  }
  return DiscreteMeasure(ambient_, dim_, std::move(r));
}

DiscreteMeasure riesz_energy_measure(const LogConcave& f, const QuadratureConfig& cfg, std::optional<double> cell) {
  const PotentialField pf = potential_field(f, cfg);
  const auto& s = pf.s;
  std::vector<Atom> atoms;
  const auto* grid = std::get_if<LogConcave::Grid>(&f.backing());
  for (Index k = 0; k < s.spec.size(); ++k) {
    const double m = s.w(k) * s.f(k) * pf.potential(k);
    if (!(m > 0)) continue;
    if (!grid) {
      const Point x = s.spec.point(k);
      const auto* ex = std::get_if<LogConcave::Exponential>(&f.backing());
      if (ex && (x - ex->center).norm() == 0) {
        // Kink node: its mass goes to the sphere of radius b, not to 0.
        if (f.dim() == 1) {
          atoms.push_back({make_point(-ex->b), m / 2});
          atoms.push_back({make_point(ex->b), m / 2});
        } else {
          const double d = ex->b / std::sqrt(2.0);
          for (double sx : {-d, d})
            for (double sy : {-d, d}) atoms.push_back({make_point(sx, sy), m / 4});
        }
        continue;
      }
      atoms.push_back({f.gradient(x), m});
      continue;
    }
    // Each half-cell (quadrant in 2-D) around the node carries its one-sided
    // slope, so kinks of phi between nodes are resolved.
    const auto& phi = grid->phi;
    const auto ij = s.spec.unflat(k);
    std::array<std::array<double, 2>, 2> slope{};
    for (int a = 0; a < f.dim(); ++a) {
      auto val = [&](int off) {
        auto c = ij;
        c[a] += off;
        if (c[a] < 0 || c[a] >= s.spec.nodes[a]) return kInf;
        return phi(s.spec.flat(c[0], c[1]));
      };
      const double v0 = phi(k), vm = val(-1), vp = val(1), h = s.spec.h(a);
      const bool hm = std::isfinite(vm), hp = std::isfinite(vp);
      if (!hm && !hp) fail(ErrorCode::NoFiniteNeighbor, "no finite neighbour along an axis");
      slope[a][0] = hm ? (v0 - vm) / h : (vp - v0) / h;
      slope[a][1] = hp ? (vp - v0) / h : (v0 - vm) / h;
    }
    if (f.dim() == 1) {
      atoms.push_back({make_point(slope[0][0]), m / 2});
      atoms.push_back({make_point(slope[0][1]), m / 2});
    } else {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) atoms.push_back({make_point(slope[0][a], slope[1][b]), m / 4});
    }
  }
  DiscreteMeasure mu(Ambient::Euclidean, f.dim(), std::move(atoms));
  return cell ? mu.binned(*cell) : mu;
}

DiscreteMeasure spherical_energy_measure(const LogConcave& f, const QuadratureConfig& cfg) {
  std::vector<Atom> atoms;
  for (const auto& fi : facet_integrals(f, cfg))
    if (fi.value > 0) atoms.push_back({fi.facet.normal, fi.value});
  return DiscreteMeasure(Ambient::Sphere, f.dim(), std::move(atoms));
}

std::vector<Point> direction_net(int dim) {
  std::vector<Point> net;
  if (dim == 1) return {make_point(-1.0), make_point(1.0)};
  for (int k = 0; k < 720; ++k) {
    const double th = 2 * kPi * k / 720;
    net.push_back(make_point(std::cos(th), std::sin(th)));
  }
  return net;
}

AdmissibilityReport admissibility(const DiscreteMeasure& mu) {
  if (mu.ambient() != Ambient::Euclidean) fail(ErrorCode::AmbientMismatch, "admissibility needs a euclidean measure");
  if (mu.empty()) fail(ErrorCode::EmptyMeasure, "measure has no atoms");
  AdmissibilityReport r;
  r.total_mass = mu.total_mass();
  r.first_moment = mu.integrate([](const Point& x) { return x.norm(); });
  r.evenness_defect = mu.dim() == 1 ? evenness_defect_1d(mu) : evenness_defect_2d(mu);
  r.min_directional_moment = kInf;
  for (const auto& u : direction_net(mu.dim())) {
    const double m = mu.integrate([&](const Point& x) { return std::abs(x.dot(u)); });
    if (m < r.min_directional_moment) {
      r.min_directional_moment = m;
      r.min_direction = u;
    }
  }
  double radius = 0;
  for (const auto& a : mu.atoms()) radius = std::max(radius, a.x.norm());
  r.even = r.evenness_defect <= 1e-12 * r.total_mass * std::max(radius, 1.0);
  r.concentrated = r.min_directional_moment <= 1e-9 * std::max(r.first_moment, 1e-300);
  return r;
}

void require_admissible(const DiscreteMeasure& mu) {
  const AdmissibilityReport r = admissibility(mu);
  if (r.concentrated) fail(ErrorCode::InadmissibleMeasure, "measure is concentrated on a subspace");
  if (!r.even) fail(ErrorCode::InadmissibleMeasure, "measure is not even");
}

DiscreteMeasure symmetrize(const DiscreteMeasure& mu) {
  if (mu.ambient() != Ambient::Euclidean) fail(ErrorCode::AmbientMismatch, "symmetrize needs a euclidean measure");
  std::vector<Atom> r;
  for (const auto& a : mu.atoms()) {
    r.push_back({a.x, a.w / 2});
    r.push_back({Point(-a.x), a.w / 2});
  }
  return DiscreteMeasure(Ambient::Euclidean, mu.dim(), std::move(r));
}

MeasureComparison compare_measures(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int degree) {
  if (mu.ambient() != nu.ambient() || mu.dim() != nu.dim())
    fail(ErrorCode::AmbientMismatch, "measures live on different spaces");
  if (degree < 0) fail(ErrorCode::InvalidArgument, "degree must be non-negative");
  MeasureComparison c;
  c.degree = degree;
  const double mm = mu.total_mass(), mn = nu.total_mass();
  const double scale = mm > 0 ? mm : std::max(mn, 1e-300);
  c.mass_residual = std::abs(mn - mm) / scale;
  const int n = mu.dim();
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; b <= (n == 2 ? degree - a : 0); ++b) {
      auto mono = [&](const Point& x) { return std::pow(x(0), a) * (n == 2 ? std::pow(x(1), b) : 1.0); };
      auto amono = [&](const Point& x) { return std::abs(mono(x)); };
      double norm = mu.integrate(amono);
      if (!(norm > 0)) norm = nu.integrate(amono);
      if (!(norm > 0)) continue;
      c.moment_residual = std::max(c.moment_residual, std::abs(mu.integrate(mono) - nu.integrate(mono)) / norm);
    }
  }
  // Dyadic boxes over a common symmetric bounding cube, levels 0..3, half-open cells.
  double radius = 0;
  for (const auto* m : {&mu, &nu})
    for (const auto& at : m->atoms()) radius = std::max(radius, at.x.cwiseAbs().maxCoeff());
  radius = radius * (1 + 1e-9) + 1e-300;
  for (int level = 0; level <= 3; ++level) {
    const int cells = 1 << level;
    const int total = n == 1 ? cells : cells * cells;
    std::vector<double> bm(total, 0.0), bn(total, 0.0);
    auto index = [&](const Point& x) {
      int id = 0;
      for (int i = 0; i < n; ++i) {
        const int k = std::clamp(static_cast<int>(std::floor((x(i) + radius) / (2 * radius) * cells)), 0, cells - 1);
        id = id * cells + k;
      }
      return id;
    };
    for (const auto& at : mu.atoms()) bm[index(at.x)] += at.w;
    for (const auto& at : nu.atoms()) bn[index(at.x)] += at.w;
    for (int k = 0; k < total; ++k) c.box_residual = std::max(c.box_residual, std::abs(bm[k] - bn[k]) / scale);
  }
  return c;
}

MongeAmpereDiagnostic monge_ampere_diagnostic(const LogConcave& f, const QuadratureConfig& cfg) {
  const int n = f.dim();
  const GridSpec dual = slope_dual_spec(n, std::max(f.slope_bound(), 1e-3), n == 1 ? 129 : 33);
  const GridFunction conj = conjugate_on(f, dual);
  const PotentialField pf = potential_field(f, cfg);
  const DiscreteMeasure mu = riesz_energy_measure(f, cfg);

  // Atom histogram on the dual cells.
  Eigen::ArrayXd hist = Eigen::ArrayXd::Zero(dual.size());
  for (const auto& a : mu.atoms()) {
    if (!dual.contains(a.x)) continue;
    std::array<int, 2> ij{0, 0};
    for (int i = 0; i < n; ++i)
      ij[i] = std::clamp(static_cast<int>(std::lround((a.x(i) - dual.lo[i]) / dual.h(i))), 0, dual.nodes[i] - 1);
    hist(dual.flat(ij[0], ij[1])) += a.w;
  }
  const double vol = dual.cell_volume();

  std::vector<double> pred(dual.size(), -1), emp(dual.size(), 0);
  double peak = 0;
  for (Index k = 0; k < dual.size(); ++k) {
    if (dual.on_boundary(k)) continue;
    const auto ij = dual.unflat(k);
    auto v = [&](int di, int dj) { return conj.at(ij[0] + di, ij[1] + dj); };
    bool ok = std::isfinite(v(0, 0));
    Point grad(n);
    Eigen::Matrix2d hess = Eigen::Matrix2d::Identity();
    for (int a = 0; a < n && ok; ++a) {
      const int da = a == 0, db = a == 1;
      const double p = v(da, db), m = v(-da, -db);
      ok = std::isfinite(p) && std::isfinite(m);
      grad(a) = (p - m) / (2 * dual.h(a));
      hess(a, a) = (p - 2 * v(0, 0) + m) / (dual.h(a) * dual.h(a));
    }
    if (ok && n == 2) {
      const double pp = v(1, 1), pm = v(1, -1), mp = v(-1, 1), mm = v(-1, -1);
      ok = std::isfinite(pp) && std::isfinite(pm) && std::isfinite(mp) && std::isfinite(mm);
      hess(0, 1) = hess(1, 0) = (pp - pm - mp + mm) / (4 * dual.h(0) * dual.h(1));
    }
    if (!ok) continue;
    const double det = n == 1 ? hess(0, 0) : hess.determinant();
    const double fx = f.value(grad);
    if (!(det > 0) || !(fx > 0)) continue;
    pred[k] = riesz_potential(pf, f, grad, cfg) * fx * det;
    emp[k] = hist(k) / vol;
    peak = std::max(peak, pred[k]);
  }
  MongeAmpereDiagnostic d;
  double sum = 0;
  for (Index k = 0; k < dual.size(); ++k) {
    if (!(pred[k] > 1e-2 * peak)) continue;
    const double rel = std::abs(emp[k] - pred[k]) / pred[k];
    d.max_relative_deviation = std::max(d.max_relative_deviation, rel);
    sum += rel;
    ++d.compared_cells;
  }
  if (d.compared_cells > 0) d.mean_relative_deviation = sum / d.compared_cells;
  return d;
}

}  // namespace riesz
