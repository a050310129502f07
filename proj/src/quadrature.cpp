#include "riesz/quadrature.hpp"

#include <mutex>

namespace riesz {

const char* to_string(QuadMethod m) {
  switch (m) {
    case QuadMethod::DirectDiagonalCorrected: return "direct_diagonal_corrected";
    case QuadMethod::EpsilonRegularized: return "epsilon_regularized";
    case QuadMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

QuadMethod parse_quad_method(const std::string& s) {
  if (s == "direct" || s == "direct_diagonal_corrected") return QuadMethod::DirectDiagonalCorrected;
  if (s == "epsilon" || s == "epsilon_regularized") return QuadMethod::EpsilonRegularized;
  if (s == "mc" || s == "monte_carlo") return QuadMethod::MonteCarlo;
  fail(ErrorCode::InvalidArgument, "unknown quadrature method '" + s + "'");
}

void QuadratureConfig::validate() const {
  if (!(alpha > 0) || !std::isfinite(alpha)) fail(ErrorCode::InvalidAlpha, "alpha must be positive");
  for (std::size_t k = 0; k < epsilon_schedule.size(); ++k) {
    if (!(epsilon_schedule[k] > 0)) fail(ErrorCode::InvalidArgument, "epsilon schedule must be positive");
    if (k > 0 && !(epsilon_schedule[k] < epsilon_schedule[k - 1]))
      fail(ErrorCode::InvalidArgument, "epsilon schedule must be strictly decreasing");
  }
  if (!epsilon_schedule.empty() && epsilon_schedule.size() < 2)
    fail(ErrorCode::InvalidArgument, "epsilon schedule needs at least two entries");
  if (mc_samples < 10000) fail(ErrorCode::InvalidArgument, "mc_samples must be at least 1e4");
  if (nodes != 0 && (nodes < 3 || nodes % 2 == 0)) fail(ErrorCode::InvalidArgument, "nodes must be odd and >= 3");
}

namespace numerics {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
}

namespace {

// Continued fraction for Q(s,x), x > s+1 (modified Lentz).
double gamma_q_cf(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - s, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - s);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-16) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

// Series for P(s,x), x <= s+1.
double gamma_p_series(double s, double x) {
  if (x <= 0) return 0;
  double ap = s, sum = 1 / s, del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

double upper_gamma(double s, double x) {
  const double q = x < s + 1 ? 1 - gamma_p_series(s, x) : gamma_q_cf(s, x);
  return q * std::tgamma(s);
}

double uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t z = splitmix(splitmix(seed) + counter * 0xD1B54A32D192ED03ull);
  return double(z >> 11) * 0x1.0p-53;
}

}  // namespace numerics

namespace {

const std::vector<double>& gl8_x() {
  static const std::vector<double> x = [] {
    std::vector<double> a, b;
    numerics::gauss_legendre(8, a, b);
    return a;
  }();
  return x;
}
const std::vector<double>& gl8_w() {
  static const std::vector<double> w = [] {
    std::vector<double> a, b;
    numerics::gauss_legendre(8, a, b);
    return b;
  }();
  return w;
}

// Composite 8-point Gauss-Legendre on [0, smax] with panels of width <= 0.5.
template <class Fn>
double panel_integral(double smax, Fn&& g) {
  if (!(smax > 0)) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(smax / 0.5)));
  const double width = smax / panels;
  const auto& x = gl8_x();
  const auto& w = gl8_w();
  double acc = 0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    for (int k = 0; k < 8; ++k) acc += w[k] * g(a + 0.5 * width * (x[k] + 1));
  }
  return 0.5 * width * acc;
}

// Integral of (r^2 + eps)^{(alpha-1)/2} over [0, len] via u = sqrt(eps) sinh s.
double segment_kernel_integral(double len, double alpha, double eps) {
  if (!(len > 0)) return 0.0;
  if (eps == 0) return std::pow(len, alpha) / alpha;
  const double se = std::sqrt(eps);
  return std::pow(eps, alpha / 2) * panel_integral(std::asinh(len / se), [&](double s) {
           return std::pow(std::cosh(s), alpha);
         });
}

// Integral of (|x|^2 + eps)^{(alpha-2)/2} over the triangle {0 <= x1 <= a, 0 <= x2 <= x1 b / a};
// in polar form with tan(theta) = sinh(s) the integrand is smooth.
double triangle_kernel_integral(double a, double b, double alpha, double eps) {
  if (!(a > 0) || !(b > 0)) return 0.0;
  const double smax = std::asinh(b / a);
  if (eps == 0) {
    return std::pow(a, alpha) / alpha * panel_integral(smax, [&](double s) { return std::pow(std::cosh(s), alpha - 1); });
  }
  const double e2 = std::pow(eps, alpha / 2);
  return panel_integral(smax, [&](double s) {
           const double c = std::cosh(s);
           return (std::pow(a * a * c * c + eps, alpha / 2) - e2) / (alpha * c);
         });
}

double rectangle_corner_integral(double a, double b, double alpha, double eps) {
  return triangle_kernel_integral(a, b, alpha, eps) + triangle_kernel_integral(b, a, alpha, eps);
}

struct KernelTable {
  int n1 = 1, n2 = 1;
  std::vector<double> t;
  double at(int d1, int d2) const { return t[std::size_t(d1 + n1 - 1) * (2 * n2 - 1) + (d2 + n2 - 1)]; }
};

KernelTable make_table(const GridSpec& s, double alpha, double eps) {
  KernelTable k;
  k.n1 = s.n(0);
  k.n2 = s.n(1);
  const int n = s.dim;
  const double h1 = s.h(0), h2 = n == 2 ? s.h(1) : 0.0;
  const double p = (alpha - n) / 2;
  k.t.resize(std::size_t(2 * k.n1 - 1) * (2 * k.n2 - 1));
  for (int d1 = -(k.n1 - 1); d1 <= k.n1 - 1; ++d1) {
    for (int d2 = -(k.n2 - 1); d2 <= k.n2 - 1; ++d2) {
      const double r2 = (d1 * h1) * (d1 * h1) + (d2 * h2) * (d2 * h2) + eps;
      double v;
      if (r2 == 0) v = alpha > n ? 0.0 : (alpha == n ? 1.0 : 0.0);
      else v = alpha == n ? 1.0 : std::pow(r2, p);
      k.t[std::size_t(d1 + k.n1 - 1) * (2 * k.n2 - 1) + (d2 + k.n2 - 1)] = v;
    }
  }
  return k;
}

// Box integrals of the kernel at every node, using the lattice symmetry:
// the value only depends on the node's distances to the four edges.
Eigen::ArrayXd node_box_integrals(const GridSpec& s, double alpha, double eps) {
  Eigen::ArrayXd p(s.size());
  if (s.dim == 1) {
    for (int i = 0; i < s.nodes[0]; ++i) {
      const double y = s.coord(0, i);
      p(i) = segment_kernel_integral(y - s.lo[0], alpha, eps) + segment_kernel_integral(s.hi[0] - y, alpha, eps);
    }
    return p;
  }
  const int n1 = s.nodes[0], n2 = s.nodes[1];
  Eigen::ArrayXXd corner(n1, n2);
  parallel_for(0, n1, [&](Index i) {
    const double a = i * s.h(0);
    for (int j = 0; j < n2; ++j) corner(i, j) = rectangle_corner_integral(a, j * s.h(1), alpha, eps);
  });
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      p(s.flat(i, j)) = corner(i, j) + corner(n1 - 1 - i, j) + corner(i, n2 - 1 - j) + corner(n1 - 1 - i, n2 - 1 - j);
  return p;
}

Eigen::ArrayXd box_weights(const GridSpec& s) {
  Eigen::ArrayXd w(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    const auto ij = s.unflat(k);
    double v = 1;
    for (int a = 0; a < s.dim; ++a) {
      const bool edge = ij[a] == 0 || ij[a] == s.nodes[a] - 1;
      v *= (edge ? 0.5 : 1.0) * s.h(a);
    }
    w(k) = v;
  }
  return w;
}

// Lattice potentials with kernel (r^2 + eps)^{(alpha-n)/2}. For alpha < n the
// singular part is subtracted:
//   I_i = sum_j (W_j f_j - Wbox_j f_i) K_ij + f_i * int_box K(x - x_i) dx,
// which is exact for f constant on the box.
Eigen::ArrayXd lattice_potentials(const SampledFunction& sf, double alpha, double eps) {
  const GridSpec& s = sf.spec;
  const bool singular = alpha < s.dim;
  const KernelTable tab = make_table(s, alpha, eps);
  Eigen::ArrayXd box;
  if (singular) box = node_box_integrals(s, alpha, eps);
  const Eigen::ArrayXd wf = sf.w * sf.f;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(s.size());
  const int n1 = s.n(0), n2 = s.n(1);
  parallel_for(0, s.size(), [&](Index i) {
    if (!(sf.f(i) > 0)) return;
    const auto ij = s.unflat(i);
    double acc = 0, accb = 0;
    for (int j1 = 0; j1 < n1; ++j1) {
      const double* row = &tab.t[std::size_t(ij[0] - j1 + n1 - 1) * (2 * n2 - 1) + (ij[1] + n2 - 1)];
      const Index base = Index(j1) * n2;
      if (singular) {
        for (int j2 = 0; j2 < n2; ++j2) {
          const double kv = row[-j2];
          acc += kv * wf(base + j2);
          accb += kv * sf.w_box(base + j2);
        }
      } else {
        for (int j2 = 0; j2 < n2; ++j2) acc += row[-j2] * wf(base + j2);
      }
    }
    out(i) = singular ? acc - sf.f(i) * accb + sf.f(i) * box(i) : acc;
  });
  return out;
}

double lattice_energy(const SampledFunction& sf, const Eigen::ArrayXd& pot) {
  return ordered_sum((sf.w * sf.f * pot).matrix());
}

std::vector<double> default_schedule(const GridSpec& s) {
  double h = s.h(0);
  if (s.dim == 2) h = std::min(h, s.h(1));
  return {16 * h * h, 4 * h * h, h * h};
}

// Weights lambda_k with E0 = sum lambda_k E(eps_k) under
// E(eps) = E0 + c1 eps^{alpha/2} + c2 eps (three points) or without c2 (two).
std::vector<double> extrapolation_weights(const std::vector<double>& eps, double alpha) {
  const std::size_t m = std::min<std::size_t>(eps.size(), 3);
  const std::size_t off = eps.size() - m;
  Eigen::MatrixXd a(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    a(0, r) = 1;
    a(1, r) = std::pow(eps[off + r], alpha / 2);
    if (m == 3) a(2, r) = eps[off + r];
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(0) = 1;
  const Eigen::VectorXd lam = a.colPivHouseholderQr().solve(rhs);
  std::vector<double> out(eps.size(), 0.0);
  for (std::size_t r = 0; r < m; ++r) out[off + r] = lam(r);
  return out;
}

struct EpsResult {
  Eigen::ArrayXd potential;
  double energy = 0;
  double model_error = 0;
};

EpsResult eps_extrapolated(const SampledFunction& sf, double alpha, const std::vector<double>& sched) {
  std::vector<Eigen::ArrayXd> fields;
  std::vector<double> energies;
  for (double e : sched) {
    fields.push_back(lattice_potentials(sf, alpha, e));
    energies.push_back(lattice_energy(sf, fields.back()));
  }
  const auto lam = extrapolation_weights(sched, alpha);
  EpsResult r;
  r.potential = Eigen::ArrayXd::Zero(sf.spec.size());
  for (std::size_t k = 0; k < sched.size(); ++k) {
    r.potential += lam[k] * fields[k];
    r.energy += lam[k] * energies[k];
  }
  // Compare against the lower-order extrapolation on the two smallest eps.
  const std::vector<double> tail(sched.end() - 2, sched.end());
  const auto lam2 = extrapolation_weights(tail, alpha);
  const double e2 = lam2[0] * energies[energies.size() - 2] + lam2[1] * energies.back();
  r.model_error = sched.size() >= 3 ? std::abs(r.energy - e2) : std::abs(r.energy - energies.back());
  return r;
}

double ball_surface(int dim) { return dim == 1 ? 2.0 : 2 * kPi; }

EnergyReport monte_carlo_energy(const LogConcave& f, const SampledFunction& sf, const QuadratureConfig& cfg) {
  const GridSpec& s = sf.spec;
  const int n = s.dim;
  const double alpha = cfg.alpha;
  const Eigen::ArrayXd mass_w = sf.w * sf.f;
  std::vector<double> cdf(s.size());
  double tot = 0;
  for (Index k = 0; k < s.size(); ++k) cdf[k] = (tot += mass_w(k));
  double diam2 = 0;
  for (int a = 0; a < n; ++a) diam2 += (s.hi[a] - s.lo[a]) * (s.hi[a] - s.lo[a]);
  const double big_l = std::sqrt(diam2);
  const double factor = tot * ball_surface(n) * std::pow(big_l, alpha) / alpha;

  const std::int64_t block = 1 << 15;
  const std::int64_t nblocks = (cfg.mc_samples + block - 1) / block;
  std::vector<double> sum(nblocks, 0.0), sum2(nblocks, 0.0);
  auto finite_at = [&](const std::array<int, 2>& c) {
    for (int a = 0; a < n; ++a)
      if (c[a] < 0 || c[a] >= s.nodes[a]) return false;
    return sf.f(s.flat(c[0], c[1])) > 0;
  };
  parallel_for(0, nblocks, [&](Index b) {
    const std::int64_t lo = b * block, hi = std::min<std::int64_t>(cfg.mc_samples, lo + block);
    double acc = 0, acc2 = 0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const std::uint64_t c0 = std::uint64_t(i) * 8;
      const double u = numerics::uniform(cfg.seed, c0) * tot;
      Index k = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      k = std::min<Index>(k, s.size() - 1);
      const auto ij = s.unflat(k);
      Point x = s.point(k);
      for (int a = 0; a < n; ++a) {
        auto l = ij, r = ij;
        l[a] -= 1;
        r[a] += 1;
        const double left = finite_at(l) ? 0.5 : 0.0, right = finite_at(r) ? 0.5 : 0.0;
        const double v = numerics::uniform(cfg.seed, c0 + 1 + a);
        x(a) += s.h(a) * (-left + v * (left + right));
      }
      Point dir(n);
      if (n == 1) {
        dir(0) = numerics::uniform(cfg.seed, c0 + 3) < 0.5 ? -1.0 : 1.0;
      } else {
        const double th = 2 * kPi * numerics::uniform(cfg.seed, c0 + 3);
        dir << std::cos(th), std::sin(th);
      }
      const double rad = big_l * std::pow(numerics::uniform(cfg.seed, c0 + 4), 1 / alpha);
      const Point y = x + rad * dir;
      const double fy = f.value(y);
      acc += fy;
      acc2 += fy * fy;
    }
    sum[b] = acc;
    sum2[b] = acc2;
  });
  double s1 = 0, s2 = 0;
  for (Index b = 0; b < nblocks; ++b) {
    s1 += sum[b];
    s2 += sum2[b];
  }
  const double nn = double(cfg.mc_samples);
  const double mean = s1 / nn;
  const double var = std::max(0.0, s2 / nn - mean * mean);
  EnergyReport r;
  r.value = factor * mean;
  r.estimated_error = factor * std::sqrt(var / nn);
  r.method_used = QuadMethod::MonteCarlo;
  return r;
}

std::vector<double> schedule_for(const QuadratureConfig& cfg, const GridSpec& s) {
  return cfg.epsilon_schedule.empty() ? default_schedule(s) : cfg.epsilon_schedule;
}

// Potentials and energy on one lattice according to the method.
struct LevelResult {
  Eigen::ArrayXd potential;
  double energy = 0;
  double model_error = 0;
};

LevelResult level(const SampledFunction& sf, const QuadratureConfig& cfg, QuadMethod m) {
  LevelResult r;
  const bool eps_route = m == QuadMethod::EpsilonRegularized && cfg.alpha < sf.spec.dim;
  if (eps_route) {
    auto e = eps_extrapolated(sf, cfg.alpha, schedule_for(cfg, sf.spec));
    r.potential = std::move(e.potential);
    r.energy = e.energy;
    r.model_error = e.model_error;
  } else {
    r.potential = lattice_potentials(sf, cfg.alpha, 0.0);
    r.energy = lattice_energy(sf, r.potential);
  }
  return r;
}

}  // namespace

SampledFunction sample(const LogConcave& f, const GridSpec& spec) {
  SampledFunction s;
  s.spec = spec;
  const GridFunction phi = f.sample_phi(spec);
  s.phi = phi.values();
  s.f = Eigen::ArrayXd::Zero(spec.size());
  for (Index k = 0; k < spec.size(); ++k)
    if (std::isfinite(s.phi(k))) s.f(k) = std::exp(-s.phi(k));
  s.w = trapezoid_weights(phi);
  s.w_box = box_weights(spec);
  return s;
}

SampledFunction sample(const LogConcave& f, const QuadratureConfig& cfg) {
  return sample(f, f.integration_grid(cfg.nodes));
}

PotentialField potential_field(const LogConcave& f, const QuadratureConfig& cfg) {
  cfg.validate();
  PotentialField pf;
  pf.s = sample(f, cfg);
  const QuadMethod m =
      cfg.method == QuadMethod::MonteCarlo ? QuadMethod::DirectDiagonalCorrected : cfg.method;
  LevelResult fine = level(pf.s, cfg, m);
  pf.potential = std::move(fine.potential);
  pf.energy.value = fine.energy;
  pf.energy.method_used = m;
  double disc = 0;
  if (auto coarse = pf.s.spec.coarsened()) {
    const SampledFunction cs = sample(f, *coarse);
    QuadratureConfig ccfg = cfg;
    if (!cfg.epsilon_schedule.empty()) ccfg.epsilon_schedule = cfg.epsilon_schedule;
    else ccfg.epsilon_schedule = default_schedule(pf.s.spec);  // same eps on both levels
    disc = std::abs(fine.energy - level(cs, ccfg, m).energy);
  }
  pf.energy.estimated_error = disc + fine.model_error + 1e-14 * std::abs(fine.energy);
  pf.energy.tail_bound = tail_bound(f, pf.s.spec, cfg.alpha);
  return pf;
}

EnergyReport riesz_energy(const LogConcave& f, const QuadratureConfig& cfg) {
  cfg.validate();
  if (cfg.method == QuadMethod::MonteCarlo) {
    const SampledFunction sf = sample(f, cfg);
    EnergyReport r = monte_carlo_energy(f, sf, cfg);
    r.tail_bound = tail_bound(f, sf.spec, cfg.alpha);
    return r;
  }
  return potential_field(f, cfg).energy;
}

EnergyReport chord_energy(const SupportSet& k, const QuadratureConfig& cfg) {
  if (!k.bounded()) fail(ErrorCode::UnboundedBody, "chord energy needs a bounded body");
  return riesz_energy(LogConcave::indicator(k), cfg);
}

double box_kernel_integral(const GridSpec& box, const Point& y, double alpha, double eps) {
  if (box.dim == 1)
    return segment_kernel_integral(y(0) - box.lo[0], alpha, eps) + segment_kernel_integral(box.hi[0] - y(0), alpha, eps);
  const double a0 = y(0) - box.lo[0], a1 = box.hi[0] - y(0), b0 = y(1) - box.lo[1], b1 = box.hi[1] - y(1);
  return rectangle_corner_integral(a0, b0, alpha, eps) + rectangle_corner_integral(a1, b0, alpha, eps) +
         rectangle_corner_integral(a0, b1, alpha, eps) + rectangle_corner_integral(a1, b1, alpha, eps);
}

namespace {

double point_potential(const SampledFunction& sf, const LogConcave& f, const Point& y, double alpha, double eps) {
  const GridSpec& s = sf.spec;
  const int n = s.dim;
  const bool inside = s.contains(y);
  const bool singular = alpha < n && inside;
  const double fy = singular ? f.value(y) : 0.0;
  const double p = (alpha - n) / 2;
  double acc = 0;
  for (Index j = 0; j < s.size(); ++j) {
    const double r2 = (s.point(j) - y).squaredNorm() + eps;
    if (r2 == 0) {
      if (alpha == n) acc += sf.w(j) * sf.f(j);
      continue;
    }
    const double kv = alpha == n ? 1.0 : std::pow(r2, p);
    acc += kv * (sf.w(j) * sf.f(j) - (singular ? sf.w_box(j) * fy : 0.0));
  }
  if (singular) acc += fy * box_kernel_integral(s, y, alpha, eps);
  return acc;
}

}  // namespace

double riesz_potential(const PotentialField& pf, const LogConcave& f, const Point& y, const QuadratureConfig& cfg) {
  cfg.validate();
  if (y.size() != f.dim() || !y.allFinite()) fail(ErrorCode::SpecMismatch, "potential point must be finite and match dim");
  const SampledFunction& sf = pf.s;
  if (cfg.method == QuadMethod::EpsilonRegularized && cfg.alpha < f.dim()) {
    const auto sched = schedule_for(cfg, sf.spec);
    const auto lam = extrapolation_weights(sched, cfg.alpha);
    double v = 0;
    for (std::size_t k = 0; k < sched.size(); ++k) v += lam[k] * point_potential(sf, f, y, cfg.alpha, sched[k]);
    return v;
  }
  return point_potential(sf, f, y, cfg.alpha, 0.0);
}

double riesz_potential(const LogConcave& f, const Point& y, const QuadratureConfig& cfg) {
  cfg.validate();
  PotentialField pf;
  pf.s = sample(f, cfg);
  return riesz_potential(pf, f, y, cfg);
}

double weighted_energy(const PotentialField& pf, const Eigen::ArrayXd& w) {
  const auto& s = pf.s;
  if (w.size() != s.spec.size()) fail(ErrorCode::SpecMismatch, "weight field does not match the lattice");
  double acc = 0;
  for (Index k = 0; k < w.size(); ++k) {
    const double m = s.w(k) * s.f(k);
    if (m > 0) acc += m * w(k) * pf.potential(k);
  }
  return acc;
}

double weighted_energy(const LogConcave& f, const Eigen::ArrayXd& w, const QuadratureConfig& cfg) {
  const PotentialField pf = potential_field(f, cfg);
  const auto& s = pf.s;
  if (w.size() != s.spec.size()) fail(ErrorCode::SpecMismatch, "weight field does not match the lattice");
  double peak = 0, edge = 0;
  for (Index k = 0; k < w.size(); ++k) {
    if (!(s.f(k) > 0)) continue;
    if (!std::isfinite(w(k))) fail(ErrorCode::WeightBlowup, "weight is not finite where f > 0");
    const double v = std::abs(w(k)) * s.f(k);
    peak = std::max(peak, v);
    if (s.spec.on_boundary(k)) edge = std::max(edge, v);
  }
  // Truncation only matters when f extends past the box.
  if (!f.support().bounded() && edge > 1e-5 * peak)
    fail(ErrorCode::WeightBlowup, "w f does not decay at the edge of the integration box");
  return weighted_energy(pf, w);
}

double weighted_energy_phi(const LogConcave& f, const QuadratureConfig& cfg) {
  f.growth_certificate();  // phi f <= (2/e) e^{-phi/2} + ... needs the certificate
  const PotentialField pf = potential_field(f, cfg);
  Eigen::ArrayXd w = pf.s.phi;
  for (Index k = 0; k < w.size(); ++k)
    if (!std::isfinite(w(k))) w(k) = 0;
  return weighted_energy(pf, w);
}

double tail_bound(const LogConcave& f, const GridSpec& box, double alpha) {
  if (f.support().bounded()) {
    double lo[2], hi[2];
    f.support().bounding_box(lo, hi);
    bool inside = true;
    for (int a = 0; a < box.dim; ++a) inside = inside && lo[a] >= box.lo[a] - 1e-12 && hi[a] <= box.hi[a] + 1e-12;
    if (inside) return 0.0;
  }
  if (!f.has_growth_certificate()) return kInf;
  const auto [b, c] = f.growth_certificate();
  const int n = box.dim;
  double r = kInf;
  for (int a = 0; a < n; ++a) r = std::min({r, box.hi[a], -box.lo[a]});
  r = std::max(r, 0.0);
  const double sn = ball_surface(n);
  auto moment = [&](double k) { return sn * std::tgamma(n + k) / std::pow(b, n + k); };
  auto tail = [&](double k) { return sn * numerics::upper_gamma(n + k, b * r) / std::pow(b, n + k); };
  const double e2c = std::exp(-2 * c);
  if (alpha < n) return 2 * e2c * (sn / alpha + moment(0)) * tail(0);
  const double p = alpha - n;
  const double cp = p <= 1 ? 1.0 : std::pow(2.0, p - 1);
  return 2 * e2c * cp * (moment(0) * tail(p) + moment(p) * tail(0));
}

double unit_ball_energy(int dim, double alpha) {
  if (!(alpha > 0)) fail(ErrorCode::InvalidAlpha, "alpha must be positive");
  if (dim == 1) return std::pow(2.0, alpha + 2) / (alpha * (alpha + 1));
  // (1/alpha) int_B int_{S^1} rho(x,u)^alpha du dx with rho the chord length
  // from x to the circle in direction u.
  std::vector<double> xr, wr;
  numerics::gauss_legendre(64, xr, wr);
  const int nth = 256;
  double acc = 0;
  for (int panel = 0; panel < 4; ++panel) {
    // Grade towards r = 1 where rho has a square-root profile.
    const double a = panel == 0 ? 0.0 : 1 - std::pow(0.1, panel);
    const double b = panel == 3 ? 1.0 : 1 - std::pow(0.1, panel + 1);
    for (std::size_t i = 0; i < xr.size(); ++i) {
      const double r = a + (b - a) * (xr[i] + 1) / 2;
      double inner = 0;
      for (int k = 0; k < nth; ++k) {
        const double th = 2 * kPi * (k + 0.5) / nth;
        const double s = std::sin(th);
        const double rho = -r * std::cos(th) + std::sqrt(std::max(0.0, 1 - r * r * s * s));
        inner += std::pow(rho, alpha);
      }
      inner *= 2 * kPi / nth;
      acc += wr[i] * (b - a) / 2 * 2 * kPi * r * inner;
    }
  }
  return acc / alpha;
}

}  // namespace riesz
