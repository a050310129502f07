#pragma once

// Extended-real convex functions on uniform box lattices and their discrete
// Legendre calculus. Header-only, templated on the scalar type.

#include "riesz/core.hpp"

#include <array>
#include <optional>
#include <sstream>

namespace riesz {

// Real or +inf. Never -inf or NaN; addition saturates at +inf.
template <class Scalar>
class ExtendedValueT {
 public:
  ExtendedValueT() = default;
  explicit ExtendedValueT(Scalar v) : v_(v) {
    if (std::isnan(v) || v == -std::numeric_limits<Scalar>::infinity())
      fail(ErrorCode::ImproperFunction, "extended value must be real or +inf");
  }
  static ExtendedValueT infinity() { return ExtendedValueT(std::numeric_limits<Scalar>::infinity()); }

  bool is_finite() const { return std::isfinite(v_); }
  Scalar value() const { return v_; }

  friend ExtendedValueT operator+(ExtendedValueT a, ExtendedValueT b) {
    if (!a.is_finite() || !b.is_finite()) return infinity();
    return ExtendedValueT(a.v_ + b.v_);
  }
  friend ExtendedValueT operator+(ExtendedValueT a, Scalar r) { return a + ExtendedValueT(r); }
  // Scaling by a positive factor; 0 * inf is not needed anywhere and is refused.
  friend ExtendedValueT operator*(Scalar c, ExtendedValueT a) {
    if (!(c > 0)) fail(ErrorCode::NonpositiveScale, "extended value scaled by non-positive factor");
    return a.is_finite() ? ExtendedValueT(c * a.v_) : infinity();
  }
  friend bool operator<=(ExtendedValueT a, ExtendedValueT b) { return a.v_ <= b.v_; }
  friend bool operator==(ExtendedValueT a, ExtendedValueT b) { return a.v_ == b.v_; }

 private:
  Scalar v_ = 0;
};

template <class Scalar>
struct GridSpecT {
  int dim = 1;
  std::array<Scalar, 2> lo{0, 0};
  std::array<Scalar, 2> hi{0, 0};
  std::array<int, 2> nodes{1, 1};

  static GridSpecT line(Scalar lo, Scalar hi, int n) {
    GridSpecT s;
    s.dim = 1;
    s.lo = {lo, 0};
    s.hi = {hi, 0};
    s.nodes = {n, 1};
    s.validate();
    return s;
  }
  static GridSpecT rect(Scalar lo_x, Scalar hi_x, Scalar lo_y, Scalar hi_y, int nx, int ny) {
    GridSpecT s;
    s.dim = 2;
    s.lo = {lo_x, lo_y};
    s.hi = {hi_x, hi_y};
    s.nodes = {nx, ny};
    s.validate();
    return s;
  }
  // [-half, half]^dim with n nodes per axis.
  static GridSpecT cube(int dim, Scalar half, int n) {
    return dim == 1 ? line(-half, half, n) : rect(-half, half, -half, half, n, n);
  }

  void validate() const {
    if (dim != 1 && dim != 2) fail(ErrorCode::SpecMismatch, "grid dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
      if (!(lo[a] < hi[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a]))
        fail(ErrorCode::SpecMismatch, "grid box needs finite lo < hi");
      if (nodes[a] < 3 || nodes[a] % 2 == 0)
        fail(ErrorCode::SpecMismatch, "grid node counts must be odd and at least 3");
    }
  }

  Scalar h(int a) const { return (hi[a] - lo[a]) / Scalar(nodes[a] - 1); }
  int n(int a) const { return a < dim ? nodes[a] : 1; }
  Index size() const { return Index(n(0)) * n(1); }

  // Written around the box midpoint so symmetric boxes give exactly
  // antisymmetric coordinates and an exact zero at the centre node.
  Scalar coord(int a, int i) const {
    const Scalar mid = (lo[a] + hi[a]) / 2;
    const Scalar half = (hi[a] - lo[a]) / 2;
    const int m = nodes[a] - 1;
    return mid + half * (Scalar(2 * i - m) / Scalar(m));
  }

  Index flat(int i, int j = 0) const { return Index(i) * n(1) + j; }
  std::array<int, 2> unflat(Index k) const {
    return {static_cast<int>(k / n(1)), static_cast<int>(k % n(1))};
  }

  PointT<Scalar> point(Index k) const {
    const auto ij = unflat(k);
    PointT<Scalar> p(dim);
    for (int a = 0; a < dim; ++a) p(a) = coord(a, ij[a]);
    return p;
  }

  Scalar cell_volume() const {
    Scalar v = 1;
    for (int a = 0; a < dim; ++a) v *= h(a);
    return v;
  }

  bool contains(const PointT<Scalar>& x, Scalar tol = 0) const {
    for (int a = 0; a < dim; ++a)
      if (x(a) < lo[a] - tol || x(a) > hi[a] + tol) return false;
    return true;
  }

  bool on_boundary(Index k) const {
    const auto ij = unflat(k);
    for (int a = 0; a < dim; ++a)
      if (ij[a] == 0 || ij[a] == nodes[a] - 1) return true;
    return false;
  }

  // Every other node; requires (nodes-1) divisible by 4 to stay odd.
  std::optional<GridSpecT> coarsened() const {
    GridSpecT c = *this;
    for (int a = 0; a < dim; ++a) {
      if ((nodes[a] - 1) % 4 != 0 || nodes[a] < 9) return std::nullopt;
      c.nodes[a] = (nodes[a] - 1) / 2 + 1;
    }
    return c;
  }

  GridSpecT translated(const PointT<Scalar>& x0) const {
    GridSpecT s = *this;
    for (int a = 0; a < dim; ++a) {
      s.lo[a] += x0(a);
      s.hi[a] += x0(a);
    }
    return s;
  }

  friend bool operator==(const GridSpecT& a, const GridSpecT& b) {
    if (a.dim != b.dim) return false;
    for (int k = 0; k < a.dim; ++k)
      if (a.lo[k] != b.lo[k] || a.hi[k] != b.hi[k] || a.nodes[k] != b.nodes[k]) return false;
    return true;
  }
};

// A proper extended-real function sampled on a lattice. Convexity is a
// checked property rather than a construction invariant so that envelopes of
// non-convex samples can be formed.
template <class Scalar>
class GridFunctionT {
 public:
  using Spec = GridSpecT<Scalar>;
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  GridFunctionT() = default;
  GridFunctionT(Spec spec, Values values, Scalar convexity_tol = Scalar(-1))
      : spec_(std::move(spec)), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.size()) fail(ErrorCode::SpecMismatch, "value count does not match grid");
    Scalar scale = 0;
    Index finite = 0;
    for (Index k = 0; k < values_.size(); ++k) {
      const Scalar v = values_(k);
      if (std::isnan(v) || v == -std::numeric_limits<Scalar>::infinity())
        fail(ErrorCode::ImproperFunction, "grid values must be real or +inf");
      if (std::isfinite(v)) {
        ++finite;
        scale = std::max(scale, std::abs(v));
      }
    }
    if (finite == 0) fail(ErrorCode::ImproperFunction, "no finite value on the grid");
    convexity_tol_ = convexity_tol >= 0 ? convexity_tol : Scalar(1e-9) * std::max(Scalar(1), scale);
  }

  template <class Fn>
  static GridFunctionT sample(const Spec& spec, Fn&& fn, Scalar convexity_tol = Scalar(-1)) {
    Values v(spec.size());
    for (Index k = 0; k < spec.size(); ++k) v(k) = fn(spec.point(k));
    return GridFunctionT(spec, std::move(v), convexity_tol);
  }

  const Spec& spec() const { return spec_; }
  const Values& values() const { return values_; }
  int dim() const { return spec_.dim; }
  Index size() const { return values_.size(); }
  Scalar operator()(Index k) const { return values_(k); }
  Scalar at(int i, int j = 0) const { return values_(spec_.flat(i, j)); }
  bool finite(Index k) const { return std::isfinite(values_(k)); }
  Scalar convexity_tol() const { return convexity_tol_; }

  Index finite_count() const {
    Index c = 0;
    for (Index k = 0; k < size(); ++k) c += finite(k);
    return c;
  }

  Scalar min_value() const {
    Scalar m = std::numeric_limits<Scalar>::infinity();
    for (Index k = 0; k < size(); ++k) m = std::min(m, values_(k));
    return m;
  }

  // Largest |forward difference| between finite lattice neighbours.
  Scalar max_slope() const {
    Scalar s = 0;
    for (int a = 0; a < dim(); ++a) {
      for (Index k = 0; k < size(); ++k) {
        const auto ij = spec_.unflat(k);
        if (ij[a] + 1 >= spec_.nodes[a]) continue;
        const Index k2 = a == 0 ? spec_.flat(ij[0] + 1, ij[1]) : spec_.flat(ij[0], ij[1] + 1);
        if (finite(k) && finite(k2)) s = std::max(s, std::abs(values_(k2) - values_(k)) / spec_.h(a));
      }
    }
    return s;
  }

  // No finite-inf-finite pattern along any lattice line.
  bool has_lattice_convex_domain() const {
    bool ok = true;
    for_each_line([&](auto&& idx, int len) {
      int first = -1, last = -1, count = 0;
      for (int i = 0; i < len; ++i) {
        if (finite(idx(i))) {
          if (first < 0) first = i;
          last = i;
          ++count;
        }
      }
      if (count > 0 && last - first + 1 != count) ok = false;
    });
    return ok;
  }

  // Discrete second differences of finite triples along every line >= -tol.
  bool is_convex(Scalar tol) const {
    if (!has_lattice_convex_domain()) return false;
    bool ok = true;
    for_each_line([&](auto&& idx, int len) {
      for (int i = 1; i + 1 < len; ++i) {
        const Scalar a = values_(idx(i - 1)), b = values_(idx(i)), c = values_(idx(i + 1));
        if (std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && a - 2 * b + c < -tol) ok = false;
      }
    });
    return ok;
  }
  bool is_convex() const { return is_convex(convexity_tol_); }

  // Calls fn(index_of_position, length) for every lattice line on every axis.
  template <class Fn>
  void for_each_line(Fn&& fn) const {
    const int nx = spec_.n(0), ny = spec_.n(1);
    for (int j = 0; j < ny; ++j) fn([&, j](int i) { return spec_.flat(i, j); }, nx);
    if (dim() == 2)
      for (int i = 0; i < nx; ++i) fn([&, i](int j) { return spec_.flat(i, j); }, ny);
  }

 private:
  Spec spec_;
  Values values_;
  Scalar convexity_tol_ = 0;
};

using GridSpec = GridSpecT<double>;
using GridFunction = GridFunctionT<double>;
using ExtendedValue = ExtendedValueT<double>;

namespace detail {

// One-dimensional discrete conjugate on uniform lattices:
//   out[j] = max_i x_i*y_j - v[i]  over finite v[i].
// Lower hull of the points, then a monotone sweep over sorted y.
// Returns false when no input value is finite.
template <class Scalar, class XAt, class VAt, class YAt, class Out>
bool conjugate_line(int n_in, XAt&& x, VAt&& v, int n_out, YAt&& y, Out&& out, std::vector<int>& hull) {
  hull.clear();
  for (int i = 0; i < n_in; ++i) {
    const Scalar vi = v(i);
    if (!std::isfinite(vi)) continue;
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull.back();
      // Drop b when it does not lie strictly below the chord a-i.
      const Scalar lhs = (v(b) - v(a)) * (x(i) - x(b));
      const Scalar rhs = (vi - v(b)) * (x(b) - x(a));
      if (lhs >= rhs) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  if (hull.empty()) return false;
  std::size_t k = 0;
  for (int j = 0; j < n_out; ++j) {
    const Scalar yj = y(j);
    while (k + 1 < hull.size() && yj * (x(hull[k + 1]) - x(hull[k])) > v(hull[k + 1]) - v(hull[k])) ++k;
    out(j, x(hull[k]) * yj - v(hull[k]), hull[k]);
  }
  return true;
}

}  // namespace detail

// Discrete conjugate with the maximizing input node recorded per output node.
template <class Scalar>
struct ConjugateWithArgmax {
  GridFunctionT<Scalar> value;
  std::vector<Index> argmax;
};

template <class Scalar>
ConjugateWithArgmax<Scalar> legendre_transform_argmax(const GridFunctionT<Scalar>& phi,
                                                      const GridSpecT<Scalar>& dual) {
  dual.validate();
  const auto& ps = phi.spec();
  if (ps.dim != dual.dim) fail(ErrorCode::SpecMismatch, "primal and dual dimensions differ");
  using Values = typename GridFunctionT<Scalar>::Values;
  Values out(dual.size());
  std::vector<Index> arg(dual.size(), -1);

  if (ps.dim == 1) {
    std::vector<int> hull;
    detail::conjugate_line<Scalar>(
        ps.nodes[0], [&](int i) { return ps.coord(0, i); }, [&](int i) { return phi(i); }, dual.nodes[0],
        [&](int j) { return dual.coord(0, j); },
        [&](int j, Scalar val, int i) {
          out(j) = val;
          arg[j] = i;
        },
        hull);
    return {GridFunctionT<Scalar>(dual, std::move(out)), std::move(arg)};
  }

  // phi*(y1,y2) = max_x1 [ x1*y1 + g(x1,y2) ],  g(x1,.) = conjugate of row x1.
  const int n1 = ps.nodes[0], n2 = ps.nodes[1], m1 = dual.nodes[0], m2 = dual.nodes[1];
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> g(n1, m2);
  Eigen::ArrayXi g_arg(n1 * m2);
  parallel_for(0, n1, [&](Index i) {
    std::vector<int> hull;
    const bool any = detail::conjugate_line<Scalar>(
        n2, [&](int k) { return ps.coord(1, k); }, [&](int k) { return phi.at(int(i), k); }, m2,
        [&](int j) { return dual.coord(1, j); },
        [&](int j, Scalar val, int k) {
          g(i, j) = val;
          g_arg(i * m2 + j) = k;
        },
        hull);
    if (!any)
      for (int j = 0; j < m2; ++j) g(i, j) = -std::numeric_limits<Scalar>::infinity();
  });
  parallel_for(0, m2, [&](Index j2) {
    std::vector<int> hull;
    detail::conjugate_line<Scalar>(
        n1, [&](int i) { return ps.coord(0, i); },
        [&](int i) { return -g(i, j2); }, m1, [&](int j) { return dual.coord(0, j); },
        [&](int j1, Scalar val, int i) {
          const Index o = dual.flat(j1, int(j2));
          out(o) = val;
          arg[o] = ps.flat(i, g_arg(Index(i) * m2 + j2));
        },
        hull);
  });
  return {GridFunctionT<Scalar>(dual, std::move(out)), std::move(arg)};
}

// phi*(y) = max over finite nodes of <x,y> - phi(x), on the dual lattice.
template <class Scalar>
GridFunctionT<Scalar> legendre_transform(const GridFunctionT<Scalar>& phi, const GridSpecT<Scalar>& dual) {
  return legendre_transform_argmax(phi, dual).value;
}

// Quadratic reference used by the tests.
template <class Scalar>
GridFunctionT<Scalar> legendre_transform_brute(const GridFunctionT<Scalar>& phi, const GridSpecT<Scalar>& dual) {
  if (phi.dim() != dual.dim) fail(ErrorCode::SpecMismatch, "primal and dual dimensions differ");
  typename GridFunctionT<Scalar>::Values out(dual.size());
  for (Index j = 0; j < dual.size(); ++j) {
    const auto y = dual.point(j);
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < phi.size(); ++i)
      if (phi.finite(i)) best = std::max(best, phi.spec().point(i).dot(y) - phi(i));
    out(j) = best;
  }
  return GridFunctionT<Scalar>(dual, std::move(out));
}

// Conjugate of a function D known only on a truncated box, evaluated on
// `out_spec`. When the maximizer sits on the box boundary the sup over the
// whole space may lie outside the box. If D is affine at that boundary we
// continue it linearly (output +inf when the target slope exceeds D's slope,
// the boundary value when they agree); otherwise DualGridTooSmall.
template <class Scalar>
GridFunctionT<Scalar> legendre_transform_checked(const GridFunctionT<Scalar>& d, const GridSpecT<Scalar>& out_spec) {
  auto res = legendre_transform_argmax(d, out_spec);
  const auto& ds = d.spec();
  auto vals = res.value.values();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  Scalar scale = 1;
  for (Index k = 0; k < d.size(); ++k)
    if (d.finite(k)) scale = std::max(scale, std::abs(d(k)));

  for (Index j = 0; j < out_spec.size(); ++j) {
    const Index k = res.argmax[j];
    if (!ds.on_boundary(k)) continue;
    const auto ij = ds.unflat(k);
    const auto x = out_spec.point(j);
    for (int a = 0; a < ds.dim; ++a) {
      const int na = ds.nodes[a];
      int dir = 0;
      if (ij[a] == na - 1) dir = +1;
      else if (ij[a] == 0) dir = -1;
      if (dir == 0) continue;
      auto nb = [&](int step) {
        auto c = ij;
        c[a] -= dir * step;
        return d(ds.flat(c[0], c[1]));
      };
      const Scalar v0 = d(k), v1 = nb(1), v2 = nb(2);
      const Scalar xo = dir * x(a);
      if (!std::isfinite(v1)) {
        fail(ErrorCode::DualGridTooSmall, "maximizer on the dual boundary with no finite neighbour");
      }
      const Scalar slope = (v0 - v1) / ds.h(a);
      const Scalar tol_s = Scalar(1e-9) * std::max({Scalar(1), std::abs(xo), std::abs(slope)});
      if (xo <= slope + tol_s) continue;
      const bool affine =
          std::isfinite(v2) && std::abs(v0 - 2 * v1 + v2) <= Scalar(1e-10) * scale;
      if (!affine) {
        std::ostringstream msg;
        msg << "conjugating sup reaches the dual boundary on axis " << a << " at output node " << j;
        fail(ErrorCode::DualGridTooSmall, msg.str());
      }
      vals(j) = inf;
    }
  }
  return GridFunctionT<Scalar>(out_spec, std::move(vals));
}

// Symmetric dual box covering every finite-difference slope of phi with a
// 25% margin, same node counts as phi.
template <class Scalar>
GridSpecT<Scalar> default_dual_spec(const GridFunctionT<Scalar>& phi) {
  const Scalar s = phi.max_slope();
  const Scalar half = s > 0 ? Scalar(1.25) * s : Scalar(1);
  const auto& ps = phi.spec();
  return ps.dim == 1 ? GridSpecT<Scalar>::line(-half, half, ps.nodes[0])
                     : GridSpecT<Scalar>::rect(-half, half, -half, half, ps.nodes[0], ps.nodes[1]);
}

template <class Scalar>
GridFunctionT<Scalar> biconjugate(const GridFunctionT<Scalar>& phi, const GridSpecT<Scalar>& dual) {
  return legendre_transform_checked(legendre_transform(phi, dual), phi.spec());
}

template <class Scalar>
GridFunctionT<Scalar> biconjugate(const GridFunctionT<Scalar>& phi) {
  return biconjugate(phi, default_dual_spec(phi));
}

// (s*phi* + t*psi*)* given both conjugates on one dual lattice.
template <class Scalar>
GridFunctionT<Scalar> combine_conjugates(const GridFunctionT<Scalar>& phi_star, const GridFunctionT<Scalar>& psi_star,
                                         Scalar s, Scalar t, const GridSpecT<Scalar>& out_spec) {
  if (!(s > 0) || !(t >= 0)) fail(ErrorCode::NonpositiveScale, "asplund weights need s > 0 and t >= 0");
  if (!(phi_star.spec() == psi_star.spec())) fail(ErrorCode::SpecMismatch, "conjugates live on different lattices");
  typename GridFunctionT<Scalar>::Values d(phi_star.size());
  for (Index k = 0; k < d.size(); ++k) {
    const Scalar a = phi_star(k), b = psi_star(k);
    if (!std::isfinite(a)) d(k) = a;
    else if (t == 0) d(k) = s * a;
    else d(k) = std::isfinite(b) ? s * a + t * b : b;
  }
  return legendre_transform_checked(GridFunctionT<Scalar>(phi_star.spec(), std::move(d)), out_spec);
}

template <class Scalar>
GridFunctionT<Scalar> asplund_combine(const GridFunctionT<Scalar>& phi, const GridFunctionT<Scalar>& psi, Scalar s,
                                      Scalar t, const GridSpecT<Scalar>& dual, const GridSpecT<Scalar>& out_spec) {
  if (phi.dim() != psi.dim()) fail(ErrorCode::SpecMismatch, "phi and psi dimensions differ");
  return combine_conjugates(legendre_transform(phi, dual), legendre_transform(psi, dual), s, t, out_spec);
}

template <class Scalar>
GridFunctionT<Scalar> asplund_combine(const GridFunctionT<Scalar>& phi, const GridFunctionT<Scalar>& psi, Scalar s,
                                      Scalar t, const GridSpecT<Scalar>& dual) {
  return asplund_combine(phi, psi, s, t, dual, phi.spec());
}

// Multilinear interpolation; +inf outside the box or when a corner carrying
// weight is infinite.
template <class Scalar>
Scalar interpolate(const GridFunctionT<Scalar>& phi, const PointT<Scalar>& x) {
  const auto& s = phi.spec();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::array<int, 2> i0{0, 0};
  std::array<Scalar, 2> w{0, 0};
  for (int a = 0; a < s.dim; ++a) {
    const Scalar u = (x(a) - s.lo[a]) / s.h(a);
    const Scalar tol = Scalar(1e-9);
    if (u < -tol || u > Scalar(s.nodes[a] - 1) + tol) return inf;
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, s.nodes[a] - 2);
    i0[a] = i;
    w[a] = std::clamp(u - Scalar(i), Scalar(0), Scalar(1));
  }
  Scalar acc = 0;
  const int corners = s.dim == 1 ? 2 : 4;
  for (int c = 0; c < corners; ++c) {
    Scalar wt = 1;
    std::array<int, 2> idx{0, 0};
    for (int a = 0; a < s.dim; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = i0[a] + bit;
      wt *= bit ? w[a] : 1 - w[a];
    }
    if (wt <= Scalar(1e-12)) continue;
    const Scalar v = phi(s.flat(idx[0], idx[1]));
    if (!std::isfinite(v)) return inf;
    acc += wt * v;
  }
  return acc;
}

// t*phi(x/t) on phi's lattice.
template <class Scalar>
GridFunctionT<Scalar> epi_scale(const GridFunctionT<Scalar>& phi, Scalar t) {
  if (!(t > 0)) fail(ErrorCode::NonpositiveScale, "epi-scaling factor must be positive");
  const auto& s = phi.spec();
  typename GridFunctionT<Scalar>::Values out(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    const Scalar v = interpolate(phi, PointT<Scalar>(s.point(k) / t));
    out(k) = std::isfinite(v) ? t * v : v;
  }
  // Nothing finite survives only if t*dom misses every node; report as improper.
  return GridFunctionT<Scalar>(s, std::move(out));
}

// Gradient at the lattice node nearest to y: central differences where both
// neighbours are finite, otherwise the one-sided slope that exists; at kinks
// this is the midpoint of the one-sided slopes.
template <class Scalar>
PointT<Scalar> subgradient_at_node(const GridFunctionT<Scalar>& phi, Index k) {
  const auto& s = phi.spec();
  if (!phi.finite(k)) fail(ErrorCode::OutsideDomain, "subgradient requested where phi is +inf");
  const auto ij = s.unflat(k);
  PointT<Scalar> g(s.dim);
  for (int a = 0; a < s.dim; ++a) {
    auto val = [&](int off) -> Scalar {
      auto c = ij;
      c[a] += off;
      if (c[a] < 0 || c[a] >= s.nodes[a]) return std::numeric_limits<Scalar>::infinity();
      return phi(s.flat(c[0], c[1]));
    };
    const Scalar v0 = phi(k), vm = val(-1), vp = val(+1);
    const Scalar h = s.h(a);
    const bool has_m = std::isfinite(vm), has_p = std::isfinite(vp);
    if (has_m && has_p) g(a) = (vp - vm) / (2 * h);
    else if (has_p) g(a) = (vp - v0) / h;
    else if (has_m) g(a) = (v0 - vm) / h;
    else fail(ErrorCode::NoFiniteNeighbor, "no finite neighbour along an axis");
  }
  return g;
}

template <class Scalar>
Index nearest_node(const GridSpecT<Scalar>& s, const PointT<Scalar>& y) {
  std::array<int, 2> ij{0, 0};
  for (int a = 0; a < s.dim; ++a) {
    const Scalar u = (y(a) - s.lo[a]) / s.h(a);
    if (u < -Scalar(0.5) || u > Scalar(s.nodes[a] - 1) + Scalar(0.5))
      fail(ErrorCode::OutsideDomain, "point outside the grid box");
    ij[a] = std::clamp(static_cast<int>(std::lround(u)), 0, s.nodes[a] - 1);
  }
  return s.flat(ij[0], ij[1]);
}

template <class Scalar>
PointT<Scalar> subgradient(const GridFunctionT<Scalar>& phi, const PointT<Scalar>& y) {
  if (y.size() != phi.dim()) fail(ErrorCode::SpecMismatch, "point dimension differs from grid");
  return subgradient_at_node(phi, nearest_node(phi.spec(), y));
}

}  // namespace riesz
