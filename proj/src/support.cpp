#include "riesz/support.hpp"

#include <algorithm>

namespace riesz {

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * d)).norm();
}

Eigen::Vector2d to2(const Point& p) { return Eigen::Vector2d(p(0), p(1)); }

void check_unit(const Point& u) {
  if (std::abs(u.norm() - 1.0) > 1e-12) fail(ErrorCode::NonUnitDirection, "direction must have unit norm");
}

}  // namespace

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

SupportSet SupportSet::interval(double l, double r) {
  if (std::isnan(l) || std::isnan(r) || l > r || l == kInf || r == -kInf)
    fail(ErrorCode::InvalidArgument, "interval needs l <= r");
  SupportSet s;
  s.dim_ = 1;
  s.kind_ = Kind::Interval;
  s.lo_ = l;
  s.hi_ = r;
  return s;
}

SupportSet SupportSet::whole(int dim) {
  if (dim == 1) return interval(-kInf, kInf);
  SupportSet s;
  s.dim_ = 2;
  s.kind_ = Kind::WholePlane;
  return s;
}

SupportSet SupportSet::polygon(const std::vector<Eigen::Vector2d>& pts) {
  if (pts.empty()) fail(ErrorCode::InvalidArgument, "polygon needs at least one vertex");
  for (const auto& p : pts)
    if (!p.allFinite()) fail(ErrorCode::InvalidArgument, "polygon vertices must be finite");
  SupportSet s;
  s.dim_ = 2;
  s.kind_ = Kind::Polygon;
  s.verts_ = convex_hull(pts);
  return s;
}

SupportSet SupportSet::box(double lo_x, double hi_x, double lo_y, double hi_y) {
  return polygon({{lo_x, lo_y}, {hi_x, lo_y}, {hi_x, hi_y}, {lo_x, hi_y}});
}

SupportSet SupportSet::regular_polygon(int sides, double radius) {
  std::vector<Eigen::Vector2d> v;
  for (int k = 0; k < sides; ++k) {
    const double th = 2 * kPi * k / sides;
    v.emplace_back(radius * std::cos(th), radius * std::sin(th));
  }
  return polygon(v);
}

bool SupportSet::bounded() const {
  switch (kind_) {
    case Kind::Interval: return std::isfinite(lo_) && std::isfinite(hi_);
    case Kind::Polygon: return true;
    case Kind::WholePlane: return false;
  }
  return false;
}

bool SupportSet::has_interior() const {
  switch (kind_) {
    case Kind::Interval: return lo_ < hi_;
    case Kind::Polygon: return verts_.size() >= 3;
    case Kind::WholePlane: return true;
  }
  return false;
}

double SupportSet::support_function(const Point& u) const {
  check_unit(u);
  return support_value(u);
}

double SupportSet::support_value(const Point& y) const {
  switch (kind_) {
    case Kind::Interval:
      if (y(0) > 0) return hi_ == kInf ? kInf : hi_ * y(0);
      if (y(0) < 0) return lo_ == -kInf ? kInf : lo_ * y(0);
      return 0.0;
    case Kind::Polygon: {
      double m = -kInf;
      for (const auto& v : verts_) m = std::max(m, v.x() * y(0) + v.y() * y(1));
      return m;
    }
    case Kind::WholePlane:
      return (y(0) == 0 && y(1) == 0) ? 0.0 : kInf;
  }
  return kInf;
}

double SupportSet::radial_function(const Point& u) const {
  check_unit(u);
  if (!origin_interior()) fail(ErrorCode::OriginNotInterior, "radial function needs the origin inside K");
  switch (kind_) {
    case Kind::Interval: return u(0) > 0 ? hi_ / u(0) : lo_ / u(0);
    case Kind::Polygon: {
      double t = kInf;
      const Eigen::Vector2d uu = to2(u);
      for (const auto& f : facets()) {
        const Eigen::Vector2d nu = to2(f.normal);
        const double c = uu.dot(nu);
        if (c > 0) t = std::min(t, to2(f.a).dot(nu) / c);
      }
      return t;
    }
    case Kind::WholePlane: return kInf;
  }
  return kInf;
}

bool SupportSet::contains(const Point& x, double tol) const {
  switch (kind_) {
    case Kind::Interval: return x(0) >= lo_ - tol && x(0) <= hi_ + tol;
    case Kind::Polygon: {
      const Eigen::Vector2d p = to2(x);
      if (verts_.size() < 3) {
        if (verts_.size() == 1) return (p - verts_[0]).norm() <= tol;
        return segment_distance(p, verts_[0], verts_[1]) <= tol;
      }
      for (std::size_t i = 0; i < verts_.size(); ++i) {
        const auto& a = verts_[i];
        const auto& b = verts_[(i + 1) % verts_.size()];
        if (cross(a, b, p) < -tol * (b - a).norm()) return false;
      }
      return true;
    }
    case Kind::WholePlane: return true;
  }
  return false;
}

bool SupportSet::origin_interior() const {
  switch (kind_) {
    case Kind::Interval: return lo_ < 0 && hi_ > 0;
    case Kind::Polygon: {
      if (verts_.size() < 3) return false;
      const Eigen::Vector2d o(0, 0);
      for (std::size_t i = 0; i < verts_.size(); ++i) {
        const auto& a = verts_[i];
        const auto& b = verts_[(i + 1) % verts_.size()];
        if (cross(a, b, o) <= 1e-14 * (b - a).norm()) return false;
      }
      return true;
    }
    case Kind::WholePlane: return true;
  }
  return false;
}

double SupportSet::volume() const {
  switch (kind_) {
    case Kind::Interval: return hi_ - lo_;
    case Kind::Polygon: {
      double a = 0;
      for (std::size_t i = 0; i < verts_.size(); ++i) {
        const auto& p = verts_[i];
        const auto& q = verts_[(i + 1) % verts_.size()];
        a += p.x() * q.y() - q.x() * p.y();
      }
      return 0.5 * a;
    }
    case Kind::WholePlane: return kInf;
  }
  return kInf;
}

double SupportSet::circumradius() const {
  switch (kind_) {
    case Kind::Interval: return std::max(std::abs(lo_), std::abs(hi_));
    case Kind::Polygon: {
      double r = 0;
      for (const auto& v : verts_) r = std::max(r, v.norm());
      return r;
    }
    case Kind::WholePlane: return kInf;
  }
  return kInf;
}

Point SupportSet::centroid() const {
  switch (kind_) {
    case Kind::Interval: {
      if (!bounded()) return make_point(std::isfinite(lo_) ? lo_ + 1 : (std::isfinite(hi_) ? hi_ - 1 : 0.0));
      return make_point(0.5 * (lo_ + hi_));
    }
    case Kind::Polygon: {
      if (verts_.size() < 3) {
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        for (const auto& v : verts_) c += v;
        c /= double(verts_.size());
        return make_point(c.x(), c.y());
      }
      double a = 0, cx = 0, cy = 0;
      for (std::size_t i = 0; i < verts_.size(); ++i) {
        const auto& p = verts_[i];
        const auto& q = verts_[(i + 1) % verts_.size()];
        const double w = p.x() * q.y() - q.x() * p.y();
        a += w;
        cx += (p.x() + q.x()) * w;
        cy += (p.y() + q.y()) * w;
      }
      return make_point(cx / (3 * a), cy / (3 * a));
    }
    case Kind::WholePlane: return make_point(0.0, 0.0);
  }
  return Point();
}

void SupportSet::bounding_box(double lo[2], double hi[2]) const {
  lo[0] = lo[1] = -kInf;
  hi[0] = hi[1] = kInf;
  if (kind_ == Kind::Interval) {
    lo[0] = lo_;
    hi[0] = hi_;
  } else if (kind_ == Kind::Polygon) {
    lo[0] = lo[1] = kInf;
    hi[0] = hi[1] = -kInf;
    for (const auto& v : verts_) {
      for (int a = 0; a < 2; ++a) {
        lo[a] = std::min(lo[a], v(a));
        hi[a] = std::max(hi[a], v(a));
      }
    }
  }
}

std::vector<SupportSet::Facet> SupportSet::facets() const {
  std::vector<Facet> out;
  if (kind_ == Kind::Interval) {
    if (std::isfinite(lo_)) out.push_back({make_point(-1.0), make_point(lo_), make_point(lo_), 1.0});
    if (std::isfinite(hi_)) out.push_back({make_point(1.0), make_point(hi_), make_point(hi_), 1.0});
  } else if (kind_ == Kind::Polygon && verts_.size() >= 3) {
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      const auto& a = verts_[i];
      const auto& b = verts_[(i + 1) % verts_.size()];
      const Eigen::Vector2d d = b - a;
      const double len = d.norm();
      out.push_back({make_point(d.y() / len, -d.x() / len), make_point(a.x(), a.y()), make_point(b.x(), b.y()), len});
    }
  }
  return out;
}

SupportSet SupportSet::translated(const Point& x0) const {
  switch (kind_) {
    case Kind::Interval: return interval(lo_ + x0(0), hi_ + x0(0));
    case Kind::Polygon: {
      SupportSet s = *this;
      for (auto& v : s.verts_) v += to2(x0);
      return s;
    }
    case Kind::WholePlane: return *this;
  }
  return *this;
}

SupportSet SupportSet::scaled(double c) const {
  if (!(c > 0)) fail(ErrorCode::NonpositiveScale, "support set scaling needs c > 0");
  switch (kind_) {
    case Kind::Interval: return interval(c * lo_, c * hi_);
    case Kind::Polygon: {
      SupportSet s = *this;
      for (auto& v : s.verts_) v *= c;
      return s;
    }
    case Kind::WholePlane: return *this;
  }
  return *this;
}

SupportSet SupportSet::minkowski_sum(const SupportSet& other, double t) const {
  if (dim_ != other.dim_) fail(ErrorCode::SpecMismatch, "Minkowski sum of sets of different dimension");
  if (t == 0) return *this;
  if (!(t > 0)) fail(ErrorCode::NonpositiveScale, "Minkowski sum weight must be non-negative");
  if (dim_ == 1) return interval(lo_ + t * other.lo_, hi_ + t * other.hi_);
  if (kind_ == Kind::WholePlane || other.kind_ == Kind::WholePlane) return whole(2);
  std::vector<Eigen::Vector2d> pts;
  for (const auto& a : verts_)
    for (const auto& b : other.verts_) pts.push_back(a + t * b);
  return polygon(pts);
}

double SupportSet::distance(const Point& x) const {
  if (contains(x, 0.0)) return 0.0;
  switch (kind_) {
    case Kind::Interval: return x(0) < lo_ ? lo_ - x(0) : x(0) - hi_;
    case Kind::Polygon: {
      const Eigen::Vector2d p = to2(x);
      if (verts_.size() == 1) return (p - verts_[0]).norm();
      double d = kInf;
      for (std::size_t i = 0; i < verts_.size(); ++i)
        d = std::min(d, segment_distance(p, verts_[i], verts_[(i + 1) % verts_.size()]));
      return d;
    }
    case Kind::WholePlane: return 0.0;
  }
  return 0.0;
}

double SupportSet::hausdorff(const SupportSet& other) const {
  if (dim_ != other.dim_) fail(ErrorCode::SpecMismatch, "Hausdorff distance across dimensions");
  if (dim_ == 1) {
    auto gap = [](double a, double b) { return a == b ? 0.0 : std::abs(a - b); };
    return std::max(gap(lo_, other.lo_), gap(hi_, other.hi_));
  }
  if (kind_ == Kind::WholePlane || other.kind_ == Kind::WholePlane)
    return kind_ == other.kind_ ? 0.0 : kInf;
  double d = 0;
  for (const auto& v : verts_) d = std::max(d, other.distance(make_point(v.x(), v.y())));
  for (const auto& v : other.verts_) d = std::max(d, distance(make_point(v.x(), v.y())));
  return d;
}

}  // namespace riesz
