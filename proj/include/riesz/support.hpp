#pragma once

#include "riesz/core.hpp"

#include <vector>

namespace riesz {

// Closed convex support set: an interval (possibly unbounded) in one
// dimension, a convex polygon or the whole plane in two.
class SupportSet {
 public:
  enum class Kind { Interval, Polygon, WholePlane };

  struct Facet {
    Point normal;  // outward unit normal
    Point a, b;    // endpoints (a == b for interval endpoints)
    double measure = 0;  // H^{n-1} measure: 1 for an endpoint, edge length
  };

  static SupportSet interval(double l, double r);
  static SupportSet whole(int dim);
  // Convex hull of the given points, stored counter-clockwise.
  static SupportSet polygon(const std::vector<Eigen::Vector2d>& pts);
  static SupportSet box(double lo_x, double hi_x, double lo_y, double hi_y);
  static SupportSet regular_polygon(int sides, double radius);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  bool bounded() const;
  bool has_interior() const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Eigen::Vector2d>& vertices() const { return verts_; }

  // h_K(u) for a unit u; NonUnitDirection otherwise.
  double support_function(const Point& u) const;
  // sup <x,y> over K for any y (the conjugate of the indicator).
  double support_value(const Point& y) const;
  // Largest t with t*u in K; requires the origin in the interior.
  double radial_function(const Point& u) const;

  bool contains(const Point& x, double tol = 1e-12) const;
  bool origin_interior() const;
  double volume() const;  // length or area; +inf when unbounded
  double circumradius() const;  // max |x| over K about the origin
  Point centroid() const;
  // Per-axis bounding box; infinite entries for unbounded directions.
  void bounding_box(double lo[2], double hi[2]) const;

  std::vector<Facet> facets() const;

  SupportSet translated(const Point& x0) const;
  SupportSet scaled(double c) const;
  SupportSet minkowski_sum(const SupportSet& other, double t = 1.0) const;

  // Exact for convex sets: extreme distances are attained at vertices.
  double hausdorff(const SupportSet& other) const;
  double distance(const Point& x) const;

 private:
  int dim_ = 1;
  Kind kind_ = Kind::Interval;
  double lo_ = 0, hi_ = 0;
  std::vector<Eigen::Vector2d> verts_;
};

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts);

}  // namespace riesz
