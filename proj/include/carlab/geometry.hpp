#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace carlab {

using Vec = Eigen::Vector2d;

// Midpoint-rule interior quadrature: nodes (2 x n), positive weights summing
// to approximately the domain volume, and the cell size used to build it.
struct QuadratureGrid {
  Eigen::Matrix2Xd nodes;
  Eigen::VectorXd weights;
  double resolution = 0.0;

  Eigen::Index size() const { return nodes.cols(); }
};

// Boundary quadrature: arc/edge midpoints with exact sub-arc lengths as
// weights and the outward unit normal at each node.
struct BoundaryGrid {
  Eigen::Matrix2Xd nodes;
  Eigen::VectorXd weights;
  Eigen::Matrix2Xd normals;
  double resolution = 0.0;

  Eigen::Index size() const { return nodes.cols(); }
};

enum class DomainKind { Interval, Disk, AxisBox, ConvexPolygon };

// Bounded convex spatial domain. One dimensional intervals are embedded in
// the plane as [a,b] x {0}; all queries accept planar points.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain disk(const Vec& center, double radius);
  static Domain axis_box(const Vec& lo, const Vec& hi);
  // Vertices in counter-clockwise order; throws ValidationError when fewer
  // than 3 vertices are given or the polygon is not strictly convex.
  static Domain convex_polygon(const std::vector<Vec>& vertices);

  DomainKind kind() const { return kind_; }
  int dimension() const { return dimension_; }

  double diameter() const;
  double volume() const;     // length in 1d, area in 2d
  double perimeter() const;  // 2 (endpoint count) in 1d

  Vec centroid() const;

  // Closed-set membership with absolute tolerance on the signed distance.
  bool contains(const Vec& x, double tol = 1e-12) const;

  // Negative inside, zero on the boundary, positive outside.
  double signed_distance(const Vec& x) const;

  // Outward unit normal of the boundary point nearest to x. Throws
  // CornerPoint when that nearest point is within `corner_tol` of a vertex
  // (polygons, boxes) or x coincides with a disk center.
  Vec outward_normal(const Vec& x, double corner_tol = 1e-9) const;

  // min and max of |y - p| over the closure, by closed forms per kind.
  struct DistanceExtremes {
    double min;
    double max;
  };
  DistanceExtremes distance_extremes(const Vec& p) const;

  // Tensor midpoint grid clipped to the domain. Throws ResolutionTooCoarse
  // when no cell midpoint lands inside.
  QuadratureGrid interior_grid(double h) const;

  // Boundary discretization with spacing at most h along each arc/edge.
  // Weights are exact sub-arc lengths; they sum to perimeter().
  BoundaryGrid boundary_grid(double h) const;

  // Accessors for kind-specific data (used by tests and serialization).
  const Vec& disk_center() const { return center_; }
  double disk_radius() const { return radius_; }
  const Vec& box_lo() const { return lo_; }
  const Vec& box_hi() const { return hi_; }
  const std::vector<Vec>& polygon_vertices() const { return vertices_; }

  std::string describe() const;

 private:
  Domain() = default;

  DomainKind kind_ = DomainKind::Disk;
  int dimension_ = 2;
  // Disk
  Vec center_ = Vec::Zero();
  double radius_ = 0.0;
  // AxisBox and the interval embedding
  Vec lo_ = Vec::Zero();
  Vec hi_ = Vec::Zero();
  // ConvexPolygon (CCW)
  std::vector<Vec> vertices_;
};

}  // namespace carlab
