#include "carlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "carlab/errors.hpp"

namespace carlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Distance from p to the closed segment [a, b].
double segment_distance(const Vec& p, const Vec& a, const Vec& b, Vec* nearest) {
  const Vec d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec q = a + t * d;
  if (nearest) *nearest = q;
  return (p - q).norm();
}

double cross2(const Vec& a, const Vec& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Domain Domain::interval(double a, double b) {
  if (!(a < b)) throw ValidationError("interval: requires a < b");
  Domain d;
  d.kind_ = DomainKind::Interval;
  d.dimension_ = 1;
  d.lo_ = Vec(a, 0.0);
  d.hi_ = Vec(b, 0.0);
  return d;
}

Domain Domain::disk(const Vec& center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("disk: requires radius > 0");
  Domain d;
  d.kind_ = DomainKind::Disk;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain Domain::axis_box(const Vec& lo, const Vec& hi) {
  if (!(lo.x() < hi.x() && lo.y() < hi.y()))
    throw ValidationError("axis_box: requires lo < hi componentwise");
  Domain d;
  d.kind_ = DomainKind::AxisBox;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Domain Domain::convex_polygon(const std::vector<Vec>& vertices) {
  const size_t n = vertices.size();
  if (n < 3) throw ValidationError("convex_polygon: needs at least 3 vertices");
  double area2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec& a = vertices[i];
    const Vec& b = vertices[(i + 1) % n];
    const Vec& c = vertices[(i + 2) % n];
    const double turn = cross2(b - a, c - b);
    if (!(turn > 0.0))
      throw ValidationError(
          "convex_polygon: vertices must be strictly convex and counter-clockwise");
    area2 += cross2(a, b);
  }
  if (!(area2 > 0.0)) throw ValidationError("convex_polygon: degenerate area");
  Domain d;
  d.kind_ = DomainKind::ConvexPolygon;
  d.vertices_ = vertices;
  return d;
}

double Domain::diameter() const {
  switch (kind_) {
    case DomainKind::Interval:
      return hi_.x() - lo_.x();
    case DomainKind::Disk:
      return 2.0 * radius_;
    case DomainKind::AxisBox:
      return (hi_ - lo_).norm();
    case DomainKind::ConvexPolygon: {
      double best = 0.0;
      for (size_t i = 0; i < vertices_.size(); ++i)
        for (size_t j = i + 1; j < vertices_.size(); ++j)
          best = std::max(best, (vertices_[i] - vertices_[j]).norm());
      return best;
    }
  }
  return 0.0;
}

double Domain::volume() const {
  switch (kind_) {
    case DomainKind::Interval:
      return hi_.x() - lo_.x();
    case DomainKind::Disk:
      return kPi * radius_ * radius_;
    case DomainKind::AxisBox:
      return (hi_.x() - lo_.x()) * (hi_.y() - lo_.y());
    case DomainKind::ConvexPolygon: {
      double area2 = 0.0;
      for (size_t i = 0; i < vertices_.size(); ++i)
        area2 += cross2(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
      return 0.5 * area2;
    }
  }
  return 0.0;
}

double Domain::perimeter() const {
  switch (kind_) {
    case DomainKind::Interval:
      return 2.0;  // counting measure on the two endpoints
    case DomainKind::Disk:
      return 2.0 * kPi * radius_;
    case DomainKind::AxisBox:
      return 2.0 * ((hi_.x() - lo_.x()) + (hi_.y() - lo_.y()));
    case DomainKind::ConvexPolygon: {
      double len = 0.0;
      for (size_t i = 0; i < vertices_.size(); ++i)
        len += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
      return len;
    }
  }
  return 0.0;
}

Vec Domain::centroid() const {
  switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::AxisBox:
      return 0.5 * (lo_ + hi_);
    case DomainKind::Disk:
      return center_;
    case DomainKind::ConvexPolygon: {
      Vec c = Vec::Zero();
      double area2 = 0.0;
      for (size_t i = 0; i < vertices_.size(); ++i) {
        const Vec& a = vertices_[i];
        const Vec& b = vertices_[(i + 1) % vertices_.size()];
        const double w = cross2(a, b);
        c += w * (a + b);
        area2 += w;
      }
      return c / (3.0 * area2);
    }
  }
  return Vec::Zero();
}

double Domain::signed_distance(const Vec& x) const {
  switch (kind_) {
    case DomainKind::Interval: {
      const double over = std::max({lo_.x() - x.x(), x.x() - hi_.x(), 0.0});
      const double outside = std::hypot(over, x.y());
      if (outside > 0.0) return outside;
      return -std::min(x.x() - lo_.x(), hi_.x() - x.x());
    }
    case DomainKind::Disk:
      return (x - center_).norm() - radius_;
    case DomainKind::AxisBox: {
      const double dx = std::max(lo_.x() - x.x(), x.x() - hi_.x());
      const double dy = std::max(lo_.y() - x.y(), x.y() - hi_.y());
      if (dx <= 0.0 && dy <= 0.0) return std::max(dx, dy);
      return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
    }
    case DomainKind::ConvexPolygon: {
      double dist = std::numeric_limits<double>::infinity();
      bool inside = true;
      for (size_t i = 0; i < vertices_.size(); ++i) {
        const Vec& a = vertices_[i];
        const Vec& b = vertices_[(i + 1) % vertices_.size()];
        dist = std::min(dist, segment_distance(x, a, b, nullptr));
        if (cross2(b - a, x - a) < 0.0) inside = false;
      }
      return inside ? -dist : dist;
    }
  }
  return 0.0;
}

bool Domain::contains(const Vec& x, double tol) const {
  return signed_distance(x) <= tol;
}

Vec Domain::outward_normal(const Vec& x, double corner_tol) const {
  switch (kind_) {
    case DomainKind::Interval: {
      const double da = std::abs(x.x() - lo_.x());
      const double db = std::abs(x.x() - hi_.x());
      if (std::abs(da - db) <= corner_tol)
        throw CornerPoint("outward_normal: equidistant from both endpoints");
      return da < db ? Vec(-1.0, 0.0) : Vec(1.0, 0.0);
    }
    case DomainKind::Disk: {
      const Vec r = x - center_;
      const double n = r.norm();
      if (n <= corner_tol)
        throw CornerPoint("outward_normal: ambiguous at the disk center");
      return r / n;
    }
    case DomainKind::AxisBox: {
      const Vec clamped(std::clamp(x.x(), lo_.x(), hi_.x()),
                        std::clamp(x.y(), lo_.y(), hi_.y()));
      if ((clamped - x).norm() > 0.0) {
        // outside: normal follows the clamped coordinates
        const bool cx = clamped.x() != x.x();
        const bool cy = clamped.y() != x.y();
        if (cx && cy) throw CornerPoint("outward_normal: nearest point is a box corner");
        if (cx) return Vec(x.x() > hi_.x() ? 1.0 : -1.0, 0.0);
        return Vec(0.0, x.y() > hi_.y() ? 1.0 : -1.0);
      }
      const double d[4] = {x.x() - lo_.x(), hi_.x() - x.x(), x.y() - lo_.y(),
                           hi_.y() - x.y()};
      const Vec normals[4] = {Vec(-1, 0), Vec(1, 0), Vec(0, -1), Vec(0, 1)};
      int best = 0;
      for (int i = 1; i < 4; ++i)
        if (d[i] < d[best]) best = i;
      for (int i = 0; i < 4; ++i)
        if (i != best && d[i] - d[best] <= corner_tol)
          throw CornerPoint("outward_normal: equidistant from two box sides");
      // nearest boundary point must stay clear of the corners
      const Vec foot = best < 2 ? Vec(best == 0 ? lo_.x() : hi_.x(), x.y())
                                : Vec(x.x(), best == 2 ? lo_.y() : hi_.y());
      const Vec corners[4] = {lo_, Vec(hi_.x(), lo_.y()), hi_, Vec(lo_.x(), hi_.y())};
      for (const Vec& c : corners)
        if ((foot - c).norm() <= corner_tol)
          throw CornerPoint("outward_normal: nearest point is a box corner");
      return normals[best];
    }
    case DomainKind::ConvexPolygon: {
      double dist = std::numeric_limits<double>::infinity();
      size_t edge = 0;
      Vec foot = Vec::Zero();
      for (size_t i = 0; i < vertices_.size(); ++i) {
        Vec q;
        const double d = segment_distance(x, vertices_[i],
                                          vertices_[(i + 1) % vertices_.size()], &q);
        if (d < dist) {
          dist = d;
          edge = i;
          foot = q;
        }
      }
      for (const Vec& v : vertices_)
        if ((foot - v).norm() <= corner_tol)
          throw CornerPoint("outward_normal: nearest point is a polygon vertex");
      const Vec e = vertices_[(edge + 1) % vertices_.size()] - vertices_[edge];
      return Vec(e.y(), -e.x()).normalized();
    }
  }
  return Vec::Zero();
}

Domain::DistanceExtremes Domain::distance_extremes(const Vec& p) const {
  DistanceExtremes out{0.0, 0.0};
  out.min = std::max(signed_distance(p), 0.0);
  switch (kind_) {
    case DomainKind::Interval:
      out.max = std::max((p - lo_).norm(), (p - hi_).norm());
      break;
    case DomainKind::Disk:
      out.max = (p - center_).norm() + radius_;
      break;
    case DomainKind::AxisBox: {
      const Vec corners[4] = {lo_, Vec(hi_.x(), lo_.y()), hi_, Vec(lo_.x(), hi_.y())};
      for (const Vec& c : corners) out.max = std::max(out.max, (p - c).norm());
      break;
    }
    case DomainKind::ConvexPolygon:
      for (const Vec& v : vertices_) out.max = std::max(out.max, (p - v).norm());
      break;
  }
  return out;
}

QuadratureGrid Domain::interior_grid(double h) const {
  if (!(h > 0.0)) throw ValidationError("interior_grid: requires h > 0");
  QuadratureGrid grid;
  grid.resolution = h;

  if (kind_ == DomainKind::Interval) {
    const double len = hi_.x() - lo_.x();
    const auto n = static_cast<Eigen::Index>(std::ceil(len / h));
    const double dx = len / static_cast<double>(n);
    grid.nodes.resize(2, n);
    grid.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      grid.nodes.col(i) = Vec(lo_.x() + (static_cast<double>(i) + 0.5) * dx, 0.0);
      grid.weights[i] = dx;
    }
    return grid;
  }

  Vec blo, bhi;
  switch (kind_) {
    case DomainKind::Disk:
      blo = center_ - Vec(radius_, radius_);
      bhi = center_ + Vec(radius_, radius_);
      break;
    case DomainKind::AxisBox:
      blo = lo_;
      bhi = hi_;
      break;
    case DomainKind::ConvexPolygon: {
      blo = vertices_[0];
      bhi = vertices_[0];
      for (const Vec& v : vertices_) {
        blo = blo.cwiseMin(v);
        bhi = bhi.cwiseMax(v);
      }
      break;
    }
    default:
      break;
  }

  const auto nx = static_cast<Eigen::Index>(std::ceil((bhi.x() - blo.x()) / h));
  const auto ny = static_cast<Eigen::Index>(std::ceil((bhi.y() - blo.y()) / h));
  const double dx = (bhi.x() - blo.x()) / static_cast<double>(nx);
  const double dy = (bhi.y() - blo.y()) / static_cast<double>(ny);
  const double cell = dx * dy;

  std::vector<Vec> kept;
  kept.reserve(static_cast<size_t>(nx * ny));
  for (Eigen::Index iy = 0; iy < ny; ++iy) {
    const double y = blo.y() + (static_cast<double>(iy) + 0.5) * dy;
    for (Eigen::Index ix = 0; ix < nx; ++ix) {
      const Vec c(blo.x() + (static_cast<double>(ix) + 0.5) * dx, y);
      if (contains(c)) kept.push_back(c);
    }
  }
  if (kept.empty())
    throw ResolutionTooCoarse("interior_grid: no cell midpoint falls inside the domain");

  grid.nodes.resize(2, static_cast<Eigen::Index>(kept.size()));
  grid.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(kept.size()), cell);
  for (size_t i = 0; i < kept.size(); ++i)
    grid.nodes.col(static_cast<Eigen::Index>(i)) = kept[i];
  return grid;
}

BoundaryGrid Domain::boundary_grid(double h) const {
  if (!(h > 0.0)) throw ValidationError("boundary_grid: requires h > 0");
  BoundaryGrid grid;
  grid.resolution = h;

  switch (kind_) {
    case DomainKind::Interval: {
      grid.nodes.resize(2, 2);
      grid.nodes.col(0) = lo_;
      grid.nodes.col(1) = hi_;
      grid.weights = Eigen::VectorXd::Ones(2);
      grid.normals.resize(2, 2);
      grid.normals.col(0) = Vec(-1.0, 0.0);
      grid.normals.col(1) = Vec(1.0, 0.0);
      return grid;
    }
    case DomainKind::Disk: {
      const double circ = 2.0 * kPi * radius_;
      const auto n = std::max<Eigen::Index>(8, static_cast<Eigen::Index>(std::ceil(circ / h)));
      const double dtheta = 2.0 * kPi / static_cast<double>(n);
      grid.nodes.resize(2, n);
      grid.normals.resize(2, n);
      grid.weights = Eigen::VectorXd::Constant(n, radius_ * dtheta);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double theta = (static_cast<double>(i) + 0.5) * dtheta;
        const Vec dir(std::cos(theta), std::sin(theta));
        grid.nodes.col(i) = center_ + radius_ * dir;
        grid.normals.col(i) = dir;
      }
      return grid;
    }
    case DomainKind::AxisBox:
    case DomainKind::ConvexPolygon: {
      std::vector<Vec> verts;
      if (kind_ == DomainKind::AxisBox)
        verts = {lo_, Vec(hi_.x(), lo_.y()), hi_, Vec(lo_.x(), hi_.y())};
      else
        verts = vertices_;

      std::vector<Vec> nodes, normals;
      std::vector<double> weights;
      for (size_t i = 0; i < verts.size(); ++i) {
        const Vec& a = verts[i];
        const Vec& b = verts[(i + 1) % verts.size()];
        const Vec e = b - a;
        const double len = e.norm();
        const Vec nrm = Vec(e.y(), -e.x()) / len;
        const auto ne = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(len / h)));
        const double dl = len / static_cast<double>(ne);
        for (Eigen::Index k = 0; k < ne; ++k) {
          nodes.push_back(a + ((static_cast<double>(k) + 0.5) / static_cast<double>(ne)) * e);
          normals.push_back(nrm);
          weights.push_back(dl);
        }
      }
      grid.nodes.resize(2, static_cast<Eigen::Index>(nodes.size()));
      grid.normals.resize(2, static_cast<Eigen::Index>(nodes.size()));
      grid.weights.resize(static_cast<Eigen::Index>(nodes.size()));
      for (size_t i = 0; i < nodes.size(); ++i) {
        grid.nodes.col(static_cast<Eigen::Index>(i)) = nodes[i];
        grid.normals.col(static_cast<Eigen::Index>(i)) = normals[i];
        grid.weights[static_cast<Eigen::Index>(i)] = weights[i];
      }
      return grid;
    }
  }
  throw ValidationError("boundary_grid: unknown domain kind");
}

std::string Domain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DomainKind::Interval:
      os << "interval [" << lo_.x() << ", " << hi_.x() << "]";
      break;
    case DomainKind::Disk:
      os << "disk center (" << center_.x() << ", " << center_.y() << ") radius "
         << radius_;
      break;
    case DomainKind::AxisBox:
      os << "box [" << lo_.x() << ", " << hi_.x() << "] x [" << lo_.y() << ", "
         << hi_.y() << "]";
      break;
    case DomainKind::ConvexPolygon:
      os << "convex polygon with " << vertices_.size() << " vertices";
      break;
  }
  return os.str();
}

}  // namespace carlab
