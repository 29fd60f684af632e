#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "raylab/error.hpp"

namespace raylab {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline Point2 lerp(Point2 a, Point2 b, double s) { return a + s * (b - a); }

struct Segment {
  Point2 a;
  Point2 b;
};

struct BBox {
  double xmin = INFINITY, ymin = INFINITY;
  double xmax = -INFINITY, ymax = -INFINITY;

  void add(Point2 p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  void add(const BBox& o) {
    xmin = std::min(xmin, o.xmin);
    ymin = std::min(ymin, o.ymin);
    xmax = std::max(xmax, o.xmax);
    ymax = std::max(ymax, o.ymax);
  }
  bool empty() const { return xmin > xmax; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diameter() const { return empty() ? 0.0 : std::hypot(width(), height()); }
  BBox expanded(double r) const { return {xmin - r, ymin - r, xmax + r, ymax + r}; }
  bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  bool overlaps(const BBox& o) const {
    return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
  }
};

BBox bbox_of(std::span<const Point2> pts);

// Polyline parameterized by cumulative arc length.
class Polyline {
 public:
  Polyline() = default;
  // Throws InvalidArgument unless there are >= 2 finite vertices with no
  // two consecutive vertices equal.
  explicit Polyline(std::vector<Point2> vertices);

  std::size_t size() const { return vertices_.size(); }
  std::size_t edge_count() const { return vertices_.empty() ? 0 : vertices_.size() - 1; }
  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<double>& cumlen() const { return cumlen_; }
  Point2 operator[](std::size_t i) const { return vertices_[i]; }
  Point2 front() const { return vertices_.front(); }
  Point2 back() const { return vertices_.back(); }
  Segment edge(std::size_t i) const { return {vertices_[i], vertices_[i + 1]}; }
  double length() const { return cumlen_.empty() ? 0.0 : cumlen_.back(); }
  bool is_closed() const { return size() > 2 && vertices_.front() == vertices_.back(); }
  const BBox& bbox() const { return bbox_; }

  // Index of the edge containing parameter t (clamped to [0, length]).
  std::size_t edge_at(double t) const;
  Point2 point_at(double t) const;
  // Sub-polyline for parameters [t0, t1], endpoints interpolated. Requires t0 < t1.
  Polyline slice(double t0, double t1) const;
  Polyline reversed() const;

 private:
  std::vector<Point2> vertices_;
  std::vector<double> cumlen_;
  BBox bbox_;
};

// Simple closed polygon. The boundary's last vertex equals its first.
class PolygonRegion {
 public:
  PolygonRegion() = default;
  // Closes the ring if needed; validates simplicity. Throws InvalidArgument.
  explicit PolygonRegion(std::vector<Point2> ring);

  static PolygonRegion disc(Point2 center, double radius, int segments = 64);
  static PolygonRegion rectangle(Point2 lo, Point2 hi);

  const Polyline& boundary() const { return boundary_; }
  int orientation() const { return orientation_; }
  double signed_area() const { return signed_area_; }
  const BBox& bbox() const { return boundary_.bbox(); }

  // Winding-based containment. Points within tau_on of the boundary count as
  // inside; use classify() to tell them apart.
  bool contains(Point2 p) const;
  enum class Location { Inside, Outside, Boundary };
  Location classify(Point2 p) const;
  double boundary_distance(Point2 p) const;
  // A point strictly inside the polygon, away from the boundary.
  Point2 interior_point() const;

 private:
  Polyline boundary_;
  int orientation_ = 1;
  double signed_area_ = 0.0;
};

double signed_area(std::span<const Point2> ring);

// On-boundary tolerance used by topological predicates.
inline double tau_on(const BBox& box) { return 1e-12 * box.diameter(); }

// Uniform grid over the edges of one polyline.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  explicit SpatialIndex(const Polyline& poly, double cell_size = 0.0);

  double cell_size() const { return cell_; }
  std::size_t edge_count() const { return edge_count_; }
  const BBox& extent() const { return extent_; }

  // Unique edge indices whose cells overlap the box, ascending.
  std::vector<std::size_t> query(const BBox& box) const;
  // Calls fn(edge) for each edge in cells overlapping the box; an edge may be
  // reported more than once.
  template <class Fn>
  void for_each_in(const BBox& box, Fn&& fn) const;

  std::int64_t cell_coord(double v, bool is_x) const;
  const std::vector<std::uint32_t>* bucket(std::int64_t cx, std::int64_t cy) const;

 private:
  static std::uint64_t key(std::int64_t cx, std::int64_t cy);

  double cell_ = 1.0;
  double ox_ = 0.0, oy_ = 0.0;
  std::size_t edge_count_ = 0;
  BBox extent_;
  std::unordered_map<std::uint64_t, std::uint32_t> slot_;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

template <class Fn>
void SpatialIndex::for_each_in(const BBox& box, Fn&& fn) const {
  if (buckets_.empty() || !box.overlaps(extent_)) return;
  const auto x0 = cell_coord(std::max(box.xmin, extent_.xmin), true);
  const auto x1 = cell_coord(std::min(box.xmax, extent_.xmax), true);
  const auto y0 = cell_coord(std::max(box.ymin, extent_.ymin), false);
  const auto y1 = cell_coord(std::min(box.ymax, extent_.ymax), false);
  for (auto cx = x0; cx <= x1; ++cx)
    for (auto cy = y0; cy <= y1; ++cy)
      if (const auto* b = bucket(cx, cy))
        for (auto e : *b) fn(static_cast<std::size_t>(e));
}

// ---------------------------------------------------------------------------
// Predicates and queries

double point_segment_distance(Point2 p, Segment s, double* param = nullptr);
double segment_segment_distance(Segment s1, Segment s2);

// Throws OnBoundary when p is within tau_on of the curve.
int winding_number(Point2 p, const Polyline& closed);
// Same, without the boundary check (caller guarantees p is off the curve).
int winding_number_unchecked(Point2 p, std::span<const Point2> closed);

struct SegmentHit {
  enum class Kind { None, Point, Overlap };
  Kind kind = Kind::None;
  Point2 at;       // valid for Point
  double s1 = 0.0; // parameter along s1 in [0,1] for Point
  double s2 = 0.0; // parameter along s2 in [0,1] for Point
  explicit operator bool() const { return kind != Kind::None; }
};
SegmentHit segment_intersection(Segment s1, Segment s2);

struct SimplicityReport {
  bool simple = true;
  std::size_t edge_i = 0;
  std::size_t edge_j = 0;
  double distance = 0.0;
};
SimplicityReport is_simple(const Polyline& poly, double tol);
// Brute-force all-pairs variant; also used below the index threshold.
SimplicityReport is_simple_bruteforce(const Polyline& poly, double tol);

struct NearestResult {
  double param = 0.0;
  double dist = INFINITY;
  int side = 0;
  std::size_t edge = 0;
};
NearestResult nearest_on_polyline(const SpatialIndex& idx, const Polyline& poly, Point2 p);
// Nearest point restricted to the parameter window [t_lo, t_hi].
std::optional<NearestResult> nearest_in_range(const SpatialIndex& idx, const Polyline& poly,
                                              Point2 p, double t_lo, double t_hi);
// Side (+1 left, -1 right, 0 on) of p relative to the polyline at the point
// with parameter `param`, handling vertices by their wedge.
int side_at(const Polyline& poly, double param, Point2 p, double on_tol);

double hausdorff(const Polyline& a, const Polyline& b);
double directed_hausdorff(const Polyline& a, const Polyline& b, const SpatialIndex& b_index);

}  // namespace raylab
