#include "raylab/geom2d.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

namespace raylab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OnBoundary: return "OnBoundary";
    case ErrorKind::StepTooSmall: return "StepTooSmall";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::AtPole: return "AtPole";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::SeedNotConfigured: return "SeedNotConfigured";
    case ErrorKind::SimplicityViolation: return "SimplicityViolation";
    case ErrorKind::TailTooShort: return "TailTooShort";
    case ErrorKind::NearEndpoint: return "NearEndpoint";
    case ErrorKind::NoReturn: return "NoReturn";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::DegenerateTheta: return "DegenerateTheta";
    case ErrorKind::WitnessNotFound: return "WitnessNotFound";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::PluginError: return "PluginError";
  }
  return "Unknown";
}

BBox bbox_of(std::span<const Point2> pts) {
  BBox b;
  for (auto p : pts) b.add(p);
  return b;
}

// ---------------------------------------------------------------------------
// Polyline

Polyline::Polyline(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "polyline needs at least 2 vertices");
  cumlen_.resize(vertices_.size());
  cumlen_[0] = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!is_finite(vertices_[i]))
      throw Error(ErrorKind::InvalidArgument, "non-finite vertex " + std::to_string(i));
    bbox_.add(vertices_[i]);
    if (i == 0) continue;
    const double len = distance(vertices_[i - 1], vertices_[i]);
    if (!(len > 0.0))
      throw Error(ErrorKind::InvalidArgument, "repeated vertex " + std::to_string(i));
    cumlen_[i] = cumlen_[i - 1] + len;
  }
}

std::size_t Polyline::edge_at(double t) const {
  if (t <= 0.0) return 0;
  if (t >= length()) return edge_count() - 1;
  auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), t);
  const auto i = static_cast<std::size_t>(it - cumlen_.begin());
  return std::min(i - 1, edge_count() - 1);
}

Point2 Polyline::point_at(double t) const {
  const auto e = edge_at(t);
  const double len = cumlen_[e + 1] - cumlen_[e];
  const double s = std::clamp((t - cumlen_[e]) / len, 0.0, 1.0);
  if (s == 0.0) return vertices_[e];
  if (s == 1.0) return vertices_[e + 1];
  return lerp(vertices_[e], vertices_[e + 1], s);
}

Polyline Polyline::slice(double t0, double t1) const {
  if (!(t0 < t1)) throw Error(ErrorKind::InvalidArgument, "slice needs t0 < t1");
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, length());
  std::vector<Point2> out;
  out.push_back(point_at(t0));
  const auto e0 = edge_at(t0);
  const auto e1 = edge_at(t1);
  for (auto i = e0 + 1; i <= e1; ++i)
    if (cumlen_[i] > t0 && cumlen_[i] < t1 && vertices_[i] != out.back()) out.push_back(vertices_[i]);
  const Point2 last = point_at(t1);
  if (last != out.back()) out.push_back(last);
  if (out.size() < 2) {
    // Degenerate slice shorter than floating resolution: keep the edge chord.
    out = {vertices_[e0], vertices_[e0 + 1]};
  }
  return Polyline(std::move(out));
}

Polyline Polyline::reversed() const {
  std::vector<Point2> r(vertices_.rbegin(), vertices_.rend());
  return Polyline(std::move(r));
}

// ---------------------------------------------------------------------------
// Distances and intersections

double point_segment_distance(Point2 p, Segment s, double* param) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  double u = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  if (param) *param = u;
  const Point2 q = u == 1.0 ? s.b : s.a + u * d;
  return distance(p, q);
}

SegmentHit segment_intersection(Segment s1, Segment s2) {
  const Point2 d1 = s1.b - s1.a;
  const Point2 d2 = s2.b - s2.a;
  const Point2 r = s2.a - s1.a;
  const double n1 = norm(d1), n2 = norm(d2);
  const double denom = cross(d1, d2);
  SegmentHit hit;

  if (std::abs(denom) <= 1e-14 * n1 * n2) {
    // Parallel. Collinear only if s2.a lies on the supporting line of s1.
    if (std::abs(cross(r, d1)) > 1e-14 * n1 * std::max(norm(r), n1)) return hit;
    const double l2 = dot(d1, d1);
    double u0 = dot(s2.a - s1.a, d1) / l2;
    double u1 = dot(s2.b - s1.a, d1) / l2;
    if (u0 > u1) std::swap(u0, u1);
    const double lo = std::max(0.0, u0), hi = std::min(1.0, u1);
    if (lo > hi) return hit;
    if (lo == hi) {
      hit.kind = SegmentHit::Kind::Point;
      hit.s1 = lo;
      hit.at = s1.a + lo * d1;
      double u = 0.0;
      point_segment_distance(hit.at, s2, &u);
      hit.s2 = u;
      return hit;
    }
    hit.kind = SegmentHit::Kind::Overlap;
    return hit;
  }

  constexpr double slack = 1e-12;
  const double s = cross(r, d2) / denom;
  const double u = cross(r, d1) / denom;
  if (s < -slack || s > 1.0 + slack || u < -slack || u > 1.0 + slack) return hit;
  hit.kind = SegmentHit::Kind::Point;
  hit.s1 = std::clamp(s, 0.0, 1.0);
  hit.s2 = std::clamp(u, 0.0, 1.0);
  hit.at = hit.s1 == 1.0 ? s1.b : s1.a + hit.s1 * d1;
  return hit;
}

double segment_segment_distance(Segment s1, Segment s2) {
  if (segment_intersection(s1, s2)) return 0.0;
  return std::min({point_segment_distance(s1.a, s2), point_segment_distance(s1.b, s2),
                   point_segment_distance(s2.a, s1), point_segment_distance(s2.b, s1)});
}

// ---------------------------------------------------------------------------
// Winding number (crossing rule with signed upward/downward edges)

int winding_number_unchecked(Point2 p, std::span<const Point2> closed) {
  int wn = 0;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
    const Point2 a = closed[i], b = closed[i + 1];
    const double side = cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0.0) ++wn;
    } else if (b.y <= p.y && side < 0.0) {
      --wn;
    }
  }
  return wn;
}

int winding_number(Point2 p, const Polyline& closed) {
  if (!closed.is_closed()) throw Error(ErrorKind::InvalidArgument, "winding_number needs a closed polyline");
  BBox box = closed.bbox();
  const double tol = tau_on(box);
  for (std::size_t i = 0; i < closed.edge_count(); ++i)
    if (point_segment_distance(p, closed.edge(i)) <= tol)
      throw Error(ErrorKind::OnBoundary, "point lies on the curve");
  return winding_number_unchecked(p, closed.vertices());
}

double signed_area(std::span<const Point2> ring) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) a += cross(ring[i], ring[i + 1]);
  if (!ring.empty() && ring.front() != ring.back()) a += cross(ring.back(), ring.front());
  return 0.5 * a;
}

// ---------------------------------------------------------------------------
// Simplicity

namespace {

bool adjacent(std::size_t i, std::size_t j, std::size_t edges, bool closed) {
  if (j == i + 1 || i == j + 1) return true;
  return closed && edges > 2 && ((i == 0 && j == edges - 1) || (j == 0 && i == edges - 1));
}

// Returns the separation of edges i and j if the pair violates simplicity.
std::optional<double> pair_violation(const Polyline& poly, std::size_t i, std::size_t j, double tol,
                                     bool closed) {
  const Segment a = poly.edge(i), b = poly.edge(j);
  if (adjacent(i, j, poly.edge_count(), closed)) {
    if (segment_intersection(a, b).kind == SegmentHit::Kind::Overlap) return 0.0;
    return std::nullopt;
  }
  const double d = segment_segment_distance(a, b);
  if (d <= tol) return d;
  return std::nullopt;
}

BBox edge_box(Segment s) {
  BBox b;
  b.add(s.a);
  b.add(s.b);
  return b;
}

}  // namespace

SimplicityReport is_simple_bruteforce(const Polyline& poly, double tol) {
  const bool closed = poly.is_closed();
  const auto n = poly.edge_count();
  std::vector<BBox> boxes(n);
  for (std::size_t i = 0; i < n; ++i) boxes[i] = edge_box(poly.edge(i)).expanded(tol);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!boxes[i].overlaps(boxes[j])) continue;
      if (auto d = pair_violation(poly, i, j, tol, closed)) return {false, i, j, *d};
    }
  return {};
}

SimplicityReport is_simple(const Polyline& poly, double tol) {
  if (tol < 0.0) throw Error(ErrorKind::InvalidArgument, "tolerance must be >= 0");
  const auto n = poly.edge_count();
  if (n <= 10000) return is_simple_bruteforce(poly, tol);
  const bool closed = poly.is_closed();
  const SpatialIndex idx(poly);
  std::vector<std::size_t> stamp(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::pair<std::size_t, double>> best;
    idx.for_each_in(edge_box(poly.edge(i)).expanded(tol), [&](std::size_t j) {
      if (j <= i || stamp[j] == i) return;
      stamp[j] = i;
      if (best && j >= best->first) return;
      if (auto d = pair_violation(poly, i, j, tol, closed)) best = std::pair{j, *d};
    });
    if (best) return {false, i, best->first, best->second};
  }
  return {};
}

// ---------------------------------------------------------------------------
// PolygonRegion

PolygonRegion::PolygonRegion(std::vector<Point2> ring) {
  std::vector<Point2> clean;
  clean.reserve(ring.size() + 1);
  for (auto p : ring)
    if (clean.empty() || clean.back() != p) clean.push_back(p);
  if (clean.size() >= 2 && clean.front() != clean.back()) clean.push_back(clean.front());
  if (clean.size() < 4) throw Error(ErrorKind::InvalidArgument, "polygon needs at least 3 distinct vertices");
  boundary_ = Polyline(std::move(clean));
  signed_area_ = raylab::signed_area(boundary_.vertices());
  if (signed_area_ == 0.0) throw Error(ErrorKind::InvalidArgument, "polygon has zero area");
  orientation_ = signed_area_ > 0.0 ? 1 : -1;
  if (!is_simple(boundary_, 0.0).simple) throw Error(ErrorKind::InvalidArgument, "polygon is not simple");
}

PolygonRegion PolygonRegion::disc(Point2 center, double radius, int segments) {
  if (!(radius > 0.0) || segments < 3) throw Error(ErrorKind::InvalidArgument, "bad disc");
  std::vector<Point2> ring;
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * std::numbers::pi * k / segments;
    ring.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return PolygonRegion(std::move(ring));
}

PolygonRegion PolygonRegion::rectangle(Point2 lo, Point2 hi) {
  return PolygonRegion({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

double PolygonRegion::boundary_distance(Point2 p) const {
  double d = INFINITY;
  for (std::size_t i = 0; i < boundary_.edge_count(); ++i)
    d = std::min(d, point_segment_distance(p, boundary_.edge(i)));
  return d;
}

PolygonRegion::Location PolygonRegion::classify(Point2 p) const {
  if (!bbox().expanded(tau_on(bbox())).contains(p)) return Location::Outside;
  if (boundary_distance(p) <= tau_on(bbox())) return Location::Boundary;
  return winding_number_unchecked(p, boundary_.vertices()) != 0 ? Location::Inside : Location::Outside;
}

bool PolygonRegion::contains(Point2 p) const { return classify(p) != Location::Outside; }

Point2 PolygonRegion::interior_point() const {
  const auto& v = boundary_.vertices();
  Point2 c{0, 0};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) c = c + v[i];
  c = (1.0 / static_cast<double>(v.size() - 1)) * c;
  if (classify(c) == Location::Inside && boundary_distance(c) > 1e-3 * bbox().diameter()) return c;
  // Horizontal scanline through the middle; midpoint of the widest inside run.
  const double y = 0.5 * (bbox().ymin + bbox().ymax) + 1e-7 * bbox().height();
  std::vector<double> xs;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const Point2 a = v[i], b = v[i + 1];
    if ((a.y <= y) != (b.y <= y)) xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
  }
  std::sort(xs.begin(), xs.end());
  double best = -1.0;
  Point2 out = c;
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
    if (xs[i + 1] - xs[i] > best) {
      best = xs[i + 1] - xs[i];
      out = {0.5 * (xs[i] + xs[i + 1]), y};
    }
  return out;
}

// ---------------------------------------------------------------------------
// SpatialIndex

std::uint64_t SpatialIndex::key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
         static_cast<std::uint32_t>(cy);
}

std::int64_t SpatialIndex::cell_coord(double v, bool is_x) const {
  return static_cast<std::int64_t>(std::floor((v - (is_x ? ox_ : oy_)) / cell_));
}

const std::vector<std::uint32_t>* SpatialIndex::bucket(std::int64_t cx, std::int64_t cy) const {
  auto it = slot_.find(key(cx, cy));
  return it == slot_.end() ? nullptr : &buckets_[it->second];
}

SpatialIndex::SpatialIndex(const Polyline& poly, double cell_size) {
  edge_count_ = poly.edge_count();
  extent_ = poly.bbox();
  ox_ = extent_.xmin;
  oy_ = extent_.ymin;
  if (edge_count_ == 0) return;
  if (cell_size <= 0.0) {
    std::vector<double> lens(edge_count_);
    for (std::size_t i = 0; i < edge_count_; ++i) lens[i] = poly.cumlen()[i + 1] - poly.cumlen()[i];
    auto mid = lens.begin() + static_cast<std::ptrdiff_t>(lens.size() / 2);
    std::nth_element(lens.begin(), mid, lens.end());
    cell_size = 2.0 * *mid;
    if (edge_count_ <= 4) cell_size = std::max(cell_size, extent_.diameter());
  }
  cell_ = cell_size > 0.0 ? cell_size : 1.0;

  for (;;) {
    // Keep total registrations bounded when a few edges are much longer than the cell.
    std::size_t registrations = 0;
    for (std::size_t i = 0; i < edge_count_; ++i) {
      const auto s = poly.edge(i);
      const auto nx = std::abs(cell_coord(s.b.x, true) - cell_coord(s.a.x, true)) + 1;
      const auto ny = std::abs(cell_coord(s.b.y, false) - cell_coord(s.a.y, false)) + 1;
      registrations += static_cast<std::size_t>(nx * ny);
    }
    if (registrations <= 64 * edge_count_ + 100000) break;
    cell_ *= 2.0;
  }

  for (std::size_t i = 0; i < edge_count_; ++i) {
    const auto s = poly.edge(i);
    const auto x0 = cell_coord(std::min(s.a.x, s.b.x), true), x1 = cell_coord(std::max(s.a.x, s.b.x), true);
    const auto y0 = cell_coord(std::min(s.a.y, s.b.y), false), y1 = cell_coord(std::max(s.a.y, s.b.y), false);
    for (auto cx = x0; cx <= x1; ++cx)
      for (auto cy = y0; cy <= y1; ++cy) {
        auto [it, inserted] = slot_.try_emplace(key(cx, cy), static_cast<std::uint32_t>(buckets_.size()));
        if (inserted) buckets_.emplace_back();
        buckets_[it->second].push_back(static_cast<std::uint32_t>(i));
      }
  }
}

std::vector<std::size_t> SpatialIndex::query(const BBox& box) const {
  std::vector<std::size_t> out;
  for_each_in(box, [&](std::size_t e) { out.push_back(e); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Nearest point queries

namespace {

// Distance from p to the part of edge e with parameters inside [t_lo, t_hi].
std::optional<NearestResult> edge_nearest(const Polyline& poly, std::size_t e, Point2 p, double t_lo,
                                          double t_hi) {
  const double c0 = poly.cumlen()[e], c1 = poly.cumlen()[e + 1];
  const double a = std::max(c0, t_lo), b = std::min(c1, t_hi);
  if (a > b) return std::nullopt;
  const Point2 pa = a == c0 ? poly[e] : poly.point_at(a);
  const Point2 pb = b == c1 ? poly[e + 1] : poly.point_at(b);
  NearestResult r;
  r.edge = e;
  if (a == b) {
    r.param = a;
    r.dist = distance(p, pa);
    return r;
  }
  double u = 0.0;
  r.dist = point_segment_distance(p, {pa, pb}, &u);
  r.param = u == 1.0 ? b : a + u * (b - a);
  return r;
}

std::optional<NearestResult> nearest_impl(const SpatialIndex& idx, const Polyline& poly, Point2 p,
                                          double t_lo, double t_hi) {
  std::optional<NearestResult> best;
  auto consider = [&](std::size_t e) {
    if (auto r = edge_nearest(poly, e, p, t_lo, t_hi))
      if (!best || r->dist < best->dist || (r->dist == best->dist && r->param < best->param)) best = r;
  };
  auto linear = [&] {
    const std::size_t e0 = poly.edge_at(t_lo), e1 = poly.edge_at(t_hi);
    for (auto e = e0; e <= e1; ++e) consider(e);
    return best;
  };
  const double cell = idx.cell_size();
  const BBox& ext = idx.extent();
  const double far = std::max({ext.xmin - p.x, p.x - ext.xmax, ext.ymin - p.y, p.y - ext.ymax, 0.0});
  if (far > 4.0 * cell) return linear();

  const auto cx = idx.cell_coord(p.x, true), cy = idx.cell_coord(p.y, false);
  const auto gx0 = idx.cell_coord(ext.xmin, true), gx1 = idx.cell_coord(ext.xmax, true);
  const auto gy0 = idx.cell_coord(ext.ymin, false), gy1 = idx.cell_coord(ext.ymax, false);
  const std::int64_t rmax = std::max({cx - gx0, gx1 - cx, cy - gy0, gy1 - cy, std::int64_t{0}});
  std::size_t visited = 0;
  const std::size_t budget = 4 * idx.edge_count() + 64;
  auto visit = [&](std::int64_t x, std::int64_t y) {
    ++visited;
    if (const auto* b = idx.bucket(x, y))
      for (auto e : *b) consider(e);
  };
  for (std::int64_t r = 0; r <= rmax; ++r) {
    if (r == 0) {
      visit(cx, cy);
    } else {
      for (auto x = cx - r; x <= cx + r; ++x) {
        visit(x, cy - r);
        visit(x, cy + r);
      }
      for (auto y = cy - r + 1; y <= cy + r - 1; ++y) {
        visit(cx - r, y);
        visit(cx + r, y);
      }
    }
    if (best && best->dist <= static_cast<double>(r) * cell) return best;
    if (visited > budget) return linear();
  }
  return best;
}

}  // namespace

int side_at(const Polyline& poly, double param, Point2 p, double on_tol) {
  const Point2 q = poly.point_at(param);
  if (distance(p, q) <= on_tol) return 0;
  const auto& cl = poly.cumlen();
  const auto e = poly.edge_at(param);
  const Point2 d = p - q;
  const double vtol = 1e-12 * std::max(1.0, poly.length());
  std::optional<std::size_t> vertex;
  if (std::abs(param - cl[e]) <= vtol && e > 0) vertex = e;
  else if (std::abs(param - cl[e + 1]) <= vtol && e + 1 < poly.size() - 1) vertex = e + 1;
  if (!vertex) {
    const double c = cross(poly[e + 1] - poly[e], d);
    return c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
  }
  const auto k = *vertex;
  const Point2 in = poly[k] - poly[k - 1];
  const Point2 out = poly[k + 1] - poly[k];
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto angle_from = [&](Point2 ref, Point2 v) {
    double a = std::atan2(cross(ref, v), dot(ref, v));
    return a < 0.0 ? a + two_pi : a;
  };
  const double end = angle_from(out, -1.0 * in);
  const double ad = angle_from(out, d);
  if (ad > 0.0 && ad < end) return 1;
  if (ad > end) return -1;
  return 0;
}

NearestResult nearest_on_polyline(const SpatialIndex& idx, const Polyline& poly, Point2 p) {
  auto r = nearest_impl(idx, poly, p, 0.0, poly.length());
  if (!r) throw Error(ErrorKind::InvalidArgument, "empty polyline");
  r->side = side_at(poly, r->param, p, tau_on(poly.bbox()));
  if (r->dist <= tau_on(poly.bbox())) r->side = 0;
  return *r;
}

std::optional<NearestResult> nearest_in_range(const SpatialIndex& idx, const Polyline& poly, Point2 p,
                                              double t_lo, double t_hi) {
  t_lo = std::max(t_lo, 0.0);
  t_hi = std::min(t_hi, poly.length());
  if (t_lo > t_hi) return std::nullopt;
  auto r = nearest_impl(idx, poly, p, t_lo, t_hi);
  if (r) r->side = side_at(poly, r->param, p, tau_on(poly.bbox()));
  return r;
}

// ---------------------------------------------------------------------------
// Hausdorff distance by branch and bound along the edges of `a`.
//
// The distance to a single segment is convex along a line, so on an interval
// the distance to `b` is bounded above by min over nearby edges of the larger
// endpoint value. Intervals whose bound cannot beat the incumbent are dropped.

double directed_hausdorff(const Polyline& a, const Polyline& b, const SpatialIndex& bidx) {
  BBox both = a.bbox();
  both.add(b.bbox());
  const double tol = std::max(tau_on(both), 1e-300);

  auto dist_to_b = [&](Point2 p) { return nearest_on_polyline(bidx, b, p).dist; };

  struct Interval {
    Point2 p0, p1;
    double d0, d1, ub;
    bool operator<(const Interval& o) const { return ub < o.ub; }
  };
  auto upper_bound = [&](Point2 p0, Point2 p1, double d0, double d1) {
    BBox box;
    box.add(p0);
    box.add(p1);
    box = box.expanded(std::max(d0, d1));
    double ub = std::max(d0, d1) + 0.5 * distance(p0, p1);
    bidx.for_each_in(box, [&](std::size_t e) {
      const auto s = b.edge(e);
      ub = std::min(ub, std::max(point_segment_distance(p0, s), point_segment_distance(p1, s)));
    });
    return ub;
  };

  std::vector<double> dv(a.size());
  double lb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) lb = std::max(lb, dv[i] = dist_to_b(a[i]));

  std::priority_queue<Interval> heap;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double ub = upper_bound(a[i], a[i + 1], dv[i], dv[i + 1]);
    if (ub > lb + tol) heap.push({a[i], a[i + 1], dv[i], dv[i + 1], ub});
  }
  std::size_t steps = 0;
  while (!heap.empty() && heap.top().ub > lb + tol && steps++ < 50'000'000) {
    const Interval iv = heap.top();
    heap.pop();
    const Point2 m = lerp(iv.p0, iv.p1, 0.5);
    if (m == iv.p0 || m == iv.p1) continue;
    const double dm = dist_to_b(m);
    lb = std::max(lb, dm);
    const double u0 = upper_bound(iv.p0, m, iv.d0, dm);
    if (u0 > lb + tol) heap.push({iv.p0, m, iv.d0, dm, u0});
    const double u1 = upper_bound(m, iv.p1, dm, iv.d1);
    if (u1 > lb + tol) heap.push({m, iv.p1, dm, iv.d1, u1});
  }
  return lb;
}

double hausdorff(const Polyline& a, const Polyline& b) {
  const SpatialIndex ia(a), ib(b);
  return std::max(directed_hausdorff(a, b, ib), directed_hausdorff(b, a, ia));
}

}  // namespace raylab
