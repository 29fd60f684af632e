#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "raylab/geom2d.hpp"

using namespace raylab;

namespace {

// Random star-shaped polygon around c: sorted angles, random radii. Always simple.
std::vector<Point2> star_polygon(std::mt19937_64& rng, int n, Point2 c = {0, 0}) {
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi), rad(0.3, 1.5);
  std::vector<double> a(n);
  for (auto& v : a) v = ang(rng);
  std::sort(a.begin(), a.end());
  std::vector<Point2> ring;
  for (double t : a) {
    const double r = rad(rng);
    ring.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  ring.push_back(ring.front());
  return ring;
}

// Independent ray-casting oracle: number of edges crossed by the ray to +x.
int crossing_count(Point2 p, const std::vector<Point2>& ring) {
  int c = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point2 a = ring[i], b = ring[i + 1];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > p.x) ++c;
    }
  }
  return c;
}

// 2x2 linear-solve oracle for a proper crossing.
std::optional<Point2> solve_oracle(Segment s1, Segment s2) {
  const double a11 = s1.b.x - s1.a.x, a12 = -(s2.b.x - s2.a.x);
  const double a21 = s1.b.y - s1.a.y, a22 = -(s2.b.y - s2.a.y);
  const double r1 = s2.a.x - s1.a.x, r2 = s2.a.y - s1.a.y;
  const double det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-12) return std::nullopt;
  const double s = (r1 * a22 - a12 * r2) / det;
  const double u = (a11 * r2 - r1 * a21) / det;
  if (s < 0 || s > 1 || u < 0 || u > 1) return std::nullopt;
  return Point2{s1.a.x + s * a11, s1.a.y + s * a21};
}

Polyline random_walk(std::mt19937_64& rng, int n, double step) {
  std::normal_distribution<double> g(0.0, step);
  std::vector<Point2> v{{0, 0}};
  while (static_cast<int>(v.size()) < n) {
    Point2 q{v.back().x + g(rng), v.back().y + g(rng)};
    if (q != v.back()) v.push_back(q);
  }
  return Polyline(std::move(v));
}

double dense_directed(const Polyline& a, const Polyline& b, double spacing) {
  const SpatialIndex ib(b);
  double h = 0.0;
  const int n = static_cast<int>(std::ceil(a.length() / spacing));
  for (int i = 0; i <= n; ++i)
    h = std::max(h, nearest_on_polyline(ib, b, a.point_at(a.length() * i / n)).dist);
  return h;
}

}  // namespace

TEST_CASE("polyline parameterization") {
  Polyline p({{0, 0}, {3, 0}, {3, 4}});
  CHECK(p.length() == doctest::Approx(7.0));
  CHECK(p.cumlen()[1] == 3.0);
  CHECK(p.point_at(5.0).y == doctest::Approx(2.0));
  auto s = p.slice(1.0, 5.0);
  CHECK(s.length() == doctest::Approx(4.0));
  CHECK(s.size() == 3);
  CHECK(p.reversed().front() == Point2{3, 4});
  CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}}), Error);
  CHECK_THROWS_AS(Polyline({{0, 0}}), Error);
  CHECK_THROWS_AS(Polyline({{0, 0}, {NAN, 1}}), Error);
}

TEST_CASE("winding_number examples") {
  Polyline sq({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {-1, -1}});
  CHECK(winding_number({0, 0}, sq) == 1);
  CHECK(winding_number({3, 0}, sq) == 0);
  CHECK(winding_number({0, 0}, sq.reversed()) == -1);
  try {
    winding_number({1, 0}, sq);
    FAIL("expected OnBoundary");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OnBoundary);
  }
}

TEST_CASE("winding_number agrees with crossing parity on random 50-gons") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.6, 1.6);
  for (int trial = 0; trial < 200; ++trial) {
    auto ring = star_polygon(rng, 50);
    Polyline poly(ring);
    for (int k = 0; k < 20; ++k) {
      Point2 p = trial == 0 && k == 0 ? Point2{0.25, 0.1} : Point2{u(rng), u(rng)};
      const int w = winding_number(p, poly);
      CHECK((w == -1 || w == 0 || w == 1));
      CHECK((std::abs(w) % 2) == crossing_count(p, ring) % 2);
      // cyclic rotation invariance and reversal negation
      std::vector<Point2> rot(ring.begin() + 7, ring.end() - 1);
      rot.insert(rot.end(), ring.begin(), ring.begin() + 8);
      CHECK(winding_number(p, Polyline(rot)) == w);
      CHECK(winding_number(p, poly.reversed()) == -w);
    }
  }
}

TEST_CASE("segment_intersection examples") {
  auto h = segment_intersection({{0, 0}, {1, 1}}, {{0, 1}, {1, 0}});
  REQUIRE(h.kind == SegmentHit::Kind::Point);
  CHECK(h.at.x == doctest::Approx(0.5));
  CHECK(h.at.y == doctest::Approx(0.5));
  CHECK(!segment_intersection({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}));
  CHECK(segment_intersection({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}).kind == SegmentHit::Kind::Overlap);
  auto touch = segment_intersection({{0, 0}, {1, 0}}, {{1, 0}, {2, 0}});
  CHECK(touch.kind == SegmentHit::Kind::Point);
  CHECK(touch.at == Point2{1, 0});
  CHECK(!segment_intersection({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}));
}

TEST_CASE("segment_intersection agrees with linear-solve oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    Segment a{{u(rng), u(rng)}, {u(rng), u(rng)}}, b{{u(rng), u(rng)}, {u(rng), u(rng)}};
    auto h = segment_intersection(a, b);
    auto o = solve_oracle(a, b);
    REQUIRE(static_cast<bool>(h) == o.has_value());
    if (o) {
      ++hits;
      CHECK(std::abs(h.at.x - o->x) < 1e-9);
      CHECK(std::abs(h.at.y - o->y) < 1e-9);
    }
  }
  CHECK(hits > 50);
}

TEST_CASE("is_simple examples") {
  std::vector<Point2> spiral{{0, 0}};
  double r = 10;
  Point2 cur{0, 0};
  const Point2 dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 30; ++k) {
    cur = cur + r * dirs[k % 4];
    spiral.push_back(cur);
    if (k % 2 == 1) r *= 0.8;
  }
  Polyline sp(spiral);
  CHECK(is_simple(sp, 0.0).simple);
  CHECK(is_simple(sp.reversed(), 0.0).simple);

  Polyline eight({{0, 0}, {1, 1}, {2, 0}, {1, -1}, {0, 0}, {-1, 1}, {-2, 0}, {-1, -1}, {0.1, 0.05}});
  auto rep = is_simple(eight, 0.0);
  CHECK(!rep.simple);
  CHECK(rep.edge_i < rep.edge_j);
  CHECK(!is_simple(eight.reversed(), 0.0).simple);

  // A near miss counts only when the tolerance allows it.
  Polyline hook({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 0.01}});
  CHECK(is_simple(hook, 0.001).simple);
  CHECK(!is_simple(hook, 0.02).simple);
  // Backtracking along the same line is an overlap of adjacent edges.
  CHECK(!is_simple(Polyline({{0, 0}, {2, 0}, {1, 0}}), 0.0).simple);
}

TEST_CASE("is_simple index path agrees with brute force") {
  std::mt19937_64 rng(3);
  auto walk = random_walk(rng, 12000, 0.01);
  auto a = is_simple(walk, 0.0), b = is_simple_bruteforce(walk, 0.0);
  CHECK(a.simple == b.simple);
  CHECK(a.edge_i == b.edge_i);
  CHECK(a.edge_j == b.edge_j);

  std::vector<Point2> arch;
  for (int i = 0; i < 15000; ++i) {
    const double t = 0.01 * i;
    arch.push_back({(1 + t) * std::cos(t), (1 + t) * std::sin(t)});
  }
  Polyline sp(arch);
  CHECK(is_simple(sp, 1e-3).simple);
  CHECK(is_simple_bruteforce(sp, 1e-3).simple);
  CHECK(is_simple(sp.reversed(), 1e-3).simple);
}

TEST_CASE("spatial index registers every overlapped cell") {
  std::mt19937_64 rng(5);
  auto walk = random_walk(rng, 2000, 0.05);
  SpatialIndex idx(walk);
  CHECK(idx.cell_size() > 0);
  for (std::size_t e = 0; e < walk.edge_count(); e += 37) {
    const auto s = walk.edge(e);
    for (auto cx = idx.cell_coord(std::min(s.a.x, s.b.x), true); cx <= idx.cell_coord(std::max(s.a.x, s.b.x), true); ++cx)
      for (auto cy = idx.cell_coord(std::min(s.a.y, s.b.y), false); cy <= idx.cell_coord(std::max(s.a.y, s.b.y), false); ++cy) {
        const auto* b = idx.bucket(cx, cy);
        REQUIRE(b != nullptr);
        CHECK(std::find(b->begin(), b->end(), e) != b->end());
      }
  }
  Polyline tiny({{0, 0}, {1, 0}});
  SpatialIndex ti(tiny);
  CHECK(ti.query(tiny.bbox()).size() == 1);
}

TEST_CASE("nearest_on_polyline examples") {
  Polyline line({{0, 0}, {10, 0}});
  SpatialIndex idx(line);
  auto a = nearest_on_polyline(idx, line, {5, 1});
  CHECK(a.param == doctest::Approx(5));
  CHECK(a.dist == doctest::Approx(1));
  CHECK(a.side == 1);
  auto b = nearest_on_polyline(idx, line, {5, -2});
  CHECK(b.param == doctest::Approx(5));
  CHECK(b.dist == doctest::Approx(2));
  CHECK(b.side == -1);
  CHECK(nearest_on_polyline(idx, line, {5, 0}).side == 0);
  CHECK(nearest_on_polyline(idx, line, {50, 3}).param == doctest::Approx(10));

  // Vertex wedge: convex corner of an L turning left.
  Polyline ell({{0, 0}, {1, 0}, {1, 1}});
  SpatialIndex ie(ell);
  CHECK(nearest_on_polyline(ie, ell, {2, -1}).side == -1);
  CHECK(nearest_on_polyline(ie, ell, {0.9, 0.1}).side == 1);
  auto r = nearest_in_range(ie, ell, {2, 2}, 0.0, 0.5);
  REQUIRE(r);
  CHECK(r->param == doctest::Approx(0.5));
}

TEST_CASE("nearest_on_polyline agrees with per-edge minimization") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  auto walk = random_walk(rng, 3000, 0.03);
  SpatialIndex idx(walk);
  const auto box = walk.bbox();
  std::uniform_real_distribution<double> ux(box.xmin - 0.5, box.xmax + 0.5), uy(box.ymin - 0.5, box.ymax + 0.5);
  for (int k = 0; k < 100; ++k) {
    Point2 p{ux(rng), uy(rng)};
    double best = INFINITY, vbest = INFINITY;
    for (std::size_t e = 0; e < walk.edge_count(); ++e) best = std::min(best, point_segment_distance(p, walk.edge(e)));
    for (auto v : walk.vertices()) vbest = std::min(vbest, distance(p, v));
    auto r = nearest_on_polyline(idx, walk, p);
    CHECK(r.dist == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.dist <= vbest);
    CHECK(distance(walk.point_at(r.param), p) == doctest::Approx(r.dist).epsilon(1e-9));
  }
}

TEST_CASE("hausdorff examples and properties") {
  Polyline s({{0, 0}, {1, 0}});
  CHECK(hausdorff(s, s) == 0.0);
  CHECK(hausdorff(s, Polyline({{0, 0.5}, {1, 0.5}})) == doctest::Approx(0.5));
  // Hausdorff attained at an edge interior, not a vertex.
  Polyline v({{0, 1}, {0.5, 0}, {1, 1}});
  Polyline top({{0, 1}, {1, 1}});
  CHECK(hausdorff(v, top) == doctest::Approx(1.0));

  std::mt19937_64 rng(23);
  std::vector<Polyline> curves;
  for (int i = 0; i < 6; ++i) curves.push_back(random_walk(rng, 60, 0.2));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double dense = std::max(dense_directed(curves[i], curves[(i + 1) % 6], 1e-4),
                                  dense_directed(curves[(i + 1) % 6], curves[i], 1e-4));
    const double h = hausdorff(curves[i], curves[(i + 1) % 6]);
    CHECK(h >= dense - 1e-12);
    CHECK(h - dense < 1e-4);
    for (std::size_t j = 0; j < curves.size(); ++j)
      for (std::size_t k = 0; k < curves.size(); ++k) {
        const double ij = hausdorff(curves[i], curves[j]);
        CHECK(ij == doctest::Approx(hausdorff(curves[j], curves[i])).epsilon(1e-12));
        CHECK(ij <= hausdorff(curves[i], curves[k]) + hausdorff(curves[k], curves[j]) + 1e-9);
      }
  }
}

TEST_CASE("polygon region") {
  auto d = PolygonRegion::disc({1, 1}, 2.0);
  CHECK(d.orientation() == 1);
  CHECK(d.contains({1, 1}));
  CHECK(!d.contains({4, 1}));
  CHECK(d.classify({3, 1}) == PolygonRegion::Location::Boundary);
  CHECK(d.classify(d.interior_point()) == PolygonRegion::Location::Inside);
  auto r = PolygonRegion({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(r.orientation() == -1);
  CHECK(r.signed_area() == doctest::Approx(-1.0));
  // C-shape: centroid lies outside, interior_point must still be inside.
  PolygonRegion c({{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 2}, {3, 2}, {3, 3}, {0, 3}});
  CHECK(c.classify(c.interior_point()) == PolygonRegion::Location::Inside);
  CHECK_THROWS_AS(PolygonRegion({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);
}
