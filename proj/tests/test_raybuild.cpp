#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "raylab/raybuild.hpp"

using namespace raylab;

namespace {

const PlanarMap& ikeda() {
  static const PlanarMap m = PlanarMap::ikeda();
  return m;
}

const FixedPointResult& fixed_point() {
  static const FixedPointResult fp = newton_fixed_point(ikeda(), {1.114, -2.285});
  return fp;
}

Polyline seed_from_p() { return seed_segment(ikeda(), fixed_point(), 2).reversed(); }

// Default build (generations 7), shared by several cases.
const BuildResult& default_build() {
  static const BuildResult r = build_ray(ikeda(), RefineConfig{});
  return r;
}

// Uniform preimage sampling of f^k on the seed.
Polyline uniform_oracle(const Polyline& I, int k, double spacing) {
  const int n = static_cast<int>(std::ceil(I.length() / spacing));
  std::vector<Point2> v;
  for (int i = 0; i <= n; ++i) {
    const Point2 q = iterate(ikeda(), I.point_at(I.length() * i / n), k);
    if (v.empty() || q != v.back()) v.push_back(q);
  }
  return Polyline(std::move(v));
}

// Directed distance sampled at `spacing` on every edge, then resampled finely
// around the best samples.
double refined_dense_directed(const Polyline& a, const Polyline& b) {
  const SpatialIndex ib(b);
  auto d = [&](Point2 q) { return nearest_on_polyline(ib, b, q).dist; };
  std::vector<std::pair<double, double>> samples;  // (distance, parameter on a)
  const double sp = 1e-4;
  const int n = static_cast<int>(std::ceil(a.length() / sp));
  for (int i = 0; i <= n; ++i) {
    const double t = a.length() * i / n;
    samples.push_back({d(a.point_at(t)), t});
  }
  for (auto v : a.vertices()) samples.push_back({d(v), 0.0});
  std::partial_sort(samples.begin(), samples.begin() + 20, samples.end(), std::greater<>());
  double best = samples.front().first;
  for (int s = 0; s < 20; ++s) {
    const double t0 = samples[s].second;
    for (int j = -1000; j <= 1000; ++j) {
      const double t = std::clamp(t0 + j * 1e-7, 0.0, a.length());
      best = std::max(best, d(a.point_at(t)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("seed_segment") {
  const auto& fp = fixed_point();
  auto s2 = seed_segment(ikeda(), fp, 2);
  CHECK(s2.size() == 2);
  CHECK(s2.front() == Point2{0.0, -2.285});
  CHECK(std::abs(s2.back().x - 1.114) < 1e-3);
  CHECK(std::abs(s2.back().y + 2.285) < 1e-3);
  CHECK(s2.back() == fp.point);
  auto s11 = seed_segment(ikeda(), fp, 11);
  CHECK(s11.size() == 11);
  CHECK(s11.back() == fp.point);
  for (std::size_t i = 1; i < s11.size(); ++i)
    CHECK(distance(s11[i - 1], s11[i]) == doctest::Approx(0.1114).epsilon(1e-3));

  auto lin = PlanarMap::linear({2, 0, 0, 0.5});
  FixedPointResult origin{{0, 0}, 0, 0};
  try {
    seed_segment(lin, origin, 2);
    FAIL("expected SeedNotConfigured");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SeedNotConfigured);
  }
  lin.seed_start = Point2{1, 0};
  CHECK(seed_segment(lin, origin, 3).size() == 3);
}

TEST_CASE("iterate_arc_adaptive trivial maps") {
  RefineConfig c;
  c.delta = 0.5;
  std::vector<Point2> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back({0.1 * i, 0.05 * std::sin(0.1 * i)});
  Polyline arc(pts);
  auto same = iterate_arc_adaptive(PlanarMap::identity(), arc, c);
  CHECK(same.vertices() == arc.vertices());

  Polyline seg({{0, 0}, {1, 0}, {3, 0}});
  RefineConfig one;
  one.delta = 2.0;
  auto dbl = iterate_arc_adaptive_ex(PlanarMap::linear({2, 0, 0, 2}), seg, one);
  CHECK(dbl.pts.size() == 4);  // only the long edge (length 4) is split once
  CHECK(dbl.stats.splits == 1);
  RefineConfig d1;
  d1.delta = 1.0;
  auto dbl2 = iterate_arc_adaptive_ex(PlanarMap::linear({2, 0, 0, 2}), Polyline({{0, 0}, {1, 0}, {2, 0}}), d1);
  CHECK(dbl2.pts.size() == 5);  // each edge bisected exactly once

  RefineConfig tiny;
  tiny.delta = 1e-6;
  tiny.cap = 100;
  auto capped = iterate_arc_adaptive_ex(PlanarMap::identity(), seg, tiny);
  CHECK(capped.stats.cap_reached);
  CHECK(capped.pts.size() <= 100);

  try {
    iterate_arc_adaptive(PlanarMap::linear({2, 0, 0, 2}), seg, c, 40);
    FAIL("expected Diverged");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Diverged);
  }
  RefineConfig bad;
  bad.delta = 1;
  bad.angle_max = 4;
  CHECK_THROWS_AS(iterate_arc_adaptive(PlanarMap::identity(), seg, bad), Error);
}

TEST_CASE("iterate_arc_adaptive on the Ikeda seed") {
  const Polyline I = seed_from_p();
  const double delta = default_build().log.delta;
  RefineConfig c;
  c.delta = delta;
  for (int k = 6; k <= 7; ++k) {
    auto a = iterate_arc_adaptive(ikeda(), I, c, k);
    auto o = uniform_oracle(I, k, delta / 10);
    CHECK(hausdorff(a, o) < 2 * delta);
  }
  for (int k = 0; k <= 6; ++k) {
    auto a = iterate_arc_adaptive(ikeda(), I, c, k + 1);
    auto o = uniform_oracle(I, k + 1, delta / 10);
    CHECK(std::abs(a.length() - o.length()) <= 0.01 * o.length());
  }
}

TEST_CASE("halving delta never moves the arc away from a fine oracle") {
  const Polyline I = seed_from_p();
  const double delta = default_build().log.delta;
  for (int k = 6; k <= 7; ++k) {
    auto ref = uniform_oracle(I, k, delta / 2 / 100);
    double prev = INFINITY;
    for (double f : {1.0, 0.5}) {
      RefineConfig c;
      c.delta = delta * f;
      const double h = hausdorff(iterate_arc_adaptive(ikeda(), I, c, k), ref);
      CHECK(h <= prev);
      prev = h;
    }
  }
}

TEST_CASE("hausdorff of f^6[I] and f^7[I] matches a dense oracle") {
  const Polyline I = seed_from_p();
  RefineConfig c;
  c.delta = default_build().log.delta;
  auto f6 = iterate_arc_adaptive(ikeda(), I, c, 6);
  auto f7 = iterate_arc_adaptive(ikeda(), I, c, 7);
  const double h = hausdorff(f6, f7);
  const double o = std::max(refined_dense_directed(f6, f7), refined_dense_directed(f7, f6));
  CHECK(std::abs(h - o) < 1e-6);
}

TEST_CASE("build_ray structure") {
  const auto& r = default_build();
  const auto& ray = r.ray;
  CHECK(ray.generations == 7);
  CHECK(ray.gen.front() == 0);
  CHECK(ray.gen.back() == 7);
  for (int k = 0; k <= 7; ++k) CHECK(std::find(ray.gen.begin(), ray.gen.end(), k) != ray.gen.end());
  CHECK(std::is_sorted(ray.gen.begin(), ray.gen.end()));
  CHECK(distance(ray.poly.front(), ray.origin) < 1e-12);
  CHECK(r.log.simplicity.simple);
  for (std::size_t k = 1; k < r.log.per_generation.size(); ++k)
    CHECK(r.log.per_generation[k].vertices > r.log.per_generation[k - 1].vertices);
  CHECK(r.log.injectivity.injective);
  CHECK(r.log.delta == doctest::Approx(1e-3 * bbox_of(attractor_cloud(ikeda(), seed_from_p(), 20000)).diameter()));
}

TEST_CASE("build_ray bookkeeping identity") {
  const auto& r = default_build();
  const auto& ray = r.ray;
  const Point2 p = r.log.fixed_point.point, e = r.log.unstable_direction;
  const int n = r.log.lead_in + ray.generations - 1;
  std::size_t mismatches = 0;
  CHECK(ray.poly[0] == p);  // the origin is the fixed point itself
  for (std::size_t i = 1; i < ray.poly.size(); ++i) {
    const Point2 pre = iterate(ikeda(), p + ray.seed_param[i] * e, n);
    if (ikeda()(pre) != ray.poly[i]) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("build_ray generation blocks map onto the next block") {
  const auto& r = default_build();
  const auto& ray = r.ray;
  const double delta = r.log.delta;
  auto image_of = [&](const Polyline& pl) {
    std::vector<Point2> v;
    for (auto q : pl.vertices()) v.push_back(ikeda()(q));
    return Polyline(v);
  };
  // Block 0 is an initial segment, so its image covers blocks 0 and 1.
  CHECK(hausdorff(image_of(ray.poly.slice(0, ray.gen_end[0])), ray.poly.slice(0, ray.gen_end[1])) < delta);
  for (int k = 1; k < ray.generations; ++k) {
    auto [a0, a1] = ray.block_range(k);
    auto [b0, b1] = ray.block_range(k + 1);
    CHECK(hausdorff(image_of(ray.poly.slice(a0, a1)), ray.poly.slice(b0, b1)) < delta);
  }
}

TEST_CASE("build_ray prefix stability and seed resolution") {
  const auto& r7 = default_build();
  RefineConfig c;
  c.generations = 6;
  auto r6 = build_ray(ikeda(), c);
  const double delta = r7.log.delta;
  CHECK(r6.log.delta == r7.log.delta);
  CHECK(r6.ray.poly.length() == doctest::Approx(r7.ray.gen_end[6]).epsilon(1e-5));
  CHECK(hausdorff(r6.ray.poly, r7.ray.poly.slice(0, r7.ray.gen_end[6])) < delta);
  RefineConfig c4;
  c4.n0 = 4;
  auto r4 = build_ray(ikeda(), c4);
  CHECK(hausdorff(r4.ray.poly, r7.ray.poly) < 2 * delta);
}

TEST_CASE("build_ray literal iterates construction") {
  RefineConfig c;
  c.construction = Construction::Iterates;
  c.generations = 0;
  auto r0 = build_ray(ikeda(), c);
  CHECK(hausdorff(r0.ray.poly, seed_from_p()) < 1e-12);
  CHECK(r0.ray.poly.front() == fixed_point().point);
  c.generations = 3;
  auto r3 = build_ray(ikeda(), c);
  CHECK(r3.ray.gen.back() == 3);
  CHECK(r3.log.per_generation[3].length == doctest::Approx(r3.ray.poly.length()));
  // Bookkeeping: vertices are f^3 of their seed points exactly.
  const Polyline I = seed_from_p();
  for (std::size_t i = 0; i < r3.ray.poly.size(); i += 97)
    CHECK(iterate(ikeda(), I.point_at(r3.ray.seed_param[i]), 3) == r3.ray.poly[i]);
}

TEST_CASE("is_simple on Ikeda rays agrees with the brute-force scan") {
  for (int g : {3, 5}) {
    RefineConfig c;
    c.generations = g;
    auto r = build_ray_unchecked(ikeda(), c);
    const double tol = tau_simple(r.ray.poly.bbox());
    auto a = is_simple(r.ray.poly, tol);
    auto b = is_simple_bruteforce(r.ray.poly, tol);
    CHECK(a.simple == b.simple);
    CHECK(a.simple);
    CHECK(is_simple(r.ray.poly.reversed(), tol).simple);
  }
}

TEST_CASE("min_separation agrees with all pairs") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0, 0.1);
  std::vector<Point2> v{{0, 0}};
  for (int i = 0; i < 400; ++i) v.push_back({v.back().x + g(rng), v.back().y + g(rng)});
  Polyline pl(v);
  double best = INFINITY;
  for (std::size_t i = 0; i < pl.edge_count(); ++i)
    for (std::size_t j = i + 2; j < pl.edge_count(); ++j)
      best = std::min(best, segment_segment_distance(pl.edge(i), pl.edge(j)));
  CHECK(std::get<0>(min_separation(pl)) == best);
}

TEST_CASE("injectivity_report") {
  std::vector<Point2> pts;
  for (int i = 0; i <= 30; ++i) pts.push_back({0.1 * i, 0.3 * std::sin(0.2 * i)});
  Polyline arc(pts);
  RefineConfig c;
  c.delta = 1.0;
  auto id = injectivity_report(PlanarMap::identity(), arc, c);
  CHECK(id.injective);
  CHECK(id.min_separation == std::get<0>(min_separation(arc)));

  auto sq = PlanarMap::from_function("square", [](Point2 z) { return Point2{z.x * z.x - z.y * z.y, 2 * z.x * z.y}; });
  // Passes through both z and -z.
  Polyline sym({{-1, -1}, {-0.2, 0.3}, {0.5, 0.6}, {1, 1}});
  CHECK(!injectivity_report(sq, sym).injective);

  auto ik = injectivity_report(ikeda(), seed_segment(ikeda(), fixed_point(), 2));
  CHECK(ik.injective);
  CHECK(ik.min_separation > 0.0);
}

TEST_CASE("basin_check trivial cases") {
  auto half = PlanarMap::linear({0.5, 0, 0, 0.5});
  auto box = PolygonRegion::rectangle({-1, -1}, {1, 1});
  CHECK(basin_check(half, {{0, 0}, {0, 0}}, 5, box) == 1.0);
  CHECK(basin_check(half, {{5, 5}, {-3, 8}}, 10, box) == 1.0);
  auto dbl = PlanarMap::linear({2, 0, 0, 2});
  CHECK(basin_check(dbl, {{0.5, 0}, {0, -0.3}, {2, 2}}, 30, box) == 0.0);
  CHECK_THROWS_AS(basin_check(dbl, {{0, 0}}, 0, box), Error);
}

TEST_CASE("attractor cloud lies near the ray") {
  const auto& r = default_build();
  auto cloud = attractor_cloud(ikeda(), seed_from_p(), 2000);
  CHECK(cloud.size() == 2000);
  const SpatialIndex idx(r.ray.poly);
  double worst = 0;
  for (auto q : cloud) worst = std::max(worst, nearest_on_polyline(idx, r.ray.poly, q).dist);
  // The ray is dense in the attractor; at 7 generations every cloud point is within a few percent of it.
  CHECK(worst < 0.05 * r.ray.poly.bbox().diameter());
}
