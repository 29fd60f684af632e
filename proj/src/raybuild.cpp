#include "raylab/raybuild.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

namespace raylab {

void RefineConfig::validate(bool need_delta) const {
  if (need_delta && !(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be > 0");
  if (!need_delta && !(delta > 0.0) && !(delta_rel > 0.0))
    throw Error(ErrorKind::InvalidArgument, "delta or delta_rel must be > 0");
  if (!(angle_max > 0.0 && angle_max < std::numbers::pi))
    throw Error(ErrorKind::InvalidArgument, "angle_max must lie in (0, pi)");
  if (cap < 2) throw Error(ErrorKind::InvalidArgument, "cap must be >= 2");
  if (generations < 0) throw Error(ErrorKind::InvalidArgument, "generations must be >= 0");
  if (n0 < 2) throw Error(ErrorKind::InvalidArgument, "n0 must be >= 2");
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RAYLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

namespace {

std::vector<Point2> eval_many(const std::function<Point2(double)>& f, const std::vector<double>& u) {
  std::vector<Point2> out(u.size());
  const std::size_t n = u.size();
  const unsigned T = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), n / 4096 + 1));
  if (T <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(u[i]);
    return out;
  }
  std::vector<std::exception_ptr> errs(T);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < T; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = n * t / T; i < n * (t + 1) / T; ++i) out[i] = f(u[i]);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

double turn_angle(Point2 a, Point2 b, Point2 c) {
  const Point2 d1 = b - a, d2 = c - b;
  return std::atan2(std::abs(cross(d1, d2)), dot(d1, d2));
}

// Drops consecutive duplicate images so the result is a valid Polyline.
void dedupe(AdaptiveArc& arc) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < arc.pts.size(); ++i) {
    if (w > 0 && arc.pts[i] == arc.pts[w - 1]) continue;
    arc.pts[w] = arc.pts[i];
    arc.u[w] = arc.u[i];
    ++w;
  }
  arc.pts.resize(w);
  arc.u.resize(w);
  arc.stats.vertices = w;
}

BBox edge_box(Segment s) {
  BBox b;
  b.add(s.a);
  b.add(s.b);
  return b;
}

}  // namespace

AdaptiveArc refine_adaptive(const std::function<Point2(double)>& eval, std::vector<double> u,
                            const RefineConfig& cfg) {
  cfg.validate(true);
  if (u.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 preimage parameters");
  AdaptiveArc arc;
  arc.u = std::move(u);
  arc.pts = eval_many(eval, arc.u);
  const double floor_len = 1e-3 * cfg.delta;

  for (;;) {
    const std::size_t n = arc.u.size();
    std::vector<char> split(n - 1, 0);
    auto can_split = [&](std::size_t e) {
      const double m = 0.5 * (arc.u[e] + arc.u[e + 1]);
      return m > arc.u[e] && m < arc.u[e + 1];
    };
    for (std::size_t e = 0; e + 1 < n; ++e)
      if (distance(arc.pts[e], arc.pts[e + 1]) > cfg.delta && can_split(e)) split[e] = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (turn_angle(arc.pts[i - 1], arc.pts[i], arc.pts[i + 1]) <= cfg.angle_max) continue;
      for (std::size_t e : {i - 1, i})
        if (distance(arc.pts[e], arc.pts[e + 1]) >= floor_len && can_split(e)) split[e] = 1;
    }
    std::size_t count = static_cast<std::size_t>(std::count(split.begin(), split.end(), 1));
    if (count == 0) break;
    if (n + count > cfg.cap) {
      arc.stats.cap_reached = true;
      std::size_t allowed = cfg.cap > n ? cfg.cap - n : 0;
      for (auto& s : split)
        if (s) {
          if (allowed == 0) s = 0;
          else --allowed;
        }
      count = static_cast<std::size_t>(std::count(split.begin(), split.end(), 1));
      if (count == 0) break;
    }
    std::vector<double> mids;
    mids.reserve(count);
    for (std::size_t e = 0; e + 1 < n; ++e)
      if (split[e]) mids.push_back(0.5 * (arc.u[e] + arc.u[e + 1]));
    const auto mid_pts = eval_many(eval, mids);

    std::vector<double> nu;
    std::vector<Point2> np;
    nu.reserve(n + count);
    np.reserve(n + count);
    std::size_t m = 0;
    for (std::size_t e = 0; e < n; ++e) {
      nu.push_back(arc.u[e]);
      np.push_back(arc.pts[e]);
      if (e + 1 < n && split[e]) {
        nu.push_back(mids[m]);
        np.push_back(mid_pts[m]);
        ++m;
      }
    }
    arc.u = std::move(nu);
    arc.pts = std::move(np);
    arc.stats.splits += count;
    ++arc.stats.passes;
    if (arc.stats.cap_reached) break;
  }
  for (std::size_t i = 1; i + 1 < arc.pts.size(); ++i)
    if (turn_angle(arc.pts[i - 1], arc.pts[i], arc.pts[i + 1]) > cfg.angle_max) ++arc.stats.angle_limited;
  arc.stats.vertices = arc.pts.size();
  return arc;
}

AdaptiveArc iterate_arc_adaptive_ex(const PlanarMap& map, const Polyline& arc, const RefineConfig& cfg,
                                    int applications) {
  if (applications < 0) throw Error(ErrorKind::InvalidArgument, "applications must be >= 0");
  auto out = refine_adaptive(
      [&](double t) { return iterate(map, arc.point_at(t), applications); }, arc.cumlen(), cfg);
  dedupe(out);
  if (out.pts.size() < 2) throw Error(ErrorKind::InvalidArgument, "image arc collapsed to a point");
  return out;
}

Polyline iterate_arc_adaptive(const PlanarMap& map, const Polyline& arc, const RefineConfig& cfg,
                              int applications) {
  return Polyline(iterate_arc_adaptive_ex(map, arc, cfg, applications).pts);
}

Polyline seed_segment(const PlanarMap& map, const FixedPointResult& p, int n0) {
  if (n0 < 2) throw Error(ErrorKind::InvalidArgument, "n0 must be >= 2");
  Point2 start;
  if (map.seed_start) start = *map.seed_start;
  else if (map.kind() == MapKind::Ikeda) start = {0.0, -2.285};
  else throw Error(ErrorKind::SeedNotConfigured, "map '" + map.name() + "' has no configured seed");
  std::vector<Point2> v;
  for (int i = 0; i < n0 - 1; ++i) v.push_back(lerp(start, p.point, static_cast<double>(i) / (n0 - 1)));
  v.push_back(p.point);
  return Polyline(std::move(v));
}

// ---------------------------------------------------------------------------
// RayApprox

void RayApprox::validate() const {
  if (gen.size() != poly.size()) throw Error(ErrorKind::InvalidArgument, "gen size mismatch");
  if (!seed_param.empty() && seed_param.size() != poly.size())
    throw Error(ErrorKind::InvalidArgument, "seed_param size mismatch");
  for (std::size_t i = 1; i < gen.size(); ++i)
    if (gen[i] < gen[i - 1]) throw Error(ErrorKind::InvalidArgument, "gen must be non-decreasing");
  if (!gen.empty() && gen.front() < 0) throw Error(ErrorKind::InvalidArgument, "gen must be >= 0");
}

std::pair<double, double> RayApprox::block_range(int k) const {
  if (k < 0 || k >= static_cast<int>(gen_end.size())) throw Error(ErrorKind::InvalidArgument, "no such block");
  return {k == 0 ? 0.0 : gen_end[k - 1], gen_end[k]};
}

RayApprox ray_from_vertices(std::vector<Point2> pts, std::vector<int> gen) {
  RayApprox r;
  r.poly = Polyline(std::move(pts));
  r.gen = std::move(gen);
  r.validate();
  r.origin = r.poly.front();
  r.generations = r.gen.back();
  r.gen_end.assign(r.generations + 1, 0.0);
  for (std::size_t i = 0; i < r.gen.size(); ++i) r.gen_end[r.gen[i]] = r.poly.cumlen()[i];
  for (int k = 1; k <= r.generations; ++k) r.gen_end[k] = std::max(r.gen_end[k], r.gen_end[k - 1]);
  return r;
}

// ---------------------------------------------------------------------------

std::tuple<double, std::size_t, std::size_t> min_separation(const Polyline& poly) {
  const std::size_t n = poly.edge_count();
  const bool closed = poly.is_closed();
  if (n < 3) return {INFINITY, 0, 0};
  const SpatialIndex idx(poly);
  double r = idx.cell_size();
  const double diam = poly.bbox().diameter();
  std::vector<std::size_t> stamp(n, n);
  for (;;) {
    double best = INFINITY;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto si = poly.edge(i);
      idx.for_each_in(edge_box(si).expanded(r), [&](std::size_t j) {
        if (j < i + 2 || stamp[j] == i) return;
        stamp[j] = i;
        if (closed && i == 0 && j == n - 1) return;
        const double d = segment_segment_distance(si, poly.edge(j));
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      });
    }
    if (best <= r || r > 2.0 * diam) return {best, bi, bj};
    r *= 4.0;
    std::fill(stamp.begin(), stamp.end(), n);
  }
}

InjectivityReport injectivity_report(const PlanarMap& map, const Polyline& arc, std::optional<RefineConfig> cfg) {
  RefineConfig c = cfg.value_or(RefineConfig{});
  if (!(c.delta > 0.0)) {
    std::vector<Point2> img;
    for (auto v : arc.vertices()) img.push_back(map(v));
    c.delta = c.delta_rel * std::max(bbox_of(img).diameter(), 1e-300);
  }
  const Polyline image = iterate_arc_adaptive(map, arc, c, 1);
  InjectivityReport rep;
  rep.image_vertices = image.size();
  const auto simple = is_simple(image, tau_simple(image.bbox()));
  auto [sep, i, j] = min_separation(image);
  rep.min_separation = sep;
  rep.edge_i = i;
  rep.edge_j = j;
  if (!arc.is_closed() && distance(image.front(), image.back()) <= tau_simple(image.bbox())) {
    rep.injective = false;
    rep.edge_i = 0;
    rep.edge_j = image.edge_count() - 1;
    rep.min_separation = 0.0;
  } else if (!simple.simple) {
    rep.injective = false;
    rep.edge_i = simple.edge_i;
    rep.edge_j = simple.edge_j;
    rep.min_separation = std::min(sep, simple.distance);
  }
  return rep;
}

std::vector<Point2> attractor_cloud(const PlanarMap& map, const Polyline& seed_from_origin, std::size_t count,
                                    int transient) {
  std::vector<Point2> out;
  const std::size_t m = std::max<std::size_t>(1, std::min<std::size_t>(count, 100));
  const std::size_t per = (count + m - 1) / m;
  const double L = seed_from_origin.length();
  for (std::size_t j = 0; j < m && out.size() < count; ++j) {
    Point2 x = seed_from_origin.point_at(0.05 * L * static_cast<double>(j + 1) / static_cast<double>(m));
    try {
      x = iterate(map, x, transient);
      for (std::size_t k = 0; k < per && out.size() < count; ++k) {
        x = iterate(map, x, 1);
        out.push_back(x);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Diverged) throw;
    }
  }
  return out;
}

namespace {

// Real eigenvalue of modulus > 1 at a saddle and its unit eigenvector.
std::pair<double, Point2> unstable_eigen(const PlanarMap& map, Point2 p) {
  const Mat2 J = map.exact_jacobian(p).value_or(jacobian(map, p, 1e-6 * std::max(1.0, norm(p))));
  const double tr = J.a + J.d, det = J.det();
  const double disc = tr * tr - 4.0 * det;
  if (disc <= 0.0) throw Error(ErrorKind::Precondition, "fixed point has no real unstable eigenvalue");
  const double r = std::sqrt(disc);
  const double l1 = 0.5 * (tr + r), l2 = 0.5 * (tr - r);
  const double lu = std::abs(l1) >= std::abs(l2) ? l1 : l2;
  if (!(lu > 1.0))
    throw Error(ErrorKind::Precondition, "fixed point needs an unstable eigenvalue > 1 (got " + std::to_string(lu) + ")");
  // (J - lu) e = 0; pick the better-conditioned row.
  Point2 e = std::abs(J.b) + std::abs(J.a - lu) >= std::abs(J.c) + std::abs(J.d - lu) ? Point2{J.b, lu - J.a}
                                                                                         : Point2{lu - J.d, J.c};
  return {lu, (1.0 / norm(e)) * e};
}

void label_generations(RayApprox& ray) {
  const int G = ray.generations;
  const double total = ray.poly.length();
  const double slack = 1e-12 * total;
  ray.gen.assign(ray.poly.size(), 0);
  int k = 0;
  for (std::size_t i = 0; i < ray.poly.size(); ++i) {
    while (k < G && ray.poly.cumlen()[i] > ray.gen_end[k] + slack) ++k;
    ray.gen[i] = k;
  }
}

}  // namespace

BuildResult build_ray_unchecked(const PlanarMap& map, const RefineConfig& cfg) {
  cfg.validate(false);
  BuildResult res;
  BuildLog& log = res.log;
  log.fixed_point = newton_fixed_point(map, map.fixed_point_guess.value_or(Point2{0, 0}), 1e-12, 100);
  const Point2 p = log.fixed_point.point;
  const Polyline seed = seed_segment(map, log.fixed_point, cfg.n0);
  const Polyline I = seed.reversed();  // traversed from the fixed point

  RefineConfig c = cfg;
  if (!(c.delta > 0.0)) c.delta = c.delta_rel * bbox_of(attractor_cloud(map, I, 20000)).diameter();
  if (!(c.delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "could not derive delta from the attractor");
  log.delta = c.delta;
  log.angle_max = c.angle_max;
  log.cap = c.cap;
  log.generations = c.generations;
  log.n0 = c.n0;
  log.construction = c.construction;
  const int G = c.generations;
  RayApprox& ray = res.ray;
  ray.origin = p;
  ray.generations = G;
  ray.gen_end.resize(G + 1);

  if (c.construction == Construction::Iterates) {
    std::vector<double> lengths;
    AdaptiveArc last;
    for (int k = 0; k <= G; ++k) {
      AdaptiveArc a = iterate_arc_adaptive_ex(map, I, c, k);
      double len = 0.0;
      for (std::size_t i = 1; i < a.pts.size(); ++i) len += distance(a.pts[i - 1], a.pts[i]);
      lengths.push_back(len);
      log.per_generation.push_back({k, a.pts.size(), len, 0});
      if (k == G) last = std::move(a);
    }
    log.stats = last.stats;
    ray.poly = Polyline(last.pts);
    ray.seed_param = std::move(last.u);
    const double total = ray.poly.length();
    for (int k = 0; k <= G; ++k) {
      double e = k == G ? total : std::min(lengths[k], total);
      if (k > 0) e = std::max(e, ray.gen_end[k - 1]);
      ray.gen_end[k] = e;
    }
    label_generations(ray);
  } else {
    // Local unstable segment J(u) = p + u e, u in [0, U], on the side of I.
    auto [lu, e] = unstable_eigen(map, p);
    if (dot(e, I[1] - I[0]) < 0.0) e = -1.0 * e;
    const double U = 1e-5 * I.length();
    const int lead = static_cast<int>(std::ceil(std::log(I.length() / U) / std::log(lu)));
    log.unstable_eigenvalue = lu;
    log.unstable_direction = e;
    log.lead_in = lead;
    log.local_length = U;
    // Generation k is f^(lead+k)[J], i.e. parameters u <= U lu^(k-G) of the curve f^(lead+G) o J.
    std::vector<double> u0{0.0};
    for (int k = 0; k <= G; ++k) u0.push_back(U * std::pow(lu, k - G));
    u0.back() = U;
    // u = 0 is the fixed point itself; iterating it would only amplify the solver residual.
    auto arc = refine_adaptive([&, e = e](double u) { return u == 0.0 ? p : iterate(map, p + u * e, lead + G); }, u0,
                               [&] {
                                 RefineConfig cc = c;
                                 cc.cap = c.cap * static_cast<std::size_t>(G + 1);
                                 return cc;
                               }());
    dedupe(arc);
    log.stats = arc.stats;
    ray.poly = Polyline(arc.pts);
    ray.seed_param = arc.u;
    for (std::size_t i = 0, k = 0; i < arc.u.size() && k <= static_cast<std::size_t>(G); ++i)
      while (k <= static_cast<std::size_t>(G) && arc.u[i] >= u0[k + 1]) ray.gen_end[k++] = ray.poly.cumlen()[i];
    for (int k = 0; k <= G; ++k) {
      if (k > 0) ray.gen_end[k] = std::max(ray.gen_end[k], ray.gen_end[k - 1]);
    }
    ray.gen_end[G] = ray.poly.length();
    ray.gen.assign(ray.poly.size(), 0);
    for (std::size_t i = 0, k = 0; i < arc.u.size(); ++i) {
      while (static_cast<int>(k) < G && arc.u[i] > u0[k + 1]) ++k;
      ray.gen[i] = static_cast<int>(k);
    }
    for (int k = 0; k <= G; ++k) {
      const auto n = static_cast<std::size_t>(std::upper_bound(ray.gen.begin(), ray.gen.end(), k) - ray.gen.begin());
      log.per_generation.push_back({k, n, ray.gen_end[k], 0});
    }
  }
  for (auto gi : ray.gen) ++log.per_generation[gi].block_vertices;
  ray.validate();

  log.tau_simple = tau_simple(ray.poly.bbox());
  log.simplicity = is_simple(ray.poly, log.tau_simple);
  if (!log.simplicity.simple)
    log.violation_generations = std::pair{ray.gen[log.simplicity.edge_i], ray.gen[log.simplicity.edge_j]};
  log.injectivity = injectivity_report(map, seed, c);
  return res;
}

BuildResult build_ray(const PlanarMap& map, const RefineConfig& cfg) {
  auto res = build_ray_unchecked(map, cfg);
  if (!res.log.simplicity.simple) {
    const auto& s = res.log.simplicity;
    throw Error(ErrorKind::SimplicityViolation,
                "edges " + std::to_string(s.edge_i) + " and " + std::to_string(s.edge_j) + " (generations " +
                    std::to_string(res.log.violation_generations->first) + ", " +
                    std::to_string(res.log.violation_generations->second) + ") approach within " +
                    std::to_string(s.distance));
  }
  return res;
}

double basin_check(const PlanarMap& map, const std::vector<Point2>& pts, int horizon, const PolygonRegion& box) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  if (pts.empty()) return 0.0;
  std::size_t good = 0;
  for (auto p : pts) {
    // Inside at the horizon is exactly "entered at some time <= horizon and stayed through horizon".
    try {
      if (box.contains(iterate(map, p, horizon))) ++good;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Diverged) throw;
    }
  }
  return static_cast<double>(good) / static_cast<double>(pts.size());
}

}  // namespace raylab
