#include "raylab/entwine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "raylab/error.hpp"

namespace raylab {

namespace {

BBox around(Point2 p, double r) { return {p.x - r, p.y - r, p.x + r, p.y + r}; }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Return distances

double ReturnProfile::max_return() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.return_dist);
  return m;
}

ReturnProfile return_profile(const Polyline& ray, std::span<const double> ts, double gap) {
  if (!(gap >= 0.0)) throw Error(ErrorKind::InvalidArgument, "gap must be >= 0");
  const SpatialIndex idx(ray);
  ReturnProfile out;
  out.samples.reserve(ts.size());
  for (double t : ts) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative parameter " + fmt(t));
    if (!(t + gap < ray.length()))
      throw Error(ErrorKind::TailTooShort,
                  "t + gap = " + fmt(t + gap) + " is not below the ray length " + fmt(ray.length()));
    const auto r = nearest_in_range(idx, ray, ray.point_at(t), t + gap, ray.length());
    out.samples.push_back({t, gap, r->dist, r->param});
  }
  return out;
}

ReturnProfile return_profile(const RayApprox& ray, std::span<const double> ts, double gap) {
  return return_profile(ray.poly, ts, gap);
}

// ---------------------------------------------------------------------------
// Two-sided limit points

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::TwoSided: return "TwoSided";
    case Verdict::OneSided: return "OneSided";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

double local_spacing(const Polyline& ray, double t) {
  const auto e = ray.edge_at(t);
  return ray.cumlen()[e + 1] - ray.cumlen()[e];
}

TwoSidedWitness classify_two_sided(const Polyline& ray, const SpatialIndex& index, double t,
                                   const TwoSidedOptions& opt) {
  const double L = ray.length();
  TwoSidedWitness w;
  w.t = t;
  w.eps = opt.eps.value_or(5.0 * local_spacing(ray, t));
  w.n = opt.n.value_or(t + 10.0 * w.eps);
  if (!(w.eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  if (opt.m_min < 1) throw Error(ErrorKind::InvalidArgument, "m_min must be >= 1");
  if (!(t > 0.0 && t < w.n)) throw Error(ErrorKind::InvalidArgument, "need 0 < t < n");
  if (!(w.n < L)) throw Error(ErrorKind::TailTooShort, "prefix cutoff " + fmt(w.n) + " reaches the ray's end");

  const Point2 x = ray.point_at(t);
  const double margin = 2.0 * w.eps;
  if (distance(x, ray.front()) <= margin || distance(x, ray.point_at(w.n)) <= margin)
    throw Error(ErrorKind::NearEndpoint, "point at t = " + fmt(t) + " is within 2*eps of a prefix endpoint");
  if (opt.K && opt.K->boundary_distance(x) <= margin)
    throw Error(ErrorKind::NearEndpoint, "point at t = " + fmt(t) + " is within 2*eps of K's boundary");

  // Local strand: the part of the prefix through t that stays within 2*eps.
  const auto& cl = ray.cumlen();
  const auto e = ray.edge_at(t);
  std::size_t i = e;
  while (i > 0 && distance(ray[i], x) < margin) --i;
  double s0 = cl[i];
  std::size_t j = e + 1;
  while (j + 1 < ray.size() && cl[j] < w.n && distance(ray[j], x) < margin) ++j;
  double s1 = std::min(cl[j], w.n);
  const Polyline strand = ray.slice(s0, s1);
  const SpatialIndex strand_index(strand);
  const double on_tol = tau_on(ray.bbox());

  // Tail edges within eps, grouped into passes by consecutive edge index.
  std::vector<std::size_t> hits;
  for (auto k : index.query(around(x, w.eps))) {
    if (cl[k + 1] <= w.n) continue;
    Segment s = ray.edge(k);
    if (cl[k] < w.n) s.a = ray.point_at(w.n);
    if (point_segment_distance(x, s) <= w.eps) hits.push_back(k);
  }
  std::size_t a = 0;
  while (a < hits.size()) {
    std::size_t b = a;
    while (b + 1 < hits.size() && hits[b + 1] == hits[b] + 1) ++b;
    // Closest point of the pass to x.
    double best = INFINITY;
    Point2 q;
    for (std::size_t m = a; m <= b; ++m) {
      Segment s = ray.edge(hits[m]);
      if (cl[hits[m]] < w.n) s.a = ray.point_at(w.n);
      double u = 0.0;
      const double d = point_segment_distance(x, s, &u);
      if (d < best) {
        best = d;
        q = lerp(s.a, s.b, u);
      }
    }
    ++w.passes;
    const auto nr = nearest_on_polyline(strand_index, strand, q);
    if (nr.dist > on_tol) {
      const int side = side_at(strand, nr.param, q, on_tol);
      if (side > 0) ++w.left_hits;
      if (side < 0) ++w.right_hits;
    }
    a = b + 1;
  }

  if (w.left_hits >= opt.m_min && w.right_hits >= opt.m_min)
    w.verdict = Verdict::TwoSided;
  else if ((w.left_hits >= opt.m_min && w.right_hits == 0) || (w.right_hits >= opt.m_min && w.left_hits == 0))
    w.verdict = Verdict::OneSided;
  else
    w.verdict = Verdict::Inconclusive;
  return w;
}

TwoSidedWitness classify_two_sided(const RayApprox& ray, double t, const TwoSidedOptions& opt) {
  const SpatialIndex idx(ray.poly);
  return classify_two_sided(ray.poly, idx, t, opt);
}

// ---------------------------------------------------------------------------
// Minimal arcs

namespace {

// Contacts of ray edge k with K's boundary, as ray parameters.
void edge_contacts(const Polyline& poly, std::size_t k, const PolygonRegion& K, const SpatialIndex& kidx,
                   std::vector<double>& out) {
  const Segment s = poly.edge(k);
  BBox eb;
  eb.add(s.a);
  eb.add(s.b);
  const double tol = tau_on(K.bbox());
  if (!eb.overlaps(K.bbox().expanded(tol))) return;
  const double c0 = poly.cumlen()[k];
  const double len = poly.cumlen()[k + 1] - c0;
  const Point2 d = s.b - s.a;
  for (auto m : kidx.query(eb.expanded(tol))) {
    const Segment kb = K.boundary().edge(m);
    const auto hit = segment_intersection(s, kb);
    if (hit.kind == SegmentHit::Kind::Point) {
      out.push_back(c0 + std::clamp(hit.s1, 0.0, 1.0) * len);
    } else if (hit.kind == SegmentHit::Kind::Overlap) {
      for (Point2 q : {kb.a, kb.b}) out.push_back(c0 + std::clamp(dot(q - s.a, d) / dot(d, d), 0.0, 1.0) * len);
    }
  }
}

}  // namespace

std::vector<double> boundary_contacts(const Polyline& poly, const PolygonRegion& K, double t0, double t1) {
  const SpatialIndex kidx(K.boundary());
  std::vector<double> out;
  if (t0 > t1) return out;
  for (auto k = poly.edge_at(t0); k <= poly.edge_at(t1); ++k) edge_contacts(poly, k, K, kidx, out);
  std::erase_if(out, [&](double s) { return s < t0 || s > t1; });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MinimalArc minimal_arc(const Polyline& ray, double t, const PolygonRegion& K) {
  using Loc = PolygonRegion::Location;
  if (K.classify(ray.front()) == Loc::Outside)
    throw Error(ErrorKind::Precondition, "ray origin is not in K");
  if (!(t > 0.0 && t < ray.length()))
    throw Error(ErrorKind::Precondition, "t = " + fmt(t) + " outside the ray's parameter range");
  if (K.classify(ray.point_at(t)) != Loc::Outside)
    throw Error(ErrorKind::Precondition, "point at t = " + fmt(t) + " is not strictly outside K");

  const SpatialIndex kidx(K.boundary());
  const auto e = ray.edge_at(t);
  std::vector<double> c;
  MinimalArc m;
  m.through = t;

  bool found = false;
  for (std::size_t k = e + 1; k-- > 0 && !found;) {
    c.clear();
    edge_contacts(ray, k, K, kidx, c);
    for (double s : c)
      if (s < t && (!found || s > m.t_lo)) {
        m.t_lo = s;
        found = true;
      }
  }
  if (!found) throw Error(ErrorKind::Precondition, "no contact with K before t = " + fmt(t));

  found = false;
  for (std::size_t k = e; k < ray.edge_count() && !found; ++k) {
    c.clear();
    edge_contacts(ray, k, K, kidx, c);
    for (double s : c)
      if (s > t && (!found || s < m.t_hi)) {
        m.t_hi = s;
        found = true;
      }
  }
  if (!found)
    throw Error(ErrorKind::NoReturn, "ray does not return to K after t = " + fmt(t) + " within the computed horizon");
  m.arc = ray.slice(m.t_lo, m.t_hi);
  return m;
}

MinimalArc minimal_arc(const RayApprox& ray, double t, const PolygonRegion& K) { return minimal_arc(ray.poly, t, K); }

std::string to_string(MinimalType m) {
  switch (m) {
    case MinimalType::K1K2K3: return "K1K2K3";
    case MinimalType::K2K1K3: return "K2K1K3";
    case MinimalType::K2K3K1: return "K2K3K1";
  }
  return "?";
}

std::vector<std::pair<double, double>> contact_intervals(const Polyline& arc, const PolygonRegion& K) {
  using Loc = PolygonRegion::Location;
  const double L = arc.length();
  std::vector<double> ev = boundary_contacts(arc, K, 0.0, L);
  ev.insert(ev.begin(), 0.0);
  ev.push_back(L);
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end()), ev.end());

  std::vector<std::pair<double, double>> runs;
  bool open = false;
  auto touch = [&](double a, double b) {
    if (open) {
      runs.back().second = b;
    } else {
      runs.push_back({a, b});
      open = true;
    }
  };
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const bool in_point = (i > 0 && i + 1 < ev.size()) || K.classify(arc.point_at(ev[i])) != Loc::Outside;
    if (in_point)
      touch(ev[i], ev[i]);
    else
      open = false;
    if (i + 1 < ev.size()) {
      const bool in_gap = K.classify(arc.point_at(0.5 * (ev[i] + ev[i + 1]))) != Loc::Outside;
      if (in_gap)
        touch(ev[i], ev[i + 1]);
      else
        open = false;
    }
  }
  return runs;
}

std::optional<MinimalTypeResult> classify_minimal_type(const Polyline& arc, const PolygonRegion& K1,
                                                       const PolygonRegion& K2, const PolygonRegion& K3,
                                                       std::string* why) {
  struct Run {
    double a, b;
    int label;
  };
  std::vector<Run> runs;
  const PolygonRegion* regs[3] = {&K1, &K2, &K3};
  for (int r = 0; r < 3; ++r) {
    const auto iv = contact_intervals(arc, *regs[r]);
    if (iv.empty()) {
      if (why) *why = "arc misses K" + std::to_string(r + 1);
      return std::nullopt;
    }
    for (auto [a, b] : iv) runs.push_back({a, b, r + 1});
  }
  std::sort(runs.begin(), runs.end(), [](const Run& x, const Run& y) {
    return x.a < y.a || (x.a == y.a && x.label < y.label);
  });

  std::optional<MinimalTypeResult> best;
  const std::pair<int, MinimalType> middles[3] = {
      {2, MinimalType::K1K2K3}, {1, MinimalType::K2K1K3}, {3, MinimalType::K2K3K1}};
  for (auto [mid, type] : middles) {
    const Run* last = nullptr;
    bool seen_mid = false;
    for (const auto& r : runs) {
      if (r.label == mid) {
        if (last) seen_mid = true;
        continue;
      }
      if (last && last->label != r.label && seen_mid && last->b < r.a) {
        if (!best || last->b < best->s0 || (last->b == best->s0 && r.a < best->s1)) {
          MinimalTypeResult res;
          res.type = type;
          res.s0 = last->b;
          res.s1 = r.a;
          best = res;
        }
        break;  // later candidates of this type start later
      }
      last = &r;
      seen_mid = false;
    }
  }
  if (!best) {
    if (why) {
      std::ostringstream s;
      s << "no minimal pattern among " << runs.size() << " contact runs:";
      for (const auto& r : runs) s << " K" << r.label << "[" << r.a << "," << r.b << "]";
      *why = s.str();
    }
    return std::nullopt;
  }
  best->sub = arc.slice(best->s0, best->s1);
  return best;
}

// ---------------------------------------------------------------------------
// Theta curves

ThetaCurve theta_inner(std::span<const Polyline> arcs, const PolygonRegion& a_region, const PolygonRegion& b_region) {
  if (arcs.size() != 3) throw Error(ErrorKind::InvalidArgument, "theta_inner needs three arcs");
  ThetaCurve th;
  for (const auto& arc : arcs) {
    if (a_region.contains(arc.front()) && b_region.contains(arc.back()))
      th.arcs.push_back(arc);
    else if (a_region.contains(arc.back()) && b_region.contains(arc.front()))
      th.arcs.push_back(arc.reversed());
    else
      throw Error(ErrorKind::InvalidArgument, "arc endpoints are not in the two end regions");
  }
  int enclosed = 0;
  for (int i = 0; i < 3; ++i) {
    const auto& aj = th.arcs[(i + 1) % 3].vertices();
    const auto& ak = th.arcs[(i + 2) % 3].vertices();
    std::vector<Point2> ring;
    auto push = [&](Point2 p) {
      if (ring.empty() || ring.back() != p) ring.push_back(p);
    };
    for (auto p : aj) push(p);
    for (auto it = ak.rbegin(); it != ak.rend(); ++it) push(*it);
    push(aj.front());
    const Polyline closed(std::move(ring));
    const Point2 mid = th.arcs[i].point_at(0.5 * th.arcs[i].length());
    int w = 0;
    try {
      w = winding_number(mid, closed);
    } catch (const Error&) {
      throw Error(ErrorKind::DegenerateTheta, "midpoint of arc " + std::to_string(i) + " lies on the other two");
    }
    if (w != 0) {
      ++enclosed;
      th.inner_index = i;
    }
  }
  if (enclosed != 1)
    throw Error(ErrorKind::DegenerateTheta, std::to_string(enclosed) + " arcs test as enclosed");
  return th;
}

// ---------------------------------------------------------------------------
// Sides of K + alpha

std::string to_string(Side s) {
  switch (s) {
    case Side::U: return "U";
    case Side::V: return "V";
    case Side::Boundary: return "Boundary";
    case Side::InsideK: return "InsideK";
  }
  return "?";
}

SidePartition::SidePartition(const PolygonRegion& K, const Polyline& alpha)
    : K_(K), alpha_(alpha), alpha_index_(alpha_) {
  BBox box = K.bbox();
  box.add(alpha.bbox());
  tol_ = tau_on(box);
  const Polyline& bd = K.boundary();
  const SpatialIndex bidx(bd);
  const double P = bd.length();
  const double end_tol = 1e-9 * box.diameter();
  auto locate = [&](Point2 q) {
    const auto r = nearest_on_polyline(bidx, bd, q);
    if (r.dist > end_tol)
      throw Error(ErrorKind::Precondition, "alpha endpoint is " + fmt(r.dist) + " away from K's boundary");
    return r.param >= P ? 0.0 : r.param;
  };
  const Point2 A = alpha.front(), B = alpha.back();
  const double sA = locate(A), sB = locate(B);
  const auto& cl = bd.cumlen();
  const std::size_t m = bd.size() - 1;  // last vertex repeats the first

  // Boundary vertices strictly between s and e walking forward (wrapping).
  auto forward = [&](double s, double e) {
    std::vector<Point2> out;
    if (s < e) {
      for (std::size_t i = 0; i < m; ++i)
        if (cl[i] > s && cl[i] < e) out.push_back(bd[i]);
    } else {
      for (std::size_t i = 0; i < m; ++i)
        if (cl[i] > s) out.push_back(bd[i]);
      for (std::size_t i = 0; i < m; ++i)
        if (cl[i] < e) out.push_back(bd[i]);
    }
    return out;
  };
  auto ring_with = [&](const std::vector<Point2>& path) {
    std::vector<Point2> ring;
    auto push = [&](Point2 p) {
      if (ring.empty() || ring.back() != p) ring.push_back(p);
    };
    for (auto p : alpha.vertices()) push(p);
    for (auto p : path) push(p);
    push(A);
    if (ring.size() < 4) return std::optional<Polyline>{};
    return std::optional<Polyline>(Polyline(std::move(ring)));
  };

  std::vector<Point2> p1, p2;
  if (std::abs(sA - sB) <= end_tol) {
    p2 = forward(sB, sB);  // the whole boundary
  } else {
    p1 = forward(sB, sA);
    p2 = forward(sA, sB);
    std::reverse(p2.begin(), p2.end());
  }
  const Point2 inner = K.interior_point();
  std::optional<Polyline> chosen;
  int zero = 0;
  for (const auto& path : {p1, p2}) {
    auto ring = ring_with(path);
    if (!ring) continue;
    if (winding_number_unchecked(inner, ring->vertices()) == 0) {
      ++zero;
      chosen = std::move(ring);
    }
  }
  if (zero != 1 || !chosen)
    throw Error(ErrorKind::Precondition, "alpha does not split the complement of K into two sides");
  jordan_ = std::move(*chosen);

  const Point2 far{box.xmin + 10.0 * (box.width() + box.height()), box.ymin + 10.0 * (box.width() + box.height())};
  if (classify(far) != Side::V) throw Error(ErrorKind::Precondition, "far-field probe did not classify as V");
}

Side SidePartition::classify(Point2 p) const {
  using Loc = PolygonRegion::Location;
  const auto loc = K_.classify(p);
  if (loc == Loc::Inside) return Side::InsideK;
  if (loc == Loc::Boundary) return Side::Boundary;
  if (!alpha_.bbox().expanded(tol_).contains(p) && !jordan_.bbox().contains(p)) return Side::V;
  if (nearest_on_polyline(alpha_index_, alpha_, p).dist <= tol_) return Side::Boundary;
  if (!jordan_.bbox().contains(p)) return Side::V;
  return winding_number_unchecked(p, jordan_.vertices()) != 0 ? Side::U : Side::V;
}

Side side_partition(const PolygonRegion& K, const MinimalArc& alpha, Point2 p) {
  return SidePartition(K, alpha.arc).classify(p);
}

// ---------------------------------------------------------------------------
// Cantor tree

bool CantorTree::clean() const {
  for (const auto& n : nodes)
    if (!(n.check1 && n.check2 && n.check3 && n.connects)) return false;
  for (const auto& d : disjointness)
    if (d.in_both != 0) return false;
  return !nodes.empty();
}

std::size_t CantorTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [&](const CantorNode& n) {
    return static_cast<int>(n.sigma.size()) == depth;
  }));
}

namespace {

bool side_ok(RegionConstraint::Kind kind, Side s, bool strict) {
  switch (kind) {
    case RegionConstraint::Kind::ClosedU: return s == Side::U || (!strict && s == Side::Boundary);
    case RegionConstraint::Kind::ClosedV: return s == Side::V || (!strict && s == Side::Boundary);
    case RegionConstraint::Kind::NotOpenU: return strict ? s == Side::V : s != Side::U;
  }
  return false;
}

std::vector<RegionConstraint> with(std::vector<RegionConstraint> r, RegionConstraint::Kind k, int e) {
  r.push_back({k, e});
  return r;
}

}  // namespace

bool region_contains(std::span<const RegionConstraint> region, const std::vector<SidePartition>& parts, Point2 p,
                     bool strict) {
  for (const auto& c : region)
    if (!side_ok(c.kind, parts[c.excursion].classify(p), strict)) return false;
  return true;
}

CantorTree cantor_tree(const Polyline& ray, const PolygonRegion& K, const PolygonRegion& D, int depth,
                       const SearchConfig& search) {
  using Loc = PolygonRegion::Location;
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  if (K.classify(ray.front()) == Loc::Outside) throw Error(ErrorKind::Precondition, "ray origin is not in K");
  for (auto p : D.boundary().vertices())
    if (K.classify(p) != Loc::Outside) throw Error(ErrorKind::Precondition, "D meets K");
  for (auto p : K.boundary().vertices())
    if (D.classify(p) != Loc::Outside) throw Error(ErrorKind::Precondition, "D meets K");
  if (!boundary_contacts(D.boundary(), K, 0.0, D.boundary().length()).empty())
    throw Error(ErrorKind::Precondition, "D meets K");

  CantorTree tree;
  tree.depth = depth;
  auto& st = tree.stats;
  const double L = ray.length();
  const double h = search.candidate_spacing > 0.0 ? search.candidate_spacing : L / 20000.0;
  const SpatialIndex index(ray);

  // Excursions met by sample parameters, keyed by t_lo.
  struct Ex {
    MinimalArc alpha;
    TwoSidedWitness best;
    bool two = false;
    int tested = 0;
  };
  std::vector<Ex> all;
  std::map<double, int> by_lo;
  double no_return_from = INFINITY;
  auto excursion_of = [&](double t) -> int {
    if (t >= no_return_from) return -1;
    auto it = by_lo.upper_bound(t);
    if (it != by_lo.begin()) {
      --it;
      if (t < all[it->second].alpha.t_hi) return it->second;
    }
    try {
      auto m = minimal_arc(ray, t, K);
      by_lo[m.t_lo] = static_cast<int>(all.size());
      all.push_back({std::move(m), {}, false, 0});
      return static_cast<int>(all.size()) - 1;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoReturn) {
        no_return_from = std::min(no_return_from, t);
        return -1;
      }
      throw;
    }
  };

  TwoSidedOptions opt;
  opt.eps = search.eps;
  opt.m_min = search.m_min;
  opt.K = &K;
  for (double t = 0.5 * h; t < L; t += h) {
    const Point2 x = ray.point_at(t);
    if (D.classify(x) != Loc::Inside || K.classify(x) != Loc::Outside) continue;
    ++st.candidates;
    const int id = excursion_of(t);
    if (id < 0) continue;
    auto& ex = all[id];
    if (ex.two || ex.tested >= search.per_excursion) continue;
    ++ex.tested;
    try {
      const auto w = classify_two_sided(ray, index, t, opt);
      if (w.verdict == Verdict::TwoSided) {
        ex.two = true;
        ex.best = w;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NearEndpoint && e.kind() != ErrorKind::TailTooShort) throw;
    }
  }
  st.excursions = all.size();

  // Witness excursions in search order: quality descending, then t ascending.
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(all.size()); ++i)
    if (all[i].two) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    const int qi = all[i].best.quality(), qj = all[j].best.quality();
    return qi != qj ? qi > qj : all[i].best.t < all[j].best.t;
  });
  st.two_sided = order.size();
  std::vector<SidePartition> parts;
  for (int i : order) {
    Excursion ex;
    ex.alpha = all[i].alpha;
    ex.witness = all[i].best;
    ex.two_sided = true;
    ex.in_D = true;
    tree.excursions.push_back(ex);
    parts.emplace_back(K, ex.alpha.arc);
  }
  const int M = static_cast<int>(tree.excursions.size());
  auto wpoint = [&](int j) { return ray.point_at(tree.excursions[j].witness.t); };

  // rel[i][j]: side of witness j with respect to K + alpha_i.
  std::vector<std::vector<Side>> rel(M, std::vector<Side>(M, Side::Boundary));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      if (i != j) rel[i][j] = parts[i].classify(wpoint(j));
  auto strictly_in = [&](const std::vector<RegionConstraint>& reg, int j) {
    for (const auto& c : reg)
      if (!side_ok(c.kind, rel[c.excursion][j], true)) return false;
    return true;
  };

  std::map<std::string, CantorNode> chosen;
  std::string failed = "";
  bool failed_set = false;
  auto budget = [&] {
    if (++st.steps > search.max_steps)
      throw Error(ErrorKind::WitnessNotFound,
                  "search budget exhausted near sigma '" + failed + "' (candidates " + std::to_string(st.candidates) +
                      ", excursions " + std::to_string(st.excursions) + ", two-sided " +
                      std::to_string(st.two_sided) + ", steps " + std::to_string(st.steps) + ")");
  };
  std::function<bool(const std::string&, const std::vector<RegionConstraint>&)> solve =
      [&](const std::string& sigma, const std::vector<RegionConstraint>& region) {
        std::vector<int> cand;
        for (int j = 0; j < M; ++j)
          if (strictly_in(region, j)) cand.push_back(j);
        for (int x0 : cand)
          for (int x1 : cand) {
            if (x1 == x0 || rel[x0][x1] != Side::U) continue;
            budget();
            CantorNode node;
            node.sigma = sigma;
            node.region = region;
            node.x0 = x0;
            node.x1 = x1;
            if (static_cast<int>(sigma.size()) == depth ||
                (solve(sigma + "0", with(region, RegionConstraint::Kind::ClosedV, x0)) &&
                 solve(sigma + "1", with(region, RegionConstraint::Kind::ClosedU, x1)))) {
              chosen[sigma] = node;
              return true;
            }
            ++st.backtracks;
          }
        if (!failed_set || sigma.size() > failed.size()) {
          failed = sigma;
          failed_set = true;
        }
        return false;
      };

  bool ok = false;
  for (int a = 0; a < M && !ok; ++a)
    for (int b = 0; b < M && !ok; ++b) {
      if (rel[a][b] != Side::U) continue;
      for (int c = 0; c < M && !ok; ++c) {
        if (rel[b][c] != Side::U) continue;
        for (int d = 0; d < M && !ok; ++d) {
          if (rel[c][d] != Side::U) continue;
          budget();
          const std::vector<RegionConstraint> root_region{{RegionConstraint::Kind::ClosedU, a},
                                                          {RegionConstraint::Kind::NotOpenU, d}};
          if (!strictly_in(root_region, b) || !strictly_in(root_region, c)) continue;
          if (solve("0", with(root_region, RegionConstraint::Kind::ClosedV, b)) &&
              solve("1", with(root_region, RegionConstraint::Kind::ClosedU, c))) {
            CantorNode root;
            root.region = root_region;
            root.x0 = b;
            root.x1 = c;
            chosen[""] = root;
            tree.a_d = {a, b, c, d};
            ok = true;
          } else {
            ++st.backtracks;
          }
        }
      }
    }
  if (!ok)
    throw Error(ErrorKind::WitnessNotFound,
                "no two-sided witness for sigma '" + (failed_set ? failed : std::string("root")) + "' (candidates " +
                    std::to_string(st.candidates) + ", excursions " + std::to_string(st.excursions) +
                    ", two-sided " + std::to_string(st.two_sided) + ", steps " + std::to_string(st.steps) + ")");

  // Breadth-first node list.
  for (auto& [s, n] : chosen)
    if (static_cast<int>(s.size()) <= depth) tree.nodes.push_back(n);
  std::stable_sort(tree.nodes.begin(), tree.nodes.end(), [](const CantorNode& x, const CantorNode& y) {
    return x.sigma.size() != y.sigma.size() ? x.sigma.size() < y.sigma.size() : x.sigma < y.sigma;
  });

  // Condition checks on samples.
  std::mt19937_64 rng(search.seed);
  auto arc_samples = [&](const Polyline& arc) {
    std::vector<Point2> out;
    const std::size_t n = std::max<std::size_t>(search.arc_samples, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = arc.point_at(arc.length() * static_cast<double>(i) / static_cast<double>(n - 1));
      if (K.classify(p) == Loc::Outside) out.push_back(p);
    }
    return out;
  };
  auto arc_in = [&](const Polyline& arc, const std::vector<RegionConstraint>& reg) {
    for (auto p : arc_samples(arc))
      if (!region_contains(reg, parts, p, false)) return false;
    return true;
  };
  for (auto& node : tree.nodes) {
    const Point2 p0 = wpoint(node.x0), p1 = wpoint(node.x1);
    node.t0 = tree.excursions[node.x0].witness.t;
    node.t1 = tree.excursions[node.x1].witness.t;
    node.check2 = D.classify(p0) == Loc::Inside && D.classify(p1) == Loc::Inside &&
                  region_contains(node.region, parts, p0, true) && region_contains(node.region, parts, p1, true);

    // (3): samples of the closure of U(x1) off K lie in U(x0).
    const auto& P1 = parts[node.x1];
    const auto& P0 = parts[node.x0];
    bool c3 = true;
    std::size_t n3 = 0;
    for (auto p : arc_samples(P1.alpha())) {
      ++n3;
      c3 = c3 && P0.classify(p) == Side::U;
    }
    const BBox jb = P1.jordan().bbox();
    std::uniform_real_distribution<double> ux(jb.xmin, jb.xmax), uy(jb.ymin, jb.ymax);
    for (std::size_t i = 0; i < search.probes / 4; ++i) {
      const Point2 p{ux(rng), uy(rng)};
      if (P1.classify(p) != Side::U) continue;
      ++n3;
      c3 = c3 && P0.classify(p) == Side::U;
    }
    node.check3 = c3 && n3 > 0;
    node.check3_samples = n3;

    // (1): every sampled ray point of the region has its minimal arc inside the region.
    bool c1 = true;
    std::size_t n1 = 0;
    std::map<int, bool> seen;
    for (double t = 0.5 * h; t < L; t += h) {
      const Point2 x = ray.point_at(t);
      if (K.classify(x) != Loc::Outside || !region_contains(node.region, parts, x, false)) continue;
      const int id = excursion_of(t);
      if (id < 0) continue;  // beyond the last return to K
      ++n1;
      auto [it, fresh] = seen.try_emplace(id, true);
      if (fresh) it->second = arc_in(all[id].alpha.arc, node.region);
      c1 = c1 && it->second;
    }
    node.check1 = c1 && n1 > 0;
    node.check1_samples = n1;

    node.connects = D.classify(p0) != Loc::Outside && arc_in(tree.excursions[node.x0].alpha.arc, node.region);
  }

  // Disjointness of sibling regions off K.
  // Probes off K: half uniform in the region's box, half ray points.
  auto probe_points = [&](const std::vector<RegionConstraint>& reg, std::size_t count) {
    BBox box = K.bbox();
    for (const auto& c : reg) box.add(parts[c.excursion].jordan().bbox());
    std::uniform_real_distribution<double> ux(box.xmin, box.xmax), uy(box.ymin, box.ymax);
    std::vector<Point2> pts;
    const std::size_t nu = count / 2;
    for (std::size_t tries = 0; pts.size() < nu && tries < 100 * count; ++tries) {
      const Point2 p{ux(rng), uy(rng)};
      if (K.classify(p) == Loc::Outside) pts.push_back(p);
    }
    std::vector<Point2> on_ray;
    const std::size_t fine = 8 * count;
    for (std::size_t i = 0; i < fine; ++i) {
      const Point2 p = ray.point_at(L * (static_cast<double>(i) + 0.5) / static_cast<double>(fine));
      if (K.classify(p) == Loc::Outside) on_ray.push_back(p);
    }
    const std::size_t nr = std::min(count - pts.size(), on_ray.size());
    for (std::size_t i = 0; i < nr; ++i) pts.push_back(on_ray[i * on_ray.size() / nr]);
    return pts;
  };
  for (const auto& node : tree.nodes) {
    if (static_cast<int>(node.sigma.size()) == depth) continue;
    const auto r0 = with(node.region, RegionConstraint::Kind::ClosedV, node.x0);
    const auto r1 = with(node.region, RegionConstraint::Kind::ClosedU, node.x1);
    DisjointnessRecord rec;
    rec.sigma = node.sigma;
    for (auto p : probe_points(node.region, search.probes)) {
      ++rec.probes;
      const bool i0 = region_contains(r0, parts, p, false);
      const bool i1 = region_contains(r1, parts, p, false);
      rec.in_child0 += i0;
      rec.in_child1 += i1;
      rec.in_both += i0 && i1;
    }
    tree.disjointness.push_back(rec);
  }
  // Leaves pairwise.
  {
    std::vector<const CantorNode*> leaves;
    for (const auto& n : tree.nodes)
      if (static_cast<int>(n.sigma.size()) == depth) leaves.push_back(&n);
    DisjointnessRecord rec;
    rec.sigma = "leaves";
    for (auto p : probe_points(tree.nodes.front().region, search.probes)) {
      ++rec.probes;
      int in = 0;
      for (const auto* l : leaves) in += region_contains(l->region, parts, p, false);
      rec.in_child0 += in > 0;
      rec.in_both += in > 1;
    }
    tree.disjointness.push_back(rec);
  }
  return tree;
}

CantorTree cantor_tree(const RayApprox& ray, const PolygonRegion& K, const PolygonRegion& D, int depth,
                       const SearchConfig& search) {
  return cantor_tree(ray.poly, K, D, depth, search);
}

}  // namespace raylab
