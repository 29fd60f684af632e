#include "raylab/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "raylab/error.hpp"

namespace raylab::fixtures {

namespace {

// Appends the points after `a` on the segment a -> b at most `spacing` apart.
void append_segment(std::vector<Point2>& out, Point2 a, Point2 b, double spacing) {
  const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / spacing)));
  for (int i = 1; i <= n; ++i) out.push_back(i == n ? b : lerp(a, b, static_cast<double>(i) / n));
}

std::vector<Point2> resample(const std::vector<Point2>& corners, double spacing) {
  std::vector<Point2> out{corners.front()};
  for (std::size_t i = 1; i < corners.size(); ++i)
    if (corners[i] != out.back()) append_segment(out, out.back(), corners[i], spacing);
  return out;
}

Point2 unit(Point2 v) { return (1.0 / norm(v)) * v; }
Point2 left_normal(Point2 a, Point2 b) {
  const Point2 d = unit(b - a);
  return {-d.y, d.x};
}

}  // namespace

CantorSnake cantor_snake(const CantorSnakeParams& p) {
  if (p.hairpins < 2 || p.laps < 1 || !(p.gap > 0.0) || !(p.max_offset > 0.0) || !(2.0 * p.max_offset < p.gap))
    throw Error(ErrorKind::InvalidArgument, "cantor_snake: need hairpins >= 2, laps >= 1, 0 < 2*max_offset < gap");
  const int N = p.hairpins;
  const double g = p.gap;
  auto h = [&](int i) { return g * (N - i) + 0.5 * g; };
  auto w = [&](int i) { return g * (N - i) + 1.5 * g; };
  auto c = [&](int i) { return 4.0 * g + g * (N - 1) - g * i; };

  std::vector<Point2> sk{{-0.5 * c(0), h(0)}};
  std::vector<double> mid;
  double len = 0.0;
  auto push = [&](Point2 q) {
    len += distance(sk.back(), q);
    sk.push_back(q);
  };
  for (int i = 0; i < N; ++i) {
    push({w(i), h(i)});
    mid.push_back(len + h(i));
    push({w(i), -h(i)});
    if (i + 1 < N) {
      push({-c(i), -h(i)});
      push({-c(i), h(i + 1)});
    } else {
      push({-3.0 * g, -h(i)});
    }
  }

  CantorSnake out;
  out.core_length = len;
  out.hairpin_mid = mid;
  std::vector<Point2> core = resample(sk, p.core_spacing);

  // Spiral tail: offset laps around the skeleton with offset growing linearly
  // in the loop parameter, starting at zero at the core's end.
  const std::size_t m = sk.size() - 1;
  std::vector<double> s(sk.size(), 0.0);
  for (std::size_t i = 1; i <= m; ++i) s[i] = s[i - 1] + distance(sk[i - 1], sk[i]);
  std::vector<Point2> miter(sk.size());
  miter[0] = left_normal(sk[0], sk[1]);
  miter[m] = left_normal(sk[m - 1], sk[m]);
  for (std::size_t i = 1; i < m; ++i) {
    const Point2 na = left_normal(sk[i - 1], sk[i]), nb = left_normal(sk[i], sk[i + 1]);
    miter[i] = (1.0 / (1.0 + dot(na, nb))) * (na + nb);
  }
  const double Lc = s[m];
  const double total = 2.0 * Lc * p.laps;
  auto d = [&](double lambda) { return p.max_offset * lambda / total; };
  const int caps = 12;
  const double pi = std::numbers::pi;
  std::vector<Point2> tail{sk[m]};
  for (int k = 0; k < p.laps; ++k) {
    const double base = 2.0 * Lc * k;
    for (std::size_t i = m + 1; i-- > 0;) tail.push_back(sk[i] + d(base + Lc - s[i]) * miter[i]);
    const Point2 n0 = miter[0], back0 = -1.0 * unit(sk[1] - sk[0]);
    const double d0 = d(base + Lc);
    for (int j = 1; j < caps; ++j) {
      const double phi = pi * j / caps;
      tail.push_back(sk[0] + d0 * (std::cos(phi) * n0 + std::sin(phi) * back0));
    }
    for (std::size_t i = 0; i <= m; ++i) tail.push_back(sk[i] - d(base + Lc + s[i]) * miter[i]);
    const Point2 nm = miter[m], front = unit(sk[m] - sk[m - 1]);
    const double d1 = d(base + 2.0 * Lc);
    for (int j = 1; j < caps; ++j) {
      const double phi = pi * j / caps;
      tail.push_back(sk[m] + d1 * (-std::cos(phi) * nm + std::sin(phi) * front));
    }
  }
  std::vector<Point2> tail_pts = resample(tail, p.tail_spacing);
  core.insert(core.end(), tail_pts.begin() + 1, tail_pts.end());
  out.ray = Polyline(std::move(core));

  const double H = h(0) + 2.5 * g;
  out.K = PolygonRegion::rectangle({-(c(0) + 2.0 * g), -H}, {0.0, H});
  const double cx = 0.5 * (w(0) + w(N - 1));
  out.D = PolygonRegion::disc({cx, 0.0}, 0.5 * (w(0) - w(N - 1)) + g, 128);
  return out;
}

AxisSnake axis_snake(int passes, double spacing) {
  if (passes < 1) throw Error(ErrorKind::InvalidArgument, "axis_snake: passes must be >= 1");
  AxisSnake out;
  std::vector<Point2> corners{{-1, 0}, {1, 0}};
  double len = 2.0;
  out.axis_end = len;
  auto push = [&](Point2 q) {
    len += distance(corners.back(), q);
    corners.push_back(q);
  };
  auto amp = [](int k) { return std::ldexp(1.0, -k); };
  auto top = [](int k) { return k % 4 == 1 || k % 4 == 0; };
  const double x_turn = 1.1;
  push({1.5, 0});
  push({1.5, amp(1)});
  for (int k = 1; k <= passes; ++k) {
    const double y = top(k) ? amp(k) : -amp(k);
    if (corners.back().y != y) push({corners.back().x, y});
    out.pass_start.push_back(len);
    if (k % 2 == 1) {
      // leftward, then a nested wrap around the left end
      push({-1.0 - 0.4 * std::pow(0.75, (k - 1) / 2), y});
    } else {
      push({x_turn, y});
    }
  }
  out.ray = Polyline(resample(corners, spacing));
  return out;
}

Polyline nested_semicircles(int laps, int samples_per_half) {
  if (laps < 1 || samples_per_half < 2) throw Error(ErrorKind::InvalidArgument, "nested_semicircles: bad sizes");
  auto r = [](int k) { return 1.0 - 0.5 * std::pow(0.8, k); };
  const double pi = std::numbers::pi;
  std::vector<Point2> pts{{r(0), 0.0}};
  for (int k = 0; k < laps; ++k) {
    for (int j = 1; j <= samples_per_half; ++j) {
      const double a = pi * j / samples_per_half;
      pts.push_back({r(k) * std::cos(a), r(k) * std::sin(a)});
    }
    const double cx = 0.5 * (r(k + 1) - r(k)), rad = 0.5 * (r(k) + r(k + 1));
    for (int j = 1; j <= samples_per_half; ++j) {
      const double a = pi + pi * j / samples_per_half;
      pts.push_back({cx + rad * std::cos(a), rad * std::sin(a)});
    }
  }
  return Polyline(std::move(pts));
}

}  // namespace raylab::fixtures
