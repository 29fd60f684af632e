#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "raylab/geom2d.hpp"

namespace raylab {

// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;
  static Mat2 identity() { return {1, 0, 0, 1}; }
  double det() const { return a * d - b * c; }
  double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }
  Point2 operator*(Point2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend Mat2 operator-(const Mat2& m, const Mat2& n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
};
inline double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

struct IkedaParams {
  double a = 1.0, b = 0.9, c = 0.4, d = 6.0;
};

// f(z) = a + b z exp(i(c - d/(1+|z|^2)))
Point2 ikeda_eval(Point2 z, const IkedaParams& prm = {});
Mat2 ikeda_jacobian_exact(Point2 z, const IkedaParams& prm = {});

// Stereographic chart: rotate so that `pole` goes to (0,0,1), then project
// from (0,0,1) onto the plane z = 0.
class StereoChart {
 public:
  explicit StereoChart(Vec3 pole);
  const Vec3& pole() const { return pole_; }
  const std::array<double, 9>& rotation() const { return rot_; }

  Point2 project(Vec3 s) const;  // throws AtPole, InvalidArgument off the sphere
  Vec3 unproject(Point2 p) const;

 private:
  Vec3 pole_;
  std::array<double, 9> rot_{};
};

enum class MapKind { Ikeda, Identity, Linear, Function, UserPlugin, SphereProjected };

class PlanarMap {
 public:
  using Fn = std::function<Point2(Point2)>;
  using SphereFn = std::function<Vec3(Vec3)>;

  static PlanarMap ikeda(const IkedaParams& prm = {});
  static PlanarMap identity();
  // z -> m z + offset
  static PlanarMap linear(const Mat2& m, Point2 offset = {});
  static PlanarMap from_function(std::string name, Fn fn);
  // Shared object exporting `void symbol(double x, double y, double* ox, double* oy)`.
  static PlanarMap plugin(const std::string& path, const std::string& symbol);
  // Shared object exporting `void symbol(const double in[3], double out[3])`,
  // a self-map of the unit sphere, conjugated to the plane by the chart.
  static PlanarMap sphere_plugin(const std::string& path, const std::string& symbol, const StereoChart& chart);
  static PlanarMap sphere_projected(std::string name, SphereFn fn, const StereoChart& chart);

  Point2 operator()(Point2 z) const { return fn_(z); }
  MapKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<std::pair<std::string, double>>& params() const { return params_; }
  // Closed-form Jacobian when the map provides one.
  std::optional<Mat2> exact_jacobian(Point2 z) const;

  // Seed start point for ray construction (non-Ikeda maps), and the initial
  // guess for the fixed point solver.
  std::optional<Point2> seed_start;
  std::optional<Point2> fixed_point_guess;

 private:
  MapKind kind_ = MapKind::Identity;
  std::string name_;
  std::vector<std::pair<std::string, double>> params_;
  Fn fn_;
  std::function<Mat2(Point2)> jac_;
  std::shared_ptr<void> lib_;  // keeps a plugin loaded
};

// Central finite differences. Throws StepTooSmall if h < 1e3 * eps * |p|.
Mat2 jacobian(const PlanarMap& map, Point2 p, double h);

struct FixedPointResult {
  Point2 point;
  double residual = 0.0;
  int iterations = 0;
};

// Newton on g(p) = f(p) - p. Throws NoConvergence, SingularJacobian.
FixedPointResult newton_fixed_point(const PlanarMap& map, Point2 guess, double tol = 1e-12, int maxit = 50);

inline constexpr double kEscapeRadius = 1e6;

// k-fold composition; throws Diverged when |p| exceeds the escape radius.
Point2 iterate(const PlanarMap& map, Point2 p, int k, double escape = kEscapeRadius);

}  // namespace raylab
