#include "raylab/dynamics.hpp"

#include <dlfcn.h>

#include <cmath>
#include <complex>
#include <limits>

namespace raylab {

using cplx = std::complex<double>;

Point2 ikeda_eval(Point2 z, const IkedaParams& prm) {
  const double r2 = z.x * z.x + z.y * z.y;
  const double theta = prm.c - prm.d / (1.0 + r2);
  const cplx w = std::polar(1.0, theta);
  const cplx out = prm.a + prm.b * cplx(z.x, z.y) * w;
  return {out.real(), out.imag()};
}

Mat2 ikeda_jacobian_exact(Point2 z, const IkedaParams& prm) {
  const double r2 = z.x * z.x + z.y * z.y;
  const double theta = prm.c - prm.d / (1.0 + r2);
  const double dth = prm.d / ((1.0 + r2) * (1.0 + r2));
  const cplx w = std::polar(1.0, theta);
  const cplx zc(z.x, z.y), I(0, 1);
  const cplx fx = prm.b * w * (1.0 + I * zc * (dth * 2.0 * z.x));
  const cplx fy = prm.b * w * (I + I * zc * (dth * 2.0 * z.y));
  return {fx.real(), fy.real(), fx.imag(), fy.imag()};
}

// ---------------------------------------------------------------------------
// StereoChart

StereoChart::StereoChart(Vec3 pole) : pole_(pole) {
  const double n = norm(pole);
  if (std::abs(n - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "pole must be a unit vector");
  const double c = pole.z;
  if (c < -1.0 + 1e-15) {
    rot_ = {1, 0, 0, 0, -1, 0, 0, 0, -1};  // half turn about x
    return;
  }
  // Rodrigues: R = I + K + K^2 / (1 + c), K = skew(pole x e_z).
  const Vec3 v{pole.y, -pole.x, 0.0};
  const std::array<double, 9> K = {0, -v.z, v.y, v.z, 0, -v.x, -v.y, v.x, 0};
  std::array<double, 9> K2{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) K2[3 * i + j] += K[3 * i + k] * K[3 * k + j];
  for (int i = 0; i < 9; ++i) rot_[i] = (i % 4 == 0 ? 1.0 : 0.0) + K[i] + K2[i] / (1.0 + c);
}

Point2 StereoChart::project(Vec3 s) const {
  if (std::abs(norm(s) - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "point is not on the unit sphere");
  if (norm(s - pole_) <= 1e-9) throw Error(ErrorKind::AtPole, "point is at the projection center");
  const auto& R = rot_;
  const double X = R[0] * s.x + R[1] * s.y + R[2] * s.z;
  const double Y = R[3] * s.x + R[4] * s.y + R[5] * s.z;
  const double Z = R[6] * s.x + R[7] * s.y + R[8] * s.z;
  return {X / (1.0 - Z), Y / (1.0 - Z)};
}

Vec3 StereoChart::unproject(Point2 p) const {
  const double q = p.x * p.x + p.y * p.y;
  const double d = 1.0 + q;
  const double X = 2.0 * p.x / d, Y = 2.0 * p.y / d, Z = (q - 1.0) / d;
  const auto& R = rot_;  // inverse rotation is the transpose
  return {R[0] * X + R[3] * Y + R[6] * Z, R[1] * X + R[4] * Y + R[7] * Z, R[2] * X + R[5] * Y + R[8] * Z};
}

// ---------------------------------------------------------------------------
// PlanarMap

PlanarMap PlanarMap::ikeda(const IkedaParams& prm) {
  PlanarMap m;
  m.kind_ = MapKind::Ikeda;
  m.name_ = "ikeda";
  m.params_ = {{"a", prm.a}, {"b", prm.b}, {"c", prm.c}, {"d", prm.d}};
  m.fn_ = [prm](Point2 z) { return ikeda_eval(z, prm); };
  m.jac_ = [prm](Point2 z) { return ikeda_jacobian_exact(z, prm); };
  m.fixed_point_guess = Point2{1.114, -2.285};
  return m;
}

PlanarMap PlanarMap::identity() {
  PlanarMap m;
  m.kind_ = MapKind::Identity;
  m.name_ = "identity";
  m.fn_ = [](Point2 z) { return z; };
  m.jac_ = [](Point2) { return Mat2::identity(); };
  return m;
}

PlanarMap PlanarMap::linear(const Mat2& mat, Point2 offset) {
  PlanarMap m;
  m.kind_ = MapKind::Linear;
  m.name_ = "linear";
  m.params_ = {{"m11", mat.a}, {"m12", mat.b}, {"m21", mat.c}, {"m22", mat.d}, {"ox", offset.x}, {"oy", offset.y}};
  m.fn_ = [mat, offset](Point2 z) { return mat * z + offset; };
  m.jac_ = [mat](Point2) { return mat; };
  return m;
}

PlanarMap PlanarMap::from_function(std::string name, Fn fn) {
  PlanarMap m;
  m.kind_ = MapKind::Function;
  m.name_ = std::move(name);
  m.fn_ = std::move(fn);
  return m;
}

namespace {

std::pair<std::shared_ptr<void>, void*> load_symbol(const std::string& path, const std::string& symbol) {
  void* h = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
  if (!h) throw Error(ErrorKind::PluginError, "cannot load " + path + ": " + dlerror());
  std::shared_ptr<void> lib(h, [](void* p) { dlclose(p); });
  void* sym = dlsym(h, symbol.c_str());
  if (!sym) throw Error(ErrorKind::PluginError, "symbol " + symbol + " not found in " + path);
  return {lib, sym};
}

}  // namespace

PlanarMap PlanarMap::plugin(const std::string& path, const std::string& symbol) {
  using Raw = void (*)(double, double, double*, double*);
  auto [lib, sym] = load_symbol(path, symbol);
  auto raw = reinterpret_cast<Raw>(sym);
  PlanarMap m;
  m.kind_ = MapKind::UserPlugin;
  m.name_ = "plugin:" + symbol;
  m.lib_ = lib;
  m.fn_ = [raw](Point2 z) {
    Point2 o;
    raw(z.x, z.y, &o.x, &o.y);
    return o;
  };
  return m;
}

PlanarMap PlanarMap::sphere_projected(std::string name, SphereFn fn, const StereoChart& chart) {
  PlanarMap m;
  m.kind_ = MapKind::SphereProjected;
  m.name_ = std::move(name);
  const auto& pole = chart.pole();
  m.params_ = {{"pole_x", pole.x}, {"pole_y", pole.y}, {"pole_z", pole.z}};
  m.fn_ = [fn = std::move(fn), chart](Point2 z) {
    Vec3 s = fn(chart.unproject(z));
    // Renormalize: user maps may drift off the sphere by rounding.
    const double n = norm(s);
    if (!(n > 0.0)) throw Error(ErrorKind::PluginError, "sphere map returned the zero vector");
    return chart.project((1.0 / n) * s);
  };
  return m;
}

PlanarMap PlanarMap::sphere_plugin(const std::string& path, const std::string& symbol, const StereoChart& chart) {
  using Raw = void (*)(const double*, double*);
  auto [lib, sym] = load_symbol(path, symbol);
  auto raw = reinterpret_cast<Raw>(sym);
  auto m = sphere_projected(
      "sphere-plugin:" + symbol,
      [raw](Vec3 s) {
        const double in[3] = {s.x, s.y, s.z};
        double out[3] = {0, 0, 0};
        raw(in, out);
        return Vec3{out[0], out[1], out[2]};
      },
      chart);
  m.lib_ = lib;
  return m;
}

std::optional<Mat2> PlanarMap::exact_jacobian(Point2 z) const {
  if (!jac_) return std::nullopt;
  return jac_(z);
}

// ---------------------------------------------------------------------------

Mat2 jacobian(const PlanarMap& map, Point2 p, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (h < 1e3 * std::numeric_limits<double>::epsilon() * norm(p))
    throw Error(ErrorKind::StepTooSmall, "finite-difference step below 1e3*eps*|p|");
  const Point2 fxp = map({p.x + h, p.y}), fxm = map({p.x - h, p.y});
  const Point2 fyp = map({p.x, p.y + h}), fym = map({p.x, p.y - h});
  const double s = 0.5 / h;
  return {(fxp.x - fxm.x) * s, (fyp.x - fym.x) * s, (fxp.y - fxm.y) * s, (fyp.y - fym.y) * s};
}

FixedPointResult newton_fixed_point(const PlanarMap& map, Point2 guess, double tol, int maxit) {
  if (!(tol > 0.0) || maxit < 1) throw Error(ErrorKind::InvalidArgument, "need tol > 0 and maxit >= 1");
  Point2 p = guess;
  for (int it = 0;; ++it) {
    if (!is_finite(p) || norm(p) > kEscapeRadius)
      throw Error(ErrorKind::NoConvergence, "Newton iterate left the finite region");
    const Point2 g = map(p) - p;
    const double res = norm(g);
    const Mat2 jf = map.exact_jacobian(p).value_or(jacobian(map, p, 1e-7 * std::max(1.0, norm(p))));
    const Mat2 jg = jf - Mat2::identity();
    const double det = jg.det();
    const double scale = jg.frobenius();
    if (scale == 0.0 || std::abs(det) <= 1e-12 * scale * scale)
      throw Error(ErrorKind::SingularJacobian, "Newton system is singular: fixed point is not isolated");
    if (res <= tol) return {p, res, it};
    if (it >= maxit)
      throw Error(ErrorKind::NoConvergence, "no convergence after " + std::to_string(maxit) + " steps");
    // p <- p - Jg^{-1} g
    const Point2 step{(jg.d * g.x - jg.b * g.y) / det, (-jg.c * g.x + jg.a * g.y) / det};
    p = p - step;
  }
}

Point2 iterate(const PlanarMap& map, Point2 p, int k, double escape) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 0");
  for (int i = 0; i < k; ++i) {
    p = map(p);
    if (!is_finite(p) || norm(p) > escape)
      throw Error(ErrorKind::Diverged, "orbit escaped radius " + std::to_string(escape) + " at step " +
                                           std::to_string(i + 1));
  }
  return p;
}

}  // namespace raylab
