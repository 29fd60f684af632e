#include "raylab/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "raylab/error.hpp"

namespace raylab::io {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

[[noreturn]] void malformed(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::MalformedInput, source + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE || v < 0 || v > 1'000'000) return false;
  out = static_cast<int>(v);
  return true;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------

void write_ray_csv(std::ostream& out, const RayApprox& ray) {
  out << "t,x,y,gen\n";
  char buf[128];
  const auto& v = ray.poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", ray.poly.cumlen()[i], v[i].x, v[i].y,
                  ray.gen.empty() ? 0 : ray.gen[i]);
    out << buf;
  }
}

void write_ray_csv(const std::string& path, const RayApprox& ray) {
  auto f = open_out(path);
  write_ray_csv(f, ray);
  if (!f) throw Error(ErrorKind::InvalidArgument, "write failed: " + path);
}

RayApprox read_ray_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next()) malformed(source, 1, "empty file");
  if (line != "t,x,y,gen") malformed(source, lineno, "expected header 't,x,y,gen'");

  std::vector<Point2> pts;
  std::vector<int> gen;
  double last_t = -INFINITY;
  bool blank_seen = false;
  while (next()) {
    if (line.empty()) {
      blank_seen = true;
      continue;
    }
    if (blank_seen) malformed(source, lineno, "data after a blank line");
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.push_back("");
    if (f.size() != 4) malformed(source, lineno, "expected 4 fields, got " + std::to_string(f.size()));
    double t, x, y;
    int g;
    if (!parse_double(f[0], t)) malformed(source, lineno, "bad t '" + f[0] + "'");
    if (!parse_double(f[1], x)) malformed(source, lineno, "bad x '" + f[1] + "'");
    if (!parse_double(f[2], y)) malformed(source, lineno, "bad y '" + f[2] + "'");
    if (!parse_int(f[3], g)) malformed(source, lineno, "bad gen '" + f[3] + "'");
    if (!pts.empty()) {
      if (!(t > last_t)) malformed(source, lineno, "t not increasing");
      if (g < gen.back()) malformed(source, lineno, "gen decreases");
      if (Point2{x, y} == pts.back()) malformed(source, lineno, "repeated vertex");
    }
    last_t = t;
    pts.push_back({x, y});
    gen.push_back(g);
  }
  if (pts.size() < 2) malformed(source, lineno, "need at least 2 vertices");
  try {
    return ray_from_vertices(std::move(pts), std::move(gen));
  } catch (const Error& e) {
    malformed(source, lineno, e.what());
  }
}

RayApprox read_ray_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::MalformedInput, path + ":0: cannot open");
  return read_ray_csv(f, path);
}

// ---------------------------------------------------------------------------

json to_json(Point2 p) { return json::array({p.x, p.y}); }

json to_json(const FixedPointResult& r) {
  return {{"point", to_json(r.point)}, {"residual", r.residual}, {"iterations", r.iterations}};
}

json to_json(const BuildLog& log) {
  json per = json::array();
  for (const auto& g : log.per_generation)
    per.push_back({{"k", g.k}, {"vertices", g.vertices}, {"length", g.length}, {"block_vertices", g.block_vertices}});
  json j = {
      {"fixed_point", to_json(log.fixed_point)},
      {"delta", log.delta},
      {"angle_max", log.angle_max},
      {"cap", log.cap},
      {"generations", log.generations},
      {"n0", log.n0},
      {"construction", log.construction == Construction::Manifold ? "manifold" : "iterates"},
      {"unstable_eigenvalue", log.unstable_eigenvalue},
      {"unstable_direction", to_json(log.unstable_direction)},
      {"lead_in", log.lead_in},
      {"local_length", log.local_length},
      {"stats",
       {{"vertices", log.stats.vertices},
        {"splits", log.stats.splits},
        {"passes", log.stats.passes},
        {"angle_limited", log.stats.angle_limited},
        {"cap_reached", log.stats.cap_reached}}},
      {"tau_simple", log.tau_simple},
      {"per_generation", per},
      {"simplicity",
       {{"simple", log.simplicity.simple},
        {"edge_i", log.simplicity.edge_i},
        {"edge_j", log.simplicity.edge_j},
        {"distance", log.simplicity.distance}}},
      {"injectivity",
       {{"injective", log.injectivity.injective},
        {"min_separation", log.injectivity.min_separation},
        {"edge_i", log.injectivity.edge_i},
        {"edge_j", log.injectivity.edge_j},
        {"image_vertices", log.injectivity.image_vertices}}},
  };
  j["violation_generations"] = log.violation_generations
                                   ? json::array({log.violation_generations->first, log.violation_generations->second})
                                   : json(nullptr);
  return j;
}

json to_json(const ReturnProfile& p) {
  json s = json::array();
  for (const auto& r : p.samples)
    s.push_back({{"t", r.t}, {"gap", r.gap}, {"return_dist", r.return_dist}, {"return_param", r.return_param}});
  return {{"samples", s}, {"max_return", p.max_return()}};
}

json to_json(const TwoSidedWitness& w) {
  return {{"t", w.t},
          {"n", w.n},
          {"eps", w.eps},
          {"left_hits", w.left_hits},
          {"right_hits", w.right_hits},
          {"passes", w.passes},
          {"verdict", to_string(w.verdict)}};
}

namespace {

std::string kind_name(RegionConstraint::Kind k) {
  switch (k) {
    case RegionConstraint::Kind::ClosedU: return "closed_U";
    case RegionConstraint::Kind::ClosedV: return "closed_V";
    case RegionConstraint::Kind::NotOpenU: return "not_open_U";
  }
  return "?";
}

}  // namespace

json to_json(const CantorTree& tree) {
  json ex = json::array();
  for (const auto& e : tree.excursions)
    ex.push_back({{"t_lo", e.alpha.t_lo},
                  {"t_hi", e.alpha.t_hi},
                  {"through", e.alpha.through},
                  {"two_sided", e.two_sided},
                  {"in_D", e.in_D},
                  {"witness", to_json(e.witness)}});
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json region = json::array();
    for (const auto& c : n.region) region.push_back({{"kind", kind_name(c.kind)}, {"excursion", c.excursion}});
    nodes.push_back({{"sigma", n.sigma},
                     {"region", region},
                     {"x0", n.x0},
                     {"x1", n.x1},
                     {"t0", n.t0},
                     {"t1", n.t1},
                     {"check1", n.check1},
                     {"check2", n.check2},
                     {"check3", n.check3},
                     {"connects", n.connects},
                     {"check1_samples", n.check1_samples},
                     {"check3_samples", n.check3_samples}});
  }
  json dis = json::array();
  for (const auto& d : tree.disjointness)
    dis.push_back({{"sigma", d.sigma},
                   {"probes", d.probes},
                   {"in_child0", d.in_child0},
                   {"in_child1", d.in_child1},
                   {"in_both", d.in_both}});
  return {{"depth", tree.depth},
          {"clean", tree.clean()},
          {"leaf_count", tree.leaf_count()},
          {"a_d", tree.a_d},
          {"stats",
           {{"candidates", tree.stats.candidates},
            {"excursions", tree.stats.excursions},
            {"two_sided", tree.stats.two_sided},
            {"steps", tree.stats.steps},
            {"backtracks", tree.stats.backtracks}}},
          {"excursions", ex},
          {"nodes", nodes},
          {"disjointness", dis}};
}

PolygonRegion region_from_json(const json& j) {
  auto num = [](const json& v) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "region: expected a number");
    return v.get<double>();
  };
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "region must be an object");
  if (j.contains("rect")) {
    const auto& r = j["rect"];
    if (!r.is_array() || r.size() != 4) throw Error(ErrorKind::InvalidArgument, "rect needs [xmin, ymin, xmax, ymax]");
    return PolygonRegion::rectangle({num(r[0]), num(r[1])}, {num(r[2]), num(r[3])});
  }
  if (j.contains("disc")) {
    const auto& d = j["disc"];
    if (!d.is_array() || d.size() != 3) throw Error(ErrorKind::InvalidArgument, "disc needs [cx, cy, r]");
    return PolygonRegion::disc({num(d[0]), num(d[1])}, num(d[2]), j.value("segments", 64));
  }
  if (j.contains("polygon")) {
    std::vector<Point2> ring;
    for (const auto& p : j["polygon"]) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::InvalidArgument, "polygon vertex needs [x, y]");
      ring.push_back({num(p[0]), num(p[1])});
    }
    return PolygonRegion(std::move(ring));
  }
  throw Error(ErrorKind::InvalidArgument, "region needs one of rect, disc, polygon");
}

json region_to_json(const PolygonRegion& r) {
  json ring = json::array();
  const auto& v = r.boundary().vertices();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) ring.push_back(to_json(v[i]));
  return {{"polygon", ring}};
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw Error(ErrorKind::InvalidArgument, "write failed: " + path);
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kDefaultPalette = {"#000000", "#e69f00", "#56b4e9", "#009e73",
                                                  "#f0e442", "#0072b2", "#d55e00", "#cc79a7"};

std::string render_svg(const FigureSpec& fig, const SvgStyle& style) {
  BBox box = fig.viewport;
  if (box.empty()) {
    for (const auto& l : fig.layers) box.add(bbox_of(l.pts));
    for (const auto& a : fig.annotations) box.add(a.at);
    if (box.empty()) throw Error(ErrorKind::InvalidArgument, "render_svg: nothing to draw");
    box = box.expanded(style.margin * std::max(box.width(), box.height()));
  }
  if (!(box.width() > 0.0) || !(box.height() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "render_svg: viewport needs positive width and height");
  if (!(style.canvas_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "render_svg: canvas width must be > 0");

  const double s = style.canvas_width / box.width();
  const double W = style.canvas_width, H = box.height() * s;
  auto X = [&](double x) { return fmt("%.3f", (x - box.xmin) * s); };
  auto Y = [&](double y) { return fmt("%.3f", (box.ymax - y) * s); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt("%.3f", W) + "\" height=\"" +
         fmt("%.3f", H) + "\" viewBox=\"0 0 " + fmt("%.3f", W) + " " + fmt("%.3f", H) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fmt("%.3f", W) + "\" height=\"" + fmt("%.3f", H) + "\" fill=\"" +
         style.background + "\"/>\n";
  for (const auto& l : fig.layers) {
    if (l.pts.empty()) continue;
    out += "<path";
    if (!l.id.empty()) out += " id=\"" + l.id + "\"";
    out += " fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"" +
           fmt("%.3f", l.width > 0.0 ? l.width : style.stroke_width) +
           "\" stroke-linejoin=\"round\" stroke-linecap=\"round\" d=\"";
    for (std::size_t i = 0; i < l.pts.size(); ++i) {
      if (i == 0) out += "M ";
      else if (i == 1) out += " L ";
      else out += i % 8 == 0 ? "\n" : " ";
      out += X(l.pts[i].x) + " " + Y(l.pts[i].y);
    }
    if (l.closed) out += " Z";
    out += "\"/>\n";
  }
  for (const auto& a : fig.annotations) {
    out += "<circle cx=\"" + X(a.at.x) + "\" cy=\"" + Y(a.at.y) + "\" r=\"4.000\" fill=\"none\" stroke=\"" + a.color +
           "\" stroke-width=\"1.500\"/>\n";
    if (!a.label.empty())
      out += "<text x=\"" + fmt("%.3f", (a.at.x - box.xmin) * s + 6.0) + "\" y=\"" +
             fmt("%.3f", (box.ymax - a.at.y) * s - 6.0) + "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"" +
             a.color + "\">" + a.label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

FigureSpec ray_figure(const RayApprox& ray, const SvgStyle& style, std::optional<Point2> marker) {
  if (style.palette.empty()) throw Error(ErrorKind::InvalidArgument, "ray_figure: empty palette");
  FigureSpec fig;
  const auto& v = ray.poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int g = ray.gen.empty() ? 0 : ray.gen[i];
    if (fig.layers.empty() || fig.layers.back().id != "gen" + std::to_string(g)) {
      Layer l;
      l.id = "gen" + std::to_string(g);
      l.color = style.palette[static_cast<std::size_t>(g) % style.palette.size()];
      fig.layers.push_back(std::move(l));
    }
    fig.layers.back().pts.push_back(v[i]);
  }
  if (marker) fig.annotations.push_back({*marker, "p", "#d00000"});
  return fig;
}

}  // namespace raylab::io
