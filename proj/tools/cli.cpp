#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "raylab/entwine.hpp"
#include "raylab/fixtures.hpp"
#include "raylab/io.hpp"
#include "raylab/raybuild.hpp"

namespace raylab::cli {

using io::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration: a JSON document with blocks map, refine, analysis, output.
// Flags are written into the same document after the file is loaded.

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"map", {"kind", "params", "plugin", "symbol", "pole", "guess", "seed_start", "tol", "maxit"}},
    {"refine", {"construction", "delta", "delta_rel", "angle_max", "cap", "generations", "n0"}},
    {"analysis",
     {"gap", "eps", "m_min", "samples", "ts", "depth", "K", "D", "max_steps", "probes", "per_excursion",
      "candidate_spacing", "arc_samples", "seed"}},
    {"output", {"csv", "log", "json", "svg", "svg_style"}},
};

json load_config(const std::string& path) {
  json cfg = json::object();
  if (!path.empty()) cfg = io::read_json(path);
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (auto& [block, body] : cfg.items()) {
    const auto it = kKnownKeys.find(block);
    if (it == kKnownKeys.end()) throw UsageError("config: unknown block '" + block + "'");
    if (!body.is_object()) throw UsageError("config: block '" + block + "' must be an object");
    for (auto& [key, v] : body.items())
      if (!it->second.count(key)) throw UsageError("config: unknown key '" + block + "." + key + "'");
  }
  for (const auto& [block, keys] : kKnownKeys)
    if (!cfg.contains(block)) cfg[block] = json::object();
  return cfg;
}

template <class T>
void overlay(json& cfg, const char* block, const char* key, const std::optional<T>& v) {
  if (v) cfg[block][key] = *v;
}

template <class T>
T get(const json& cfg, const char* block, const char* key, T fallback) {
  const auto& b = cfg.at(block);
  if (!b.contains(key) || b[key].is_null()) return fallback;
  try {
    return b[key].get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config: ") + block + "." + key + " has the wrong type");
  }
}

std::optional<Point2> get_point(const json& cfg, const char* block, const char* key) {
  const auto& b = cfg.at(block);
  if (!b.contains(key) || b[key].is_null()) return std::nullopt;
  const auto& v = b[key];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw UsageError(std::string("config: ") + block + "." + key + " must be [x, y]");
  return Point2{v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> parse_list(const std::string& s, std::size_t want, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v))
      throw UsageError(what + ": bad number '" + cell + "'");
    out.push_back(v);
  }
  if (want && out.size() != want) throw UsageError(what + ": expected " + std::to_string(want) + " values");
  return out;
}

json parse_json_flag(const std::string& s, const std::string& what) {
  try {
    return json::parse(s);
  } catch (const json::exception& e) {
    throw UsageError(what + ": " + e.what());
  }
}

PlanarMap make_map(const json& cfg) {
  const auto kind = get<std::string>(cfg, "map", "kind", "ikeda");
  PlanarMap m = PlanarMap::identity();
  if (kind == "ikeda") {
    IkedaParams prm;
    if (cfg["map"].contains("params")) {
      const auto& p = cfg["map"]["params"];
      for (auto& [k, v] : p.items())
        if (k != "a" && k != "b" && k != "c" && k != "d") throw UsageError("config: unknown Ikeda parameter '" + k + "'");
      prm.a = p.value("a", prm.a);
      prm.b = p.value("b", prm.b);
      prm.c = p.value("c", prm.c);
      prm.d = p.value("d", prm.d);
    }
    m = PlanarMap::ikeda(prm);
  } else if (kind == "identity") {
    m = PlanarMap::identity();
  } else if (kind == "plugin" || kind == "sphere_plugin") {
    const auto path = get<std::string>(cfg, "map", "plugin", "");
    const auto symbol = get<std::string>(cfg, "map", "symbol", "");
    if (path.empty() || symbol.empty()) throw UsageError("map." + kind + " needs plugin and symbol");
    if (kind == "plugin") {
      m = PlanarMap::plugin(path, symbol);
    } else {
      const auto pole = get<std::vector<double>>(cfg, "map", "pole", {});
      if (pole.size() != 3) throw UsageError("map.pole must be [x, y, z]");
      m = PlanarMap::sphere_plugin(path, symbol, StereoChart({pole[0], pole[1], pole[2]}));
    }
  } else {
    throw UsageError("unknown map kind '" + kind + "'");
  }
  if (auto g = get_point(cfg, "map", "guess")) m.fixed_point_guess = g;
  if (auto s = get_point(cfg, "map", "seed_start")) m.seed_start = s;
  return m;
}

RefineConfig make_refine(const json& cfg) {
  RefineConfig r;
  const auto c = get<std::string>(cfg, "refine", "construction", "manifold");
  if (c == "manifold") r.construction = Construction::Manifold;
  else if (c == "iterates") r.construction = Construction::Iterates;
  else throw UsageError("refine.construction must be manifold or iterates");
  r.delta = get(cfg, "refine", "delta", r.delta);
  r.delta_rel = get(cfg, "refine", "delta_rel", r.delta_rel);
  r.angle_max = get(cfg, "refine", "angle_max", r.angle_max);
  r.cap = get(cfg, "refine", "cap", r.cap);
  r.generations = get(cfg, "refine", "generations", r.generations);
  r.n0 = get(cfg, "refine", "n0", r.n0);
  return r;
}

io::SvgStyle make_style(const json& cfg) {
  io::SvgStyle s;
  const auto& o = cfg.at("output");
  if (!o.contains("svg_style")) return s;
  const auto& j = o["svg_style"];
  if (!j.is_object()) throw UsageError("output.svg_style must be an object");
  for (auto& [k, v] : j.items())
    if (k != "canvas_width" && k != "stroke_width" && k != "margin" && k != "colors" && k != "background")
      throw UsageError("config: unknown key 'output.svg_style." + k + "'");
  s.canvas_width = j.value("canvas_width", s.canvas_width);
  s.stroke_width = j.value("stroke_width", s.stroke_width);
  s.margin = j.value("margin", s.margin);
  s.background = j.value("background", s.background);
  if (j.contains("colors")) s.palette = j["colors"].get<std::vector<std::string>>();
  if (s.palette.empty()) throw UsageError("output.svg_style.colors must not be empty");
  return s;
}

std::optional<PolygonRegion> get_region(const json& cfg, const char* key) {
  const auto& a = cfg.at("analysis");
  if (!a.contains(key) || a[key].is_null()) return std::nullopt;
  return io::region_from_json(a[key]);
}

void print_line(std::ostream& out, const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  out << buf;
}

// ---------------------------------------------------------------------------

int cmd_fixed_point(const json& cfg, std::ostream& out) {
  const PlanarMap map = make_map(cfg);
  const Point2 guess = map.fixed_point_guess.value_or(Point2{0, 0});
  const double tol = get(cfg, "map", "tol", 1e-12);
  const int maxit = get(cfg, "map", "maxit", 50);
  const auto r = newton_fixed_point(map, guess, tol, maxit);
  print_line(out, "fixed point: (%.3f, %.3f)\n", r.point.x, r.point.y);
  print_line(out, "  full:      (%.17g, %.17g)\n", r.point.x, r.point.y);
  print_line(out, "  residual:  %.3e  iterations: %.0f\n", r.residual, r.iterations);
  json params = json::object();
  for (const auto& [k, v] : map.params()) params[k] = v;
  json j = io::to_json(r);
  j["map"] = map.name();
  j["params"] = params;
  j["guess"] = io::to_json(guess);
  j["tol"] = tol;
  io::write_json(get<std::string>(cfg, "output", "json", "fixed_point.json"), j);
  return 0;
}

int cmd_build(const json& cfg, std::ostream& out, std::ostream& err) {
  const PlanarMap map = make_map(cfg);
  const RefineConfig rc = make_refine(cfg);
  const auto res = build_ray_unchecked(map, rc);
  const auto log_path = get<std::string>(cfg, "output", "log", "build_log.json");
  io::write_json(log_path, io::to_json(res.log));
  if (!res.log.simplicity.simple) {
    std::string msg = "SimplicityViolation: edges " + std::to_string(res.log.simplicity.edge_i) + " and " +
                      std::to_string(res.log.simplicity.edge_j);
    if (res.log.violation_generations)
      msg += " (generations " + std::to_string(res.log.violation_generations->first) + ", " +
             std::to_string(res.log.violation_generations->second) + ")";
    err << "error: " << msg << "; log written to " << log_path << "\n";
    return exit_code(ErrorKind::SimplicityViolation);
  }
  const auto csv = get<std::string>(cfg, "output", "csv", "ray.csv");
  io::write_ray_csv(csv, res.ray);
  out << "ray: " << res.ray.poly.size() << " vertices, generations 0.." << res.ray.generations << ", length "
      << res.ray.poly.length() << "\n";
  out << "wrote " << csv << " and " << log_path << "\n";
  return 0;
}

int cmd_diagnose(const json& cfg, const std::string& input, std::ostream& out) {
  const RayApprox ray = io::read_ray_csv(input);
  const double L = ray.poly.length();
  const double gap = get(cfg, "analysis", "gap", 0.1 * L);
  if (!(gap > 0.0 && gap < L)) throw UsageError("analysis.gap must lie in (0, ray length)");
  std::vector<double> ts = get<std::vector<double>>(cfg, "analysis", "ts", {});
  if (ts.empty()) {
    const int n = get(cfg, "analysis", "samples", 100);
    if (n < 1) throw UsageError("analysis.samples must be >= 1");
    for (int i = 0; i < n; ++i) ts.push_back((L - gap) * (i + 1) / (n + 1));
  }
  const ReturnProfile prof = return_profile(ray, ts, gap);

  TwoSidedOptions opt;
  if (cfg["analysis"].contains("eps")) opt.eps = get(cfg, "analysis", "eps", 0.0);
  opt.m_min = get(cfg, "analysis", "m_min", opt.m_min);
  const auto K = get_region(cfg, "K");
  if (K) opt.K = &*K;
  const SpatialIndex idx(ray.poly);
  json ws = json::array();
  std::map<std::string, int> counts;
  for (double t : ts) {
    try {
      const auto w = classify_two_sided(ray.poly, idx, t, opt);
      ws.push_back(io::to_json(w));
      ++counts[to_string(w.verdict)];
    } catch (const Error& e) {
      ws.push_back({{"t", t}, {"error", std::string(to_string(e.kind()))}});
      ++counts[std::string(to_string(e.kind()))];
    }
  }
  json summary = json::object();
  for (const auto& [k, v] : counts) summary[k] = v;
  const json report = {{"ray", {{"vertices", ray.poly.size()}, {"length", L}, {"generations", ray.generations}}},
                       {"gap", gap},
                       {"return_profile", io::to_json(prof)},
                       {"two_sided", ws},
                       {"summary", summary}};
  const auto path = get<std::string>(cfg, "output", "json", "diagnostics.json");
  io::write_json(path, report);
  out << "max return distance " << prof.max_return() << " over " << ts.size() << " samples (gap " << gap << ")\n";
  for (const auto& [k, v] : counts) out << "  " << k << ": " << v << "\n";
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_cantor(const json& cfg, const std::string& input, std::ostream& out) {
  const int depth = get(cfg, "analysis", "depth", 2);
  if (depth < 1) throw UsageError("analysis.depth must be >= 1");
  const auto K = get_region(cfg, "K");
  const auto D = get_region(cfg, "D");
  if (!K || !D) throw UsageError("cantor needs analysis.K and analysis.D");
  const RayApprox ray = io::read_ray_csv(input);

  SearchConfig sc;
  sc.candidate_spacing = get(cfg, "analysis", "candidate_spacing", sc.candidate_spacing);
  sc.per_excursion = get(cfg, "analysis", "per_excursion", sc.per_excursion);
  sc.m_min = get(cfg, "analysis", "m_min", sc.m_min);
  if (cfg["analysis"].contains("eps")) sc.eps = get(cfg, "analysis", "eps", 0.0);
  sc.max_steps = get(cfg, "analysis", "max_steps", sc.max_steps);
  sc.probes = get(cfg, "analysis", "probes", sc.probes);
  sc.arc_samples = get(cfg, "analysis", "arc_samples", sc.arc_samples);
  sc.seed = get(cfg, "analysis", "seed", sc.seed);
  const CantorTree tree = cantor_tree(ray, *K, *D, depth, sc);

  json j = io::to_json(tree);
  j["K"] = io::region_to_json(*K);
  j["D"] = io::region_to_json(*D);
  const auto path = get<std::string>(cfg, "output", "json", "cantor.json");
  io::write_json(path, j);

  const io::SvgStyle style = make_style(cfg);
  io::FigureSpec fig;
  fig.layers.push_back({ray.poly.vertices(), "#a0a0a0", 0.3 * style.stroke_width, false, "ray"});
  auto ring = [](const PolygonRegion& r) {
    auto v = r.boundary().vertices();
    v.pop_back();
    return v;
  };
  fig.layers.push_back({ring(*K), "#000000", 2.0 * style.stroke_width, true, "K"});
  fig.layers.push_back({ring(*D), "#0072b2", 2.0 * style.stroke_width, true, "D"});
  for (const auto& n : tree.nodes) {
    const std::string color = style.palette[(n.sigma.size() + 1) % style.palette.size()];
    const std::string name = n.sigma.empty() ? "root" : n.sigma;
    for (int k = 0; k < 2; ++k) {
      const int x = k == 0 ? n.x0 : n.x1;
      fig.layers.push_back({tree.excursions[x].alpha.arc.vertices(), color, 1.5 * style.stroke_width, false,
                            "alpha-" + name + "-" + std::to_string(k)});
      fig.annotations.push_back({ray.poly.point_at(k == 0 ? n.t0 : n.t1), name + ":" + std::to_string(k), color});
    }
  }
  const auto svg = get<std::string>(cfg, "output", "svg", "cantor.svg");
  io::write_text(svg, io::render_svg(fig, style));

  std::size_t both = 0;
  for (const auto& d : tree.disjointness) both += d.in_both;
  out << "cantor tree: depth " << depth << ", " << tree.leaf_count() << " leaves, " << tree.nodes.size()
      << " nodes, clean " << (tree.clean() ? "yes" : "no") << ", probes in two regions " << both << "\n";
  out << "search: " << tree.stats.excursions << " excursions, " << tree.stats.two_sided << " two-sided, "
      << tree.stats.steps << " steps\n";
  out << "wrote " << path << " and " << svg << "\n";
  return 0;
}

int cmd_render(const json& cfg, const std::vector<std::string>& inputs, bool marker,
               const std::optional<std::string>& viewport, std::ostream& out) {
  if (inputs.empty()) throw UsageError("render needs at least one CSV");
  const io::SvgStyle style = make_style(cfg);
  io::FigureSpec fig;
  std::optional<Point2> origin;
  if (inputs.size() == 1) {
    const RayApprox ray = io::read_ray_csv(inputs[0]);
    fig = io::ray_figure(ray, style, marker ? std::optional(ray.origin) : std::nullopt);
  } else {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const RayApprox ray = io::read_ray_csv(inputs[i]);
      if (!origin) origin = ray.origin;
      fig.layers.push_back({ray.poly.vertices(), style.palette[i % style.palette.size()], 0.0, false,
                            "layer" + std::to_string(i)});
    }
    if (marker) fig.annotations.push_back({*origin, "p", "#d00000"});
  }
  if (viewport) {
    const auto v = parse_list(*viewport, 4, "--viewport");
    fig.viewport = BBox{v[0], v[1], v[2], v[3]};
    if (!(fig.viewport.width() > 0.0 && fig.viewport.height() > 0.0))
      throw UsageError("--viewport needs xmin < xmax and ymin < ymax");
  }
  const auto path = get<std::string>(cfg, "output", "svg", "ray.svg");
  io::write_text(path, io::render_svg(fig, style));
  std::size_t pts = 0;
  for (const auto& l : fig.layers) pts += l.pts.size();
  out << "wrote " << path << " (" << fig.layers.size() << " paths, " << pts << " points)\n";
  return 0;
}

int cmd_fixture(const std::string& kind, const std::string& csv, const std::optional<std::string>& config_out,
                std::ostream& out) {
  RayApprox ray;
  json cfg = json::object();
  if (kind == "snake") {
    const auto s = fixtures::cantor_snake();
    std::vector<int> gen(s.ray.size(), 0);
    for (std::size_t i = 0; i < gen.size(); ++i) gen[i] = s.ray.cumlen()[i] > s.core_length ? 1 : 0;
    ray = ray_from_vertices(s.ray.vertices(), gen);
    cfg["analysis"] = {{"K", io::region_to_json(s.K)}, {"D", io::region_to_json(s.D)}, {"depth", 2},
                       {"ts", s.hairpin_mid}, {"gap", s.core_length}};
  } else if (kind == "axis") {
    const auto s = fixtures::axis_snake();
    ray = ray_from_vertices(s.ray.vertices(), std::vector<int>(s.ray.size(), 0));
    cfg["analysis"] = {{"ts", {0.5, 1.0, 1.5}}, {"gap", s.pass_start[2] - 1.0}};
  } else if (kind == "semicircles") {
    const Polyline p = fixtures::nested_semicircles();
    ray = ray_from_vertices(p.vertices(), std::vector<int>(p.size(), 0));
  } else {
    throw UsageError("fixture must be snake, axis or semicircles");
  }
  io::write_ray_csv(csv, ray);
  out << "wrote " << csv << " (" << ray.poly.size() << " vertices)\n";
  if (config_out) {
    io::write_json(*config_out, cfg);
    out << "wrote " << *config_out << "\n";
  }
  return 0;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::SeedNotConfigured:
    case ErrorKind::PluginError:
    case ErrorKind::AtPole:
      return 1;
    case ErrorKind::NoConvergence:
    case ErrorKind::SingularJacobian:
    case ErrorKind::StepTooSmall:
      return 2;
    case ErrorKind::SimplicityViolation:
      return 3;
    case ErrorKind::Diverged:
      return 4;
    case ErrorKind::MalformedInput:
      return 5;
    case ErrorKind::OnBoundary:
    case ErrorKind::TailTooShort:
    case ErrorKind::NearEndpoint:
    case ErrorKind::NoReturn:
    case ErrorKind::Precondition:
    case ErrorKind::DegenerateTheta:
    case ErrorKind::WitnessNotFound:
      return 6;
  }
  return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-entwined ray construction and plane-topology diagnostics", "raylab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "raylab 1.0");

  std::string config;
  // Map, solver and refinement flags.
  std::optional<std::string> map_kind, plugin, symbol, guess, pole;
  std::optional<double> tol, delta, delta_rel, angle_max;
  std::optional<int> maxit, generations, n0;
  std::optional<std::size_t> cap;
  std::optional<std::string> construction;
  // Analysis flags.
  std::optional<double> gap, eps, candidate_spacing;
  std::optional<int> m_min, samples, depth, per_excursion;
  std::optional<std::size_t> max_steps, probes;
  std::optional<unsigned> seed;
  std::optional<std::string> ts, K, D;
  // Output flags.
  std::optional<std::string> out_json, out_csv, out_log, out_svg, viewport, config_out;
  std::optional<double> canvas, stroke;
  std::vector<std::string> inputs;
  bool no_marker = false;
  std::string fixture_kind;

  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config, "JSON config (flags win)"); };
  auto add_map = [&](CLI::App* sub) {
    sub->add_option("--map", map_kind, "ikeda | identity | plugin | sphere_plugin");
    sub->add_option("--plugin", plugin, "shared library for plugin maps");
    sub->add_option("--symbol", symbol, "exported map function");
    sub->add_option("--pole", pole, "projection pole x,y,z for sphere_plugin");
    sub->add_option("--guess", guess, "fixed point initial guess x,y");
    sub->add_option("--tol", tol, "Newton residual tolerance");
    sub->add_option("--maxit", maxit, "Newton iteration limit");
  };
  auto add_style = [&](CLI::App* sub) {
    sub->add_option("--canvas", canvas, "SVG width in pixels");
    sub->add_option("--stroke", stroke, "SVG stroke width");
  };

  auto* fp = app.add_subcommand("fixed-point", "solve for the map's fixed point");
  add_config(fp);
  add_map(fp);
  fp->add_option("--json", out_json, "output JSON (default fixed_point.json)");

  auto* build = app.add_subcommand("build", "build the ray approximation");
  add_config(build);
  add_map(build);
  build->add_option("--generations", generations);
  build->add_option("--delta", delta, "max image edge length (absolute)");
  build->add_option("--delta-rel", delta_rel, "max edge length relative to the attractor bbox diameter");
  build->add_option("--angle-max", angle_max, "max turning angle (radians)");
  build->add_option("--cap", cap, "vertex budget per generation");
  build->add_option("--n0", n0, "seed samples");
  build->add_option("--construction", construction, "manifold | iterates");
  build->add_option("--out", out_csv, "ray CSV (default ray.csv)");
  build->add_option("--log", out_log, "build log JSON (default build_log.json)");

  auto* diag = app.add_subcommand("diagnose", "return profile and two-sided classification");
  add_config(diag);
  diag->add_option("input", inputs, "ray CSV")->required()->expected(1);
  diag->add_option("--gap", gap, "return gap (default 10% of the ray length)");
  diag->add_option("--eps", eps, "approach radius (default 5x local spacing)");
  diag->add_option("--m-min", m_min, "hits per side for TwoSided");
  diag->add_option("--samples", samples, "evenly spaced sample count (default 100)");
  diag->add_option("--t", ts, "explicit sample parameters t1,t2,...");
  diag->add_option("--K", K, "region JSON for the boundary margin check");
  diag->add_option("--json", out_json, "report JSON (default diagnostics.json)");

  auto* cant = app.add_subcommand("cantor", "finite-depth Cantor tree of disjoint regions");
  add_config(cant);
  add_style(cant);
  cant->add_option("input", inputs, "ray CSV")->required()->expected(1);
  cant->add_option("--depth", depth, "tree depth (>= 1, default 2)");
  cant->add_option("--K", K, "region JSON containing the ray origin");
  cant->add_option("--D", D, "region JSON off K");
  cant->add_option("--eps", eps);
  cant->add_option("--m-min", m_min);
  cant->add_option("--candidate-spacing", candidate_spacing);
  cant->add_option("--per-excursion", per_excursion);
  cant->add_option("--max-steps", max_steps);
  cant->add_option("--probes", probes, "disjointness probes per node");
  cant->add_option("--seed", seed);
  cant->add_option("--json", out_json, "tree JSON (default cantor.json)");
  cant->add_option("--svg", out_svg, "annotated SVG (default cantor.svg)");

  auto* rend = app.add_subcommand("render", "SVG figure of one or more rays");
  add_config(rend);
  add_style(rend);
  rend->add_option("inputs", inputs, "ray CSV files; one gives a layer per generation")->required();
  rend->add_option("--svg", out_svg, "output SVG (default ray.svg)");
  rend->add_option("--viewport", viewport, "xmin,ymin,xmax,ymax");
  rend->add_flag("--no-marker", no_marker, "omit the origin marker");

  auto* fix = app.add_subcommand("fixture", "write a synthetic test ray");
  fix->add_option("kind", fixture_kind, "snake | axis | semicircles")->required();
  fix->add_option("--out", out_csv, "ray CSV (default <kind>.csv)");
  fix->add_option("--config-out", config_out, "matching analysis config JSON");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "raylab 1.0\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: Usage: " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    json cfg = load_config(config);
    overlay(cfg, "map", "kind", map_kind);
    overlay(cfg, "map", "plugin", plugin);
    overlay(cfg, "map", "symbol", symbol);
    if (guess) cfg["map"]["guess"] = parse_list(*guess, 2, "--guess");
    if (pole) cfg["map"]["pole"] = parse_list(*pole, 3, "--pole");
    overlay(cfg, "map", "tol", tol);
    overlay(cfg, "map", "maxit", maxit);
    overlay(cfg, "refine", "generations", generations);
    overlay(cfg, "refine", "delta", delta);
    overlay(cfg, "refine", "delta_rel", delta_rel);
    overlay(cfg, "refine", "angle_max", angle_max);
    overlay(cfg, "refine", "cap", cap);
    overlay(cfg, "refine", "n0", n0);
    overlay(cfg, "refine", "construction", construction);
    overlay(cfg, "analysis", "gap", gap);
    overlay(cfg, "analysis", "eps", eps);
    overlay(cfg, "analysis", "m_min", m_min);
    overlay(cfg, "analysis", "samples", samples);
    overlay(cfg, "analysis", "depth", depth);
    overlay(cfg, "analysis", "per_excursion", per_excursion);
    overlay(cfg, "analysis", "candidate_spacing", candidate_spacing);
    overlay(cfg, "analysis", "max_steps", max_steps);
    overlay(cfg, "analysis", "probes", probes);
    overlay(cfg, "analysis", "seed", seed);
    if (ts) cfg["analysis"]["ts"] = parse_list(*ts, 0, "--t");
    if (K) cfg["analysis"]["K"] = parse_json_flag(*K, "--K");
    if (D) cfg["analysis"]["D"] = parse_json_flag(*D, "--D");
    overlay(cfg, "output", "json", out_json);
    overlay(cfg, "output", "csv", out_csv);
    overlay(cfg, "output", "log", out_log);
    overlay(cfg, "output", "svg", out_svg);
    if (canvas) cfg["output"]["svg_style"]["canvas_width"] = *canvas;
    if (stroke) cfg["output"]["svg_style"]["stroke_width"] = *stroke;

    if (*fp) return cmd_fixed_point(cfg, out);
    if (*build) return cmd_build(cfg, out, err);
    if (*diag) return cmd_diagnose(cfg, inputs.at(0), out);
    if (*cant) return cmd_cantor(cfg, inputs.at(0), out);
    if (*rend) return cmd_render(cfg, inputs, !no_marker, viewport, out);
    if (*fix) return cmd_fixture(fixture_kind, out_csv.value_or(fixture_kind + ".csv"), config_out, out);
  } catch (const UsageError& e) {
    err << "error: Usage: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    err << "error: Usage: config: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: Internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 1;
}

}  // namespace raylab::cli
