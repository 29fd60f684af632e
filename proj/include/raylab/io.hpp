#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "raylab/entwine.hpp"
#include "raylab/raybuild.hpp"

namespace raylab::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Ray CSV: header "t,x,y,gen", LF line endings, %.17g floats.

void write_ray_csv(std::ostream& out, const RayApprox& ray);
void write_ray_csv(const std::string& path, const RayApprox& ray);
// Throws MalformedInput naming the offending line.
RayApprox read_ray_csv(std::istream& in, const std::string& source = "<stream>");
RayApprox read_ray_csv(const std::string& path);

// ---------------------------------------------------------------------------
// JSON reports

json to_json(Point2 p);
json to_json(const FixedPointResult& r);
json to_json(const BuildLog& log);
json to_json(const ReturnProfile& p);
json to_json(const TwoSidedWitness& w);
json to_json(const CantorTree& tree);

// Region spec: {"rect": [xmin, ymin, xmax, ymax]} | {"disc": [cx, cy, r], "segments": n}
// | {"polygon": [[x, y], ...]}.
PolygonRegion region_from_json(const json& j);
json region_to_json(const PolygonRegion& r);

// Writes with 2-space indent and a trailing newline.
void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

// ---------------------------------------------------------------------------
// SVG

// Okabe-Ito colours; generation k uses entry k mod 8.
extern const std::vector<std::string> kDefaultPalette;

struct SvgStyle {
  double canvas_width = 1000.0;  // pixels; height follows the viewport aspect
  double stroke_width = 0.6;
  double margin = 0.05;  // fraction of the larger viewport side, on every side
  std::vector<std::string> palette = kDefaultPalette;
  std::string background = "#ffffff";
};

struct Layer {
  std::vector<Point2> pts;
  std::string color;
  double width = 0.0;  // 0 = style default
  bool closed = false;
  std::string id;
};

struct Annotation {
  Point2 at;
  std::string label;
  std::string color = "#000000";
};

struct FigureSpec {
  std::vector<Layer> layers;
  BBox viewport;  // empty = fit to the layers and annotations
  std::vector<Annotation> annotations;
};

// Deterministic SVG 1.1 text. Uniform scale, y axis up. Throws InvalidArgument
// for a viewport of zero width or height.
std::string render_svg(const FigureSpec& fig, const SvgStyle& style = {});

// One layer per generation block of the ray, plus an optional fixed-point marker.
FigureSpec ray_figure(const RayApprox& ray, const SvgStyle& style, std::optional<Point2> marker = std::nullopt);

void write_text(const std::string& path, const std::string& text);

}  // namespace raylab::io
