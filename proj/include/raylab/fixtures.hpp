#pragma once

#include <vector>

#include "raylab/geom2d.hpp"

namespace raylab::fixtures {

// Nested hairpin excursions out of a rectangle K, joined by nested connectors
// inside K, followed by a spiral tail of offset laps around the whole core.
// Every core strand outside K gets `laps` tail passes on each side.
struct CantorSnakeParams {
  int hairpins = 20;
  double gap = 0.1;           // spacing between neighbouring strands
  int laps = 6;
  double max_offset = 0.036;  // offset of the last lap
  double core_spacing = 0.01;
  double tail_spacing = 0.02;
};

struct CantorSnake {
  Polyline ray;
  PolygonRegion K;
  PolygonRegion D;
  double core_length = 0.0;          // parameter where the tail starts
  std::vector<double> hairpin_mid;   // parameter of each hairpin's outer vertical midpoint
};

CantorSnake cantor_snake(const CantorSnakeParams& p = {});

// Axis segment from (-1,0) to (1,0), then passes at heights +-2^-k (k = 1..passes)
// alternating in pairs above and below, joined by nested turns around both ends.
struct AxisSnake {
  Polyline ray;
  double axis_end = 0.0;             // parameter of (1, 0)
  std::vector<double> pass_start;    // parameter where pass k begins (index k-1)
};

AxisSnake axis_snake(int passes = 12, double spacing = 0.01);

// Semicircle spiral converging to the unit circle from inside; later laps
// approach earlier ones only from outside.
Polyline nested_semicircles(int laps = 12, int samples_per_half = 200);

}  // namespace raylab::fixtures
