#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <tuple>
#include <vector>

#include "raylab/dynamics.hpp"
#include "raylab/geom2d.hpp"

namespace raylab {

enum class Construction {
  Manifold,  // local unstable segment on I's side, iterated (default)
  Iterates,  // the arc f^G[I] itself, traversed from the fixed point
};

struct RefineConfig {
  Construction construction = Construction::Manifold;
  double delta = 0.0;  // max image edge length; <= 0 selects delta_rel * attractor bbox diameter
  double delta_rel = 1e-3;
  double angle_max = 0.2;  // radians
  std::size_t cap = 2'000'000;
  int generations = 7;
  int n0 = 2;  // seed samples

  void validate(bool need_delta = true) const;
};

struct RefineStats {
  std::size_t vertices = 0;
  std::size_t splits = 0;
  std::size_t passes = 0;
  std::size_t angle_limited = 0;  // vertices left above angle_max because their edges hit the floor
  bool cap_reached = false;
};

struct AdaptiveArc {
  std::vector<double> u;    // preimage parameters, increasing
  std::vector<Point2> pts;  // images, pts[i] = eval(u[i])
  RefineStats stats;
};

// Bisects preimage intervals until every image edge is <= delta and every
// interior turn is <= angle_max (or the edge floor 1e-3*delta / the cap is hit).
AdaptiveArc refine_adaptive(const std::function<Point2(double)>& eval, std::vector<double> u,
                            const RefineConfig& cfg);

// Image of `arc` under `applications` compositions of the map, refined in the
// arc's own arc-length parameter. Throws Diverged.
AdaptiveArc iterate_arc_adaptive_ex(const PlanarMap& map, const Polyline& arc, const RefineConfig& cfg,
                                    int applications = 1);
Polyline iterate_arc_adaptive(const PlanarMap& map, const Polyline& arc, const RefineConfig& cfg,
                              int applications = 1);

// Seed arc ending at the fixed point. Ikeda: from (0, -2.285) to p.
// Other maps use map.seed_start or throw SeedNotConfigured.
Polyline seed_segment(const PlanarMap& map, const FixedPointResult& p, int n0);

struct RayApprox {
  Polyline poly;
  std::vector<int> gen;            // per vertex
  std::vector<double> seed_param;  // per vertex, parameter along the local seed from the origin; empty if unknown
  Point2 origin;
  int generations = 0;
  std::vector<double> gen_end;  // parameter where generation block k ends

  // Validates the structural invariants (gen non-decreasing, sizes agree).
  void validate() const;
  // [start, end] parameter range of generation block k.
  std::pair<double, double> block_range(int k) const;
};

// Builds a RayApprox from bare vertices and generation labels (CSV input).
RayApprox ray_from_vertices(std::vector<Point2> pts, std::vector<int> gen);

struct InjectivityReport {
  bool injective = true;
  double min_separation = INFINITY;  // over non-adjacent image edges
  std::size_t edge_i = 0, edge_j = 0;  // closest (or first violating) pair
  std::size_t image_vertices = 0;
};

// Minimum distance between non-adjacent edges, with the realizing pair.
std::tuple<double, std::size_t, std::size_t> min_separation(const Polyline& poly);

// One application of the map to `arc`; simple iff non-adjacent image edges stay
// more than tau_simple apart.
InjectivityReport injectivity_report(const PlanarMap& map, const Polyline& arc,
                                     std::optional<RefineConfig> cfg = std::nullopt);

struct GenerationLog {
  int k = 0;
  std::size_t vertices = 0;  // of the generation-k arc (ray prefix, or f^k[I] for Iterates)
  double length = 0.0;
  std::size_t block_vertices = 0;  // ray vertices labelled k
};

struct BuildLog {
  FixedPointResult fixed_point;
  double delta = 0.0;
  double angle_max = 0.0;
  std::size_t cap = 0;
  int generations = 0;
  int n0 = 0;
  Construction construction = Construction::Manifold;
  double unstable_eigenvalue = 0.0;
  Point2 unstable_direction;
  int lead_in = 0;          // Manifold: compositions taking the local segment to generation 0
  double local_length = 0;  // Manifold: length of the local unstable segment
  RefineStats stats;
  double tau_simple = 0.0;
  std::vector<GenerationLog> per_generation;
  SimplicityReport simplicity;
  InjectivityReport injectivity;  // of the map on the seed
  std::optional<std::pair<int, int>> violation_generations;
};

struct BuildResult {
  RayApprox ray;
  BuildLog log;
};

inline double tau_simple(const BBox& box) { return 1e-9 * box.diameter(); }

// Orbit cloud of the attractor. Seeds lie on the first 5% of `seed_from_origin`
// (inside the unstable manifold's basin); each is iterated `transient` steps
// before recording.
std::vector<Point2> attractor_cloud(const PlanarMap& map, const Polyline& seed_from_origin, std::size_t count,
                                    int transient = 100);

// Runs the construction and the simplicity check without throwing on a violation.
BuildResult build_ray_unchecked(const PlanarMap& map, const RefineConfig& cfg);
// Same; throws SimplicityViolation (edge pair and generations in the message).
BuildResult build_ray(const PlanarMap& map, const RefineConfig& cfg);

// Fraction of pts whose orbit is inside box from some time <= horizon through horizon.
double basin_check(const PlanarMap& map, const std::vector<Point2>& pts, int horizon, const PolygonRegion& box);

// Thread count for parallel evaluation: hardware concurrency capped by RAYLAB_THREADS.
unsigned worker_threads();

}  // namespace raylab
