#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raylab/geom2d.hpp"
#include "raylab/raybuild.hpp"

namespace raylab {

// ---------------------------------------------------------------------------
// Return distances

struct ReturnSample {
  double t = 0.0;
  double gap = 0.0;
  double return_dist = 0.0;
  double return_param = 0.0;  // parameter of the nearest tail point
};

struct ReturnProfile {
  std::vector<ReturnSample> samples;
  double max_return() const;
};

// Distance from the ray point at each t to the ray restricted to [t + gap, end].
// Throws TailTooShort.
ReturnProfile return_profile(const RayApprox& ray, std::span<const double> ts, double gap);
ReturnProfile return_profile(const Polyline& ray, std::span<const double> ts, double gap);

// ---------------------------------------------------------------------------
// Two-sided limit points

enum class Verdict { TwoSided, OneSided, Inconclusive };
std::string to_string(Verdict v);

struct TwoSidedWitness {
  double t = 0.0;
  double n = 0.0;
  double eps = 0.0;
  int left_hits = 0;   // tail passes on the left of the local prefix strand
  int right_hits = 0;
  int passes = 0;      // all tail passes within eps, including ones touching the strand
  Verdict verdict = Verdict::Inconclusive;
  int quality() const { return left_hits + right_hits; }
};

struct TwoSidedOptions {
  std::optional<double> n;    // prefix cutoff; default t + 10*eps
  std::optional<double> eps;  // default 5x the edge length at t
  int m_min = 3;
  const PolygonRegion* K = nullptr;  // margin check against its boundary when set
};

// Local vertex spacing at t (length of the edge containing t).
double local_spacing(const Polyline& ray, double t);

// Counts tail passes (maximal runs of parameters > n within eps of the point at
// t) and classifies each by its side of the prefix strand through t.
// Throws NearEndpoint when the point is within 2*eps of a prefix endpoint or of
// K's boundary; InvalidArgument when t < n < length fails.
TwoSidedWitness classify_two_sided(const Polyline& ray, const SpatialIndex& index, double t,
                                   const TwoSidedOptions& opt = {});
TwoSidedWitness classify_two_sided(const RayApprox& ray, double t, const TwoSidedOptions& opt = {});

// ---------------------------------------------------------------------------
// Minimal arcs

struct MinimalArc {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double through = 0.0;
  Polyline arc;
};

// Parameters along `poly` where it touches the boundary of K, sorted. Collinear
// overlaps contribute both ends. Restricted to [t0, t1].
std::vector<double> boundary_contacts(const Polyline& poly, const PolygonRegion& K, double t0, double t1);

// Traces the point at t backwards and forwards to K's boundary.
// Throws Precondition (t not strictly outside K, origin not in K) and NoReturn.
MinimalArc minimal_arc(const Polyline& ray, double t, const PolygonRegion& K);
MinimalArc minimal_arc(const RayApprox& ray, double t, const PolygonRegion& K);

enum class MinimalType { K1K2K3, K2K1K3, K2K3K1 };
std::string to_string(MinimalType m);

struct MinimalTypeResult {
  MinimalType type = MinimalType::K1K2K3;
  double s0 = 0.0, s1 = 0.0;  // sub-arc parameters along the input arc
  Polyline sub;
};

// Closed parameter intervals of `arc` lying in K (point contacts are
// degenerate intervals).
std::vector<std::pair<double, double>> contact_intervals(const Polyline& arc, const PolygonRegion& K);

// Earliest sub-arc that is minimal between two of the regions and meets the third.
// Returns nullopt, with a diagnostic in *why, when the arc misses a region.
std::optional<MinimalTypeResult> classify_minimal_type(const Polyline& arc, const PolygonRegion& K1,
                                                       const PolygonRegion& K2, const PolygonRegion& K3,
                                                       std::string* why = nullptr);

// ---------------------------------------------------------------------------
// Theta curves

struct ThetaCurve {
  std::vector<Polyline> arcs;  // oriented from a_region to b_region
  int inner_index = -1;
};

// Throws DegenerateTheta unless exactly one arc midpoint is enclosed by the
// other two arcs closed through straight connectors.
ThetaCurve theta_inner(std::span<const Polyline> arcs, const PolygonRegion& a_region, const PolygonRegion& b_region);

// ---------------------------------------------------------------------------
// Sides of K + alpha

enum class Side { U, V, Boundary, InsideK };
std::string to_string(Side s);

// The Jordan curve alpha + (boundary sub-arc of K away from K's interior).
class SidePartition {
 public:
  SidePartition(const PolygonRegion& K, const Polyline& alpha);
  Side classify(Point2 p) const;
  const Polyline& jordan() const { return jordan_; }
  const Polyline& alpha() const { return alpha_; }
  double tol() const { return tol_; }

 private:
  PolygonRegion K_;
  Polyline alpha_;
  Polyline jordan_;
  SpatialIndex alpha_index_;
  double tol_ = 0.0;
};

Side side_partition(const PolygonRegion& K, const MinimalArc& alpha, Point2 p);

// ---------------------------------------------------------------------------
// Cantor tree

struct SearchConfig {
  double candidate_spacing = 0.0;  // parameter stride for witness candidates; 0 = 1/20000 of the ray
  int per_excursion = 3;           // candidates tested per excursion before giving up on it
  int m_min = 3;
  std::optional<double> eps;
  std::size_t max_steps = 2'000'000;  // DFS budget
  std::size_t probes = 10'000;        // disjointness probes per internal node
  std::size_t arc_samples = 64;       // samples per minimal arc for condition (1)
  unsigned seed = 1;
};

// A region is an intersection of closed or open sides of minimal arcs.
struct RegionConstraint {
  enum class Kind { ClosedU, ClosedV, NotOpenU };
  Kind kind;
  int excursion;
};

struct CantorNode {
  std::string sigma;  // "" for the root
  std::vector<RegionConstraint> region;
  int x0 = -1, x1 = -1;  // excursion ids
  double t0 = 0.0, t1 = 0.0;  // witness parameters
  bool check1 = false, check2 = false, check3 = false;
  bool connects = false;  // some ray portion in the region meets both K and D
  std::size_t check1_samples = 0, check3_samples = 0;
};

struct Excursion {
  MinimalArc alpha;
  TwoSidedWitness witness;  // best witness found on this excursion
  bool two_sided = false;
  bool in_D = false;
};

struct DisjointnessRecord {
  std::string sigma;
  std::size_t probes = 0;
  std::size_t in_child0 = 0, in_child1 = 0, in_both = 0;
};

struct SearchStats {
  std::size_t candidates = 0;
  std::size_t excursions = 0;
  std::size_t two_sided = 0;
  std::size_t steps = 0;
  std::size_t backtracks = 0;
};

struct CantorTree {
  int depth = 0;
  std::vector<Excursion> excursions;
  std::vector<int> a_d;  // a, b, c, d excursion ids of the base step
  std::vector<CantorNode> nodes;  // root first, then breadth-first
  std::vector<DisjointnessRecord> disjointness;
  SearchStats stats;
  bool clean() const;
  std::size_t leaf_count() const;
};

// Throws Precondition (bad K/D/origin/depth) and WitnessNotFound.
CantorTree cantor_tree(const RayApprox& ray, const PolygonRegion& K, const PolygonRegion& D, int depth,
                       const SearchConfig& search = {});
CantorTree cantor_tree(const Polyline& ray, const PolygonRegion& K, const PolygonRegion& D, int depth,
                       const SearchConfig& search = {});

// Membership of p in the region described by constraints over the given partitions.
bool region_contains(std::span<const RegionConstraint> region, const std::vector<SidePartition>& parts, Point2 p,
                     bool strict);

}  // namespace raylab
