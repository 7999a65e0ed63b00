#pragma once

// Finite simply-connected patches of the universal cover of a square-tiled
// surface, with exact segment tracing between lifted cone points.
//
// Cells are lifted unit squares carrying their quotient square, an integer
// developing position, and four neighbor slots. The patch grows by layered
// star completion: layer d develops the full vertex link of every layer-d-1
// cell, walking the corner chain around each lifted vertex with the rotation
// rule
//     (A, BL) -> (left(A), BR) -> (down..., TR) -> ...
// creating missing sector cells until the chain wraps after exactly 4k
// sectors (k = quotient cone angle multiple), then gluing its ends and
// cascading cell merges through a union-find. Growing star-by-star rather
// than edge-by-edge keeps the patch metrically round: depth counts hops in
// the star metric, which is bi-Lipschitz to the flat metric, whereas plain
// edge BFS needs ~4k layers just to wrap one large cone point. The result is
// simply connected by construction and projects to the quotient as a local
// isomorphism.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cylinders.hpp"
#include "origami.hpp"

namespace vl::cover {

inline constexpr int kDefaultCellCap = 50000;

enum Side : int { R = 0, U = 1, L = 2, D = 3 };
inline int opposite(int side) { return side ^ 2; }

struct Cell {
  int quotient = 0;          // square id in the chart surface
  long long X = 0, Y = 0;    // developing position of the BL corner
  std::array<int, 4> nbr{-1, -1, -1, -1};
  int depth = 0;  // BFS layer
};

struct LiftedVertex {
  int id = 0;
  std::vector<std::pair<int, int>> flags;  // (cell, corner) in ccw chain order
  bool closed = false;   // link wraps; interior point of the patch
  int quotient_vertex = 0;
  int angle_multiple = 1;
  bool singular() const { return angle_multiple > 1; }
};

struct DevelopedPatch {
  origami::Surface chart;
  origami::CornerMap corners;  // of the chart
  std::vector<Cell> cells;
  int base = 0;  // cell id of the base lift
  int radius = 0;
  std::vector<LiftedVertex> vertices;
  std::vector<std::array<int, 4>> vtx_of;  // cell, corner -> lifted vertex id
  std::vector<int> boundary_dist;  // cell -> star-metric hops to the patch frontier
};

// chart_surface must already be the normalized marking for the direction of
// interest. base_square picks the quotient square lifted at the origin.
DevelopedPatch develop_patch(const origami::Surface& chart_surface, int radius,
                             int cell_cap = kDefaultCellCap, int base_square = 0);

// ------------------------------------------------------------------ tracing

enum class TraceOutcome { HitSingular, Truncated, TooLong };

struct TraceResult {
  TraceOutcome outcome = TraceOutcome::Truncated;
  int end_vertex = -1;      // lifted vertex id when HitSingular
  long long vx = 0, vy = 0; // integer displacement when HitSingular
  // Touch records, used by the window machinery to test whether the open
  // segment meets a closed strip union:
  std::vector<int> cells_entered;  // cells whose interior the segment crosses
  std::vector<std::pair<int, int>> edge_runs;  // flanking cells of edges run along (-1 = absent)
  std::vector<int> vertices_passed;            // regular lifted vertices crossed
};

// Shoots the ray from start_vertex into the sector given by flag
// (cell, corner); the corner quadrant must contain the oriented direction
// (p, q). Stops at the first singular lifted vertex, at the patch boundary,
// or when the displacement exceeds max_len (Euclidean, unsheared chart).
TraceResult trace_ray(const DevelopedPatch& patch, const std::pair<int, int>& flag,
                      long long p, long long q, double max_len);

// Start corner type for an oriented direction; flags of that corner at a
// vertex enumerate its sectors containing the direction.
int sector_corner(long long p, long long q);

struct SaddleConnectionLift {
  int id = 0;
  int from = 0, to = 0;      // lifted vertex ids, from < to after normalization
  long long vx = 0, vy = 0;  // displacement from 'from' to 'to'
  TraceResult touch;         // records of the from->to trace
};

// All saddle connections between closed singular lifted vertices with
// unsheared chart length <= max_len, found by per-sector ray tracing.
std::vector<SaddleConnectionLift> saddle_connections(const DevelopedPatch& patch,
                                                     double max_len);

// ------------------------------------------------------------ flat geodesics

struct FlatPath {
  double length = 0;
  std::vector<int> vertices;  // lifted vertex ids, from x to y
  bool reliable = true;       // certified equal to the universal-cover distance
};

// Shortest concatenation of saddle connections from x to y under the shear
// t (metric |h_t * vec|). The result is certified when it is shorter than
// margin(x) + margin(y) (any escaping path pays both margins) and the sc
// enumeration bound covers every segment a shorter path could use. On an
// uncertified result, throws SurfaceError("BoundaryContamination"), or
// returns it flagged unreliable when allow_unreliable is set.
FlatPath flat_distance(const DevelopedPatch& patch,
                       const std::vector<SaddleConnectionLift>& scs, int x, int y,
                       const Rat& t, double sc_max_len,
                       bool allow_unreliable = false);

// Margin: a lower bound for the flat length of any cone-point path from the
// vertex that escapes the patch ((star-metric frontier distance - 1)/sqrt 2).
double boundary_margin(const DevelopedPatch& patch, int vertex);

// ------------------------------------------------------- spines and strips

struct SpineComponent {
  int id = 0;
  std::vector<int> edges;     // cells whose lifted bottom edge lies on the spine
  std::vector<int> vertices;  // lifted vertex ids on the component
  bool truncated = false;     // touches an open vertex or the patch boundary
};

struct Strip {
  int id = 0;
  int cylinder = 0;           // quotient cylinder id
  std::vector<int> cells;
  int bottom_component = -1, top_component = -1;
  long long height = 0, circumference = 0;  // of the quotient cylinder
  bool truncated = false;  // clipped by the patch boundary
};

struct SpineLift {
  std::vector<SpineComponent> components;
  std::vector<Strip> strips;
  std::vector<int> component_of_edge;  // cell -> component id or -1
  std::vector<int> strip_of_cell;      // cell -> strip id (every cell is in one cylinder)
};

SpineLift lift_spines(const DevelopedPatch& patch, const cyl::Decomposition& dec);

struct TreeBall {
  int root = 0;
  std::vector<int> vertices;            // component ids, BFS order from root
  std::vector<int> depth_of;            // parallel to vertices
  std::vector<std::pair<int, int>> edges;  // (strip id, child component id)
  // Parallel to vertices: the component is clipped by the patch or has a
  // clipped incident strip, so its child list may be incomplete.
  std::vector<char> truncated;
};

// Throws SurfaceError("DepthExceedsPatch") when the patch cannot populate
// the requested layer at all.
TreeBall tree_ball(const SpineLift& lift, int root_component, int depth);

// d_tree between two components inside the lifted patch; -1 if not connected
// through complete strips.
int tree_distance(const SpineLift& lift, int a, int b);

// --------------------------------------------------------------- spine pi1

struct FreePresentation {
  int base_vertex = 0;           // quotient cone point id (dense spine index)
  int rank = 0;
  // Letters are 1..rank; negative = inverse. Edge e of the quotient spine
  // graph maps to letter_of_edge[e] (0 for spanning-tree edges).
  std::vector<int> letter_of_edge;
  // Peripheral words per cylinder boundary side, bottom read along +x and
  // top read along -x, so the two sides of one strip are mutually inverse.
  std::vector<std::vector<int>> peripheral_bottom, peripheral_top;  // per cylinder
};

FreePresentation spine_pi1(const cyl::Decomposition& dec, const cyl::SpineQuotient& spine,
                           int component);

}  // namespace vl::cover
