#pragma once

// Closest-point machinery onto thickened spines in a developed patch:
// windows (first-entry sets of minimizing geodesics into Theta^v), bridges
// (the saddle connection every projection from behind a neighboring spine
// must cross), and the strip-intersection graphs Xi^v.
//
// Theta^v is realized as the union of the patch cells of every strip
// adjacent to the spine component v; its boundary is the union of the far
// boundary lines of those strips, which lie on the neighboring components.

#include <optional>
#include <vector>

#include "cover.hpp"
#include "cylinders.hpp"

namespace vl::proj {

// Maximal runs of lifted spine edges between singular vertices: the lifted
// saddle connections of the direction, patch-wide.
struct LiftedSaddles {
  std::vector<int> sc_of_edge;          // cell -> lifted sc id, -1 off the spine
  std::vector<std::vector<int>> edges;  // per sc: edge cells in +x order
  std::vector<std::pair<int, int>> endpoints;  // lifted vertex ids, -1 when clipped
};

LiftedSaddles lifted_saddles(const cover::DevelopedPatch& patch,
                             const cover::SpineLift& lift);

// A point of the boundary of Theta^v: either a lifted cone point, or an
// interior point of a boundary edge (cell's bottom edge at the given offset).
struct EntryPoint {
  bool is_vertex = false;
  int vertex = -1;     // lifted vertex id (cone point) when is_vertex
  int edge_cell = -1;  // cell whose bottom edge carries the point, otherwise
  Rat offset = 0;      // in [0,1] along that edge
};

struct Window {
  int target = 0;  // spine component id v
  int source = 0;  // lifted vertex id x
  Rat shear;
  double distance = 0;
  bool on_spine = false;  // x in the closed spine of v: closest-cone-point variant
  std::vector<EntryPoint> points;
  // First-case dichotomy data (meaningless when on_spine):
  int common_sc = -1;  // lifted sc carrying every entry point, -1 = cone point case
  bool is_cone_point() const { return !on_spine && points.size() == 1 && points[0].is_vertex; }
};

// Shear-independent data for windows onto one component, reusable across
// sources: the strip region, vertex classes, lifted saddle connections, and
// which enumerated saddle connections avoid the closed region.
struct WindowContext {
  int v = 0;
  std::vector<char> in;   // cell -> in the strip region of v
  std::vector<int> cls;   // vertex -> 0 outside / 1 boundary / 2 spine
  LiftedSaddles ls;
  std::vector<char> sc_usable;  // per scs entry: interior avoids the region
};

WindowContext window_context(const cover::DevelopedPatch& patch,
                             const cover::SpineLift& lift,
                             const std::vector<cover::SaddleConnectionLift>& scs, int v);

// The window of the cone point x onto Theta^v under shear t. Minimizing
// geodesics are concatenations of saddle connections avoiding the closed
// region plus a final straight leg (a saddle connection into a boundary cone
// point, or a sheared-perpendicular drop onto a boundary line); all ties
// within 1e-9 are kept. Throws BoundaryContamination when the result cannot
// be certified against the patch margin, DichotomyViolation if the entry
// set is neither a cone point nor contained in one saddle connection.
Window window(const cover::DevelopedPatch& patch, const cover::SpineLift& lift,
              const std::vector<cover::SaddleConnectionLift>& scs,
              const WindowContext& ctx, int x, const Rat& t, double sc_max_len);

// Convenience overload building the context on the fly.
Window window(const cover::DevelopedPatch& patch, const cover::SpineLift& lift,
              const std::vector<cover::SaddleConnectionLift>& scs, int v, int x,
              const Rat& t, double sc_max_len);

// Complement components of the lifted spine theta^w: cells connected except
// across spine edges of w. Only cells at star-metric frontier distance
// >= core_dist are labeled (-1 otherwise): a clipped spine line does not
// separate the full finite disk, because the two sides rejoin around its
// truncated end, but every such detour passes next to the frontier, so the
// core is separated correctly. Returns cell -> component id.
std::vector<int> spine_complement(const cover::DevelopedPatch& patch,
                                  const cover::SpineLift& lift, int w,
                                  int core_dist = 2);

struct Bridge {
  int v = 0, w = 0;       // component ids, d_tree(v, w) = 1
  int strip = -1;         // the strip joining them
  int component_U = 0;    // complement component of theta^w on the far side
  bool degenerate = false;
  int vertex = -1;                // the cone point, when degenerate
  std::vector<int> edge_cells;    // the saddle connection's edges, otherwise
  int lifted_sc = -1;             // its id in lifted_saddles
};

// The bridge delta_U: the overlap of the boundary line of U with the far
// boundary line of the (v,w) strip, or the single cone point the spine-tree
// geodesic between the two lines arrives at.
Bridge bridge(const cover::DevelopedPatch& patch, const cover::SpineLift& lift,
              int v, int w, int U);

struct XiGraph {
  int center = 0;                 // spine component id v
  std::vector<int> strips;        // vertex order: strip ids adjacent to v
  std::vector<int> xi_of_strip;   // strip id -> vertex index, -1 otherwise
  struct Edge {
    int a = 0, b = 0;
    bool saddle = false;  // share a saddle connection (else a cone point only)
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj;
  // i^v: boundary cone points of Theta^v to the strip whose far line carries
  // them; -1 for vertices off the boundary.
  std::vector<int> i_of_vertex;
  int distance(int a, int b) const;  // graph metric, -1 if disconnected
};

XiGraph xi_graph(const cover::DevelopedPatch& patch, const cover::SpineLift& lift, int v);

}  // namespace vl::proj
