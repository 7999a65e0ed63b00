#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "core/cover.hpp"
#include "core/jsonio.hpp"
#include "core/projections.hpp"
#include "grid_oracle.hpp"

using namespace vl;
using namespace vl::origami;
using namespace vl::cover;
using namespace vl::proj;

namespace {

Surface load_fixture(const std::string& name) {
  const char* dir = std::getenv("VEECHLAB_FIXTURES");
  REQUIRE(dir != nullptr);
  std::ifstream in(std::string(dir) + "/" + name + ".json");
  REQUIRE(in.good());
  return jsonio::parse_surface(jsonio::json::parse(in));
}

// Genus-2 surface with two 4-pi cone points; its cover branches slowly
// enough that radius-4 patches leave real metric depth for projections.
Surface mild_surface() {
  Surface s;
  s.n = 4;
  s.h = {1, 2, 3, 0};
  s.v = {2, 1, 0, 3};
  s.name = "X4";
  validate(s);
  return s;
}

struct Setup {
  cyl::Decomposition dec;
  DevelopedPatch patch;
  SpineLift lift;
  std::vector<SaddleConnectionLift> scs;
  std::vector<int> comp_of_vertex;  // lifted vertex -> component id or -1

  Setup(const Surface& s, int radius, int cap, double sc_len)
      : dec(cyl::cylinder_decomposition(s, Direction{1, 0})),
        patch(develop_patch(dec.chart, radius, cap)),
        lift(lift_spines(patch, dec)),
        scs(saddle_connections(patch, sc_len)) {
    comp_of_vertex.assign(patch.vertices.size(), -1);
    for (const SpineComponent& c : lift.components)
      for (int v : c.vertices) comp_of_vertex[v] = c.id;
  }
};

const Setup& x4() {
  static Setup s(mild_surface(), 4, 400000, 2.5);
  return s;
}

const Setup& l3() {
  static Setup s(load_fixture("L3"), 4, 400000, 2.0);
  return s;
}

// Region and vertex classes recomputed independently of projections.cpp.
std::vector<char> region_of(const Setup& st, int v) {
  std::vector<char> in(st.patch.cells.size(), 0);
  for (const Strip& s : st.lift.strips)
    if (s.bottom_component == v || s.top_component == v)
      for (int c : s.cells) in[c] = 1;
  return in;
}

// 0 = outside, 1 = boundary, 2 = on the closed spine.
int vclass(const Setup& st, const std::vector<char>& in, int vertex) {
  int hit = 0;
  const auto& flags = st.patch.vertices[vertex].flags;
  for (const auto& [cell, corner] : flags) hit += in[cell] ? 1 : 0;
  return hit == 0 ? 0 : hit == static_cast<int>(flags.size()) ? 2 : 1;
}

bool is_boundary_edge(const Setup& st, const std::vector<char>& in, int cell) {
  if (st.lift.component_of_edge[cell] < 0) return false;
  const int below = st.patch.cells[cell].nbr[D];
  return (in[cell] != 0) != (below >= 0 && in[below] != 0);
}

int deepest_vertex(const DevelopedPatch& p) {
  int best = -1;
  double bm = -1;
  for (const LiftedVertex& v : p.vertices)
    if (v.closed && v.singular() && boundary_margin(p, v.id) > bm) {
      best = v.id;
      bm = boundary_margin(p, v.id);
    }
  REQUIRE(best >= 0);
  return best;
}

// Spine components at the given tree distance from the deepest vertex's
// component, keeping the window sources near the metric center of the patch.
std::vector<int> components_at(const Setup& st, int dist, size_t cap = 8) {
  const int home = st.comp_of_vertex[deepest_vertex(st.patch)];
  REQUIRE(home >= 0);
  std::vector<int> out;
  for (const SpineComponent& c : st.lift.components) {
    if (tree_distance(st.lift, home, c.id) == dist) out.push_back(c.id);
    if (out.size() == cap) break;
  }
  REQUIRE(!out.empty());
  return out;
}

int component_at(const Setup& st, int dist) { return components_at(st, dist).front(); }

// Grid-oracle distance from a cone point to the closed strip region of v.
double grid_region_distance(const Setup& st, oracle::GridOracle& grid, int x,
                            const std::vector<char>& in, double cutoff) {
  std::vector<float> d = grid.sssp(x, cutoff);
  double best = std::numeric_limits<double>::infinity();
  const int per = (oracle::kMesh + 1) * (oracle::kMesh + 1);
  for (int c = 0; c < static_cast<int>(st.patch.cells.size()); ++c) {
    if (!in[c]) continue;
    for (int k = 0; k < per; ++k)
      best = std::min(best, static_cast<double>(d[grid.uf.find(c * per + k)]));
  }
  return best;
}

}  // namespace

TEST_CASE("lifted saddle connections partition the spine edges") {
  for (const Setup* stp : {&l3(), &x4()}) {
    const Setup& st = *stp;
    LiftedSaddles ls = lifted_saddles(st.patch, st.lift);
    int spine_edges = 0, covered = 0;
    for (int c = 0; c < static_cast<int>(st.patch.cells.size()); ++c) {
      if (st.lift.component_of_edge[c] >= 0) ++spine_edges;
      if (ls.sc_of_edge[c] >= 0) ++covered;
      CHECK((st.lift.component_of_edge[c] >= 0) == (ls.sc_of_edge[c] >= 0));
    }
    CHECK(spine_edges == covered);
    size_t total = 0;
    for (int id = 0; id < static_cast<int>(ls.edges.size()); ++id) {
      const auto& run = ls.edges[id];
      total += run.size();
      for (size_t i = 0; i < run.size(); ++i) {
        CHECK(ls.sc_of_edge[run[i]] == id);
        if (i + 1 < run.size()) {
          CHECK(st.patch.cells[run[i]].nbr[R] == run[i + 1]);
          // Interior vertices of the run are regular.
          const int w = st.patch.vtx_of[run[i]][BR];
          CHECK(!st.patch.vertices[w].singular());
        }
      }
      auto [a, b] = ls.endpoints[id];
      if (a >= 0) {
        CHECK(st.patch.vertices[a].singular());
        CHECK(st.patch.vtx_of[run.front()][BL] == a);
      }
      if (b >= 0) {
        CHECK(st.patch.vertices[b].singular());
        CHECK(st.patch.vtx_of[run.back()][BR] == b);
      }
    }
    CHECK(total == static_cast<size_t>(spine_edges));
  }
}

TEST_CASE("windows from outside satisfy the dichotomy and land on the boundary") {
  const Setup& st = x4();
  int nontrivial = 0, cone_case = 0, saddle_case = 0;
  for (int v : components_at(st, 2)) {
    const std::vector<char> in = region_of(st, v);
    const WindowContext ctx = window_context(st.patch, st.lift, st.scs, v);
    for (const LiftedVertex& vx : st.patch.vertices) {
      if (!vx.closed || !vx.singular()) continue;
      if (vclass(st, in, vx.id) != 0) continue;
      if (boundary_margin(st.patch, vx.id) < 0.9) continue;
      for (const Rat& t : {Rat(0), Rat(1, 4)}) {
        Window w;
        try {
          w = window(st.patch, st.lift, st.scs, ctx, vx.id, t, 2.5);
        } catch (const SurfaceError& e) {
          CHECK(e.code == "BoundaryContamination");
          continue;
        }
        ++nontrivial;
        CHECK(!w.on_spine);
        CHECK(w.distance > 0.5);
        CHECK(!w.points.empty());
        for (const EntryPoint& pt : w.points) {
          if (pt.is_vertex) {
            CHECK(vclass(st, in, pt.vertex) == 1);
            CHECK(st.patch.vertices[pt.vertex].singular());
          } else {
            CHECK(is_boundary_edge(st, in, pt.edge_cell));
            CHECK(pt.offset >= 0);
            CHECK(pt.offset <= 1);
          }
        }
        if (w.is_cone_point())
          ++cone_case;
        else {
          CHECK(w.common_sc >= 0);
          ++saddle_case;
        }
      }
    }
  }
  CHECK(nontrivial >= 4);
  CHECK(cone_case + saddle_case == nontrivial);
}

TEST_CASE("window distances agree with the refined-grid oracle") {
  const Setup& st = x4();
  const int v = component_at(st, 2);
  const std::vector<char> in = region_of(st, v);
  const WindowContext ctx = window_context(st.patch, st.lift, st.scs, v);
  oracle::GridOracle grid(st.patch);
  int checked = 0;
  for (const LiftedVertex& vx : st.patch.vertices) {
    if (checked >= 3) break;
    if (!vx.closed || !vx.singular()) continue;
    if (vclass(st, in, vx.id) != 0) continue;
    if (boundary_margin(st.patch, vx.id) < 1.0) continue;
    Window w;
    try {
      w = window(st.patch, st.lift, st.scs, ctx, vx.id, Rat(0), 2.5);
    } catch (const SurfaceError&) {
      continue;
    }
    const double g = grid_region_distance(st, grid, vx.id, in, w.distance + 0.3);
    CHECK(g == doctest::Approx(w.distance).epsilon(0.06));
    ++checked;
  }
  CHECK(checked >= 1);
}

TEST_CASE("window distances respect the shear metric distortion") {
  const Setup& st = x4();
  const int v = component_at(st, 2);
  const std::vector<char> in = region_of(st, v);
  const WindowContext ctx = window_context(st.patch, st.lift, st.scs, v);
  const Rat t(1, 4);
  const double op = 1.25;
  int compared = 0;
  for (const LiftedVertex& vx : st.patch.vertices) {
    if (!vx.closed || !vx.singular()) continue;
    if (vclass(st, in, vx.id) != 0) continue;
    if (boundary_margin(st.patch, vx.id) < 1.2) continue;
    Window w0, wt;
    try {
      w0 = window(st.patch, st.lift, st.scs, ctx, vx.id, Rat(0), 2.5);
      wt = window(st.patch, st.lift, st.scs, ctx, vx.id, t, 2.5);
    } catch (const SurfaceError&) {
      continue;
    }
    // h_t distorts lengths by at most the operator norm 1 + |t|.
    CHECK(wt.distance <= w0.distance * op + 1e-9);
    CHECK(wt.distance >= w0.distance / op - 1e-9);
    ++compared;
  }
  CHECK(compared >= 1);
}

TEST_CASE("on-spine windows collect the closest boundary cone points") {
  const Setup& st = x4();
  const int x = deepest_vertex(st.patch);
  const int v = st.comp_of_vertex[x];
  REQUIRE(v >= 0);
  const std::vector<char> in = region_of(st, v);
  Window w = window(st.patch, st.lift, st.scs, v, x, Rat(0), 2.5);
  CHECK(w.on_spine);
  CHECK(!w.points.empty());
  CHECK(w.distance >= 1.0 - 1e-9);  // at least one strip height away
  CHECK(w.distance <= 2.0);
  for (const EntryPoint& pt : w.points) {
    CHECK(pt.is_vertex);
    CHECK(vclass(st, in, pt.vertex) == 1);
  }
  // Cross-check against the grid oracle: nearest boundary cone point.
  oracle::GridOracle grid(st.patch);
  std::vector<float> d = grid.sssp(x, w.distance + 0.3);
  double g = std::numeric_limits<double>::infinity();
  for (const LiftedVertex& vx : st.patch.vertices)
    if (vx.closed && vx.singular() && vclass(st, in, vx.id) == 1)
      g = std::min(g, static_cast<double>(d[grid.vertex_node(vx.id)]));
  CHECK(g == doctest::Approx(w.distance).epsilon(0.06));
}

TEST_CASE("boundary sources project to themselves") {
  const Setup& st = x4();
  const int v = component_at(st, 1);
  const std::vector<char> in = region_of(st, v);
  const WindowContext ctx = window_context(st.patch, st.lift, st.scs, v);
  int seen = 0;
  for (const LiftedVertex& vx : st.patch.vertices) {
    if (!vx.closed || !vx.singular() || vclass(st, in, vx.id) != 1) continue;
    if (boundary_margin(st.patch, vx.id) < 0.5) continue;
    Window w = window(st.patch, st.lift, st.scs, ctx, vx.id, Rat(0), 2.5);
    CHECK(w.is_cone_point());
    CHECK(w.points[0].vertex == vx.id);
    CHECK(w.distance == 0);
    ++seen;
  }
  CHECK(seen >= 2);
}

TEST_CASE("spine complements separate the core along every spine line") {
  for (const Setup* stp : {&l3(), &x4()}) {
    const Setup& st = *stp;
    const int w = component_at(st, 1);
    std::vector<int> comp = spine_complement(st.patch, st.lift, w);
    std::set<int> ids;
    int crossings = 0;
    for (int c = 0; c < static_cast<int>(st.patch.cells.size()); ++c) {
      if (comp[c] >= 0) ids.insert(comp[c]);
      if (st.lift.component_of_edge[c] != w) continue;
      const int below = st.patch.cells[c].nbr[D];
      if (below < 0 || comp[c] < 0 || comp[below] < 0) continue;
      CHECK(comp[c] != comp[below]);  // the line separates the core
      ++crossings;
    }
    CHECK(crossings > 0);
    CHECK(ids.size() >= 2);
    // Cells of one strip never straddle theta^w.
    for (const Strip& s : st.lift.strips) {
      std::set<int> strip_comps;
      for (int c : s.cells)
        if (comp[c] >= 0) strip_comps.insert(comp[c]);
      CHECK(strip_comps.size() <= 1);
    }
  }
}

TEST_CASE("bridges contain every window from behind the spine") {
  const Setup& st = x4();
  const int home = st.comp_of_vertex[deepest_vertex(st.patch)];
  int contained = 0, bridges = 0;
  for (int v : components_at(st, 2)) {
    // w between v and the center; windows from behind theta^w land in delta_U.
    int w = -1;
    for (const SpineComponent& c : st.lift.components)
      if (tree_distance(st.lift, v, c.id) == 1 && tree_distance(st.lift, home, c.id) == 1)
        w = c.id;
    REQUIRE(w >= 0);
    std::vector<int> comp = spine_complement(st.patch, st.lift, w);
    const std::vector<char> in = region_of(st, v);
    const WindowContext ctx = window_context(st.patch, st.lift, st.scs, v);
    std::set<int> tried_U;
    for (const LiftedVertex& vx : st.patch.vertices) {
      if (!vx.closed || !vx.singular()) continue;
      if (boundary_margin(st.patch, vx.id) < 0.9) continue;
      if (vclass(st, in, vx.id) != 0) continue;
      // The source must lie in a single complement component of theta^w.
      std::set<int> comps;
      for (const auto& [cell, corner] : vx.flags) comps.insert(comp[cell]);
      if (comps.size() != 1 || *comps.begin() < 0) continue;
      const int U = *comps.begin();
      Bridge br;
      try {
        br = bridge(st.patch, st.lift, v, w, U);
      } catch (const SurfaceError& e) {
        // The v-side component is rejected; other failures would be real.
        CHECK(e.code == "BadBridgeComponent");
        continue;
      }
      if (tried_U.insert(U).second) ++bridges;
      for (const Rat& t : {Rat(0), Rat(1, 4)}) {
        Window win;
        try {
          win = window(st.patch, st.lift, st.scs, ctx, vx.id, t, 2.5);
        } catch (const SurfaceError&) {
          continue;
        }
        std::set<int> delta_vertices;  // cone points of the closed bridge
        std::set<int> delta_edges(br.edge_cells.begin(), br.edge_cells.end());
        if (br.degenerate) {
          delta_vertices.insert(br.vertex);
        } else {
          for (int c : br.edge_cells) {
            delta_vertices.insert(st.patch.vtx_of[c][BL]);
            delta_vertices.insert(st.patch.vtx_of[c][BR]);
          }
        }
        for (const EntryPoint& pt : win.points) {
          if (pt.is_vertex) {
            CHECK(delta_vertices.count(pt.vertex) == 1);
          } else {
            CHECK(delta_edges.count(pt.edge_cell) == 1);
          }
        }
        ++contained;
      }
    }
  }
  CHECK(bridges >= 1);
  CHECK(contained >= 4);
}

TEST_CASE("bridge structure: a single possibly degenerate saddle connection") {
  const Setup& st = x4();
  const int v = component_at(st, 2);
  const int home = st.comp_of_vertex[deepest_vertex(st.patch)];
  int w = -1;
  for (const SpineComponent& c : st.lift.components)
    if (tree_distance(st.lift, v, c.id) == 1 && tree_distance(st.lift, home, c.id) == 1)
      w = c.id;
  REQUIRE(w >= 0);
  std::vector<int> comp = spine_complement(st.patch, st.lift, w);
  LiftedSaddles ls = lifted_saddles(st.patch, st.lift);
  std::set<int> checked_U;
  for (int c = 0; c < static_cast<int>(st.patch.cells.size()); ++c) {
    if (comp[c] < 0 || checked_U.count(comp[c])) continue;
    if (st.patch.boundary_dist[c] < 3) continue;  // stay clear of clipping
    checked_U.insert(comp[c]);
    Bridge br;
    try {
      br = bridge(st.patch, st.lift, v, w, comp[c]);
    } catch (const SurfaceError&) {
      continue;
    }
    CHECK(br.strip >= 0);
    const Strip& s = st.lift.strips[br.strip];
    CHECK(((s.bottom_component == v && s.top_component == w) ||
           (s.bottom_component == w && s.top_component == v)));
    if (br.degenerate) {
      CHECK(br.vertex >= 0);
      CHECK(st.patch.vertices[br.vertex].singular());
      CHECK(st.comp_of_vertex[br.vertex] == w);
    } else {
      CHECK(!br.edge_cells.empty());
      std::set<int> ids;
      for (int e : br.edge_cells) {
        CHECK(st.lift.component_of_edge[e] == w);
        ids.insert(ls.sc_of_edge[e]);
      }
      CHECK(ids.size() == 1);
      CHECK(br.lifted_sc == *ids.begin());
    }
  }
  CHECK(checked_U.size() >= 2);
}

TEST_CASE("xi graphs are connected and index the boundary cone points") {
  for (const Setup* stp : {&l3(), &x4()}) {
    const Setup& st = *stp;
    const int v = st.comp_of_vertex[deepest_vertex(st.patch)];
    XiGraph xi = xi_graph(st.patch, st.lift, v);
    CHECK(xi.center == v);
    CHECK(xi.strips.size() >= 2);
    for (size_t i = 0; i < xi.strips.size(); ++i) {
      CHECK(xi.xi_of_strip[xi.strips[i]] == static_cast<int>(i));
      const Strip& s = st.lift.strips[xi.strips[i]];
      CHECK((s.bottom_component == v || s.top_component == v));
    }
    // Connected: every strip of Theta^v reachable from the first.
    for (size_t i = 1; i < xi.strips.size(); ++i)
      CHECK(xi.distance(0, static_cast<int>(i)) >= 1);
    bool has_saddle = false;
    for (const auto& e : xi.edges) has_saddle = has_saddle || e.saddle;
    CHECK(has_saddle);
    // i^v covers exactly the boundary cone points.
    const std::vector<char> in = region_of(st, v);
    int mapped = 0;
    for (const LiftedVertex& vx : st.patch.vertices) {
      const bool on_boundary =
          vx.closed && vx.singular() && vclass(st, in, vx.id) == 1;
      CHECK((xi.i_of_vertex[vx.id] >= 0) == on_boundary);
      if (on_boundary) {
        ++mapped;
        // The carrying strip is adjacent to the point.
        const int strip = xi.strips[xi.i_of_vertex[vx.id]];
        bool touches = false;
        for (const auto& [cell, corner] : vx.flags)
          touches = touches || st.lift.strip_of_cell[cell] == strip;
        CHECK(touches);
      }
    }
    CHECK(mapped >= 2);
  }
}
