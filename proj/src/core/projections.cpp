#include "projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace vl::proj {

using cover::Cell;
using cover::DevelopedPatch;
using cover::LiftedVertex;
using cover::SpineLift;
using origami::SurfaceError;
using origami::BL;
using origami::BR;
using origami::TL;
using origami::TR;

namespace {

constexpr double kTieTol = 1e-9;

// ----------------------------------------------------------- region helpers

// Cells of Theta^v: every strip adjacent to the component.
std::vector<char> region_cells(const DevelopedPatch& patch, const SpineLift& lift, int v) {
  std::vector<char> in(patch.cells.size(), 0);
  for (const cover::Strip& s : lift.strips) {
    if (s.bottom_component != v && s.top_component != v) continue;
    for (int c : s.cells) in[c] = 1;
  }
  return in;
}

enum VClass { kOut = 0, kBoundary = 1, kSpine = 2 };

// A vertex is on the closed spine of v when every sector cell lies in the
// region, on the boundary when some do, outside otherwise.
std::vector<int> classify_vertices(const DevelopedPatch& patch, const std::vector<char>& in) {
  std::vector<int> cls(patch.vertices.size(), kOut);
  for (const LiftedVertex& vx : patch.vertices) {
    int hit = 0;
    for (const auto& [cell, corner] : vx.flags) hit += in[cell] ? 1 : 0;
    cls[vx.id] = hit == 0 ? kOut
                 : hit == static_cast<int>(vx.flags.size()) ? kSpine
                                                            : kBoundary;
  }
  return cls;
}

// Bottom edge of the cell lies on the boundary of the region: spine edge with
// the region on exactly one side.
bool boundary_edge(const DevelopedPatch& patch, const SpineLift& lift,
                   const std::vector<char>& in, int cell) {
  if (lift.component_of_edge[cell] < 0) return false;
  const int below = patch.cells[cell].nbr[cover::D];
  const bool a = in[cell] != 0;
  const bool b = below >= 0 && in[below] != 0;
  return a != b;
}

double sheared_len(const Rat& t, const Rat& dx, const Rat& dy) {
  const double hx = to_double(dx) + to_double(t) * to_double(dy);
  const double hy = to_double(dy);
  return std::sqrt(hx * hx + hy * hy);
}

// ------------------------------------------------------------- foot tracing

constexpr std::pair<int, int> corner_coords(int corner) {
  switch (corner) {
    case BL: return {0, 0};
    case BR: return {1, 0};
    case TR: return {1, 1};
    default: return {0, 1};
  }
}

int corner_from(const Rat& x, const Rat& y) {
  if (x == 0) return y == 0 ? BL : TL;
  return y == 0 ? BR : TR;
}

struct Foot {
  bool found = false;
  double length = 0;  // sheared length of the leg
  EntryPoint point;
};

// Entry point at a regular boundary vertex: locate a boundary edge having it
// as an endpoint; the point is interior to that edge's saddle connection.
EntryPoint boundary_vertex_point(const DevelopedPatch& patch, const SpineLift& lift,
                                 const std::vector<char>& in, int vertex) {
  for (const auto& [cell, corner] : patch.vertices[vertex].flags) {
    if (corner == BL && boundary_edge(patch, lift, in, cell)) {
      EntryPoint pt;
      pt.edge_cell = cell;
      pt.offset = 0;
      return pt;
    }
  }
  for (const auto& [cell, corner] : patch.vertices[vertex].flags) {
    if (corner == BR && boundary_edge(patch, lift, in, cell)) {
      EntryPoint pt;
      pt.edge_cell = cell;
      pt.offset = 1;
      return pt;
    }
  }
  throw SurfaceError("Internal", "boundary vertex carries no boundary edge");
}

// Shoots the sheared-perpendicular ray from a cone point sector until it
// first meets the closed region; exact arithmetic, mirroring trace_ray.
Foot trace_foot(const DevelopedPatch& patch, const SpineLift& lift,
                const std::vector<char>& in, const std::vector<int>& cls,
                const std::pair<int, int>& flag, long long p, long long q,
                const Rat& t, double max_len) {
  Foot none;
  int cell = flag.first;
  auto [cx, cy] = corner_coords(flag.second);
  Rat x = cx, y = cy;
  Rat dx = 0, dy = 0;
  const double cap = max_len * (1 + 1e-12) + 1e-12;
  const long long guard = 8LL * (std::llabs(p) + std::llabs(q)) *
                              static_cast<long long>(patch.cells.size()) +
                          64;
  for (long long it = 0; it < guard; ++it) {
    const Rat INF = Rat(std::numeric_limits<long long>::max());
    Rat tx = p > 0 ? (Rat(1) - x) / p : p < 0 ? x / Rat(-p) : INF;
    Rat ty = q > 0 ? (Rat(1) - y) / q : q < 0 ? y / Rat(-q) : INF;
    Rat step = tx < ty ? tx : ty;
    Rat nx = x + step * p, ny = y + step * q;
    dx += step * p;
    dy += step * q;
    if (sheared_len(t, dx, dy) > cap) return none;
    const bool on_x = (nx == 0 || nx == 1), on_y = (ny == 0 || ny == 1);
    if (on_x && on_y) {  // vertex hit
      const int corner = corner_from(nx, ny);
      const int W = patch.vtx_of[cell][corner];
      const LiftedVertex& vx = patch.vertices[W];
      if (!vx.closed) return none;  // clipped; margins certify irrelevance
      if (cls[W] == kSpine)
        throw SurfaceError("Internal", "foot trace reached the spine before the boundary");
      if (cls[W] == kBoundary) {
        if (vx.singular()) return none;  // an sc leg; the graph search owns it
        Foot f;
        f.found = true;
        f.length = sheared_len(t, dx, dy);
        f.point = boundary_vertex_point(patch, lift, in, W);
        return f;
      }
      if (vx.singular()) return none;  // blocked; paths restart from there
      // Straight through a regular vertex.
      if (p != 0 && q != 0) {
        const int sh = p > 0 ? cover::R : cover::L;
        const int sv = q > 0 ? cover::U : cover::D;
        int c1 = patch.cells[cell].nbr[sh];
        int c2 = c1 < 0 ? -1 : patch.cells[c1].nbr[sv];
        if (c2 < 0) return none;
        cell = c2;
        x = p > 0 ? 0 : 1;
        y = q > 0 ? 0 : 1;
      } else {
        const int side = q > 0 ? cover::U : cover::D;
        int n = patch.cells[cell].nbr[side];
        if (n < 0) return none;
        cell = n;
        y = q > 0 ? 0 : 1;
      }
      continue;
    }
    if (on_x) {  // vertical edge crossing
      const int side = nx == 1 ? cover::R : cover::L;
      int n = patch.cells[cell].nbr[side];
      if (n < 0) return none;
      if (in[n])
        throw SurfaceError("BoundaryContamination",
                           "strip region entered through a vertical edge");
      cell = n;
      x = nx == 1 ? 0 : 1;
      y = ny;
      continue;
    }
    {  // horizontal edge crossing
      const int side = ny == 1 ? cover::U : cover::D;
      int n = patch.cells[cell].nbr[side];
      if (n < 0) return none;
      if (in[n]) {  // first touch: the crossed edge lies on a boundary line
        Foot f;
        f.found = true;
        f.length = sheared_len(t, dx, dy);
        f.point.edge_cell = q > 0 ? n : cell;
        f.point.offset = nx;
        return f;
      }
      cell = n;
      y = ny == 1 ? 0 : 1;
      x = nx;
      continue;
    }
  }
  throw SurfaceError("Internal", "foot trace failed to terminate");
}

// Saddle connections carried by a boundary cone point's incident boundary
// edges: the candidates for the dichotomy's single saddle connection.
std::set<int> vertex_boundary_saddles(const DevelopedPatch& patch, const SpineLift& lift,
                                      const std::vector<char>& in,
                                      const LiftedSaddles& ls, int vertex) {
  std::set<int> out;
  for (const auto& [cell, corner] : patch.vertices[vertex].flags) {
    if (corner != BL && corner != BR) continue;
    if (!boundary_edge(patch, lift, in, cell)) continue;
    if (ls.sc_of_edge[cell] >= 0) out.insert(ls.sc_of_edge[cell]);
  }
  return out;
}

}  // namespace

// --------------------------------------------------------- lifted saddles

LiftedSaddles lifted_saddles(const DevelopedPatch& patch, const SpineLift& lift) {
  LiftedSaddles out;
  const int N = static_cast<int>(patch.cells.size());
  out.sc_of_edge.assign(N, -1);
  auto regular_through = [&](int vertex) {
    const LiftedVertex& vx = patch.vertices[vertex];
    return vx.closed && !vx.singular();
  };
  for (int c = 0; c < N; ++c) {
    if (lift.component_of_edge[c] < 0 || out.sc_of_edge[c] >= 0) continue;
    // Rewind to the left end of the run.
    int cur = c;
    for (int it = 0; it <= N; ++it) {
      const int vl = patch.vtx_of[cur][BL];
      if (!regular_through(vl)) break;
      const int l = patch.cells[cur].nbr[cover::L];
      if (l < 0 || lift.component_of_edge[l] < 0) break;
      cur = l;
      if (it == N) throw SurfaceError("Internal", "spine run fails to terminate");
    }
    const int id = static_cast<int>(out.edges.size());
    std::vector<int> run;
    const int vstart = patch.vtx_of[cur][BL];
    int left = regular_through(vstart) ? -1
               : patch.vertices[vstart].closed ? vstart
                                               : -1;
    int right = -1;
    for (int it = 0; it <= N; ++it) {
      run.push_back(cur);
      out.sc_of_edge[cur] = id;
      const int vr = patch.vtx_of[cur][BR];
      if (!regular_through(vr)) {
        right = patch.vertices[vr].closed ? vr : -1;
        break;
      }
      const int r = patch.cells[cur].nbr[cover::R];
      if (r < 0 || lift.component_of_edge[r] < 0) break;
      cur = r;
      if (it == N) throw SurfaceError("Internal", "spine run fails to terminate");
    }
    out.edges.push_back(std::move(run));
    out.endpoints.emplace_back(left, right);
  }
  return out;
}

// ----------------------------------------------------------------- windows

WindowContext window_context(const DevelopedPatch& patch, const SpineLift& lift,
                             const std::vector<cover::SaddleConnectionLift>& scs, int v) {
  if (v < 0 || v >= static_cast<int>(lift.components.size()))
    throw SurfaceError("BadComponent", "no such spine component");
  WindowContext ctx;
  ctx.v = v;
  ctx.in = region_cells(patch, lift, v);
  ctx.cls = classify_vertices(patch, ctx.in);
  ctx.ls = lifted_saddles(patch, lift);
  ctx.sc_usable.assign(scs.size(), 0);
  for (size_t i = 0; i < scs.size(); ++i) {
    const cover::SaddleConnectionLift& sc = scs[i];
    bool touches = false;
    for (int c : sc.touch.cells_entered) touches = touches || ctx.in[c];
    for (auto [a, b] : sc.touch.edge_runs)
      touches = touches || (a >= 0 && ctx.in[a]) || (b >= 0 && ctx.in[b]);
    for (int w : sc.touch.vertices_passed) touches = touches || ctx.cls[w] != kOut;
    ctx.sc_usable[i] = touches ? 0 : 1;
  }
  return ctx;
}

Window window(const DevelopedPatch& patch, const SpineLift& lift,
              const std::vector<cover::SaddleConnectionLift>& scs, int v, int x,
              const Rat& t, double sc_max_len) {
  return window(patch, lift, scs, window_context(patch, lift, scs, v), x, t, sc_max_len);
}

Window window(const DevelopedPatch& patch, const SpineLift& lift,
              const std::vector<cover::SaddleConnectionLift>& scs,
              const WindowContext& ctx, int x, const Rat& t, double sc_max_len) {
  const int v = ctx.v;
  if (x < 0 || x >= static_cast<int>(patch.vertices.size()) ||
      !patch.vertices[x].closed || !patch.vertices[x].singular())
    throw SurfaceError("BadVertex", "window source must be a closed cone point");

  Window win;
  win.target = v;
  win.source = x;
  win.shear = t;

  const std::vector<char>& in = ctx.in;
  const std::vector<int>& cls = ctx.cls;
  const LiftedSaddles& ls = ctx.ls;
  const double shear_op = 1.0 + std::abs(to_double(t));
  const double budget = cover::boundary_margin(patch, x) / shear_op;

  if (cls[x] == kBoundary) {  // already on the boundary of Theta^v
    EntryPoint pt;
    pt.is_vertex = true;
    pt.vertex = x;
    win.points.push_back(pt);
    return win;
  }

  if (cls[x] == kSpine) {
    // x lies on the closed spine itself: the window is the set of closest
    // boundary cone points, measured over unrestricted cone-point paths.
    win.on_spine = true;
    std::vector<double> dist(patch.vertices.size(), std::numeric_limits<double>::infinity());
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    dist[x] = 0;
    pq.emplace(0.0, x);
    std::vector<std::vector<std::pair<int, double>>> adj(patch.vertices.size());
    for (const cover::SaddleConnectionLift& sc : scs) {
      const double w = cyl::sheared_length(t, sc.vx, sc.vy);
      adj[sc.from].emplace_back(sc.to, w);
      adj[sc.to].emplace_back(sc.from, w);
    }
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (auto [w, l] : adj[u])
        if (dist[u] + l < dist[w]) {
          dist[w] = dist[u] + l;
          pq.emplace(dist[w], w);
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const LiftedVertex& vx : patch.vertices)
      if (vx.closed && vx.singular() && cls[vx.id] == kBoundary)
        best = std::min(best, dist[vx.id]);
    if (!(best < budget) || best * shear_op > sc_max_len + kTieTol)
      throw SurfaceError("BoundaryContamination",
                         "window cannot be certified inside the patch");
    for (const LiftedVertex& vx : patch.vertices)
      if (vx.closed && vx.singular() && cls[vx.id] == kBoundary &&
          dist[vx.id] <= best + kTieTol) {
        EntryPoint pt;
        pt.is_vertex = true;
        pt.vertex = vx.id;
        win.points.push_back(pt);
      }
    win.distance = best;
    return win;
  }

  // Generic case: Dijkstra over saddle connections avoiding the closed
  // region, plus terminal legs (boundary cone points and perpendicular feet).
  std::vector<std::vector<std::pair<int, double>>> adj(patch.vertices.size());
  std::vector<std::tuple<int, int, double>> terminals;  // (from, boundary vertex, weight)
  for (size_t i = 0; i < scs.size(); ++i) {
    if (!ctx.sc_usable[i]) continue;
    const cover::SaddleConnectionLift& sc = scs[i];
    const int cf = cls[sc.from], ct = cls[sc.to];
    if (cf == kSpine || ct == kSpine) continue;
    const double w = cyl::sheared_length(t, sc.vx, sc.vy);
    if (cf == kOut && ct == kOut) {
      adj[sc.from].emplace_back(sc.to, w);
      adj[sc.to].emplace_back(sc.from, w);
    } else if (cf == kOut && ct == kBoundary) {
      terminals.emplace_back(sc.from, sc.to, w);
    } else if (cf == kBoundary && ct == kOut) {
      terminals.emplace_back(sc.to, sc.from, w);
    }
  }
  std::vector<double> dist(patch.vertices.size(), std::numeric_limits<double>::infinity());
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  dist[x] = 0;
  pq.emplace(0.0, x);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u] || d > budget) continue;
    for (auto [w, l] : adj[u])
      if (dist[u] + l < dist[w]) {
        dist[w] = dist[u] + l;
        pq.emplace(dist[w], w);
      }
  }

  struct Candidate {
    double total;
    EntryPoint point;
  };
  std::vector<Candidate> cands;
  double best = std::numeric_limits<double>::infinity();
  for (auto [u, z, w] : terminals) {
    if (dist[u] + w > budget + kTieTol) continue;
    EntryPoint pt;
    pt.is_vertex = true;
    pt.vertex = z;
    cands.push_back({dist[u] + w, pt});
    best = std::min(best, dist[u] + w);
  }
  // Perpendicular drops from reachable outside cone points (x included),
  // tried in increasing Dijkstra order so the running best caps each leg.
  long long fp = -static_cast<long long>(numerator(t));
  long long fq = static_cast<long long>(denominator(t));
  const long long g = std::gcd(std::llabs(fp), fq);
  fp /= g;
  fq /= g;
  std::vector<int> order;
  for (const LiftedVertex& vx : patch.vertices)
    if (vx.closed && vx.singular() && cls[vx.id] == kOut && dist[vx.id] <= budget)
      order.push_back(vx.id);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return dist[a] < dist[b]; });
  for (int uid : order) {
    const double cap = std::min(best, budget) + kTieTol - dist[uid];
    if (cap <= 0) break;
    for (auto [p, q] : {std::make_pair(fp, fq), std::make_pair(-fp, -fq)}) {
      const int corner = cover::sector_corner(p, q);
      for (const auto& fl : patch.vertices[uid].flags) {
        if (fl.second != corner) continue;
        Foot f = trace_foot(patch, lift, in, cls, fl, p, q, t, cap);
        if (f.found) {
          cands.push_back({dist[uid] + f.length, f.point});
          best = std::min(best, dist[uid] + f.length);
        }
      }
    }
  }
  if (!(best < budget) || best * shear_op > sc_max_len + kTieTol)
    throw SurfaceError("BoundaryContamination",
                       "window cannot be certified inside the patch");
  std::set<std::tuple<bool, int, long long, long long>> seen;
  for (const Candidate& c : cands) {
    if (c.total > best + kTieTol) continue;
    auto key = std::make_tuple(c.point.is_vertex,
                               c.point.is_vertex ? c.point.vertex : c.point.edge_cell,
                               static_cast<long long>(numerator(c.point.offset)),
                               static_cast<long long>(denominator(c.point.offset)));
    if (!seen.insert(key).second) continue;
    win.points.push_back(c.point);
  }
  win.distance = best;

  // Dichotomy: a single cone point, or every entry point on one saddle
  // connection of the boundary.
  if (win.points.size() == 1 && win.points[0].is_vertex) return win;
  std::set<int> common;
  bool first = true;
  for (const EntryPoint& pt : win.points) {
    std::set<int> own;
    if (pt.is_vertex) {
      own = vertex_boundary_saddles(patch, lift, in, ls, pt.vertex);
    } else {
      if (ls.sc_of_edge[pt.edge_cell] < 0)
        throw SurfaceError("Internal", "entry edge off the lifted spine");
      own.insert(ls.sc_of_edge[pt.edge_cell]);
    }
    if (first) {
      common = std::move(own);
      first = false;
    } else {
      std::set<int> next;
      std::set_intersection(common.begin(), common.end(), own.begin(), own.end(),
                            std::inserter(next, next.begin()));
      common = std::move(next);
    }
  }
  if (common.empty())
    throw SurfaceError("DichotomyViolation",
                       "window entry points span more than one saddle connection");
  win.common_sc = *common.begin();
  return win;
}

// ------------------------------------------------------- spine complement

std::vector<int> spine_complement(const DevelopedPatch& patch, const SpineLift& lift, int w,
                                  int core_dist) {
  const int N = static_cast<int>(patch.cells.size());
  std::vector<int> parent(N);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto core = [&](int c) { return patch.boundary_dist[c] >= core_dist; };
  for (int c = 0; c < N; ++c) {
    if (!core(c)) continue;
    for (int side : {static_cast<int>(cover::R), static_cast<int>(cover::U)}) {
      const int n = patch.cells[c].nbr[side];
      if (n < 0 || !core(n)) continue;
      // Crossing the bottom edge of the upper cell is blocked on theta^w.
      if (side == cover::U && lift.component_of_edge[n] == w) continue;
      parent[find(c)] = find(n);
    }
  }
  std::vector<int> comp(N, -1);
  std::map<int, int> dense;
  for (int c = 0; c < N; ++c) {
    if (!core(c)) continue;
    auto [it, fresh] = dense.emplace(find(c), static_cast<int>(dense.size()));
    comp[c] = it->second;
  }
  return comp;
}

// ----------------------------------------------------------------- bridges

Bridge bridge(const DevelopedPatch& patch, const SpineLift& lift, int v, int w, int U) {
  Bridge br;
  br.v = v;
  br.w = w;
  br.component_U = U;
  for (const cover::Strip& s : lift.strips) {
    const bool joins = (s.bottom_component == v && s.top_component == w) ||
                       (s.bottom_component == w && s.top_component == v);
    if (joins) {
      br.strip = s.id;
      break;
    }
  }
  if (br.strip < 0)
    throw SurfaceError("BadComponent", "components are not strip neighbors");
  const cover::Strip& strip = lift.strips[br.strip];

  const std::vector<int> comp = spine_complement(patch, lift, w);
  for (int c : strip.cells)
    if (comp[c] == U)
      throw SurfaceError("BadBridgeComponent",
                         "component contains the joining strip");

  const int N = static_cast<int>(patch.cells.size());
  std::vector<char> in_strip(N, 0);
  for (int c : strip.cells) in_strip[c] = 1;
  // Far boundary line of the strip, on theta^w; and the boundary line of U.
  std::vector<char> is_far(N, 0), is_gu(N, 0);
  std::vector<int> far_edges, gu_edges;
  for (int c = 0; c < N; ++c) {
    if (lift.component_of_edge[c] != w) continue;
    const int below = patch.cells[c].nbr[cover::D];
    if (in_strip[c] || (below >= 0 && in_strip[below])) {
      is_far[c] = 1;
      far_edges.push_back(c);
    }
    if (comp[c] == U || (below >= 0 && comp[below] == U)) {
      is_gu[c] = 1;
      gu_edges.push_back(c);
    }
  }
  if (far_edges.empty() || gu_edges.empty())
    throw SurfaceError("BoundaryContamination", "bridge lines clipped by the patch");

  const LiftedSaddles ls = lifted_saddles(patch, lift);
  std::vector<int> overlap;
  for (int c : far_edges)
    if (is_gu[c]) overlap.push_back(c);
  if (!overlap.empty()) {
    std::set<int> ids;
    for (int c : overlap) ids.insert(ls.sc_of_edge[c]);
    if (ids.size() != 1)
      throw SurfaceError("Internal", "bridge overlap spans several saddle connections");
    std::sort(overlap.begin(), overlap.end(), [&](int a, int b) {
      return patch.cells[a].X < patch.cells[b].X;
    });
    br.edge_cells = std::move(overlap);
    br.lifted_sc = *ids.begin();
    return br;
  }

  auto endpoints_of = [&](const std::vector<int>& edges) {
    std::set<int> vs;
    for (int c : edges) {
      vs.insert(patch.vtx_of[c][BL]);
      vs.insert(patch.vtx_of[c][BR]);
    }
    return vs;
  };
  const std::set<int> far_v = endpoints_of(far_edges), gu_v = endpoints_of(gu_edges);
  std::vector<int> shared;
  std::set_intersection(far_v.begin(), far_v.end(), gu_v.begin(), gu_v.end(),
                        std::back_inserter(shared));
  if (!shared.empty()) {
    if (shared.size() != 1)
      throw SurfaceError("Internal", "bridge lines meet in several cone points");
    br.degenerate = true;
    br.vertex = shared[0];
    return br;
  }

  // Disjoint lines: walk the spine tree of theta^w from the boundary of U
  // until it first reaches the far line; the arrival cone point is the
  // degenerate bridge.
  std::map<int, std::vector<int>> tree;  // vertex -> neighbors along theta^w
  for (int c = 0; c < N; ++c) {
    if (lift.component_of_edge[c] != w) continue;
    const int a = patch.vtx_of[c][BL], b = patch.vtx_of[c][BR];
    tree[a].push_back(b);
    tree[b].push_back(a);
  }
  std::map<int, int> d;
  std::queue<int> bfs;
  for (int s : gu_v) {
    d[s] = 0;
    bfs.push(s);
  }
  std::vector<int> arrivals;
  int arrival_depth = -1;
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop();
    if (arrival_depth >= 0 && d[u] > arrival_depth) break;
    if (far_v.count(u)) {
      arrivals.push_back(u);
      arrival_depth = d[u];
      continue;
    }
    for (int n : tree[u])
      if (!d.count(n)) {
        d[n] = d[u] + 1;
        bfs.push(n);
      }
  }
  if (arrivals.empty())
    throw SurfaceError("BoundaryContamination",
                       "bridge lines disconnected inside the patch");
  if (arrivals.size() != 1)
    throw SurfaceError("Internal", "spine-tree geodesic arrives at several points");
  br.degenerate = true;
  br.vertex = arrivals[0];
  return br;
}

// ---------------------------------------------------------------- xi graph

int XiGraph::distance(int a, int b) const {
  if (a == b) return 0;
  std::vector<int> d(strips.size(), -1);
  std::queue<int> q;
  d[a] = 0;
  q.push(a);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (u == b) return d[u];
    for (int n : adj[u])
      if (d[n] < 0) {
        d[n] = d[u] + 1;
        q.push(n);
      }
  }
  return -1;
}

XiGraph xi_graph(const DevelopedPatch& patch, const SpineLift& lift, int v) {
  XiGraph xi;
  xi.center = v;
  xi.xi_of_strip.assign(lift.strips.size(), -1);
  for (const cover::Strip& s : lift.strips) {
    if (s.bottom_component != v && s.top_component != v) continue;
    xi.xi_of_strip[s.id] = static_cast<int>(xi.strips.size());
    xi.strips.push_back(s.id);
  }
  const std::vector<char> in = region_cells(patch, lift, v);
  const std::vector<int> cls = classify_vertices(patch, in);

  std::map<std::pair<int, int>, bool> edge_kind;  // (a, b) -> shares a saddle
  auto add = [&](int sa, int sb, bool saddle) {
    const int a = xi.xi_of_strip[sa], b = xi.xi_of_strip[sb];
    if (a < 0 || b < 0 || a == b) return;
    auto key = std::minmax(a, b);
    auto [it, fresh] = edge_kind.emplace(key, saddle);
    if (!fresh) it->second = it->second || saddle;
  };
  // Strips flanking one spine line share its saddle connections.
  for (int c = 0; c < static_cast<int>(patch.cells.size()); ++c) {
    if (lift.component_of_edge[c] != v) continue;
    const int below = patch.cells[c].nbr[cover::D];
    if (below >= 0) add(lift.strip_of_cell[c], lift.strip_of_cell[below], true);
  }
  // Strips meeting only at a cone point of the spine.
  for (const LiftedVertex& vx : patch.vertices) {
    if (!vx.closed || !vx.singular() || cls[vx.id] != kSpine) continue;
    std::set<int> at;
    for (const auto& [cell, corner] : vx.flags) at.insert(lift.strip_of_cell[cell]);
    for (int a : at)
      for (int b : at)
        if (a < b) add(a, b, false);
  }
  for (const auto& [key, saddle] : edge_kind)
    xi.edges.push_back({key.first, key.second, saddle});
  xi.adj.assign(xi.strips.size(), {});
  for (const auto& e : xi.edges) {
    xi.adj[e.a].push_back(e.b);
    xi.adj[e.b].push_back(e.a);
  }

  xi.i_of_vertex.assign(patch.vertices.size(), -1);
  for (const LiftedVertex& vx : patch.vertices) {
    if (!vx.closed || !vx.singular() || cls[vx.id] != kBoundary) continue;
    std::set<int> carriers;
    for (const auto& [cell, corner] : vx.flags)
      if (in[cell]) carriers.insert(lift.strip_of_cell[cell]);
    if (carriers.size() != 1)
      throw SurfaceError("Internal", "boundary cone point on several far lines");
    xi.i_of_vertex[vx.id] = xi.xi_of_strip[*carriers.begin()];
  }
  return xi;
}

}  // namespace vl::proj
