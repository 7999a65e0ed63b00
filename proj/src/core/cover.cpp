#include "cover.hpp"

#include "words.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace vl::cover {

using origami::SurfaceError;

// ----------------------------------------------------------- patch builder

namespace {

// Walking counterclockwise around a vertex: flag (cell, corner) advances to
// (neighbor through side corner+2, corner+1). The inverse walk uses
// (neighbor through side corner+3, corner+3).
constexpr int next_side(int corner) { return (corner + 2) % 4; }
constexpr int prev_side(int corner) { return (corner + 3) % 4; }

struct Builder {
  const origami::Surface& s;
  origami::CornerMap cm;
  std::vector<Cell> cells;
  std::vector<int> parent;
  std::vector<char> dead;
  int live = 0;
  int cap;
  Perm hinv, vinv;

  Builder(const origami::Surface& chart, int cell_cap)
      : s(chart),
        cm(origami::corner_map(chart)),
        cap(cell_cap),
        hinv(inverse(chart.h)),
        vinv(inverse(chart.v)) {}

  int find(int c) {
    while (parent[c] != c) {
      parent[c] = parent[parent[c]];
      c = parent[c];
    }
    return c;
  }

  int make_cell(int quotient, long long X, long long Y, int depth) {
    if (live >= cap)
      throw SurfaceError("PatchTooLarge", "cell cap exceeded while developing the patch");
    Cell c;
    c.quotient = quotient;
    c.X = X;
    c.Y = Y;
    c.depth = depth;
    cells.push_back(c);
    parent.push_back(static_cast<int>(cells.size()) - 1);
    dead.push_back(0);
    ++live;
    return static_cast<int>(cells.size()) - 1;
  }

  // Identifies two cells forced equal by a closed link, cascading through
  // their neighbor slots.
  void merge(int a, int b) {
    std::deque<std::pair<int, int>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.front();
      work.pop_front();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      if (x > y) std::swap(x, y);  // keep the older id
      Cell& keep = cells[x];
      Cell& drop = cells[y];
      if (keep.quotient != drop.quotient || keep.X != drop.X || keep.Y != drop.Y)
        throw SurfaceError("Internal", "link closure tried to merge distinct lifts");
      keep.depth = std::min(keep.depth, drop.depth);
      for (int side = 0; side < 4; ++side) {
        if (drop.nbr[side] < 0) continue;
        if (keep.nbr[side] < 0)
          keep.nbr[side] = drop.nbr[side];
        else if (find(keep.nbr[side]) != find(drop.nbr[side]))
          work.emplace_back(keep.nbr[side], drop.nbr[side]);
      }
      parent[y] = x;
      dead[y] = 1;
      --live;
    }
  }

  // Declares b the neighbor of a through side, merging with existing claims.
  void link(int a, int side, int b) {
    a = find(a);
    b = find(b);
    if (cells[a].nbr[side] < 0)
      cells[a].nbr[side] = b;
    else if (find(cells[a].nbr[side]) != b)
      merge(cells[a].nbr[side], b);
    a = find(a);
    b = find(b);
    if (cells[b].nbr[opposite(side)] < 0)
      cells[b].nbr[opposite(side)] = a;
    else if (find(cells[b].nbr[opposite(side)]) != a)
      merge(cells[b].nbr[opposite(side)], a);
  }

  int nbr_of(int c, int side) {
    int raw = cells[find(c)].nbr[side];
    return raw < 0 ? -1 : find(raw);
  }

  // Quotient square and position offset of the neighbor through a side.
  void step(int q, long long& X, long long& Y, int side, int& out_q) const {
    switch (side) {
      case R: out_q = s.h[q]; ++X; break;
      case U: out_q = s.v[q]; ++Y; break;
      case L: out_q = hinv[q]; --X; break;
      default: out_q = vinv[q]; --Y; break;
    }
  }

  // Completes the vertex star at flag (c0, k0): walks the corner chain,
  // creating any missing sector cells at the given depth, and glues the chain
  // ends once the full cone angle is present. Leaves every touched vertex
  // closed.
  void complete_star(int c0, int k0, int depth) {
    c0 = find(c0);
    // Rewind to the chain start (or detect an already closed loop).
    int c = c0, k = k0;
    long long steps = 0;
    while (true) {
      int p = nbr_of(c, prev_side(k));
      if (p < 0) break;
      c = p;
      k = (k + 3) % 4;
      if (c == find(c0) && k == k0) return;  // closed already
      if (++steps > 4LL * static_cast<long long>(cells.size()))
        throw SurfaceError("Internal", "runaway vertex chain");
    }
    const int quotient_vertex = cm.of[cells[find(c)].quotient][k];
    const int full = 4 * cm.points[quotient_vertex].angle_multiple;
    int first_cell = find(c), first_corner = k;
    int count = 1;
    while (count < full) {
      c = find(c);
      int nx = nbr_of(c, next_side(k));
      if (nx < 0) {
        const Cell cc = cells[c];  // copy: make_cell may reallocate
        int q;
        long long X = cc.X, Y = cc.Y;
        step(cc.quotient, X, Y, next_side(k), q);
        nx = make_cell(q, X, Y, depth);
        link(c, next_side(k), nx);
        nx = find(nx);
      }
      c = nx;
      k = (k + 1) % 4;
      ++count;
    }
    if ((k + 1) % 4 != first_corner)
      throw SurfaceError("Internal", "star completion corner mismatch");
    link(find(c), next_side(k), find(first_cell));
  }

  // One pass over all vertex links; glues the ends of any open corner chain
  // that has already accumulated its full cone angle. Returns true if a glue
  // happened (ids may have merged; the caller restarts).
  bool close_links_once() {
    for (int c0 = 0; c0 < static_cast<int>(cells.size()); ++c0) {
      if (dead[c0]) continue;
      for (int k0 = 0; k0 < 4; ++k0) {
        // Walk backward to the chain start (or detect a closed loop).
        int c = c0, k = k0;
        bool closed = false;
        int steps = 0;
        while (true) {
          int p = nbr_of(c, prev_side(k));
          if (p < 0) break;
          c = p;
          k = (k + 3) % 4;
          if (c == find(c0) && k == k0) {
            closed = true;
            break;
          }
          if (++steps > 4 * static_cast<int>(cells.size()))
            throw SurfaceError("Internal", "runaway vertex chain");
        }
        if (closed) continue;
        // Forward walk, counting sectors.
        const int first_cell = c, first_corner = k;
        int count = 1;
        while (true) {
          int nx = nbr_of(c, next_side(k));
          if (nx < 0) break;
          c = nx;
          k = (k + 1) % 4;
          ++count;
        }
        const int quotient_vertex = cm.of[cells[find(c)].quotient][k];
        const int full = 4 * cm.points[quotient_vertex].angle_multiple;
        if (count > full)
          throw SurfaceError("Internal", "vertex link exceeds its cone angle");
        if (count == full) {
          if ((k + 1) % 4 != first_corner)
            throw SurfaceError("Internal", "link closure corner mismatch");
          link(find(c), next_side(k), find(first_cell));
          return true;
        }
      }
    }
    return false;
  }
};

}  // namespace

DevelopedPatch develop_patch(const origami::Surface& chart_surface, int radius, int cell_cap,
                             int base_square) {
  if (radius < 1) throw SurfaceError("BadRadius", "patch radius must be >= 1");
  if (base_square < 0 || base_square >= chart_surface.n)
    throw SurfaceError("BadBase", "base square out of range");
  Builder b(chart_surface, cell_cap);
  b.make_cell(base_square, 0, 0, 0);

  // Layered star completion: layer d completes the vertex links of every
  // cell of depth d-1, so depth counts star-metric hops from the base and
  // every vertex of a sub-frontier cell is closed. This keeps the patch
  // metrically round even around large cone angles, where edge-by-edge BFS
  // would need ~4k layers just to wrap one vertex.
  for (int depth = 1; depth <= radius; ++depth) {
    for (int id = 0; id < static_cast<int>(b.cells.size()); ++id) {
      if (b.dead[id] || b.find(id) != id) continue;
      if (b.cells[id].depth != depth - 1) continue;
      for (int k = 0; k < 4; ++k) b.complete_star(b.find(id), k, depth);
    }
    while (b.close_links_once()) {}
  }

  // Compact into dense ids, creation order preserved.
  DevelopedPatch patch;
  patch.chart = chart_surface;
  patch.corners = b.cm;
  patch.radius = radius;
  std::vector<int> dense(b.cells.size(), -1);
  for (int i = 0; i < static_cast<int>(b.cells.size()); ++i)
    if (!b.dead[i] && b.find(i) == i) {
      dense[i] = static_cast<int>(patch.cells.size());
      patch.cells.push_back(b.cells[i]);
    }
  for (Cell& c : patch.cells)
    for (int side = 0; side < 4; ++side)
      if (c.nbr[side] >= 0) c.nbr[side] = dense[b.find(c.nbr[side])];
  patch.base = dense[b.find(0)];

  // Lifted vertices from the corner chains of the compacted patch.
  const int N = static_cast<int>(patch.cells.size());
  patch.vtx_of.assign(N, {-1, -1, -1, -1});
  auto chain_next = [&](int c, int k) -> std::pair<int, int> {
    int n = patch.cells[c].nbr[next_side(k)];
    return {n, (k + 1) % 4};
  };
  auto chain_prev = [&](int c, int k) -> std::pair<int, int> {
    int p = patch.cells[c].nbr[prev_side(k)];
    return {p, (k + 3) % 4};
  };
  for (int c0 = 0; c0 < N; ++c0)
    for (int k0 = 0; k0 < 4; ++k0) {
      if (patch.vtx_of[c0][k0] >= 0) continue;
      int c = c0, k = k0;
      bool closed = false;
      while (true) {  // rewind
        auto [p, pk] = chain_prev(c, k);
        if (p < 0) break;
        if (p == c0 && pk == k0) {
          closed = true;
          break;
        }
        c = p;
        k = pk;
      }
      LiftedVertex vx;
      vx.id = static_cast<int>(patch.vertices.size());
      vx.closed = closed;
      if (closed) {
        c = c0;
        k = k0;
      }
      vx.quotient_vertex = patch.corners.of[patch.cells[c].quotient][k];
      vx.angle_multiple = patch.corners.points[vx.quotient_vertex].angle_multiple;
      while (true) {
        vx.flags.emplace_back(c, k);
        patch.vtx_of[c][k] = vx.id;
        auto [n, nk] = chain_next(c, k);
        if (n < 0 || (n == vx.flags.front().first && nk == vx.flags.front().second)) break;
        c = n;
        k = nk;
      }
      if (closed && static_cast<int>(vx.flags.size()) != 4 * vx.angle_multiple)
        throw SurfaceError("Internal", "closed vertex with wrong total angle");
      patch.vertices.push_back(std::move(vx));
    }

  // Boundary distance in the star metric (cells sharing an edge or a closed
  // vertex are one hop apart), seeded by cells with a missing neighbor or an
  // open vertex. A straight segment of length L crosses at most sqrt(2)*L
  // star hops, which is what boundary_margin relies on.
  patch.boundary_dist.assign(N, std::numeric_limits<int>::max() / 4);
  std::deque<int> bfs;
  for (int c = 0; c < N; ++c) {
    bool frontier = std::any_of(patch.cells[c].nbr.begin(), patch.cells[c].nbr.end(),
                                [](int x) { return x < 0; });
    for (int k = 0; k < 4 && !frontier; ++k)
      if (!patch.vertices[patch.vtx_of[c][k]].closed) frontier = true;
    if (frontier) {
      patch.boundary_dist[c] = 0;
      bfs.push_back(c);
    }
  }
  auto relax = [&](int from, int to) {
    if (to >= 0 && patch.boundary_dist[to] > patch.boundary_dist[from] + 1) {
      patch.boundary_dist[to] = patch.boundary_dist[from] + 1;
      bfs.push_back(to);
    }
  };
  while (!bfs.empty()) {
    int c = bfs.front();
    bfs.pop_front();
    for (int side = 0; side < 4; ++side) relax(c, patch.cells[c].nbr[side]);
    for (int k = 0; k < 4; ++k) {
      const LiftedVertex& vx = patch.vertices[patch.vtx_of[c][k]];
      if (!vx.closed) continue;
      for (const auto& [fc, fk] : vx.flags) relax(c, fc);
    }
  }
  return patch;
}

// ------------------------------------------------------------------ tracing

int sector_corner(long long p, long long q) {
  if (p > 0 && q > 0) return origami::BL;
  if (p < 0 && q > 0) return origami::BR;
  if (p < 0 && q < 0) return origami::TR;
  if (p > 0 && q < 0) return origami::TL;
  if (q == 0) return p > 0 ? origami::BL : origami::BR;
  return q > 0 ? origami::BL : origami::TL;
}

namespace {
constexpr std::pair<int, int> corner_coords(int corner) {
  switch (corner) {
    case origami::BL: return {0, 0};
    case origami::BR: return {1, 0};
    case origami::TR: return {1, 1};
    default: return {0, 1};
  }
}
int corner_from(const Rat& x, const Rat& y) {
  if (x == 0) return y == 0 ? origami::BL : origami::TL;
  return y == 0 ? origami::BR : origami::TR;
}
}  // namespace

TraceResult trace_ray(const DevelopedPatch& patch, const std::pair<int, int>& flag,
                      long long p, long long q, double max_len) {
  TraceResult res;
  if (p == 0 && q == 0) throw SurfaceError("ZeroDirection", "cannot trace (0,0)");
  if (sector_corner(p, q) != flag.second)
    throw SurfaceError("BadSector", "flag corner does not contain the direction");
  const bool axis = (p == 0 || q == 0);
  int cell = flag.first;
  auto [cx, cy] = corner_coords(flag.second);
  Rat x = cx, y = cy;      // local position
  Rat dx = 0, dy = 0;      // accumulated displacement
  const double cap2 = max_len * max_len * (1 + 1e-12) + 1e-12;
  if (!axis) res.cells_entered.push_back(cell);

  const long long guard = 8LL * (std::llabs(p) + std::llabs(q)) *
                              static_cast<long long>(patch.cells.size()) +
                          64;
  for (long long it = 0; it < guard; ++it) {
    // Next wall event.
    const Rat INF = Rat(std::numeric_limits<long long>::max());
    Rat tx = p > 0 ? (Rat(1) - x) / p : p < 0 ? x / Rat(-p) : INF;
    Rat ty = q > 0 ? (Rat(1) - y) / q : q < 0 ? y / Rat(-q) : INF;
    Rat t = tx < ty ? tx : ty;
    Rat nx = x + t * p, ny = y + t * q;
    if (axis) {
      // The segment runs along an edge for this unit; record its flanks.
      if (q == 0)
        res.edge_runs.emplace_back(cell, patch.cells[cell].nbr[D]);
      else
        res.edge_runs.emplace_back(cell, patch.cells[cell].nbr[L]);
    }
    dx += t * p;
    dy += t * q;
    if (to_double(dx * dx + dy * dy) > cap2) {
      res.outcome = TraceOutcome::TooLong;
      return res;
    }
    const bool on_x = (nx == 0 || nx == 1), on_y = (ny == 0 || ny == 1);
    if (on_x && on_y) {  // vertex hit
      const int corner = corner_from(nx, ny);
      const int W = patch.vtx_of[cell][corner];
      const LiftedVertex& vx = patch.vertices[W];
      if (!vx.closed) {
        res.outcome = TraceOutcome::Truncated;
        return res;
      }
      if (vx.singular()) {
        res.outcome = TraceOutcome::HitSingular;
        res.end_vertex = W;
        if (denominator(dx) != 1 || denominator(dy) != 1)
          throw SurfaceError("Internal", "cone point at non-integer displacement");
        res.vx = static_cast<long long>(numerator(dx));
        res.vy = static_cast<long long>(numerator(dy));
        return res;
      }
      res.vertices_passed.push_back(W);
      // Continue straight through the regular vertex.
      if (p != 0 && q != 0) {
        const int sh = p > 0 ? R : L, sv = q > 0 ? U : D;
        int c1 = patch.cells[cell].nbr[sh];
        int c2 = c1 < 0 ? -1 : patch.cells[c1].nbr[sv];
        int a1 = patch.cells[cell].nbr[sv];
        int a2 = a1 < 0 ? -1 : patch.cells[a1].nbr[sh];
        if (c2 < 0 || c2 != a2)
          throw SurfaceError("Internal", "closed regular vertex missing diagonal cell");
        cell = c2;
        x = p > 0 ? 0 : 1;
        y = q > 0 ? 0 : 1;
        res.cells_entered.push_back(cell);
      } else {
        const int side = p > 0 ? R : p < 0 ? L : q > 0 ? U : D;
        int n = patch.cells[cell].nbr[side];
        if (n < 0) {
          res.outcome = TraceOutcome::Truncated;
          return res;
        }
        cell = n;
        if (p != 0) x = p > 0 ? 0 : 1;
        if (q != 0) y = q > 0 ? 0 : 1;
        // The perpendicular coordinate stays on the shared edge (0 or 1):
        // horizontal runs keep y == 0, vertical runs keep x == 0, matching
        // the sector conventions.
      }
      continue;
    }
    if (on_x) {  // vertical edge crossing
      const int side = nx == 1 ? R : L;
      int n = patch.cells[cell].nbr[side];
      if (n < 0) {
        res.outcome = TraceOutcome::Truncated;
        return res;
      }
      cell = n;
      x = nx == 1 ? 0 : 1;
      y = ny;
      res.cells_entered.push_back(cell);
      continue;
    }
    {  // horizontal edge crossing
      const int side = ny == 1 ? U : D;
      int n = patch.cells[cell].nbr[side];
      if (n < 0) {
        res.outcome = TraceOutcome::Truncated;
        return res;
      }
      cell = n;
      y = ny == 1 ? 0 : 1;
      x = nx;
      res.cells_entered.push_back(cell);
      continue;
    }
  }
  throw SurfaceError("Internal", "trace failed to terminate");
}

std::vector<SaddleConnectionLift> saddle_connections(const DevelopedPatch& patch,
                                                     double max_len) {
  std::vector<SaddleConnectionLift> out;
  if (max_len <= 0) return out;
  std::map<std::pair<int, int>, int> seen;
  const long long B = static_cast<long long>(std::floor(max_len + 1e-9));
  std::vector<std::pair<long long, long long>> dirs;
  for (long long p = -B; p <= B; ++p)
    for (long long q = -B; q <= B; ++q) {
      if (p == 0 && q == 0) continue;
      if (std::gcd(std::llabs(p), std::llabs(q)) != 1) continue;
      if (static_cast<double>(p * p + q * q) > max_len * max_len + 1e-9) continue;
      dirs.emplace_back(p, q);
    }
  for (const LiftedVertex& vx : patch.vertices) {
    if (!vx.closed || !vx.singular()) continue;
    for (auto [p, q] : dirs) {
      const int corner = sector_corner(p, q);
      for (const auto& fl : vx.flags) {
        if (fl.second != corner) continue;
        TraceResult tr = trace_ray(patch, fl, p, q, max_len);
        if (tr.outcome != TraceOutcome::HitSingular) continue;
        if (tr.end_vertex == vx.id)
          throw SurfaceError("Internal", "saddle connection loop in the universal cover");
        if (vx.id > tr.end_vertex) continue;  // found again from the far end
        auto key = std::make_pair(vx.id, tr.end_vertex);
        auto it = seen.find(key);
        if (it != seen.end()) {
          const SaddleConnectionLift& prev = out[it->second];
          if (prev.vx != tr.vx || prev.vy != tr.vy)
            throw SurfaceError("Internal", "two geodesics between one vertex pair");
          continue;
        }
        SaddleConnectionLift sc;
        sc.id = static_cast<int>(out.size());
        sc.from = vx.id;
        sc.to = tr.end_vertex;
        sc.vx = tr.vx;
        sc.vy = tr.vy;
        sc.touch = tr;
        seen[key] = sc.id;
        out.push_back(std::move(sc));
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ flat geodesics

double boundary_margin(const DevelopedPatch& patch, int vertex) {
  int best = std::numeric_limits<int>::max() / 4;
  for (const auto& [cell, corner] : patch.vertices[vertex].flags)
    best = std::min(best, patch.boundary_dist[cell]);
  // A cone-point geodesic of flat length L moves at most ceil(|dx|)+ceil(|dy|)
  // <= sqrt(2)*L + 1 star hops per saddle connection (turns at cone points
  // cost one hop, paid for by the next segment's unit length), so any path
  // shorter than (b - 1)/sqrt(2) stays strictly inside the patch.
  return std::max(0.0, (best - 1) / std::sqrt(2.0));
}

FlatPath flat_distance(const DevelopedPatch& patch,
                       const std::vector<SaddleConnectionLift>& scs, int x, int y,
                       const Rat& t, double sc_max_len, bool allow_unreliable) {
  FlatPath path;
  if (x == y) {
    path.vertices = {x};
    return path;
  }
  std::vector<std::vector<std::pair<int, double>>> adj(patch.vertices.size());
  for (const SaddleConnectionLift& sc : scs) {
    const double w = cyl::sheared_length(t, sc.vx, sc.vy);
    adj[sc.from].emplace_back(sc.to, w);
    adj[sc.to].emplace_back(sc.from, w);
  }
  std::vector<double> dist(patch.vertices.size(), std::numeric_limits<double>::infinity());
  std::vector<int> prev(patch.vertices.size(), -1);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  dist[x] = 0;
  pq.emplace(0.0, x);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == y) break;
    for (auto [v, w] : adj[u])
      if (dist[u] + w < dist[v]) {
        dist[v] = dist[u] + w;
        prev[v] = u;
        pq.emplace(dist[v], v);
      }
  }
  // Certification. A universal-cover path escaping the patch travels from x
  // to the frontier and from the frontier to y, so it is at least
  // margin(x) + margin(y) long (unsheared; the shear operator norm converts).
  // Any shorter true geodesic therefore stays inside, and its segments are
  // all enumerated provided their unsheared lengths fit under sc_max_len.
  const double shear_op = 1.0 + std::abs(to_double(t));
  const double margin =
      (boundary_margin(patch, x) + boundary_margin(patch, y)) / shear_op;
  const bool certified =
      dist[y] < margin && dist[y] * shear_op <= sc_max_len + 1e-9;
  if (!certified && !allow_unreliable)
    throw SurfaceError("BoundaryContamination",
                       "flat distance witness may leave the developed patch");
  path.reliable = certified;
  path.length = dist[y];
  for (int u = y; u != -1; u = prev[u]) path.vertices.push_back(u);
  std::reverse(path.vertices.begin(), path.vertices.end());
  return path;
}

// -------------------------------------------------------- spines and strips

SpineLift lift_spines(const DevelopedPatch& patch, const cyl::Decomposition& dec) {
  if (!(dec.chart == patch.chart))
    throw SurfaceError("ChartMismatch", "patch and decomposition use different charts");
  SpineLift out;
  const int N = static_cast<int>(patch.cells.size());

  // Spine edges: lifted bottom edges over quotient spine edges.
  std::vector<int> parent(N);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<char> is_edge(N, 0);
  std::map<int, int> edge_at_vertex;  // lifted vertex -> representative edge cell
  for (int c = 0; c < N; ++c) {
    if (dec.saddle_of_edge[patch.cells[c].quotient] < 0) continue;
    is_edge[c] = 1;
    for (int corner : {static_cast<int>(origami::BL), static_cast<int>(origami::BR)}) {
      const int v = patch.vtx_of[c][corner];
      auto [it, fresh] = edge_at_vertex.emplace(v, c);
      if (!fresh) parent[find(c)] = find(it->second);
    }
  }
  out.component_of_edge.assign(N, -1);
  std::map<int, int> comp_id;
  for (int c = 0; c < N; ++c) {
    if (!is_edge[c]) continue;
    const int root = find(c);
    auto [it, fresh] = comp_id.emplace(root, static_cast<int>(out.components.size()));
    if (fresh) {
      SpineComponent sc;
      sc.id = it->second;
      out.components.push_back(sc);
    }
    out.component_of_edge[c] = it->second;
    out.components[it->second].edges.push_back(c);
  }
  for (SpineComponent& sc : out.components) {
    std::set<int> vs;
    for (int c : sc.edges) {
      vs.insert(patch.vtx_of[c][origami::BL]);
      vs.insert(patch.vtx_of[c][origami::BR]);
    }
    sc.vertices.assign(vs.begin(), vs.end());
    for (int v : sc.vertices)
      if (!patch.vertices[v].closed) sc.truncated = true;
  }

  // Strips: lifts of open cylinders. Row indices from the quotient.
  std::vector<int> row_of(dec.chart.n, -1);
  for (const cyl::Cylinder& cy : dec.cylinders)
    for (int r = 0; r < static_cast<int>(cy.rows.size()); ++r)
      for (int j : cy.rows[r]) row_of[j] = r;
  std::vector<int> sparent(N);
  std::iota(sparent.begin(), sparent.end(), 0);
  auto sfind = [&](int a) {
    while (sparent[a] != a) a = sparent[a] = sparent[sparent[a]];
    return a;
  };
  for (int c = 0; c < N; ++c) {
    const int j = patch.cells[c].quotient;
    const cyl::Cylinder& cy = dec.cylinders[dec.cylinder_of[j]];
    auto unite = [&](int side) {
      const int n = patch.cells[c].nbr[side];
      if (n >= 0) sparent[sfind(c)] = sfind(n);
    };
    unite(R);
    unite(L);
    if (row_of[j] + 1 < cy.height) unite(U);
    if (row_of[j] > 0) unite(D);
  }
  out.strip_of_cell.assign(N, -1);
  std::map<int, int> strip_id;
  for (int c = 0; c < N; ++c) {
    const int root = sfind(c);
    auto [it, fresh] = strip_id.emplace(root, static_cast<int>(out.strips.size()));
    if (fresh) {
      Strip st;
      st.id = it->second;
      st.cylinder = dec.cylinder_of[patch.cells[c].quotient];
      st.height = dec.cylinders[st.cylinder].height;
      st.circumference = dec.cylinders[st.cylinder].circumference;
      out.strips.push_back(st);
    }
    out.strip_of_cell[c] = it->second;
    out.strips[it->second].cells.push_back(c);
  }
  for (Strip& st : out.strips) {
    const cyl::Cylinder& cy = dec.cylinders[st.cylinder];
    for (int c : st.cells) {
      const int j = patch.cells[c].quotient;
      // In-strip adjacencies that the patch fails to provide => truncated.
      auto need = [&](int side) {
        if (patch.cells[c].nbr[side] < 0) st.truncated = true;
      };
      need(R);
      need(L);
      if (row_of[j] + 1 < cy.height) need(U);
      if (row_of[j] > 0) need(D);
      if (row_of[j] == 0) {
        const int comp = out.component_of_edge[c];
        if (comp < 0) throw SurfaceError("Internal", "strip bottom edge off the spine");
        if (st.bottom_component < 0)
          st.bottom_component = comp;
        else if (st.bottom_component != comp)
          throw SurfaceError("Internal", "strip bottom meets two spine components");
      }
      if (row_of[j] + 1 == cy.height) {
        const int up = patch.cells[c].nbr[U];
        if (up < 0) {
          st.truncated = true;
          continue;
        }
        const int comp = out.component_of_edge[up];
        if (comp < 0) throw SurfaceError("Internal", "strip top edge off the spine");
        if (st.top_component < 0)
          st.top_component = comp;
        else if (st.top_component != comp)
          throw SurfaceError("Internal", "strip top meets two spine components");
      }
    }
    if (st.bottom_component < 0 || st.top_component < 0) st.truncated = true;
  }
  return out;
}

TreeBall tree_ball(const SpineLift& lift, int root_component, int depth) {
  if (root_component < 0 || root_component >= static_cast<int>(lift.components.size()))
    throw SurfaceError("BadComponent", "tree ball root out of range");
  TreeBall ball;
  ball.root = root_component;
  std::map<int, int> depth_of;  // component -> depth
  depth_of[root_component] = 0;
  ball.vertices.push_back(root_component);
  ball.depth_of.push_back(0);
  ball.truncated.push_back(lift.components[root_component].truncated ? 1 : 0);
  std::deque<int> frontier{root_component};
  // Strip adjacency per component.
  std::vector<std::vector<int>> strips_at(lift.components.size());
  for (const Strip& st : lift.strips) {
    if (st.bottom_component >= 0) strips_at[st.bottom_component].push_back(st.id);
    if (st.top_component >= 0 && st.top_component != st.bottom_component)
      strips_at[st.top_component].push_back(st.id);
  }
  std::map<int, int> parent_strip{{root_component, -1}};
  int reached = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    const int du = depth_of.at(u);
    reached = std::max(reached, du);
    if (du == depth) continue;
    // A component truncated by the patch, or one whose strip list includes a
    // clipped strip with an unknown far side, may be missing children: flag
    // it, but keep the subtree the patch does witness.
    const int ui = static_cast<int>(
        std::find(ball.vertices.begin(), ball.vertices.end(), u) - ball.vertices.begin());
    for (int sid : strips_at[u]) {
      const Strip& st = lift.strips[sid];
      const int w = st.bottom_component == u ? st.top_component : st.bottom_component;
      if (w < 0) {
        ball.truncated[ui] = 1;
        continue;
      }
      if (w == u) throw SurfaceError("Internal", "strip with equal sides");
      if (depth_of.count(w)) {
        if (parent_strip.at(u) != sid)
          throw SurfaceError("Internal", "tree ball found a cycle");
        continue;
      }
      depth_of[w] = du + 1;
      parent_strip[w] = sid;
      ball.vertices.push_back(w);
      ball.depth_of.push_back(du + 1);
      ball.truncated.push_back(lift.components[w].truncated ? 1 : 0);
      ball.edges.emplace_back(sid, w);
      frontier.push_back(w);
    }
  }
  // The dual tree of a cylinder direction is infinite, so a layer the patch
  // cannot populate means the requested depth outruns the development.
  if (reached < depth)
    throw SurfaceError("DepthExceedsPatch", "patch does not realize the requested tree depth");
  if (ball.edges.size() + 1 != ball.vertices.size())
    throw SurfaceError("Internal", "tree ball is not a tree");
  return ball;
}

int tree_distance(const SpineLift& lift, int a, int b) {
  if (a == b) return 0;
  std::map<int, int> dist{{a, 0}};
  std::deque<int> q{a};
  std::vector<std::vector<int>> strips_at(lift.components.size());
  for (const Strip& st : lift.strips)
    if (st.bottom_component >= 0 && st.top_component >= 0) {
      strips_at[st.bottom_component].push_back(st.id);
      strips_at[st.top_component].push_back(st.id);
    }
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int sid : strips_at[u]) {
      const Strip& st = lift.strips[sid];
      int w = st.bottom_component == u ? st.top_component : st.bottom_component;
      if (dist.count(w)) continue;
      dist[w] = dist[u] + 1;
      if (w == b) return dist[w];
      q.push_back(w);
    }
  }
  return -1;
}

// ---------------------------------------------------------------- spine pi1

FreePresentation spine_pi1(const cyl::Decomposition& dec, const cyl::SpineQuotient& spine,
                           int component) {
  FreePresentation fp;
  // Vertices and edges of the chosen quotient spine component.
  std::vector<int> verts;
  for (size_t i = 0; i < spine.vertices.size(); ++i)
    if (spine.component_of_vertex[i] == component) verts.push_back(static_cast<int>(i));
  if (verts.empty()) throw SurfaceError("BadComponent", "empty spine component");
  fp.base_vertex = verts.front();

  const int E = static_cast<int>(spine.edge_from.size());
  std::vector<char> in_comp(E, 0);
  for (int e = 0; e < E; ++e) {
    const bool a = spine.component_of_vertex[spine.edge_from[e]] == component;
    const bool b = spine.component_of_vertex[spine.edge_to[e]] == component;
    if (a != b) throw SurfaceError("Internal", "spine edge straddles components");
    in_comp[e] = a;
  }

  // BFS spanning tree from the base vertex.
  std::vector<char> tree_edge(E, 0), seen(spine.vertices.size(), 0);
  seen[fp.base_vertex] = 1;
  std::deque<int> q{fp.base_vertex};
  std::vector<std::vector<int>> incident(spine.vertices.size());
  for (int e = 0; e < E; ++e)
    if (in_comp[e]) {
      incident[spine.edge_from[e]].push_back(e);
      if (spine.edge_to[e] != spine.edge_from[e]) incident[spine.edge_to[e]].push_back(e);
    }
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int e : incident[u]) {
      int w = spine.edge_from[e] == u ? spine.edge_to[e] : spine.edge_from[e];
      if (seen[w]) continue;
      seen[w] = 1;
      tree_edge[e] = 1;
      q.push_back(w);
    }
  }
  fp.letter_of_edge.assign(E, 0);
  for (int e = 0; e < E; ++e)
    if (in_comp[e] && !tree_edge[e]) fp.letter_of_edge[e] = ++fp.rank;

  // Peripheral words: bottom boundaries read along +x, top along -x.
  fp.peripheral_bottom.assign(dec.cylinders.size(), {});
  fp.peripheral_top.assign(dec.cylinders.size(), {});
  auto touches = [&](const std::vector<int>& ids) {
    for (int id : ids)
      if (!in_comp[id]) return false;
    return !ids.empty();
  };
  for (const cyl::Cylinder& cy : dec.cylinders) {
    if (touches(cy.boundary_bottom)) {
      words::Word w;
      for (int id : cy.boundary_bottom)
        if (fp.letter_of_edge[id]) w.push_back(fp.letter_of_edge[id]);
      fp.peripheral_bottom[cy.id] = words::cyclic_reduce(w);
    }
    if (touches(cy.boundary_top)) {
      words::Word w;
      for (auto it = cy.boundary_top.rbegin(); it != cy.boundary_top.rend(); ++it)
        if (fp.letter_of_edge[*it]) w.push_back(-fp.letter_of_edge[*it]);
      fp.peripheral_top[cy.id] = words::cyclic_reduce(w);
    }
  }
  return fp;
}

}  // namespace vl::cover
