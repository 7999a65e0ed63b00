#include "lambda.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace vl::qm {

using cover::DevelopedPatch;
using cover::SpineLift;
using origami::SurfaceError;

namespace {

// Walk the vertical column of the strip containing the flag toward the side
// of the strip lying on component v; returns the anchor spine vertex on
// theta^v, or -1 when the column is clipped by the patch boundary.
int column_anchor(const DevelopedPatch& patch, const SpineLift& lift, int v, int cell,
                  int corner) {
  const bool left = corner == origami::BL || corner == origami::TL;
  const cover::Strip& st = lift.strips[lift.strip_of_cell[cell]];
  int c = cell;
  if (st.bottom_component == v) {
    while (lift.component_of_edge[c] != v) {
      c = patch.cells[c].nbr[cover::D];
      if (c < 0) return -1;
    }
    return patch.vtx_of[c][left ? origami::BL : origami::BR];
  }
  if (st.top_component == v) {
    for (;;) {
      const int up = patch.cells[c].nbr[cover::U];
      if (up < 0) return -1;
      if (lift.component_of_edge[up] == v)
        return patch.vtx_of[up][left ? origami::BL : origami::BR];
      c = up;
    }
  }
  return -1;
}

}  // namespace

int quotient_component_of(const DevelopedPatch& patch, const SpineLift& lift,
                          const cyl::SpineQuotient& spine, int v) {
  if (v < 0 || v >= static_cast<int>(lift.components.size()) ||
      lift.components[v].vertices.empty())
    throw SurfaceError("BadComponent", "no such spine component");
  // Regular lifted vertices sit in saddle-connection interiors and are not
  // quotient spine vertices; match on the first singular one.
  for (int lv : lift.components[v].vertices) {
    const int cone = patch.vertices[lv].quotient_vertex;
    for (size_t i = 0; i < spine.vertices.size(); ++i)
      if (spine.vertices[i] == cone) return spine.component_of_vertex[i];
  }
  throw SurfaceError("Internal", "lifted spine vertex not in the quotient spine");
}

LambdaCoordinate lambda_coordinate(const DevelopedPatch& patch, const SpineLift& lift,
                                   const cyl::Decomposition& dec,
                                   const cyl::SpineQuotient& spine,
                                   const cover::FreePresentation& pres,
                                   const cyl::Multitwist& mt, int v) {
  if (v < 0 || v >= static_cast<int>(lift.components.size()))
    throw SurfaceError("BadComponent", "no such spine component");
  const int base_cone = spine.vertices[pres.base_vertex];
  LambdaCoordinate lc;
  lc.component = v;
  lc.period = mt.shear;
  lc.anchor.assign(patch.vertices.size(), -1);
  lc.word.assign(patch.vertices.size(), {});

  const cover::SpineComponent& comp = lift.components[v];
  std::set<int> on_spine(comp.vertices.begin(), comp.vertices.end());

  // Deterministic base lift: the minimal lifted vertex over the
  // presentation's base cone point.
  for (int x : comp.vertices)
    if (patch.vertices[x].quotient_vertex == base_cone &&
        (lc.base_lift < 0 || x < lc.base_lift))
      lc.base_lift = x;
  if (lc.base_lift < 0)
    throw SurfaceError("BadVertex", "base cone point has no lift on the component");

  // Spine-tree words by BFS over the unit spine edges of theta^v. A letter
  // is spelled exactly when a step completes a full lifted saddle
  // connection in the travel direction, so words of singular vertices match
  // the quotient path words; mid-run vertices inherit the partial path.
  const proj::LiftedSaddles ls = proj::lifted_saddles(patch, lift);
  std::vector<std::vector<std::pair<int, int>>> adj(patch.vertices.size());
  for (int c : comp.edges) {
    const int a = patch.vtx_of[c][origami::BL];
    const int b = patch.vtx_of[c][origami::BR];
    adj[a].push_back({b, c});
    adj[b].push_back({a, -c - 1});  // negative marker: rightward cell, traversed left
  }
  std::vector<char> seen(patch.vertices.size(), 0);
  seen[lc.base_lift] = 1;
  lc.anchor[lc.base_lift] = lc.base_lift;
  std::deque<int> q{lc.base_lift};
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (auto [x, mark] : adj[u]) {
      if (seen[x]) continue;
      seen[x] = 1;
      const bool rightward = mark >= 0;
      const int c = rightward ? mark : -mark - 1;
      const int run = ls.sc_of_edge[c];
      const int qsc = dec.saddle_of_edge[patch.cells[c].quotient];
      const int letter = pres.letter_of_edge[qsc];
      Word w = lc.word[u];
      if (letter != 0 && run >= 0) {
        if (rightward && c == ls.edges[run].back()) w.push_back(letter);
        if (!rightward && c == ls.edges[run].front()) w.push_back(-letter);
      }
      lc.word[x] = words::reduce(w);
      lc.anchor[x] = x;
      q.push_back(x);
    }
  }

  // Anchor the off-spine points of Theta^v down (or up) their strip column.
  for (const cover::LiftedVertex& vx : patch.vertices) {
    if (lc.anchor[vx.id] >= 0 || on_spine.count(vx.id)) continue;
    int best = -1;
    for (auto [cell, corner] : vx.flags) {
      const cover::Strip& st = lift.strips[lift.strip_of_cell[cell]];
      if (st.bottom_component != v && st.top_component != v) continue;
      const int a = column_anchor(patch, lift, v, cell, corner);
      if (a >= 0 && seen[a] && (best < 0 || a < best)) best = a;
    }
    if (best >= 0) {
      lc.anchor[vx.id] = best;
      lc.word[vx.id] = lc.word[best];
    }
  }
  return lc;
}

GroupElt tile_of(const LambdaCoordinate& lc, int x, const Rat& t) {
  if (x < 0 || x >= static_cast<int>(lc.anchor.size()) || lc.anchor[x] < 0)
    throw SurfaceError("OutsideTiling", "point is not anchored on the component");
  GroupElt g;
  g.w = lc.word[x];
  g.n = rat_floor(t / lc.period);
  return g;
}

double lambda_v(const LambdaCoordinate& lc, const PsiV& psi, int x, const Rat& t) {
  const GroupElt g = tile_of(lc, x, t);
  return psi.eval(g.w, g.n);
}

double measured_k1(const PsiV& psi, int kmax) {
  double worst = 0;
  for (size_t j = 0; j < psi.peripherals.size(); ++j)
    for (int k = 1; k <= kmax; ++k) {
      const Word p = words::power(psi.peripherals[j], k);
      worst = std::max(worst, std::abs(psi.eval(p, k * psi.shear_deg[j])));
    }
  return worst;
}

MSet m_pair(const DevelopedPatch& patch,
            const std::vector<cover::SaddleConnectionLift>& scs,
            const LambdaCoordinate& lcv, const PsiV& psiv,
            const LambdaCoordinate& lcw, const PsiV& psiw, double s, double t,
            double k1, long long n_range, double sc_max_len) {
  MSet m;
  m.v = lcv.component;
  m.w = lcw.component;
  m.s = s;
  m.t = t;
  m.k1 = k1;
  for (size_t x = 0; x < patch.vertices.size(); ++x) {
    if (lcv.anchor[x] < 0 || lcw.anchor[x] < 0) continue;
    for (long long n = -n_range; n <= n_range; ++n) {
      const Rat shear = Rat(n) * lcv.period;
      const double lv = lambda_v(lcv, psiv, static_cast<int>(x), shear);
      const double lw = lambda_v(lcw, psiw, static_cast<int>(x), shear);
      if (std::abs(lv - s) <= k1 && std::abs(lw - t) <= k1)
        m.points.push_back({static_cast<int>(x), n, lv, lw});
    }
  }
  if (m.points.empty())
    throw SurfaceError("EmptyOnTruncation", "lambda range of the patch exhausted");

  // Diameter over capped representatives: flat distance in the base chart
  // plus one period length per shear-index step.
  const size_t cap = std::min<size_t>(m.points.size(), 10);
  const double per = std::abs(to_double(lcv.period));
  for (size_t i = 0; i < cap; ++i)
    for (size_t j = i + 1; j < cap; ++j) {
      const MPoint& a = m.points[i];
      const MPoint& b = m.points[j];
      double d = per * std::llabs(a.n - b.n);
      if (a.vertex != b.vertex) {
        const cover::FlatPath p = cover::flat_distance(patch, scs, a.vertex, b.vertex,
                                                       Rat(0), sc_max_len, true);
        d += p.length;
        m.diam_reliable = m.diam_reliable && p.reliable;
      }
      m.diam = std::max(m.diam, d);
    }
  return m;
}

}  // namespace vl::qm
