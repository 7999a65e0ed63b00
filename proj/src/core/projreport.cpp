#include "projreport.hpp"

#include <algorithm>
#include <sstream>

namespace vl::proj {

using cover::DevelopedPatch;
using cover::SpineLift;
using origami::SurfaceError;

namespace {

// Xi-graph vertex index of an entry point: the strip whose far line carries
// it; -1 when it cannot be placed (clipped structures).
int xi_index(const XiGraph& xi, const SpineLift& lift, const EntryPoint& ep) {
  if (ep.is_vertex) return xi.i_of_vertex[ep.vertex];
  return xi.xi_of_strip[lift.strip_of_cell[ep.edge_cell]];
}

// Lambda value of an entry point: the tile of its carrying lifted vertex
// (interior edge points inherit the tile of the edge's left vertex).
double lambda_of(const DevelopedPatch& patch, const qm::LambdaCoordinate& lc,
                 const qm::PsiV& psi, const EntryPoint& ep, const Rat& t) {
  const int vx =
      ep.is_vertex ? ep.vertex : patch.vtx_of[ep.edge_cell][origami::BL];
  return qm::lambda_v(lc, psi, vx, t);
}

}  // namespace

std::vector<ProjectionRow> projection_report(
    const DevelopedPatch& patch, const SpineLift& lift,
    const std::vector<cover::SaddleConnectionLift>& scs,
    const qm::LambdaCoordinate& lc, const qm::PsiV& psi, const XiGraph& xi, int v,
    const std::vector<int>& targets, const std::vector<Rat>& shears,
    double sc_max_len, int max_sources) {
  const WindowContext ctx = window_context(patch, lift, scs, v);
  std::vector<ProjectionRow> rows;
  for (int w : targets) {
    ProjectionRow row;
    row.v = v;
    row.w = w;
    row.dtree = cover::tree_distance(lift, v, w);
    row.charts = static_cast<int>(shears.size());
    if (w == v) {
      row.excluded = true;
      rows.push_back(row);
      continue;
    }

    // Sampled cone points of Theta^w: closed singular lifted vertices with a
    // flag in a strip adjacent to w, deepest first.
    std::vector<char> in_w(patch.cells.size(), 0);
    for (const cover::Strip& s : lift.strips)
      if (s.bottom_component == w || s.top_component == w)
        for (int c : s.cells) in_w[c] = 1;
    std::vector<std::pair<double, int>> sources;
    for (const cover::LiftedVertex& vx : patch.vertices) {
      if (!vx.closed || !vx.singular()) continue;
      bool touches = false;
      for (auto [cell, corner] : vx.flags) touches = touches || in_w[cell];
      if (touches) sources.push_back({-cover::boundary_margin(patch, vx.id), vx.id});
    }
    std::sort(sources.begin(), sources.end());
    if (static_cast<int>(sources.size()) > max_sources) sources.resize(max_sources);

    std::vector<int> xi_pts;
    std::vector<double> lam_pts;
    for (auto [neg_margin, x] : sources) {
      bool produced = false;
      for (const Rat& t : shears) {
        try {
          const Window win = window(patch, lift, scs, ctx, x, t, sc_max_len);
          for (const EntryPoint& ep : win.points) {
            const int xid = xi_index(xi, lift, ep);
            if (xid >= 0) xi_pts.push_back(xid);
            try {
              lam_pts.push_back(lambda_of(patch, lc, psi, ep, t));
            } catch (const SurfaceError& e) {
              if (e.code != "OutsideTiling") throw;
              row.contaminated = true;
            }
            produced = true;
          }
        } catch (const SurfaceError& e) {
          if (e.code != "BoundaryContamination") throw;
          row.contaminated = true;
        }
      }
      if (produced) ++row.samples;
    }

    for (size_t i = 0; i < xi_pts.size(); ++i)
      for (size_t j = i + 1; j < xi_pts.size(); ++j) {
        const int d = xi.distance(xi_pts[i], xi_pts[j]);
        if (d >= 0) row.xi_diam = std::max(row.xi_diam, static_cast<double>(d));
      }
    if (!lam_pts.empty()) {
      const auto [lo, hi] = std::minmax_element(lam_pts.begin(), lam_pts.end());
      row.lambda_diam = *hi - *lo;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string xi_graph_dot(const XiGraph& xi) {
  std::ostringstream out;
  out << "graph xi_" << xi.center << " {\n";
  for (size_t i = 0; i < xi.strips.size(); ++i)
    out << "  n" << i << " [label=\"strip " << xi.strips[i] << "\"];\n";
  for (const XiGraph::Edge& e : xi.edges)
    out << "  n" << e.a << " -- n" << e.b
        << (e.saddle ? " [label=\"saddle\"];\n" : " [label=\"cone\"];\n");
  out << "}\n";
  return out.str();
}

}  // namespace vl::proj
