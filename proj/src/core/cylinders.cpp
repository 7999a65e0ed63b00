#include "cylinders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vl::cyl {

using origami::SurfaceError;

namespace {
long long ll(const Rat& r) { return static_cast<long long>(numerator(r)); }

// lcm of positive rationals a_i/b_i (reduced) is lcm(a_i)/gcd(b_i).
Rat rational_lcm(const std::vector<Rat>& xs) {
  BigInt num = 1, den = 0;
  for (const Rat& x : xs) {
    num = lcm(num, numerator(x));
    den = gcd(den, denominator(x));
  }
  return Rat(num, den);
}
}  // namespace

Decomposition cylinder_decomposition(const origami::Surface& s, const origami::Direction& d) {
  Decomposition dec;
  dec.direction = d;
  dec.normalizer = origami::direction_normalizer(d);
  dec.chart = origami::matrix_act(dec.normalizer, s);
  dec.corners = origami::corner_map(dec.chart);
  const origami::Surface& c = dec.chart;

  auto singular = [&](int sq, int corner) {
    return !dec.corners.points[dec.corners.of[sq][corner]].regular();
  };

  // Leaves: h-cycles of the chart, each the set of squares over one
  // horizontal line (the line itself being their bottom edges).
  dec.leaves = cycles(c.h);
  dec.leaf_of.assign(c.n, -1);
  for (int L = 0; L < static_cast<int>(dec.leaves.size()); ++L)
    for (int j : dec.leaves[L]) dec.leaf_of[j] = L;

  // A line is singular when a singular vertex sits on it.
  std::vector<char> line_singular(dec.leaves.size(), 0);
  for (size_t L = 0; L < dec.leaves.size(); ++L)
    for (int j : dec.leaves[L])
      if (singular(j, origami::BL)) line_singular[L] = 1;

  // Saddle connections: cut each singular line at its singular vertices.
  dec.saddle_of_edge.assign(c.n, -1);
  for (size_t L = 0; L < dec.leaves.size(); ++L) {
    if (!line_singular[L]) continue;
    const std::vector<int>& cyc = dec.leaves[L];
    const int m = static_cast<int>(cyc.size());
    // Rotate so the cycle starts at an edge whose left endpoint is singular.
    int start = -1;
    for (int i = 0; i < m; ++i)
      if (singular(cyc[i], origami::BL)) {
        start = i;
        break;
      }
    SaddleConnection cur;
    cur.from_vertex = dec.corners.of[cyc[start]][origami::BL];
    for (int step = 0; step < m; ++step) {
      int j = cyc[(start + step) % m];
      cur.edges.push_back(j);
      int right = dec.corners.of[j][origami::BR];  // vertex at the edge's right end
      if (!dec.corners.points[right].regular()) {
        cur.id = static_cast<int>(dec.saddles.size());
        cur.to_vertex = right;
        cur.length = static_cast<long long>(cur.edges.size());
        for (int e : cur.edges) dec.saddle_of_edge[e] = cur.id;
        dec.saddles.push_back(std::move(cur));
        cur = SaddleConnection{};
        cur.from_vertex = right;
      }
    }
    if (!cur.edges.empty())
      throw SurfaceError("Internal", "singular line did not close at a singular vertex");
  }

  // Cylinders: climb from each singular line through regular interface lines.
  dec.cylinder_of.assign(c.n, -1);
  std::vector<char> used(dec.leaves.size(), 0);
  for (size_t L0 = 0; L0 < dec.leaves.size(); ++L0) {
    if (!line_singular[L0] || used[L0]) continue;
    Cylinder cylinder;
    cylinder.id = static_cast<int>(dec.cylinders.size());
    int L = static_cast<int>(L0);
    while (true) {
      if (used[L]) throw SurfaceError("Internal", "cylinder rows formed a closed loop");
      used[L] = 1;
      cylinder.rows.push_back(dec.leaves[L]);
      // The interface circle above this row is the vertices (j, TL). If any
      // is singular the cylinder ends here; otherwise local commutation
      // carries this h-cycle to the h-cycle directly above, and we climb.
      bool interface_singular = false;
      for (int j : dec.leaves[L])
        if (singular(j, origami::TL)) interface_singular = true;
      if (interface_singular) break;
      int Lup = dec.leaf_of[c.v[dec.leaves[L][0]]];
      for (int j : dec.leaves[L])
        if (dec.leaf_of[c.v[j]] != Lup)
          throw SurfaceError("Internal", "regular interface split across leaves");
      L = Lup;
    }
    cylinder.circumference = static_cast<long long>(cylinder.rows[0].size());
    for (const auto& row : cylinder.rows)
      if (static_cast<long long>(row.size()) != cylinder.circumference)
        throw SurfaceError("Internal", "row lengths differ within a cylinder");
    cylinder.height = static_cast<long long>(cylinder.rows.size());
    for (const auto& row : cylinder.rows)
      for (int j : row) dec.cylinder_of[j] = cylinder.id;
    dec.cylinders.push_back(std::move(cylinder));
  }

  long long area = 0;
  for (const Cylinder& cy : dec.cylinders) area += cy.circumference * cy.height;
  if (area != c.n) throw SurfaceError("Internal", "cylinder areas do not sum to n");
  for (int j = 0; j < c.n; ++j)
    if (dec.cylinder_of[j] < 0) throw SurfaceError("Internal", "square missed by all cylinders");

  // Boundary lists. Bottom: the bottom row's own line, split into its saddle
  // connections. Top: the edge path top(i) = bottom edge of v(i) over the top
  // row; regular corners make consecutive top edges h-consecutive, so each
  // maximal run between singular vertices is exactly one saddle connection.
  auto collect_boundary = [&](const std::vector<int>& row, bool top) {
    const int m = static_cast<int>(row.size());
    auto edge_at = [&](int i) { return top ? c.v[row[i]] : row[i]; };
    // Vertex to the right of position i's edge.
    auto right_vertex = [&](int i) {
      return top ? dec.corners.of[row[i]][origami::TR] : dec.corners.of[row[i]][origami::BR];
    };
    int start = -1;
    for (int i = 0; i < m; ++i)
      if (!dec.corners.points[right_vertex(i)].regular()) {
        start = i;
        break;
      }
    if (start < 0) throw SurfaceError("Internal", "cylinder boundary with no singular vertex");
    std::vector<int> ids;
    int run_id = -1, run_len = 0;
    for (int step = 1; step <= m; ++step) {
      int i = (start + step) % m;
      int sc = dec.saddle_of_edge[edge_at(i)];
      if (sc < 0) throw SurfaceError("Internal", "boundary edge off every saddle connection");
      if (run_len > 0 && sc != run_id)
        throw SurfaceError("Internal", "boundary run crosses saddle connections");
      run_id = sc;
      ++run_len;
      if (!dec.corners.points[right_vertex(i)].regular()) {
        if (run_len != dec.saddles[run_id].length)
          throw SurfaceError("Internal", "boundary run shorter than its saddle connection");
        ids.push_back(run_id);
        run_len = 0;
      }
    }
    return ids;
  };
  for (Cylinder& cy : dec.cylinders) {
    cy.boundary_bottom = collect_boundary(cy.rows.front(), false);
    cy.boundary_top = collect_boundary(cy.rows.back(), true);
  }

  // Each saddle connection borders exactly two cylinder sides.
  std::vector<int> sides(dec.saddles.size(), 0);
  for (const Cylinder& cy : dec.cylinders) {
    for (int id : cy.boundary_bottom) ++sides[id];
    for (int id : cy.boundary_top) ++sides[id];
  }
  for (int count : sides)
    if (count != 2) throw SurfaceError("Internal", "saddle connection not on two sides");

  return dec;
}

SpineQuotient spine_graph(const Decomposition& dec) {
  SpineQuotient g;
  std::vector<int> dense(dec.corners.points.size(), -1);
  for (const origami::ConePoint& pt : dec.corners.points)
    if (!pt.regular()) {
      dense[pt.id] = static_cast<int>(g.vertices.size());
      g.vertices.push_back(pt.id);
    }
  std::vector<int> parent(g.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](auto&& self, int x) -> int {
    return parent[x] == x ? x : parent[x] = self(self, parent[x]);
  };
  for (const SaddleConnection& sc : dec.saddles) {
    g.edge_from.push_back(dense[sc.from_vertex]);
    g.edge_to.push_back(dense[sc.to_vertex]);
    g.edge_length.push_back(sc.length);
    parent[find(find, dense[sc.from_vertex])] = find(find, dense[sc.to_vertex]);
  }
  g.component_of_vertex.assign(g.vertices.size(), -1);
  for (size_t i = 0; i < g.vertices.size(); ++i) {
    int root = find(find, static_cast<int>(i));
    if (g.component_of_vertex[root] == -1) g.component_of_vertex[root] = g.num_components++;
    g.component_of_vertex[i] = g.component_of_vertex[root];
  }
  return g;
}

Multitwist multitwist(const origami::Surface& s, const Decomposition& dec) {
  Multitwist mt;
  std::vector<Rat> moduli;
  for (const Cylinder& cy : dec.cylinders)
    moduli.push_back(Rat(cy.circumference, cy.height));
  mt.shear = rational_lcm(moduli);
  BigInt g = 0;
  for (const Cylinder& cy : dec.cylinders) {
    Rat p = mt.shear * Rat(cy.height, cy.circumference);
    if (denominator(p) != 1 || p <= 0)
      throw SurfaceError("Internal", "non-integral twist power");
    mt.twist_powers.push_back(ll(p));
    g = gcd(g, numerator(p));
  }
  if (g != 1) throw SurfaceError("Internal", "multitwist shear is not minimal");

  // Verify by conjugating the shear back to the original marking; only an
  // integral conjugate can be tested against the square combinatorics.
  origami::Matrix2Q hs{1, mt.shear, 0, 1};
  origami::Matrix2Q conj = dec.normalizer.inverse().mul(hs).mul(dec.normalizer);
  if (conj.integral()) {
    mt.verifiable = true;
    mt.verified = origami::is_affine_automorphism(s, conj).has_value();
    if (!mt.verified)
      throw SurfaceError("AutomorphismCheckFailed",
                         "multitwist shear is not an affine automorphism");
  } else {
    mt.verifiable = false;
    mt.verified = false;
  }
  return mt;
}

HoroChart horocycle_chart(const origami::Surface& s, const origami::Direction& d, int samples) {
  if (samples < 1) throw SurfaceError("BadSampleCount", "need at least one shear sample");
  Decomposition dec = cylinder_decomposition(s, d);
  Multitwist mt = multitwist(s, dec);
  HoroChart hc;
  hc.direction = d;
  hc.normalizer = dec.normalizer;
  hc.shear_period = mt.shear;
  for (int j = 0; j < samples; ++j)
    hc.sample_shears.push_back(mt.shear * Rat(j, samples));
  return hc;
}

double sheared_length(const Rat& t, long long wx, long long wy) {
  const double x = to_double(Rat(wx) + t * wy);
  const double y = static_cast<double>(wy);
  return std::sqrt(x * x + y * y);
}

}  // namespace vl::cyl
