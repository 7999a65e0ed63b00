#include "hhs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace vl::hhs {

using origami::SurfaceError;

namespace {

template <typename F>
void for_bits(Mask m, F f) {
  while (m) {
    const int b = std::countr_zero(m);
    m &= m - 1;
    f(b);
  }
}

}  // namespace

int ComplexX::comp_index(int component) const {
  for (size_t i = 0; i < components.size(); ++i)
    if (components[i] == component) return static_cast<int>(i);
  throw SurfaceError("BadVertex", "component not in the X truncation");
}

// V-vertices come first, one per component, in component-list order, so the
// component index of any vertex is also the X-index of its tree vertex.
int ComplexX::v_of(int x) const { return comp_index(verts[x].tree); }

bool ComplexX::interior_vertex(int x) const { return interior[v_of(x)] != 0; }

int ComplexX::tree_dist(int x, int y) const { return dtree[v_of(x)][v_of(y)]; }

bool ComplexX::clique(Mask m) const {
  bool ok = true;
  for_bits(m, [&](int a) {
    if ((m & ~(Mask(1) << a) & ~adj[a]) != 0) ok = false;
  });
  return ok;
}

Mask ComplexX::link(Mask m) const {
  Mask l = all();
  for_bits(m, [&](int a) { l &= adj[a]; });
  return l & ~m;
}

static ComplexX build_x_common(std::vector<int> components, std::vector<char> interior,
                               std::vector<std::vector<int>> dtree, long long level_lo,
                               long long level_hi) {
  const int nc = static_cast<int>(components.size());
  if (nc == 0 || level_hi < level_lo)
    throw SurfaceError("BadParameter", "empty X truncation");
  const long long levels = level_hi - level_lo + 1;
  const long long total = nc + nc * levels;
  if (total > 64)
    throw SurfaceError("CapExceeded",
                       "X truncation needs " + std::to_string(total) +
                           " vertices; the bitmask representation caps at 64");
  ComplexX x;
  x.components = std::move(components);
  x.interior = std::move(interior);
  x.dtree = std::move(dtree);
  for (int i = 0; i < nc; ++i) x.verts.push_back({false, x.components[i], 0});
  for (int i = 0; i < nc; ++i)
    for (long long l = level_lo; l <= level_hi; ++l)
      x.verts.push_back({true, x.components[i], l});
  x.adj.assign(x.verts.size(), 0);
  for (int a = 0; a < x.n(); ++a)
    for (int b = a + 1; b < x.n(); ++b) {
      const int d = x.dtree[x.v_of(a)][x.v_of(b)];
      if (d < 0) continue;
      const bool la = x.verts[a].is_level, lb = x.verts[b].is_level;
      // u--w and s--t need adjacent trees; s--w allows w = v(s) as well.
      const bool edge = (la == lb) ? d == 1 : d <= 1;
      if (edge) {
        x.adj[a] |= Mask(1) << b;
        x.adj[b] |= Mask(1) << a;
      }
    }
  return x;
}

ComplexX build_X(const cover::SpineLift& lift, const std::vector<int>& components,
                 const std::vector<char>& interior, long long level_lo,
                 long long level_hi) {
  if (interior.size() != components.size())
    throw SurfaceError("BadParameter", "interior flags must match components");
  const int nc = static_cast<int>(components.size());
  std::vector<std::vector<int>> dtree(nc, std::vector<int>(nc, 0));
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j)
      dtree[i][j] = i == j ? 0 : cover::tree_distance(lift, components[i], components[j]);
  return build_x_common(components, interior, std::move(dtree), level_lo, level_hi);
}

ComplexX build_X_from_tree(const std::vector<std::vector<int>>& dtree,
                           const std::vector<char>& interior, long long level_lo,
                           long long level_hi) {
  std::vector<int> components(dtree.size());
  std::iota(components.begin(), components.end(), 0);
  return build_x_common(components, interior, dtree, level_lo, level_hi);
}

GraphW build_W(const ComplexX& x, const MOracle& oracle, double R) {
  GraphW w;
  w.R = R;
  for (int a = 0; a < x.n(); ++a) {
    if (!x.verts[a].is_level) continue;
    for (int b = a + 1; b < x.n(); ++b) {
      if (!x.verts[b].is_level || !(x.adj[a] >> b & 1)) continue;
      MaxSimplex m;
      m.s = a;
      m.t = b;
      m.mask = (Mask(1) << a) | (Mask(1) << b) | (Mask(1) << x.v_of(a)) |
               (Mask(1) << x.v_of(b));
      w.sims.push_back(m);
    }
  }
  w.adj.assign(w.sims.size(), {});
  const double cut = 10 * R;
  for (size_t i = 0; i < w.sims.size(); ++i)
    for (size_t j = i + 1; j < w.sims.size(); ++j) {
      const MaxSimplex& a = w.sims[i];
      const MaxSimplex& b = w.sims[j];
      bool edge = false, contaminated = false;
      const double dp = oracle.pair_dist(a.s, a.t, b.s, b.t);
      if (std::isnan(dp)) contaminated = true;
      else if (dp <= cut) edge = true;
      if (!edge) {
        // Shared K-vertex: compare the M-sets of the free ends instead.
        int oa = -1, ob = -1;
        if (a.s == b.s) { oa = a.t; ob = b.t; }
        else if (a.s == b.t) { oa = a.t; ob = b.s; }
        else if (a.t == b.s) { oa = a.s; ob = b.t; }
        else if (a.t == b.t) { oa = a.s; ob = b.s; }
        if (oa >= 0) {
          const double ds = oracle.set_dist(oa, ob);
          if (std::isnan(ds)) contaminated = true;
          else if (ds <= cut) edge = true;
        }
      }
      if (edge) {
        w.adj[i].push_back(static_cast<int>(j));
        w.adj[j].push_back(static_cast<int>(i));
      } else if (contaminated) {
        ++w.contaminated_edges;
        w.contaminated.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  return w;
}

std::vector<Mask> augmented_adj(const ComplexX& x, const GraphW& w) {
  std::vector<Mask> aug = x.adj;
  for (size_t i = 0; i < w.sims.size(); ++i)
    for (int j : w.adj[i])
      for_bits(w.sims[i].mask, [&](int a) {
        for_bits(w.sims[static_cast<size_t>(j)].mask, [&](int b) {
          if (a != b) {
            aug[a] |= Mask(1) << b;
            aug[b] |= Mask(1) << a;
          }
        });
      });
  return aug;
}

std::string type_name(SimplexType t) {
  switch (t) {
    case SimplexType::kEmpty: return "empty";
    case SimplexType::kMaximal: return "maximal";
    case SimplexType::kXi: return "xi";
    case SimplexType::kK: return "quasi-line";
    case SimplexType::kV: return "tree-vertex";
    case SimplexType::kLevel: return "level";
    case SimplexType::kTreeEdge: return "tree-edge";
    case SimplexType::kLevelPair: return "level-pair";
    case SimplexType::kLevelFar: return "level-offset";
    case SimplexType::kTriple: return "level-pair-base";
  }
  return "?";
}

std::vector<Mask> all_simplices(const ComplexX& x) {
  std::vector<Mask> out{0};
  // Grow cliques by vertices above the current maximum index; every clique
  // is reached exactly once.
  for (size_t head = 0; head < out.size(); ++head) {
    const Mask m = out[head];
    Mask cand = m == 0 ? x.all() : x.link(m);
    if (m != 0) {
      const int hi = 63 - std::countl_zero(m);
      cand &= ~((Mask(2) << hi) - 1);
    }
    for_bits(cand, [&](int b) { out.push_back(m | (Mask(1) << b)); });
  }
  return out;
}

namespace {

// BFS distances between the listed vertices through edges of `aug`
// restricted to `domain`; -1 entries mark unreachable pairs.
std::vector<std::vector<int>> induced_dists(const std::vector<Mask>& aug, Mask domain,
                                            const std::vector<int>& verts) {
  std::vector<std::vector<int>> d;
  for (int src : verts) {
    std::vector<int> dist(64, -1);
    std::vector<int> q{src};
    dist[src] = 0;
    for (size_t h = 0; h < q.size(); ++h) {
      const int c = q[h];
      for_bits(aug[c] & domain, [&](int nb) {
        if (dist[nb] < 0) {
          dist[nb] = dist[c] + 1;
          q.push_back(nb);
        }
      });
    }
    std::vector<int> row;
    for (int v : verts) row.push_back(dist[v]);
    d.push_back(std::move(row));
  }
  return d;
}

double induced_diam(const std::vector<Mask>& aug, Mask domain) {
  std::vector<int> verts;
  for_bits(domain, [&](int b) { verts.push_back(b); });
  if (verts.size() <= 1) return 0;
  const auto d = induced_dists(aug, domain, verts);
  int diam = 0;
  for (const auto& row : d)
    for (int v : row) {
      if (v < 0) return -1;
      diam = std::max(diam, v);
    }
  return diam;
}

struct Forms {
  std::vector<Mask> kmask;  // per component index: K-vertices over it
  std::vector<Mask> lkxi;   // per component index: Lk_Xi of its tree vertex

  explicit Forms(const ComplexX& x) {
    const int nc = static_cast<int>(x.components.size());
    kmask.assign(nc, 0);
    for (int a = 0; a < x.n(); ++a)
      if (x.verts[a].is_level) kmask[x.v_of(a)] |= Mask(1) << a;
    lkxi.assign(nc, 0);
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j)
        if (x.dtree[i][j] == 1) lkxi[i] |= (Mask(1) << j) | kmask[j];
  }
};

}  // namespace

SimplexRecord classify(const ComplexX& x, const std::vector<Mask>& simplices,
                       const std::vector<Mask>& aug, Mask delta) {
  if (!x.clique(delta))
    throw SurfaceError("BadVertex", "classify called on a non-simplex");
  SimplexRecord r;
  r.simplex = delta;
  r.lk = x.link(delta);
  r.sat = delta;  // Sat contains Delta itself
  for (Mask s : simplices)
    if (s != delta && x.link(s) == r.lk) r.sat |= s;
  r.c_verts = r.lk & ~r.sat;
  r.c_diam = induced_diam(aug, r.c_verts);
  for_bits(delta, [&](int b) { r.interior = r.interior && x.interior_vertex(b); });

  // Shape detection. V-vertex X-indices double as component indices, so
  // vs[i] == x.v_of(vs[i]); "carried" K-vertices are those whose tree
  // vertex is also in the simplex.
  std::vector<int> vs, ks;
  for_bits(delta, [&](int b) { (x.verts[b].is_level ? ks : vs).push_back(b); });
  const auto carried = [&](int k) { return (delta >> x.v_of(k) & 1) != 0; };
  if (delta == 0) r.type = SimplexType::kEmpty;
  else if (vs.size() == 2 && ks.size() == 2) r.type = SimplexType::kMaximal;
  else if (vs.size() == 1 && ks.empty()) r.type = SimplexType::kV;
  else if (vs.empty() && ks.size() == 1) r.type = SimplexType::kLevel;
  else if (vs.size() == 2 && ks.empty()) r.type = SimplexType::kTreeEdge;
  else if (vs.empty() && ks.size() == 2) r.type = SimplexType::kLevelPair;
  else if (vs.size() == 1 && ks.size() == 1)
    r.type = carried(ks[0]) ? SimplexType::kXi : SimplexType::kLevelFar;
  else if (vs.size() == 2 && ks.size() == 1 && carried(ks[0]))
    r.type = SimplexType::kK;
  else if (vs.size() == 1 && ks.size() == 2 && (carried(ks[0]) || carried(ks[1])))
    r.type = SimplexType::kTriple;
  else
    throw SurfaceError("ClassificationMismatch", "simplex shape outside the table");

  // Closed forms, enforced on interior simplices.
  if (r.interior) {
    const Forms f(x);
    Mask lk_form = 0;
    Mask sat_form = r.sat;  // types without an independent closed form
    switch (r.type) {
      case SimplexType::kEmpty: lk_form = x.all(); break;
      case SimplexType::kMaximal: lk_form = 0; break;
      case SimplexType::kV:
        lk_form = f.kmask[vs[0]] | f.lkxi[vs[0]];
        break;
      case SimplexType::kLevel: {
        const int v = x.v_of(ks[0]);
        lk_form = (Mask(1) << v) | f.lkxi[v];
        break;
      }
      case SimplexType::kTreeEdge:
        lk_form = f.kmask[vs[0]] | f.kmask[vs[1]];
        break;
      case SimplexType::kLevelPair:
        lk_form = (Mask(1) << x.v_of(ks[0])) | (Mask(1) << x.v_of(ks[1]));
        break;
      case SimplexType::kLevelFar:
        lk_form = (Mask(1) << x.v_of(ks[0])) | f.kmask[vs[0]];
        break;
      case SimplexType::kXi: {
        const int v = x.v_of(ks[0]);
        lk_form = f.lkxi[v];
        sat_form = delta | (Mask(1) << v) | f.kmask[v];
        break;
      }
      case SimplexType::kK: {
        const int w = vs[0] == x.v_of(ks[0]) ? vs[1] : vs[0];
        lk_form = f.kmask[w];
        sat_form = delta | (Mask(1) << w) | f.lkxi[w];
        break;
      }
      case SimplexType::kTriple: {
        const int other = carried(ks[0]) ? ks[1] : ks[0];
        lk_form = Mask(1) << x.v_of(other);
        break;
      }
    }
    if (lk_form != r.lk)
      throw SurfaceError("ClassificationMismatch",
                         "link of an interior " + type_name(r.type) +
                             " simplex disagrees with its closed form");
    if (sat_form != r.sat)
      throw SurfaceError("ClassificationMismatch",
                         "saturation of an interior " + type_name(r.type) +
                             " simplex disagrees with its closed form");
  }
  return r;
}

Relation relation(const ComplexX& x, Mask lk1, Mask lk2) {
  if (lk1 == lk2) return Relation::kEqual;
  if ((lk1 & ~lk2) == 0) return Relation::kNested;
  if ((lk2 & ~lk1) == 0) return Relation::kCoNested;
  Mask lkk = x.all();
  for_bits(lk1, [&](int b) { lkk &= x.adj[b]; });
  if ((lk2 & ~lkk) == 0) return Relation::kOrthogonal;
  return Relation::kTransverse;
}

RelationTable relations(const ComplexX& x, const std::vector<Mask>& simplices,
                        const std::vector<Mask>& aug) {
  RelationTable t;
  const int nc = static_cast<int>(x.components.size());
  for (int i = 0; i < nc; ++i) {
    if (!x.interior[i]) continue;
    // v^qt is the class of the xi simplex {s, v}; v^ql the class of the
    // quasi-line simplex {t, v(t), v} with d(v(t), v) = 1 (link K^v).
    int s = -1, tneigh = -1;
    for (int a = 0; a < x.n(); ++a) {
      if (!x.verts[a].is_level) continue;
      if (x.v_of(a) == i && s < 0) s = a;
      if (x.dtree[x.v_of(a)][i] == 1 && tneigh < 0) tneigh = a;
    }
    if (s >= 0) {
      const Mask d = (Mask(1) << s) | (Mask(1) << i);
      t.classes.push_back({true, x.components[i], classify(x, simplices, aug, d).lk});
    }
    if (tneigh >= 0) {
      const Mask d =
          (Mask(1) << tneigh) | (Mask(1) << x.v_of(tneigh)) | (Mask(1) << i);
      t.classes.push_back({false, x.components[i], classify(x, simplices, aug, d).lk});
    }
  }
  for (size_t a = 0; a < t.classes.size(); ++a)
    for (size_t b = a + 1; b < t.classes.size(); ++b) {
      const auto& ca = t.classes[a];
      const auto& cb = t.classes[b];
      RelationRow row;
      row.a = static_cast<int>(a);
      row.b = static_cast<int>(b);
      row.computed = relation(x, ca.lk, cb.lk);
      const int d = x.dtree[x.comp_index(ca.component)][x.comp_index(cb.component)];
      if (ca.component == cb.component && ca.quasi_tree != cb.quasi_tree)
        row.expected = Relation::kOrthogonal;
      else if (d == 1 && !ca.quasi_tree && cb.quasi_tree)
        row.expected = Relation::kNested;
      else if (d == 1 && ca.quasi_tree && !cb.quasi_tree)
        row.expected = Relation::kCoNested;
      else if (d == 1 && !ca.quasi_tree && !cb.quasi_tree)
        row.expected = Relation::kOrthogonal;
      else
        row.expected = Relation::kTransverse;
      row.match = row.computed == row.expected;
      if (!row.match) ++t.mismatches;
      t.rows.push_back(row);
    }
  return t;
}

AxiomReport check_axioms(const ComplexX& x, const GraphW& w) {
  AxiomReport rep;
  const std::vector<Mask> sims = all_simplices(x);
  const std::vector<Mask> aug = augmented_adj(x, w);

  // Classify everything once; classes are keyed by link.
  std::map<Mask, SimplexRecord> classes;
  std::vector<SimplexRecord> recs;
  recs.reserve(sims.size());
  for (Mask s : sims) {
    SimplexRecord r = classify(x, sims, aug, s);
    recs.push_back(r);
    auto it = classes.find(r.lk);
    if (it == classes.end()) classes.emplace(r.lk, r);
    else it->second.interior = it->second.interior || r.interior;
  }

  // (1) Longest strict nesting chain over classes, by link inclusion.
  std::vector<Mask> links;
  for (const auto& [lk, r] : classes) links.push_back(lk);
  std::sort(links.begin(), links.end(), [](Mask a, Mask b) {
    return std::popcount(a) < std::popcount(b);
  });
  std::vector<int> depth(links.size(), 1);
  for (size_t i = 0; i < links.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (links[j] != links[i] && (links[j] & ~links[i]) == 0)
        depth[i] = std::max(depth[i], depth[j] + 1);
  rep.chain_max = links.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
  rep.chain_ok = rep.chain_max <= 9;

  // (2) The xi and quasi-line coordinate spaces embed in Y_Delta.
  std::map<std::pair<int, int>, char> fitted;  // (type, component index)
  for (const SimplexRecord& r : recs) {
    if (r.type != SimplexType::kXi && r.type != SimplexType::kK) continue;
    if (!r.interior) continue;
    int comp = -1;
    for_bits(r.c_verts, [&](int b) { if (comp < 0) comp = x.v_of(b); });
    if (comp < 0) continue;
    const auto key = std::make_pair(static_cast<int>(r.type), comp);
    if (fitted.count(key)) continue;
    fitted[key] = 1;
    AxiomReport::Fit fit;
    fit.type = r.type;
    fit.component = x.components[static_cast<size_t>(comp)];
    std::vector<int> verts;
    for_bits(r.c_verts, [&](int b) { verts.push_back(b); });
    const auto dc = induced_dists(aug, r.c_verts, verts);
    const auto dy = induced_dists(aug, x.all() & ~r.sat, verts);
    const int n = static_cast<int>(verts.size());
    bool finite = n >= 2;
    std::vector<double> mc(static_cast<size_t>(n) * n, 0), my(mc);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (dc[i][j] < 0 || dy[i][j] < 0) finite = false;
        mc[static_cast<size_t>(i) * n + j] = dc[i][j];
        my[static_cast<size_t>(i) * n + j] = dy[i][j];
      }
    fit.finite = finite;
    if (fit.finite)
      fit.fit = coarse::qi_fit(coarse::make_metric(verts, mc, "C(Delta)"),
                               coarse::make_metric(verts, my, "Y(Delta)"));
    rep.fits.push_back(fit);
  }
  double kmin = 0, kmax = 0;
  for (const auto& f : rep.fits)
    if (f.finite) {
      if (kmin == 0 || f.fit.K < kmin) kmin = f.fit.K;
      kmax = std::max(kmax, f.fit.K);
    }
  rep.fit_spread = kmin > 0 ? kmax / kmin : 1;

  // (3) Nice joins: when class pairs share a wide common refinement Gamma
  // (diam C(Gamma) > 3, or disconnected), some simplex Pi in Lk(Delta')
  // must gather every such Gamma under Delta.
  std::vector<const SimplexRecord*> cls;
  for (auto& [lk, r] : classes) cls.push_back(&r);
  const auto wide = [](const SimplexRecord& g) { return g.c_diam < 0 || g.c_diam > 3; };
  for (const SimplexRecord* da : cls) {
    if (da->type == SimplexType::kMaximal || !da->interior) continue;
    for (const SimplexRecord* db : cls) {
      if (db->type == SimplexType::kMaximal || da == db || !db->interior) continue;
      std::vector<Mask> gammas;
      for (const SimplexRecord* g : cls)
        if (wide(*g) && (g->lk & ~da->lk) == 0 && (g->lk & ~db->lk) == 0)
          gammas.push_back(g->lk);
      if (gammas.empty()) continue;
      bool found = false;
      for (Mask pi : sims) {
        if ((pi & ~db->lk) != 0) continue;  // Pi must lie in Lk(Delta')
        const Mask joined = db->simplex | pi;
        if (!x.clique(joined)) continue;
        const Mask jlk = x.link(joined);
        if ((jlk & ~da->lk) != 0) continue;  // [Delta' * Pi] nests in [Delta]
        bool covers = true;
        for (Mask g : gammas)
          if ((g & ~jlk) != 0) covers = false;
        if (covers) {
          found = true;
          break;
        }
      }
      if (!found) {
        rep.join_ok = false;
        rep.join_witness_a = da->simplex;
        rep.join_witness_b = db->simplex;
      }
    }
  }

  // (4) Fullness: non-adjacent link vertices seen across a W-edge must be
  // seen across a W-edge of maximal simplices containing Delta. A candidate
  // pair whose W-adjacency could not be measured (contaminated) counts as
  // satisfied rather than as a violation.
  std::vector<std::vector<char>> wcont(w.sims.size(), std::vector<char>(w.sims.size(), 0));
  for (const auto& [i, j] : w.contaminated) wcont[i][j] = wcont[j][i] = 1;
  std::vector<std::vector<char>> wpair(x.n(), std::vector<char>(x.n(), 0));
  for (size_t i = 0; i < w.sims.size(); ++i)
    for (int j : w.adj[i])
      for_bits(w.sims[i].mask, [&](int a) {
        for_bits(w.sims[static_cast<size_t>(j)].mask, [&](int b) {
          wpair[a][b] = wpair[b][a] = 1;
        });
      });
  for (const SimplexRecord& r : recs) {
    if (!rep.full_ok) break;
    if (!r.interior) continue;
    std::vector<int> lkv;
    for_bits(r.lk, [&](int b) {
      if (x.interior_vertex(b)) lkv.push_back(b);
    });
    for (size_t ia = 0; ia < lkv.size() && rep.full_ok; ++ia)
      for (size_t ib = ia + 1; ib < lkv.size() && rep.full_ok; ++ib) {
        const int a = lkv[ia], b = lkv[ib];
        if (x.adj[a] >> b & 1) continue;
        if (!wpair[a][b]) continue;
        const Mask need_a = r.simplex | (Mask(1) << a);
        const Mask need_b = r.simplex | (Mask(1) << b);
        bool ok = false;
        for (size_t i = 0; i < w.sims.size() && !ok; ++i) {
          if ((need_a & ~w.sims[i].mask) != 0) continue;
          for (int j : w.adj[i])
            if ((need_b & ~w.sims[static_cast<size_t>(j)].mask) == 0) {
              ok = true;
              break;
            }
          if (!ok)
            for (size_t j = 0; j < w.sims.size(); ++j)
              if (wcont[i][j] && (need_b & ~w.sims[j].mask) == 0) {
                ok = true;
                break;
              }
        }
        if (!ok) {
          rep.full_ok = false;
          rep.full_witness_delta = r.simplex;
          rep.full_witness_x = a;
          rep.full_witness_y = b;
        }
      }
  }
  return rep;
}

void require_pass(const AxiomReport& r) {
  if (!r.chain_ok)
    throw SurfaceError("AxiomViolation",
                       "nesting chain of length " + std::to_string(r.chain_max));
  if (!r.join_ok)
    throw SurfaceError("AxiomViolation", "nice-join condition failed");
  if (!r.full_ok)
    throw SurfaceError("AxiomViolation", "link fullness failed at vertices " +
                                             std::to_string(r.full_witness_x) + "," +
                                             std::to_string(r.full_witness_y));
}

}  // namespace vl::hhs
