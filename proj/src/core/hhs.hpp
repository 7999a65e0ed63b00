#pragma once

// Finite truncations of the combinatorial HHS pair (X, W): the flag complex
// X on tree vertices and quasi-line levels, the X-graph W on its maximal
// simplices, links / saturations / augmented complements, the simplex type
// classification with closed-form cross-checks, the nesting/orthogonality
// relation table, and the combinatorial-HHS axiom checks.
//
// X is capped at 64 vertices so simplices and vertex sets are bitmasks.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coarse.hpp"
#include "cover.hpp"

namespace vl::hhs {

using Mask = std::uint64_t;

struct XVertex {
  bool is_level = false;  // false: V-vertex (tree vertex); true: K-vertex
  int tree = 0;           // component id (for K-vertices: v(s))
  long long level = 0;    // lambda level (K-vertices only)
};

struct ComplexX {
  std::vector<XVertex> verts;
  std::vector<Mask> adj;           // per vertex, neighbors in X
  std::vector<int> components;     // tree component ids in play
  std::vector<char> interior;      // per component: complete neighbor list
  std::vector<std::vector<int>> dtree;  // pairwise tree distance, -1 = inf

  int n() const { return static_cast<int>(verts.size()); }
  int comp_index(int component) const;
  int v_of(int x) const;           // X-index of the tree vertex under x
  bool interior_vertex(int x) const;
  int tree_dist(int x, int y) const;  // between the trees under two vertices
  bool clique(Mask m) const;
  Mask link(Mask m) const;         // vertices adjacent to all of m
  Mask all() const { return n() == 64 ? ~Mask(0) : (Mask(1) << n()) - 1; }
};

// X on the given components (with their pairwise tree distances computed
// from the lift) and integer levels level_lo..level_hi over each component.
// interior[i] marks components whose full neighbor set is inside the list.
ComplexX build_X(const cover::SpineLift& lift, const std::vector<int>& components,
                 const std::vector<char>& interior, long long level_lo,
                 long long level_hi);

// Same construction from an explicit tree-distance matrix (components are
// then numbered 0..n-1); used by synthetic truncations and tests.
ComplexX build_X_from_tree(const std::vector<std::vector<int>>& dtree,
                           const std::vector<char>& interior, long long level_lo,
                           long long level_hi);

struct MaxSimplex {
  int s = 0, t = 0;  // K-vertex indices, v(s) and v(t) adjacent trees
  Mask mask = 0;     // {s, v(s), t, v(t)}
};

// Distances between M-sets on the truncation, indexed by K-vertices of X:
// pair_dist = inf-distance between M(s1,t1) and M(s2,t2); set_dist = between
// M(t1) and M(t2). NaN marks a contaminated (unmeasurable) pair.
struct MOracle {
  std::function<double(int, int, int, int)> pair_dist;
  std::function<double(int, int)> set_dist;
};

struct GraphW {
  std::vector<MaxSimplex> sims;
  std::vector<std::vector<int>> adj;
  double R = 1;
  int contaminated_edges = 0;  // pairs skipped on NaN distances
  std::vector<std::pair<int, int>> contaminated;  // those pairs, i < j
};

GraphW build_W(const ComplexX& x, const MOracle& oracle, double R);

// W-augmented adjacency: X edges plus complete joins between W-adjacent
// maximal simplices.
std::vector<Mask> augmented_adj(const ComplexX& x, const GraphW& w);

enum class SimplexType {
  kEmpty,
  kMaximal,
  kXi,        // {s, v(s)}
  kK,         // {s, v(s), w}
  kV,         // {u}
  kLevel,     // {s}
  kTreeEdge,  // {u, w}
  kLevelPair, // {s, t}
  kLevelFar,  // {s, u}, u != v(s)
  kTriple,    // {s, t, v(s)}
};

std::string type_name(SimplexType t);

struct SimplexRecord {
  Mask simplex = 0;
  SimplexType type = SimplexType::kEmpty;
  Mask lk = 0;
  Mask sat = 0;
  Mask c_verts = 0;   // Lk minus Sat: the vertex set of C(Delta)
  double c_diam = 0;  // in the augmented metric restricted to C(Delta); -1 disconnected
  bool interior = true;
};

// All simplices of X (bitmask cliques), including the empty one.
std::vector<Mask> all_simplices(const ComplexX& x);

// Classification with the closed-form cross-check; throws
// SurfaceError("ClassificationMismatch") when the first-principles link or
// saturation disagrees with the table form on an interior simplex.
SimplexRecord classify(const ComplexX& x, const std::vector<Mask>& simplices,
                       const std::vector<Mask>& aug, Mask delta);

enum class Relation { kEqual, kNested, kCoNested, kOrthogonal, kTransverse };

// [d1] vs [d2] from link containments (Defs nest/orth).
Relation relation(const ComplexX& x, Mask lk1, Mask lk2);

struct RelationRow {
  int a = 0, b = 0;  // class indices into the table's class list
  Relation computed = Relation::kTransverse;
  Relation expected = Relation::kTransverse;
  bool match = true;
};

struct RelationTable {
  // Classes: Xi-type (v^qt, by component) and K-type (w^ql, by component).
  struct Cls {
    bool quasi_tree = false;  // true: v^qt, false: v^ql
    int component = 0;
    Mask lk = 0;
  };
  std::vector<Cls> classes;
  std::vector<RelationRow> rows;
  int mismatches = 0;
};

RelationTable relations(const ComplexX& x, const std::vector<Mask>& simplices,
                        const std::vector<Mask>& aug);

struct AxiomReport {
  // (1) longest strict nesting chain over simplex classes.
  int chain_max = 0;
  bool chain_ok = true;  // <= 9
  // (2) C(Delta) -> Y_Delta embedding fits for Xi- and K-type classes.
  struct Fit {
    SimplexType type = SimplexType::kXi;
    int component = 0;
    coarse::QiFit fit;
    bool finite = true;
  };
  std::vector<Fit> fits;
  double fit_spread = 1;  // max/min K among finite fits of the same type
  // (3) nice-join condition.
  bool join_ok = true;
  Mask join_witness_a = 0, join_witness_b = 0;
  // (4) fullness of links across W-edges.
  bool full_ok = true;
  Mask full_witness_delta = 0;
  int full_witness_x = -1, full_witness_y = -1;
};

AxiomReport check_axioms(const ComplexX& x, const GraphW& w);

// Throws SurfaceError("AxiomViolation") when an interior witness fails
// conditions (1), (3) or (4).
void require_pass(const AxiomReport& r);

}  // namespace vl::hhs
