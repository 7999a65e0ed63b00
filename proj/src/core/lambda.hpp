#pragma once

// The quasi-line coordinate lambda^v on Theta^v and the level sets M(s),
// M(s,t).
//
// The tiling rule: a point of the lifted Theta^v is assigned the group
// element (word, n), where word is the spine-tree word from the base lift to
// the point's anchor (its nearest spine position, reached by the vertical
// column through its strip) and n is the shear index floor(t / period) of
// the chart sample. lambda^v is psi^v of that element; it is constant on
// each tile (one spine vertex's star times one shear period) and increases
// by exactly 1 across one shear period.

#include <vector>

#include "cover.hpp"
#include "projections.hpp"
#include "quasim.hpp"

namespace vl::qm {

struct LambdaCoordinate {
  int component = 0;
  Rat period;         // multitwist shear period
  int base_lift = -1; // lifted spine vertex over the presentation's base
  // Per lifted vertex: the anchor spine vertex on theta^v (-1 when the
  // vertex is outside Theta^v or its column is clipped) and the tile word.
  std::vector<int> anchor;
  std::vector<Word> word;
};

LambdaCoordinate lambda_coordinate(const cover::DevelopedPatch& patch,
                                   const cover::SpineLift& lift,
                                   const cyl::Decomposition& dec,
                                   const cyl::SpineQuotient& spine,
                                   const cover::FreePresentation& pres,
                                   const cyl::Multitwist& mt, int v);

// The quotient spine component a lifted component covers (the id space of
// spine_pi1 and build_psi_v).
int quotient_component_of(const cover::DevelopedPatch& patch,
                          const cover::SpineLift& lift,
                          const cyl::SpineQuotient& spine, int v);

// The tile element of the lifted vertex x under chart shear t. Throws
// OutsideTiling when x is not anchored.
GroupElt tile_of(const LambdaCoordinate& lc, int x, const Rat& t);

// lambda^v(x, t) = psi^v(tile element).
double lambda_v(const LambdaCoordinate& lc, const PsiV& psi, int x, const Rat& t);

// Max |psi(p_j^k, k n_j)| over the peripherals and 1 <= k <= kmax: the
// measured lambda-drift along one boundary line.
double measured_k1(const PsiV& psi, int kmax = 20);

struct MPoint {
  int vertex = -1;
  long long n = 0;
  double lv = 0, lw = 0;  // lambda^v and lambda^w at the point
};

struct MSet {
  int v = 0, w = 0;
  double s = 0, t = 0;
  double k1 = 1;
  std::vector<MPoint> points;
  double diam = 0;  // measured over capped representatives
  bool diam_reliable = true;
};

// Representative points of M(s) cap M(t): lifted vertices of
// Theta^v cap Theta^w across shear indices |n| <= n_range whose lambda
// values lie within k1 of the requested levels. Throws EmptyOnTruncation
// when no such point exists in the patch's lambda range.
MSet m_pair(const cover::DevelopedPatch& patch,
            const std::vector<cover::SaddleConnectionLift>& scs,
            const LambdaCoordinate& lcv, const PsiV& psiv,
            const LambdaCoordinate& lcw, const PsiV& psiw, double s, double t,
            double k1, long long n_range, double sc_max_len);

}  // namespace vl::qm
