#pragma once

// Periodic-direction machinery: cylinder decompositions in a rational
// direction, the quotient spine graph of saddle connections, multitwists,
// and the one-parameter shear chart family over a horocycle.
//
// Everything is computed in the normalized chart, the unit-square re-marking
// M*s in which the chosen direction is horizontal. There, leaves are
// h-cycles, cylinders are maximal stacks of leaves glued across regular
// interface circles, and saddle connections are the runs of unit edges
// between singular vertices on the singular interface lines.

#include <vector>

#include "origami.hpp"

namespace vl::cyl {

struct SaddleConnection {
  int id = 0;
  std::vector<int> edges;  // chart squares whose bottom edge the run follows
  int from_vertex = 0, to_vertex = 0;  // cone point ids in the chart
  long long length = 0;                // unit edges; shear-invariant
};

struct Cylinder {
  int id = 0;
  std::vector<std::vector<int>> rows;  // bottom row first; squares in h-cycle order
  long long circumference = 0, height = 0;
  std::vector<int> boundary_bottom, boundary_top;  // cyclic saddle-connection ids
};

struct Decomposition {
  origami::Direction direction;
  origami::Matrix2Q normalizer;  // M with M*(p,q) horizontal
  origami::Surface chart;        // M * s, re-marked into unit squares
  origami::CornerMap corners;    // of the chart
  std::vector<std::vector<int>> leaves;  // h-cycles of the chart, cycle order
  std::vector<int> leaf_of;              // chart square -> leaf id
  std::vector<SaddleConnection> saddles;
  std::vector<int> saddle_of_edge;  // chart square -> id of the saddle
                                    // connection its bottom edge lies on, or -1
  std::vector<Cylinder> cylinders;
  std::vector<int> cylinder_of;  // chart square -> cylinder id
};

Decomposition cylinder_decomposition(const origami::Surface& s, const origami::Direction& d);

struct SpineQuotient {
  std::vector<int> vertices;        // singular cone point ids in the chart
  std::vector<int> edge_from, edge_to;  // per saddle connection
  std::vector<long long> edge_length;
  std::vector<int> component_of_vertex;  // dense component ids
  int num_components = 0;
};

SpineQuotient spine_graph(const Decomposition& dec);

struct Multitwist {
  Rat shear;  // minimal positive s with every s*height/circumference integral
  std::vector<long long> twist_powers;  // per cylinder, same order as dec
  bool verified = false;   // affine-automorphism check ran and passed
  bool verifiable = true;  // false when the conjugated shear is not integral
};

// Throws SurfaceError("AutomorphismCheckFailed") if the verifiable check fails.
Multitwist multitwist(const origami::Surface& s, const Decomposition& dec);

struct HoroChart {
  origami::Direction direction;
  origami::Matrix2Q normalizer;
  Rat shear_period;
  std::vector<Rat> sample_shears;  // k evenly spaced values in [0, shear_period)
};

HoroChart horocycle_chart(const origami::Surface& s, const origami::Direction& d, int samples);

// Length of the integer chart vector w under the sample shear [[1,t],[0,1]].
double sheared_length(const Rat& t, long long wx, long long wy);

}  // namespace vl::cyl
