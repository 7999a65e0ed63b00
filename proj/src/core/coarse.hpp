#pragma once

// Generic coarse-geometry certification: four-point delta-hyperbolicity,
// Manning bottleneck tests, quasi-isometry constant fitting, graph
// approximation of path spaces, and a horoball-collapsed hyperbolic-disk
// demonstrator. Everything operates on finite metric spaces or graphs.

#include <array>
#include <string>
#include <vector>

#include "origami.hpp"
#include "rational.hpp"

namespace vl::coarse {

struct FiniteMetricSpace {
  std::vector<int> ids;
  std::vector<double> d;  // row-major |ids| x |ids|
  std::string provenance;

  int size() const { return static_cast<int>(ids.size()); }
  double at(int i, int j) const { return d[static_cast<size_t>(i) * ids.size() + j]; }
  double& at(int i, int j) { return d[static_cast<size_t>(i) * ids.size() + j]; }
};

// Validates d(x,x)=0, symmetry, and the triangle inequality; throws
// SurfaceError("InvalidMetric") with the offending triple.
FiniteMetricSpace make_metric(std::vector<int> ids, std::vector<double> d,
                              std::string provenance, double tol = 1e-9);

struct DeltaResult {
  double delta = 0;
  std::array<int, 4> witness{-1, -1, -1, -1};  // indices, not ids
};

// Minimal delta for the four-point condition, exhaustive over quadruples.
DeltaResult delta_4pt(const FiniteMetricSpace& m);

struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;
  void add_edge(int a, int b);
};

std::vector<int> bfs_dist(const Graph& g, int src);

struct BottleneckResult {
  bool pass = true;
  int witness_a = -1, witness_b = -1;  // failing pair, when !pass
};

// Manning bottleneck check: for every (sampled) pair and every vertex on a
// BFS geodesic between them, deleting the closed ball of radius B around the
// vertex must separate the pair (or the ball must contain an endpoint).
BottleneckResult bottleneck(const Graph& g, double B,
                            const std::vector<std::pair<int, int>>& pairs = {});

struct QiFit {
  double K = 1, C = 0;
  double max_residual = 0;      // slack of the binding pair at (K, C)
  int binding_a = -1, binding_b = -1;
};

// Smallest grid K (step 0.25, up to k_max) with the minimal additive C such
// that dy is within (K, C) of dx on all pairs: (1/K)dx - C <= dy <= K dx + C.
QiFit qi_fit(const FiniteMetricSpace& dx, const FiniteMetricSpace& dy,
             double k_max = 16);

struct ApproxGraph {
  std::vector<int> subset;  // indices into the sampled space
  Graph graph;
  QiFit fit;  // graph metric (scaled by R') against the space metric
};

// Graph approximation of a path space sample: vertices = subset, edges
// between subset points within R'. Requires the subset R-dense
// (SurfaceError("NotDense")) and R' > 3R (SurfaceError("BadParameter")).
ApproxGraph graph_approx(const FiniteMetricSpace& m, const std::vector<int>& subset,
                         double R, double Rp);

// Mesh of the hyperbolic ball of the given radius around i in the upper
// half-plane, with horoballs at rationals p/q (Euclidean diameter scale/q^2)
// collapsed to points; metric = shortest path in the mesh graph. Throws
// SurfaceError("MeshTooCoarse") when the mesh graph is disconnected. The
// returned space is subsampled to at most max_points points.
FiniteMetricSpace collapsed_disk_ball(double radius, double scale, double step = 0.25,
                                      int q_max = 4, int max_points = 120);

// CSV with id headers; CMS1 compact binary (16-byte header: magic "CMS1",
// u32 point count, 4 reserved bytes; then row-major little-endian f64).
std::string metric_to_csv(const FiniteMetricSpace& m);
FiniteMetricSpace metric_from_csv(const std::string& text);
std::vector<unsigned char> metric_to_binary(const FiniteMetricSpace& m);
FiniteMetricSpace metric_from_binary(const std::vector<unsigned char>& bytes);

}  // namespace vl::coarse
