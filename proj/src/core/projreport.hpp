#pragma once

// Projection diameter report: for a center component v and a list of target
// components w, the diameters of xi^v(Theta^w) in the Xi-graph metric and of
// Lambda^v(Theta^w) in the lambda coordinate, across sampled chart shears,
// with the tree-distance case split. Also the DOT export of a Xi graph.

#include <string>
#include <vector>

#include "lambda.hpp"
#include "projections.hpp"

namespace vl::proj {

struct ProjectionRow {
  int v = 0, w = 0;
  int dtree = -1;          // -1 = infinite (not joined by complete strips)
  bool excluded = false;   // w == v: xi-diameter exception
  double xi_diam = 0;      // Xi-graph metric
  double lambda_diam = 0;  // lambda-coordinate spread
  int charts = 0;          // shears sampled
  int samples = 0;         // window sources that produced entries
  bool contaminated = false;
};

std::vector<ProjectionRow> projection_report(
    const cover::DevelopedPatch& patch, const cover::SpineLift& lift,
    const std::vector<cover::SaddleConnectionLift>& scs,
    const qm::LambdaCoordinate& lc, const qm::PsiV& psi, const XiGraph& xi, int v,
    const std::vector<int>& targets, const std::vector<Rat>& shears,
    double sc_max_len, int max_sources = 12);

std::string xi_graph_dot(const XiGraph& xi);

}  // namespace vl::proj
