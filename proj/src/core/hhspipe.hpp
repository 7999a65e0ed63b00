#pragma once

// Builds the finite HHS truncation of a developed patch: X on a tree ball
// of spine components with integer lambda levels, and W from M-set
// distances measured in the flat metric.

#include <vector>

#include "hhs.hpp"
#include "lambda.hpp"

namespace vl::hhs {

struct FixtureHhs {
  ComplexX x;
  GraphW w;
  int home = 0;               // lifted root component
  std::vector<int> lifted;    // lifted component id per X component index
  std::vector<qm::LambdaCoordinate> lambda;  // parallel to lifted
  std::vector<qm::PsiV> psi;                 // parallel to lifted
  double k1 = 1;
};

// The depth-`depth` tree ball around the lifted component `home`, levels
// level_lo..level_hi; components are interior when their ball entry is not
// truncated and lies strictly inside the ball. W-edges use the 10R rule on
// M-set representative distances (flat distance at shear zero plus one
// period per shear-index step).
FixtureHhs build_fixture_hhs(const cover::DevelopedPatch& patch,
                             const cover::SpineLift& lift,
                             const std::vector<cover::SaddleConnectionLift>& scs,
                             const cyl::Decomposition& dec,
                             const cyl::SpineQuotient& spine,
                             const cyl::Multitwist& mt, int home, int depth,
                             long long level_lo, long long level_hi, double R,
                             double sc_max_len, int max_components = 12);

}  // namespace vl::hhs
