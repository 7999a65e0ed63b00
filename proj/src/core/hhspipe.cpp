#include "hhspipe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace vl::hhs {

using origami::SurfaceError;

namespace {

struct ScoredPoint {
  int vertex = -1;
  long long n = 0;
  double badness = 0;  // distance of the lambda values from the levels
};

}  // namespace

FixtureHhs build_fixture_hhs(const cover::DevelopedPatch& patch,
                             const cover::SpineLift& lift,
                             const std::vector<cover::SaddleConnectionLift>& scs,
                             const cyl::Decomposition& dec,
                             const cyl::SpineQuotient& spine,
                             const cyl::Multitwist& mt, int home, int depth,
                             long long level_lo, long long level_hi, double R,
                             double sc_max_len, int max_components) {
  FixtureHhs out;
  out.home = home;

  // The spine tree of a deep patch has enormous valence, so a ball prefix
  // is all boundary. Keep a path home -> depth plus one sibling instead:
  // its middle vertices have complete kept neighborhoods within X.
  const cover::TreeBall ball = cover::tree_ball(lift, home, depth);
  out.lifted.push_back(home);
  int cur = home;
  for (int d = 1; d <= depth; ++d) {
    for (size_t i = 0; i < ball.vertices.size(); ++i)
      if (ball.depth_of[i] == d &&
          cover::tree_distance(lift, cur, ball.vertices[i]) == 1) {
        cur = ball.vertices[i];
        out.lifted.push_back(cur);
        break;
      }
  }
  for (size_t i = 0; i < ball.vertices.size(); ++i)
    if (ball.depth_of[i] == 1 && ball.vertices[i] != (out.lifted.size() > 1
                                                          ? out.lifted[1]
                                                          : -1)) {
      out.lifted.push_back(ball.vertices[i]);
      break;
    }
  if (static_cast<int>(out.lifted.size()) > max_components)
    out.lifted.resize(static_cast<size_t>(max_components));

  // Interior = the kept X-neighborhood could be the true one: at least two
  // kept neighbors, and no other kept component with the same neighbor set
  // (degenerate ball leaves collide in saturations and relations).
  const size_t nc = out.lifted.size();
  std::vector<std::vector<char>> nbr(nc, std::vector<char>(nc, 0));
  for (size_t i = 0; i < nc; ++i)
    for (size_t j = i + 1; j < nc; ++j)
      if (cover::tree_distance(lift, out.lifted[i], out.lifted[j]) == 1)
        nbr[i][j] = nbr[j][i] = 1;
  std::vector<char> interior(nc, 1);
  for (size_t i = 0; i < nc; ++i) {
    int deg = 0;
    for (size_t j = 0; j < nc; ++j) deg += nbr[i][j];
    if (deg < 2) interior[i] = 0;
    for (size_t j = 0; j < nc; ++j)
      if (j != i && nbr[i] == nbr[j]) interior[i] = 0;
  }
  out.x = build_X(lift, out.lifted, interior, level_lo, level_hi);

  // Per component: the lambda coordinate and quasimorphism over its
  // quotient component (shared between lifts of the same component).
  std::map<int, qm::PsiV> psi_of_qc;
  for (int lc_comp : out.lifted) {
    const int qc = qm::quotient_component_of(patch, lift, spine, lc_comp);
    auto it = psi_of_qc.find(qc);
    if (it == psi_of_qc.end())
      it = psi_of_qc.emplace(qc, qm::build_psi_v(dec, spine, mt, qc, 4, 500)).first;
    out.psi.push_back(it->second);
    out.lambda.push_back(qm::lambda_coordinate(patch, lift, dec, spine,
                                               out.psi.back().pres, mt, lc_comp));
  }
  out.k1 = 1;
  for (const qm::PsiV& p : out.psi)
    out.k1 = std::max(out.k1, qm::measured_k1(p));

  double per_max = 0;
  for (const qm::LambdaCoordinate& lc : out.lambda)
    per_max = std::max(per_max, to_double(lc.period));

  // M-set representatives per K-vertex (level set on one component) and per
  // maximal simplex (intersection of adjacent level sets), capped and
  // deterministic: best lambda fits first, ties by vertex and shear index.
  const long long n_range = 2;
  const int cap = 6;
  const auto level_points = [&](int k, int k2) {
    const int ci = out.x.v_of(k);
    const qm::LambdaCoordinate& lcv = out.lambda[static_cast<size_t>(ci)];
    const qm::PsiV& psiv = out.psi[static_cast<size_t>(ci)];
    std::vector<ScoredPoint> pts;
    for (int x = 0; x < static_cast<int>(patch.vertices.size()); ++x) {
      if (lcv.anchor[static_cast<size_t>(x)] < 0) continue;
      if (k2 >= 0 && out.lambda[static_cast<size_t>(out.x.v_of(k2))]
                             .anchor[static_cast<size_t>(x)] < 0)
        continue;
      for (long long n = -n_range; n <= n_range; ++n) {
        const Rat t = Rat(n) * lcv.period;
        double bad = std::abs(qm::lambda_v(lcv, psiv, x, t) -
                              static_cast<double>(out.x.verts[k].level));
        if (k2 >= 0) {
          const int cj = out.x.v_of(k2);
          bad = std::max(bad, std::abs(qm::lambda_v(out.lambda[static_cast<size_t>(cj)],
                                                    out.psi[static_cast<size_t>(cj)], x, t) -
                                       static_cast<double>(out.x.verts[k2].level)));
        }
        if (bad <= out.k1) pts.push_back({x, n, bad});
      }
    }
    std::sort(pts.begin(), pts.end(), [](const ScoredPoint& a, const ScoredPoint& b) {
      return std::tie(a.badness, a.vertex, a.n) < std::tie(b.badness, b.vertex, b.n);
    });
    if (pts.size() > static_cast<size_t>(cap)) pts.resize(static_cast<size_t>(cap));
    return pts;
  };

  std::map<int, std::vector<ScoredPoint>> single;
  std::map<std::pair<int, int>, std::vector<ScoredPoint>> paired;
  const auto single_of = [&](int k) -> const std::vector<ScoredPoint>& {
    auto it = single.find(k);
    if (it == single.end()) it = single.emplace(k, level_points(k, -1)).first;
    return it->second;
  };
  const auto paired_of = [&](int s, int t) -> const std::vector<ScoredPoint>& {
    const auto key = std::minmax(s, t);
    auto it = paired.find(key);
    if (it == paired.end()) it = paired.emplace(key, level_points(s, t)).first;
    return it->second;
  };

  std::map<std::pair<int, int>, double> flat_cache;
  const auto flat0 = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = flat_cache.find(key);
    if (it == flat_cache.end()) {
      const cover::FlatPath p =
          cover::flat_distance(patch, scs, key.first, key.second, Rat(0),
                               sc_max_len, true);
      it = flat_cache.emplace(key, p.length).first;
    }
    return it->second;
  };
  const auto set_dist = [&](const std::vector<ScoredPoint>& a,
                            const std::vector<ScoredPoint>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::infinity();
    for (const ScoredPoint& p : a)
      for (const ScoredPoint& q : b)
        best = std::min(best, flat0(p.vertex, q.vertex) +
                                  per_max * static_cast<double>(std::llabs(p.n - q.n)));
    return best;
  };

  MOracle oracle;
  oracle.pair_dist = [&, set_dist](int s1, int t1, int s2, int t2) {
    return set_dist(paired_of(s1, t1), paired_of(s2, t2));
  };
  oracle.set_dist = [&, set_dist](int t1, int t2) {
    return set_dist(single_of(t1), single_of(t2));
  };
  out.w = build_W(out.x, oracle, R);
  return out;
}

}  // namespace vl::hhs
