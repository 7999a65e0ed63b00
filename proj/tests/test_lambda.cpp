#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "core/jsonio.hpp"
#include "core/lambda.hpp"
#include "core/projreport.hpp"

using namespace vl;
using namespace vl::origami;
using namespace vl::cover;
using namespace vl::qm;

namespace {

Surface load_fixture(const std::string& name) {
  const char* dir = std::getenv("VEECHLAB_FIXTURES");
  REQUIRE(dir != nullptr);
  std::ifstream in(std::string(dir) + "/" + name + ".json");
  REQUIRE(in.good());
  return jsonio::parse_surface(jsonio::json::parse(in));
}

Surface mild_surface() {
  Surface s;
  s.n = 4;
  s.h = {1, 2, 3, 0};
  s.v = {2, 1, 0, 3};
  s.name = "X4";
  validate(s);
  return s;
}

struct LSetup {
  cyl::Decomposition dec;
  cyl::SpineQuotient spine;
  cyl::Multitwist mt;
  DevelopedPatch patch;
  SpineLift lift;
  std::vector<SaddleConnectionLift> scs;

  LSetup(const Surface& s, int radius, int cap, double sc_len)
      : dec(cyl::cylinder_decomposition(s, Direction{1, 0})),
        spine(cyl::spine_graph(dec)),
        mt(cyl::multitwist(s, dec)),
        patch(develop_patch(dec.chart, radius, cap)),
        lift(lift_spines(patch, dec)),
        scs(saddle_connections(patch, sc_len)) {}
};

const LSetup& l3() {
  static LSetup s(load_fixture("L3"), 4, 400000, 2.0);
  return s;
}

const LSetup& x4() {
  static LSetup s(mild_surface(), 4, 400000, 2.5);
  return s;
}

// The lifted component with the metrically deepest spine vertex.
int home(const LSetup& st) {
  int best = -1;
  double bm = -1;
  for (const SpineComponent& c : st.lift.components)
    for (int x : c.vertices) {
      const double m = boundary_margin(st.patch, x);
      if (m > bm) {
        bm = m;
        best = c.id;
      }
    }
  REQUIRE(best >= 0);
  return best;
}

struct Coord {
  int v = 0, qc = 0;
  PsiV psi;
  LambdaCoordinate lc;
};

Coord coord(const LSetup& st, int v) {
  Coord c;
  c.v = v;
  c.qc = quotient_component_of(st.patch, st.lift, st.spine, v);
  c.psi = build_psi_v(st.dec, st.spine, st.mt, c.qc, 4, 500);
  c.lc = lambda_coordinate(st.patch, st.lift, st.dec, st.spine, c.psi.pres, st.mt, v);
  return c;
}

std::pair<long long, long long> vpos(const DevelopedPatch& p, int x) {
  const auto [c, k] = p.vertices[x].flags.front();
  return {p.cells[c].X + (k == BR || k == TR ? 1 : 0),
          p.cells[c].Y + (k == TR || k == TL ? 1 : 0)};
}

}  // namespace

TEST_CASE("the base tile carries the identity") {
  for (const LSetup* st : {&l3(), &x4()}) {
    Coord c = coord(*st, home(*st));
    CHECK(c.lc.base_lift >= 0);
    const GroupElt g = tile_of(c.lc, c.lc.base_lift, Rat(0));
    CHECK(g.w.empty());
    CHECK(g.n == 0);
    CHECK(lambda_v(c.lc, c.psi, c.lc.base_lift, Rat(0)) == 0);
    // Anywhere inside the first shear period the index stays 0.
    CHECK(tile_of(c.lc, c.lc.base_lift, c.lc.period / 3).n == 0);
    CHECK(tile_of(c.lc, c.lc.base_lift, -c.lc.period / 3).n == -1);
  }
}

TEST_CASE("one shear period shifts lambda by exactly one") {
  Coord c = coord(l3(), home(l3()));
  int tested = 0;
  for (size_t x = 0; x < c.lc.anchor.size() && tested < 25; ++x) {
    if (c.lc.anchor[x] < 0) continue;
    for (const Rat& t : {Rat(0), Rat(1, 3), Rat(-2)}) {
      const double lo = lambda_v(c.lc, c.psi, static_cast<int>(x), t);
      const double hi = lambda_v(c.lc, c.psi, static_cast<int>(x), t + c.lc.period);
      CHECK(hi - lo == doctest::Approx(1.0).epsilon(1e-12));
    }
    ++tested;
  }
  CHECK(tested == 25);
}

TEST_CASE("tiles are anchored on the spine and carry reduced constant words") {
  for (const LSetup* st : {&l3(), &x4()}) {
    const int v = home(*st);
    Coord c = coord(*st, v);
    std::set<int> on_spine(st->lift.components[v].vertices.begin(),
                           st->lift.components[v].vertices.end());
    int anchored = 0, off_spine = 0;
    for (size_t x = 0; x < c.lc.anchor.size(); ++x) {
      const int a = c.lc.anchor[x];
      if (a < 0) continue;
      ++anchored;
      CHECK(on_spine.count(a) == 1);
      CHECK(words::reduce(c.lc.word[x]) == c.lc.word[x]);
      CHECK(c.lc.word[x] == c.lc.word[a]);  // constant on the tile
      if (on_spine.count(static_cast<int>(x))) {
        CHECK(a == static_cast<int>(x));
      } else {
        ++off_spine;
        // The anchor sits on the vertical column through the point, at most
        // one cylinder height away.
        const auto [px, py] = vpos(st->patch, static_cast<int>(x));
        const auto [ax, ay] = vpos(st->patch, a);
        CHECK(ax == px);
        long long max_h = 1;
        for (const cyl::Cylinder& cy : st->dec.cylinders)
          max_h = std::max(max_h, cy.height);
        CHECK(std::llabs(ay - py) <= max_h);
      }
    }
    CHECK(anchored > 10);
    CHECK(off_spine > 4);
  }
}

TEST_CASE("other lifts of the base cone point carry nontrivial deck words") {
  for (const LSetup* st : {&l3(), &x4()}) {
    const int v = home(*st);
    Coord c = coord(*st, v);
    const int base_cone = st->spine.vertices[c.psi.pres.base_vertex];
    int others = 0;
    for (int x : st->lift.components[v].vertices) {
      if (x == c.lc.base_lift || st->patch.vertices[x].quotient_vertex != base_cone)
        continue;
      ++others;
      CHECK(!c.lc.word[x].empty());
    }
    CHECK(others >= 1);
  }
}

TEST_CASE("points outside the component are rejected") {
  Coord c = coord(l3(), home(l3()));
  int outside = -1;
  for (size_t x = 0; x < c.lc.anchor.size(); ++x)
    if (c.lc.anchor[x] < 0) {
      outside = static_cast<int>(x);
      break;
    }
  REQUIRE(outside >= 0);
  try {
    lambda_v(c.lc, c.psi, outside, Rat(0));
    CHECK(false);
  } catch (const SurfaceError& e) {
    CHECK(e.code == "OutsideTiling");
  }
}

TEST_CASE("lambda drift along boundary lines is bounded") {
  for (const LSetup* st : {&l3(), &x4()}) {
    Coord c = coord(*st, home(*st));
    const double k1 = measured_k1(c.psi);
    CHECK(std::isfinite(k1));
    // On these fixtures psi is an honest homomorphism killing the
    // peripherals, so the drift vanishes identically.
    CHECK(k1 == 0);
  }
}

TEST_CASE("m_pair contains its defining point and shifts equivariantly") {
  const LSetup& st = l3();
  const int v = home(st);
  Coord cv = coord(st, v);
  // An adjacent component across a full strip.
  int w = -1;
  for (bool allow_truncated : {false, true}) {
    for (const Strip& s : st.lift.strips) {
      if (s.truncated && !allow_truncated) continue;
      if (s.bottom_component == v && s.top_component >= 0 && s.top_component != v)
        w = s.top_component;
      if (s.top_component == v && s.bottom_component >= 0 && s.bottom_component != v)
        w = s.bottom_component;
      if (w >= 0) break;
    }
    if (w >= 0) break;
  }
  REQUIRE(w >= 0);
  Coord cw = coord(st, w);

  int x = -1;
  for (size_t i = 0; i < cv.lc.anchor.size(); ++i)
    if (cv.lc.anchor[i] >= 0 && cw.lc.anchor[i] >= 0) {
      x = static_cast<int>(i);
      break;
    }
  REQUIRE(x >= 0);

  const double s = lambda_v(cv.lc, cv.psi, x, Rat(0));
  const double t = lambda_v(cw.lc, cw.psi, x, Rat(0));
  const double k1 = std::max(measured_k1(cv.psi), 1.0);
  MSet m = m_pair(st.patch, st.scs, cv.lc, cv.psi, cw.lc, cw.psi, s, t, k1, 2, 2.0);
  bool found = false;
  for (const MPoint& p : m.points) found = found || (p.vertex == x && p.n == 0);
  CHECK(found);
  CHECK(m.diam >= 0);
  CHECK(std::isfinite(m.diam));

  // Shifting both levels by one period translates the members by n -> n+1.
  MSet m2 = m_pair(st.patch, st.scs, cv.lc, cv.psi, cw.lc, cw.psi, s + 1, t + 1, k1,
                   2, 2.0);
  std::set<std::pair<int, long long>> shifted, got;
  for (const MPoint& p : m.points)
    if (p.n + 1 <= 2) shifted.insert({p.vertex, p.n + 1});
  for (const MPoint& p : m2.points)
    if (p.n > -2) got.insert({p.vertex, p.n});
  CHECK(shifted == got);

  // A level far beyond the truncation's lambda range is empty.
  try {
    m_pair(st.patch, st.scs, cv.lc, cv.psi, cw.lc, cw.psi, 1e6, t, k1, 2, 2.0);
    CHECK(false);
  } catch (const SurfaceError& e) {
    CHECK(e.code == "EmptyOnTruncation");
  }
}

TEST_CASE("projection report rows follow the tree-distance case split") {
  const LSetup& st = l3();
  const int v = home(st);
  Coord c = coord(st, v);
  const proj::XiGraph xi = proj::xi_graph(st.patch, st.lift, v);

  const TreeBall ball = tree_ball(st.lift, v, 2);
  std::vector<int> targets{v};
  int adjacent = -1, far = -1;
  for (size_t i = 0; i < ball.vertices.size(); ++i) {
    if (ball.depth_of[i] == 1 && adjacent < 0) adjacent = ball.vertices[i];
    if (ball.depth_of[i] == 2 && far < 0) far = ball.vertices[i];
  }
  REQUIRE(adjacent >= 0);
  targets.push_back(adjacent);
  if (far >= 0) targets.push_back(far);

  const std::vector<Rat> shears{Rat(0), Rat(1, 4)};
  auto rows = proj::projection_report(st.patch, st.lift, st.scs, c.lc, c.psi, xi, v,
                                      targets, shears, 2.0, 8);
  REQUIRE(rows.size() == targets.size());

  CHECK(rows[0].excluded);
  CHECK(rows[0].w == v);

  const proj::ProjectionRow& r1 = rows[1];
  CHECK(r1.dtree == 1);
  CHECK(!r1.excluded);
  CHECK(r1.charts == 2);
  CHECK(r1.samples > 0);
  CHECK(r1.xi_diam <= 2);  // entries hug the shared strip
  CHECK(std::isfinite(r1.lambda_diam));

  if (far >= 0) {
    const proj::ProjectionRow& r2 = rows[2];
    CHECK(r2.dtree == 2);
    CHECK(r2.samples > 0);
    CHECK(std::isfinite(r2.lambda_diam));
  }

  const std::string dot = proj::xi_graph_dot(xi);
  CHECK(dot.find("graph xi_") != std::string::npos);
  CHECK(dot.find("--") != std::string::npos);
}
