#include "jobs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "coarse.hpp"
#include "cover.hpp"
#include "cylinders.hpp"
#include "hhs.hpp"
#include "hhspipe.hpp"
#include "lambda.hpp"
#include "origami.hpp"
#include "projections.hpp"
#include "projreport.hpp"
#include "quasim.hpp"

namespace vl::jobs {

namespace {

using jsonio::json;
using origami::SurfaceError;

struct Config {
  origami::Surface surface;
  std::vector<origami::Direction> directions;
  int radius = 4;
  int cell_cap = 400000;
  double sc_len = 2.5;
  long long level_lo = -1, level_hi = 1;
  int depth = 2;
  double R = 1.0;
  unsigned seed = 12345;
  int samples = 40;        // window/bridge sources per target
  int shear_samples = 2;   // horocycle chart samples per direction
  double min_margin = 0.9; // source depth gate for window sampling
  double B = 3.0;          // bottleneck radius
  double delta_max = 7.0;  // four-point delta gate
  int max_components = 10; // HHS truncation size
  int len_cap = 4;         // eta search length
  int defect_pairs = 500;
  int targets = 3;         // target components per tree distance
  json echo;               // the config as interpreted; embedded in reports
};

origami::Surface load_surface(const json& spec) {
  if (spec.is_object()) return jsonio::parse_surface(spec);
  if (!spec.is_string())
    throw SurfaceError("ConfigError", "config.surface must be a path or an object");
  const std::string name = spec.get<std::string>();
  std::ifstream in(name);
  if (!in.good()) {
    if (const char* dir = std::getenv("VEECHLAB_FIXTURES")) {
      in = std::ifstream(std::string(dir) + "/" + name + ".json");
    }
    if (!in.good())
      throw SurfaceError("ConfigError", "cannot open surface '" + name + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw SurfaceError("ConfigError", std::string("surface file is not JSON: ") + e.what());
  }
  return jsonio::parse_surface(j);
}

Config parse_config(const json& cj) {
  if (!cj.is_object()) throw SurfaceError("ConfigError", "config must be a JSON object");
  Config c;
  if (!cj.contains("surface"))
    throw SurfaceError("ConfigError", "config.surface is required");
  c.surface = load_surface(cj.at("surface"));
  origami::validate(c.surface);

  if (cj.contains("directions")) {
    for (const json& d : cj.at("directions")) c.directions.push_back(jsonio::parse_direction(d));
  } else {
    c.directions.push_back(origami::make_direction(1, 0));
  }
  const auto geti = [&](const char* k, int dflt) {
    return cj.contains(k) ? cj.at(k).get<int>() : dflt;
  };
  const auto getd = [&](const char* k, double dflt) {
    return cj.contains(k) ? cj.at(k).get<double>() : dflt;
  };
  c.radius = geti("radius", c.radius);
  c.cell_cap = geti("cell_cap", c.cell_cap);
  if (const char* cap = std::getenv("VEECHLAB_CELL_CAP")) c.cell_cap = std::atoi(cap);
  c.sc_len = getd("sc_len", c.sc_len);
  if (cj.contains("levels")) {
    c.level_lo = cj.at("levels").at(0).get<long long>();
    c.level_hi = cj.at("levels").at(1).get<long long>();
  }
  c.depth = geti("depth", c.depth);
  c.R = getd("R", c.R);
  c.seed = static_cast<unsigned>(geti("seed", static_cast<int>(c.seed)));
  c.samples = geti("samples", c.samples);
  c.shear_samples = geti("shear_samples", c.shear_samples);
  c.min_margin = getd("min_margin", c.min_margin);
  c.B = getd("B", c.B);
  c.delta_max = getd("delta_max", c.delta_max);
  c.max_components = geti("max_components", c.max_components);
  c.len_cap = geti("len_cap", c.len_cap);
  c.defect_pairs = geti("defect_pairs", c.defect_pairs);
  c.targets = geti("targets", c.targets);
  if (c.radius < 1 || c.depth < 1 || c.cell_cap < 1 || c.sc_len <= 0 ||
      c.level_lo > c.level_hi || c.R <= 0 || c.samples < 1 || c.shear_samples < 1 ||
      c.max_components < 3)
    throw SurfaceError("ConfigError", "parameter out of range");

  c.echo = {{"surface", jsonio::surface_to_json(c.surface)},
            {"radius", c.radius},
            {"cell_cap", c.cell_cap},
            {"sc_len", c.sc_len},
            {"levels", {c.level_lo, c.level_hi}},
            {"depth", c.depth},
            {"R", c.R},
            {"seed", c.seed},
            {"samples", c.samples},
            {"shear_samples", c.shear_samples},
            {"min_margin", c.min_margin},
            {"B", c.B},
            {"delta_max", c.delta_max},
            {"max_components", c.max_components},
            {"len_cap", c.len_cap},
            {"defect_pairs", c.defect_pairs},
            {"targets", c.targets}};
  c.echo["directions"] = json::array();
  for (const origami::Direction& d : c.directions)
    c.echo["directions"].push_back(jsonio::direction_to_json(d));
  return c;
}

// Everything the commands need for one direction, built once per run.
struct DirSetup {
  origami::Direction d;
  cyl::Decomposition dec;
  cyl::SpineQuotient spine;
  cyl::Multitwist mt;
  cover::DevelopedPatch patch;
  cover::SpineLift lift;
  std::vector<cover::SaddleConnectionLift> scs;
  std::vector<int> comp_of_vertex;  // lifted vertex -> component id or -1
  int deepest = -1;                 // deepest closed singular lifted vertex
  int home = -1;                    // its spine component

  DirSetup(const Config& c, origami::Direction dir)
      : d(dir),
        dec(cyl::cylinder_decomposition(c.surface, dir)),
        spine(cyl::spine_graph(dec)),
        mt(cyl::multitwist(c.surface, dec)),
        patch(cover::develop_patch(dec.chart, c.radius, c.cell_cap)),
        lift(cover::lift_spines(patch, dec)),
        scs(cover::saddle_connections(patch, c.sc_len)) {
    comp_of_vertex.assign(patch.vertices.size(), -1);
    for (const cover::SpineComponent& comp : lift.components)
      for (int v : comp.vertices) comp_of_vertex[v] = comp.id;
    double bm = -1;
    for (const cover::LiftedVertex& v : patch.vertices)
      if (v.closed && v.singular() && cover::boundary_margin(patch, v.id) > bm) {
        deepest = v.id;
        bm = cover::boundary_margin(patch, v.id);
      }
    if (deepest < 0) throw SurfaceError("PatchTooSmall", "no closed singular vertex");
    home = comp_of_vertex[deepest];
  }
};

struct Ctx {
  Config cfg;
  std::map<std::pair<long long, long long>, std::unique_ptr<DirSetup>> dirs;

  explicit Ctx(Config c) : cfg(std::move(c)) {}
  DirSetup& at(const origami::Direction& d) {
    auto key = std::make_pair(d.p, d.q);
    auto it = dirs.find(key);
    if (it == dirs.end())
      it = dirs.emplace(key, std::make_unique<DirSetup>(cfg, d)).first;
    return *it->second;
  }
};

std::string dir_tag(const origami::Direction& d) {
  std::ostringstream os;
  os << d.p << "_" << (d.q < 0 ? "m" : "") << std::llabs(d.q);
  return os.str();
}

std::vector<char> region_of(const DirSetup& st, int v) {
  std::vector<char> in(st.patch.cells.size(), 0);
  for (const cover::Strip& s : st.lift.strips)
    if (s.bottom_component == v || s.top_component == v)
      for (int c : s.cells) in[c] = 1;
  return in;
}

int vclass(const DirSetup& st, const std::vector<char>& in, int vertex) {
  int hit = 0;
  const auto& flags = st.patch.vertices[vertex].flags;
  for (const auto& [cell, corner] : flags) hit += in[cell] ? 1 : 0;
  return hit == 0 ? 0 : hit == static_cast<int>(flags.size()) ? 2 : 1;
}

// Target components at each tree distance 1..2 from home, capped per distance.
std::vector<int> target_components(const DirSetup& st, int per_dist) {
  std::vector<int> out;
  for (int dist = 1; dist <= 2; ++dist) {
    int kept = 0;
    for (const cover::SpineComponent& c : st.lift.components) {
      if (cover::tree_distance(st.lift, st.home, c.id) != dist) continue;
      out.push_back(c.id);
      if (++kept == per_dist) break;
    }
  }
  return out;
}

std::vector<Rat> chart_shears(const Ctx& ctx, const origami::Direction& d) {
  return cyl::horocycle_chart(ctx.cfg.surface, d, ctx.cfg.shear_samples).sample_shears;
}

// ---------------------------------------------------------------- commands

json cmd_analyze_surface(Ctx& ctx, std::map<std::string, std::string>&, int& code) {
  const origami::Surface& s = ctx.cfg.surface;
  json rep;
  rep["name"] = s.name;
  rep["squares"] = s.n;
  rep["genus"] = origami::genus(s);
  rep["cone_points"] = json::array();
  int singular = 0;
  for (const origami::ConePoint& p : origami::cone_points(s)) {
    rep["cone_points"].push_back({{"id", p.id},
                                  {"angle_multiple", p.angle_multiple},
                                  {"regular", p.regular()},
                                  {"corners", p.corners.size()}});
    if (!p.regular()) ++singular;
  }
  rep["singular_points"] = singular;
  code = kPass;
  return rep;
}

json cmd_cylinders(Ctx& ctx, std::map<std::string, std::string>&, int& code) {
  json rep = json::array();
  for (const origami::Direction& d : ctx.cfg.directions) {
    const cyl::Decomposition dec = cyl::cylinder_decomposition(ctx.cfg.surface, d);
    const cyl::Multitwist mt = cyl::multitwist(ctx.cfg.surface, dec);
    json row;
    row["direction"] = jsonio::direction_to_json(d);
    row["normalizer"] = jsonio::matrix_to_json(dec.normalizer);
    row["cylinders"] = json::array();
    for (const cyl::Cylinder& c : dec.cylinders)
      row["cylinders"].push_back(
          {{"id", c.id}, {"circumference", c.circumference}, {"height", c.height}});
    row["saddle_connections"] = json::array();
    for (const cyl::SaddleConnection& sc : dec.saddles)
      row["saddle_connections"].push_back({{"id", sc.id},
                                           {"from", sc.from_vertex},
                                           {"to", sc.to_vertex},
                                           {"length", sc.length}});
    row["multitwist"] = {{"shear", format_rat(mt.shear)},
                         {"twist_powers", mt.twist_powers},
                         {"verified", mt.verified},
                         {"verifiable", mt.verifiable}};
    rep.push_back(row);
  }
  code = kPass;
  return rep;
}

json cmd_spine(Ctx& ctx, std::map<std::string, std::string>& art, int& code) {
  json rep = json::array();
  for (const origami::Direction& d : ctx.cfg.directions) {
    const cyl::Decomposition dec = cyl::cylinder_decomposition(ctx.cfg.surface, d);
    const cyl::SpineQuotient sp = cyl::spine_graph(dec);
    json row;
    row["direction"] = jsonio::direction_to_json(d);
    row["num_components"] = sp.num_components;
    row["vertices"] = sp.vertices;
    row["edges"] = json::array();
    for (size_t e = 0; e < sp.edge_from.size(); ++e)
      row["edges"].push_back({{"from", sp.edge_from[e]},
                              {"to", sp.edge_to[e]},
                              {"length", sp.edge_length[e]}});
    row["components"] = json::array();
    for (int c = 0; c < sp.num_components; ++c) {
      const cover::FreePresentation pres = cover::spine_pi1(dec, sp, c);
      json pj;
      pj["component"] = c;
      pj["base_vertex"] = sp.vertices[static_cast<size_t>(pres.base_vertex)];
      pj["rank"] = pres.rank;
      pj["peripheral_bottom"] = pres.peripheral_bottom;
      pj["peripheral_top"] = pres.peripheral_top;
      row["components"].push_back(pj);
    }
    rep.push_back(row);

    std::ostringstream dot;
    dot << "graph spine_" << dir_tag(d) << " {\n";
    for (size_t i = 0; i < sp.vertices.size(); ++i)
      dot << "  v" << i << " [label=\"p" << sp.vertices[i] << " c"
          << sp.component_of_vertex[i] << "\"];\n";
    for (size_t e = 0; e < sp.edge_from.size(); ++e)
      dot << "  v" << sp.edge_from[e] << " -- v" << sp.edge_to[e] << " [label=\""
          << sp.edge_length[e] << "\"];\n";
    dot << "}\n";
    art["spine_" + dir_tag(d) + ".dot"] = dot.str();
  }
  code = kPass;
  return rep;
}

json cmd_tree_ball(Ctx& ctx, std::map<std::string, std::string>& art, int& code) {
  json rep = json::array();
  for (const origami::Direction& d : ctx.cfg.directions) {
    DirSetup& st = ctx.at(d);
    const cover::TreeBall ball = cover::tree_ball(st.lift, st.home, ctx.cfg.depth);
    json row;
    row["direction"] = jsonio::direction_to_json(d);
    row["patch"] = {{"cells", st.patch.cells.size()},
                    {"vertices", st.patch.vertices.size()},
                    {"radius", st.patch.radius}};
    row["components_total"] = st.lift.components.size();
    row["strips_total"] = st.lift.strips.size();
    row["home"] = st.home;
    row["depth"] = ctx.cfg.depth;
    std::vector<long long> layer(static_cast<size_t>(ctx.cfg.depth) + 1, 0);
    long long truncated = 0;
    for (size_t i = 0; i < ball.vertices.size(); ++i) {
      ++layer[static_cast<size_t>(ball.depth_of[i])];
      truncated += ball.truncated[i] ? 1 : 0;
    }
    row["layer_sizes"] = layer;
    row["truncated_vertices"] = truncated;
    rep.push_back(row);

    std::ostringstream dot;
    dot << "graph tree_ball_" << dir_tag(d) << " {\n";
    size_t emitted = 0;
    for (const auto& [strip, child] : ball.edges) {
      if (++emitted > 200) break;  // keep the drawing readable
      const cover::Strip& s = st.lift.strips[static_cast<size_t>(strip)];
      dot << "  c" << s.bottom_component << " -- c" << s.top_component
          << " [label=\"s" << strip << "\"];\n";
      (void)child;
    }
    dot << "}\n";
    art["tree_ball_" + dir_tag(d) + ".dot"] = dot.str();
  }
  code = kPass;
  return rep;
}

json cmd_xi(Ctx& ctx, std::map<std::string, std::string>& art, int& code) {
  json rep = json::array();
  for (const origami::Direction& d : ctx.cfg.directions) {
    DirSetup& st = ctx.at(d);
    const proj::XiGraph xi = proj::xi_graph(st.patch, st.lift, st.home);
    int saddle = 0;
    for (const proj::XiGraph::Edge& e : xi.edges) saddle += e.saddle ? 1 : 0;
    // Diameter over the graph metric (the graphs stay connected).
    int diam = 0;
    bool connected = true;
    const int n = static_cast<int>(xi.strips.size());
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const int dist = xi.distance(a, b);
        if (dist < 0)
          connected = false;
        else
          diam = std::max(diam, dist);
      }
    json row;
    row["direction"] = jsonio::direction_to_json(d);
    row["center"] = xi.center;
    row["strips"] = n;
    row["edges"] = xi.edges.size();
    row["saddle_edges"] = saddle;
    row["connected"] = connected;
    row["diameter"] = diam;
    rep.push_back(row);
    art["xi_" + dir_tag(d) + ".dot"] = proj::xi_graph_dot(xi);
  }
  code = kPass;
  return rep;
}

json cmd_window_suite(Ctx& ctx, std::map<std::string, std::string>&, int& code) {
  json rep = json::array();
  long long ok = 0, violations = 0, contaminated = 0;
  for (const origami::Direction& d : ctx.cfg.directions) {
    DirSetup& st = ctx.at(d);
    const std::vector<Rat> shears = chart_shears(ctx, d);
    json row;
    row["direction"] = jsonio::direction_to_json(d);
    long long d_ok = 0, d_cone = 0, d_saddle = 0, d_contaminated = 0, d_violations = 0;
    for (int v : target_components(st, ctx.cfg.targets)) {
      const std::vector<char> in = region_of(st, v);
      const proj::WindowContext wctx = proj::window_context(st.patch, st.lift, st.scs, v);
      int sources = 0;
      for (const cover::LiftedVertex& vx : st.patch.vertices) {
        if (sources >= ctx.cfg.samples) break;
        if (!vx.closed || !vx.singular()) continue;
        if (vclass(st, in, vx.id) != 0) continue;
        if (cover::boundary_margin(st.patch, vx.id) < ctx.cfg.min_margin) continue;
        ++sources;
        for (const Rat& t : shears) {
          proj::Window w;
          try {
            w = proj::window(st.patch, st.lift, st.scs, wctx, vx.id, t, ctx.cfg.sc_len);
          } catch (const SurfaceError& e) {
            if (e.code == "BoundaryContamination")
              ++d_contaminated;
            else
              ++d_violations;
            continue;
          }
          // Dichotomy and boundary landing, checked independently of the
          // window internals.
          bool good = !w.on_spine && !w.points.empty();
          for (const proj::EntryPoint& pt : w.points) {
            if (pt.is_vertex)
              good = good && vclass(st, in, pt.vertex) == 1 &&
                     st.patch.vertices[static_cast<size_t>(pt.vertex)].singular();
            else
              good = good && pt.offset >= 0 && pt.offset <= 1;
          }
          if (w.is_cone_point())
            ++d_cone;
          else if (w.common_sc >= 0)
            ++d_saddle;
          else
            good = false;
          if (good)
            ++d_ok;
          else
            ++d_violations;
        }
      }
    }
    row["windows_ok"] = d_ok;
    row["cone_point_case"] = d_cone;
    row["saddle_case"] = d_saddle;
    row["contaminated"] = d_contaminated;
    row["violations"] = d_violations;
    rep.push_back(row);
    ok += d_ok;
    violations += d_violations;
    contaminated += d_contaminated;
  }
  code = violations > 0 ? kFail : (ok == 0 && contaminated > 0 ? kContaminated : kPass);
  return json{{"directions", rep},
              {"windows_ok", ok},
              {"violations", violations},
              {"contaminated", contaminated}};
}

json cmd_bridge_suite(Ctx& ctx, std::map<std::string, std::string>&, int& code) {
  json rep = json::array();
  long long contained = 0, violations = 0, contaminated = 0, bridges = 0;
  for (const origami::Direction& d : ctx.cfg.directions) {
    DirSetup& st = ctx.at(d);
    const std::vector<Rat> shears = chart_shears(ctx, d);
    json row;
    row["direction"] = jsonio::direction_to_json(d);
    long long d_contained = 0, d_violations = 0, d_contaminated = 0, d_bridges = 0;
    std::vector<int> far;
    for (int v : target_components(st, ctx.cfg.targets))
      if (cover::tree_distance(st.lift, st.home, v) == 2) far.push_back(v);
    for (int v : far) {
      // w between v and home: windows from behind theta^w land in the bridge.
      int w = -1;
      for (const cover::SpineComponent& c : st.lift.components)
        if (cover::tree_distance(st.lift, v, c.id) == 1 &&
            cover::tree_distance(st.lift, st.home, c.id) == 1) {
          w = c.id;
          break;
        }
      if (w < 0) continue;
      const std::vector<int> comp = proj::spine_complement(st.patch, st.lift, w);
      const std::vector<char> in = region_of(st, v);
      const proj::WindowContext wctx = proj::window_context(st.patch, st.lift, st.scs, v);
      std::set<int> tried_U;
      int sources = 0;
      for (const cover::LiftedVertex& vx : st.patch.vertices) {
        if (sources >= ctx.cfg.samples) break;
        if (!vx.closed || !vx.singular()) continue;
        if (cover::boundary_margin(st.patch, vx.id) < ctx.cfg.min_margin) continue;
        if (vclass(st, in, vx.id) != 0) continue;
        std::set<int> comps;
        for (const auto& [cell, corner] : vx.flags) comps.insert(comp[static_cast<size_t>(cell)]);
        if (comps.size() != 1 || *comps.begin() < 0) continue;
        const int U = *comps.begin();
        proj::Bridge br;
        try {
          br = proj::bridge(st.patch, st.lift, v, w, U);
        } catch (const SurfaceError& e) {
          if (e.code != "BadBridgeComponent") ++d_violations;
          continue;
        }
        ++sources;
        if (tried_U.insert(U).second) ++d_bridges;
        std::set<int> delta_vertices;
        std::set<int> delta_edges(br.edge_cells.begin(), br.edge_cells.end());
        if (br.degenerate) {
          delta_vertices.insert(br.vertex);
        } else {
          for (int c : br.edge_cells) {
            delta_vertices.insert(st.patch.vtx_of[static_cast<size_t>(c)][origami::BL]);
            delta_vertices.insert(st.patch.vtx_of[static_cast<size_t>(c)][origami::BR]);
          }
        }
        for (const Rat& t : shears) {
          proj::Window win;
          try {
            win = proj::window(st.patch, st.lift, st.scs, wctx, vx.id, t, ctx.cfg.sc_len);
          } catch (const SurfaceError&) {
            ++d_contaminated;
            continue;
          }
          bool inside = true;
          for (const proj::EntryPoint& pt : win.points) {
            if (pt.is_vertex)
              inside = inside && delta_vertices.count(pt.vertex) == 1;
            else
              inside = inside && delta_edges.count(pt.edge_cell) == 1;
          }
          if (inside)
            ++d_contained;
          else
            ++d_violations;
        }
      }
    }
    row["bridges"] = d_bridges;
    row["contained"] = d_contained;
    row["violations"] = d_violations;
    row["contaminated"] = d_contaminated;
    rep.push_back(row);
    bridges += d_bridges;
    contained += d_contained;
    violations += d_violations;
    contaminated += d_contaminated;
  }
  code = violations > 0 ? kFail
                        : (contained == 0 && contaminated > 0 ? kContaminated : kPass);
  return json{{"directions", rep},
              {"bridges", bridges},
              {"contained", contained},
              {"violations", violations},
              {"contaminated", contaminated}};
}

json cmd_qm_suite(Ctx& ctx, std::map<std::string, std::string>&, int& code) {
  json rep = json::array();
  bool all_ok = true;
  for (const origami::Direction& d : ctx.cfg.directions) {
    const cyl::Decomposition dec = cyl::cylinder_decomposition(ctx.cfg.surface, d);
    const cyl::SpineQuotient sp = cyl::spine_graph(dec);
    const cyl::Multitwist mt = cyl::multitwist(ctx.cfg.surface, dec);
    for (int c = 0; c < sp.num_components; ++c) {
      const qm::PsiV psi = qm::build_psi_v(dec, sp, mt, c, ctx.cfg.len_cap,
                                           ctx.cfg.defect_pairs, ctx.cfg.seed);
      bool shear_exact = true;
      for (long long n = -10; n <= 10; ++n)
        shear_exact = shear_exact && psi.eval_exact({}, n) == Rat(n);
      bool peripheral_exact = true;
      double peripheral_numeric = 0;
      for (size_t j = 0; j < psi.peripherals.size(); ++j) {
        peripheral_exact =
            peripheral_exact && psi.homog(psi.peripherals[j], psi.shear_deg[j]) == Rat(0);
        double numeric = to_double(psi.s0) * static_cast<double>(psi.shear_deg[j]);
        for (size_t i = 0; i < psi.eta.size(); ++i)
          numeric -= to_double(psi.s[i]) * qm::homogenize(psi.eta[i], psi.peripherals[j]);
        peripheral_numeric = std::max(peripheral_numeric, std::abs(numeric));
      }
      // Defect stability between two sample sizes (prefix-stable stream).
      const double d1 = qm::defect_estimate(psi, 1000, ctx.cfg.seed);
      const double d2 = qm::defect_estimate(psi, 10000, ctx.cfg.seed);
      const bool defect_stable = std::abs(d2 - d1) <= 0.1 * std::max(d2, 1e-12) || d2 == 0.0;
      const bool ok = shear_exact && peripheral_exact && peripheral_numeric < 1e-5 &&
                      defect_stable;
      all_ok = all_ok && ok;
      rep.push_back({{"direction", jsonio::direction_to_json(d)},
                     {"component", c},
                     {"rank", psi.pres.rank},
                     {"peripherals", psi.peripherals.size()},
                     {"s0", format_rat(psi.s0)},
                     {"shear_exact", shear_exact},
                     {"peripheral_exact", peripheral_exact},
                     {"peripheral_numeric_max", peripheral_numeric},
                     {"defect_1000", d1},
                     {"defect_10000", d2},
                     {"defect_stable", defect_stable},
                     {"pass", ok}});
    }
  }
  code = all_ok ? kPass : kFail;
  return json{{"components", rep}, {"pass", all_ok}};
}

const char* relation_name(hhs::Relation r) {
  switch (r) {
    case hhs::Relation::kEqual: return "equal";
    case hhs::Relation::kNested: return "nested";
    case hhs::Relation::kCoNested: return "conested";
    case hhs::Relation::kOrthogonal: return "orthogonal";
    default: return "transverse";
  }
}

json mask_to_json(const hhs::ComplexX& x, hhs::Mask m) {
  json out = json::array();
  for (int i = 0; i < x.n(); ++i)
    if (m >> i & 1) out.push_back(i);
  return out;
}

json cmd_hhs_check(Ctx& ctx, std::map<std::string, std::string>& art, int& code) {
  const origami::Direction d = ctx.cfg.directions.front();
  DirSetup& st = ctx.at(d);
  const hhs::FixtureHhs fh = hhs::build_fixture_hhs(
      st.patch, st.lift, st.scs, st.dec, st.spine, st.mt, st.home, ctx.cfg.depth,
      ctx.cfg.level_lo, ctx.cfg.level_hi, ctx.cfg.R, ctx.cfg.sc_len,
      ctx.cfg.max_components);

  json rep;
  rep["direction"] = jsonio::direction_to_json(d);
  rep["components"] = fh.lifted;
  rep["x_vertices"] = fh.x.n();
  rep["w_vertices"] = fh.w.sims.size();
  rep["w_contaminated_pairs"] = fh.w.contaminated_edges;
  rep["k1"] = fh.k1;

  const std::vector<hhs::Mask> sims = hhs::all_simplices(fh.x);
  const std::vector<hhs::Mask> aug = hhs::augmented_adj(fh.x, fh.w);
  std::map<std::string, long long> type_count;
  bool classify_ok = true;
  std::string classify_error;
  for (hhs::Mask m : sims) {
    try {
      ++type_count[hhs::type_name(hhs::classify(fh.x, sims, aug, m).type)];
    } catch (const SurfaceError& e) {
      classify_ok = false;
      classify_error = e.what();
      break;
    }
  }
  rep["classification"] = {{"pass", classify_ok}, {"types", type_count}};
  if (!classify_ok) rep["classification"]["error"] = classify_error;

  const hhs::RelationTable table = hhs::relations(fh.x, sims, aug);
  json rel;
  rel["classes"] = json::array();
  for (const auto& cls : table.classes)
    rel["classes"].push_back(
        {{"kind", cls.quasi_tree ? "qt" : "ql"}, {"component", cls.component}});
  rel["rows"] = json::array();
  for (const hhs::RelationRow& r : table.rows)
    rel["rows"].push_back({{"a", r.a},
                           {"b", r.b},
                           {"computed", relation_name(r.computed)},
                           {"expected", relation_name(r.expected)},
                           {"match", r.match}});
  rel["mismatches"] = table.mismatches;
  rep["relations"] = rel;

  const hhs::AxiomReport ax = hhs::check_axioms(fh.x, fh.w);
  json axj;
  axj["chain"] = {{"max", ax.chain_max}, {"pass", ax.chain_ok}};
  axj["fits"] = json::array();
  double kmin = 1e18, kmax = 0;
  for (const auto& f : ax.fits) {
    axj["fits"].push_back({{"type", hhs::type_name(f.type)},
                           {"component", f.component},
                           {"K", f.fit.K},
                           {"C", f.fit.C},
                           {"finite", f.finite}});
    if (f.finite) {
      kmin = std::min(kmin, f.fit.K);
      kmax = std::max(kmax, f.fit.K);
    }
  }
  axj["fit_spread"] = ax.fit_spread;
  axj["nice_join"] = {{"pass", ax.join_ok}};
  if (!ax.join_ok) {
    axj["nice_join"]["witness_a"] = mask_to_json(fh.x, ax.join_witness_a);
    axj["nice_join"]["witness_b"] = mask_to_json(fh.x, ax.join_witness_b);
  }
  axj["fullness"] = {{"pass", ax.full_ok}};
  if (!ax.full_ok) {
    axj["fullness"]["witness_simplex"] = mask_to_json(fh.x, ax.full_witness_delta);
    axj["fullness"]["witness_pair"] = {ax.full_witness_x, ax.full_witness_y};
  }
  rep["axioms"] = axj;

  // X export: V- and K-vertices with their tree components and levels.
  json xj;
  xj["vertices"] = json::array();
  for (int i = 0; i < fh.x.n(); ++i) {
    const hhs::XVertex& v = fh.x.verts[static_cast<size_t>(i)];
    json vj = {{"id", i},
               {"kind", v.is_level ? "K" : "V"},
               {"tree", fh.lifted[static_cast<size_t>(fh.x.comp_index(v.tree))]}};
    if (v.is_level) vj["level"] = v.level;
    xj["vertices"].push_back(vj);
  }
  xj["edges"] = json::array();
  for (int i = 0; i < fh.x.n(); ++i)
    for (int j = i + 1; j < fh.x.n(); ++j)
      if (fh.x.adj[static_cast<size_t>(i)] >> j & 1) xj["edges"].push_back({i, j});
  art["hhs_x_" + dir_tag(d) + ".json"] = xj.dump(2) + "\n";

  json wj;
  wj["vertices"] = json::array();
  for (size_t i = 0; i < fh.w.sims.size(); ++i)
    wj["vertices"].push_back(
        {{"id", i}, {"s", fh.w.sims[i].s}, {"t", fh.w.sims[i].t}});
  wj["edges"] = json::array();
  for (size_t i = 0; i < fh.w.adj.size(); ++i)
    for (int j : fh.w.adj[i])
      if (static_cast<size_t>(j) > i) wj["edges"].push_back({i, j});
  art["hhs_w_" + dir_tag(d) + ".json"] = wj.dump(2) + "\n";

  const bool pass = classify_ok && table.mismatches == 0 && ax.chain_ok && ax.join_ok &&
                    ax.full_ok;
  rep["pass"] = pass;
  code = pass ? kPass : kFail;
  return rep;
}

json cmd_hyperbolicity(Ctx& ctx, std::map<std::string, std::string>&, int& code) {
  const origami::Direction d = ctx.cfg.directions.front();
  DirSetup& st = ctx.at(d);
  const proj::XiGraph xi = proj::xi_graph(st.patch, st.lift, st.home);
  coarse::Graph g;
  g.n = static_cast<int>(xi.strips.size());
  g.adj.assign(static_cast<size_t>(g.n), {});
  for (const proj::XiGraph::Edge& e : xi.edges) g.add_edge(e.a, e.b);

  // Bottleneck over all pairs of a stride-sampled vertex subset: the full
  // pair set is quadratic in the strip count and adds nothing on a
  // homogeneous graph.
  std::vector<std::pair<int, int>> pairs;
  {
    const int stride = std::max(1, g.n / 32);
    for (int a = 0; a < g.n; a += stride)
      for (int b = a + stride; b < g.n; b += stride) pairs.push_back({a, b});
  }
  const coarse::BottleneckResult bn = coarse::bottleneck(g, ctx.cfg.B, pairs);

  // Four-point delta on a subsampled BFS metric of the largest component.
  std::vector<int> dist0 = coarse::bfs_dist(g, 0);
  std::vector<int> comp;
  for (int i = 0; i < g.n; ++i)
    if (dist0[static_cast<size_t>(i)] >= 0) comp.push_back(i);
  const size_t cap = 40;
  std::vector<int> subset;
  const size_t stride = std::max<size_t>(1, comp.size() / cap);
  for (size_t i = 0; i < comp.size(); i += stride) subset.push_back(comp[i]);
  std::vector<double> dm(subset.size() * subset.size(), 0);
  for (size_t i = 0; i < subset.size(); ++i) {
    const std::vector<int> di = coarse::bfs_dist(g, subset[i]);
    for (size_t j = 0; j < subset.size(); ++j)
      dm[i * subset.size() + j] = di[static_cast<size_t>(subset[j])];
  }
  const coarse::FiniteMetricSpace m =
      coarse::make_metric(subset, dm, "xi_" + dir_tag(d));
  const coarse::DeltaResult dr = coarse::delta_4pt(m);

  // Reference behavior of the horoball-collapsed disk at a comparable size.
  const coarse::FiniteMetricSpace disk = coarse::collapsed_disk_ball(3.0, 0.3);
  const coarse::DeltaResult disk_dr = coarse::delta_4pt(disk);

  const bool pass = bn.pass && dr.delta <= ctx.cfg.delta_max;
  json rep;
  rep["direction"] = jsonio::direction_to_json(d);
  rep["bottleneck"] = {{"B", ctx.cfg.B}, {"pass", bn.pass}};
  if (!bn.pass)
    rep["bottleneck"]["witness"] = {bn.witness_a, bn.witness_b};
  rep["delta_4pt"] = {{"sampled_points", subset.size()},
                      {"delta", dr.delta},
                      {"max", ctx.cfg.delta_max},
                      {"pass", dr.delta <= ctx.cfg.delta_max}};
  rep["collapsed_disk"] = {{"points", disk.size()}, {"delta", disk_dr.delta}};
  rep["pass"] = pass;
  code = pass ? kPass : kFail;
  return rep;
}

using Command = json (*)(Ctx&, std::map<std::string, std::string>&, int&);

const std::vector<std::pair<std::string, Command>>& command_table() {
  static const std::vector<std::pair<std::string, Command>> table = {
      {"analyze-surface", cmd_analyze_surface},
      {"cylinders", cmd_cylinders},
      {"spine", cmd_spine},
      {"tree-ball", cmd_tree_ball},
      {"xi", cmd_xi},
      {"window-suite", cmd_window_suite},
      {"bridge-suite", cmd_bridge_suite},
      {"qm-suite", cmd_qm_suite},
      {"hhs-check", cmd_hhs_check},
      {"hyperbolicity", cmd_hyperbolicity},
  };
  return table;
}

json cmd_report_all(Ctx& ctx, std::map<std::string, std::string>& art, int& code) {
  json rep;
  code = kPass;
  for (const auto& [name, fn] : command_table()) {
    int sub = kPass;
    rep[name] = {{"report", fn(ctx, art, sub)}, {"exit", sub}};
    if (sub == kFail || code == kFail)
      code = kFail;
    else if (sub != kPass)
      code = std::max(code, sub);
  }
  return rep;
}

bool config_stage_error(const std::string& errc) {
  return errc == "ConfigError" || errc == "PatchTooLarge" || errc == "BadRadius" ||
         errc == "DepthExceedsPatch" || errc == "ZeroDirection" || errc == "BadDirection";
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : command_table()) out.push_back(name);
    out.push_back("report-all");
    return out;
  }();
  return names;
}

int run(const std::string& command, const jsonio::json& config, jsonio::json& out) {
  out = json::object();
  out["command"] = command;
  Command fn = nullptr;
  for (const auto& [name, f] : command_table())
    if (name == command) fn = f;
  const bool all = command == "report-all";
  if (!fn && !all) {
    out["exit"] = kConfigError;
    out["error"] = {{"code", "ConfigError"}, {"message", "unknown command '" + command + "'"}};
    return kConfigError;
  }
  std::unique_ptr<Ctx> ctx;
  try {
    ctx = std::make_unique<Ctx>(parse_config(config));
  } catch (const SurfaceError& e) {
    out["exit"] = kConfigError;
    out["error"] = {{"code", e.code}, {"message", e.what()}};
    return kConfigError;
  } catch (const std::exception& e) {
    out["exit"] = kConfigError;
    out["error"] = {{"code", "ConfigError"}, {"message", e.what()}};
    return kConfigError;
  }
  out["config"] = ctx->cfg.echo;
  std::map<std::string, std::string> art;
  int code = kPass;
  try {
    out["report"] = all ? cmd_report_all(*ctx, art, code) : fn(*ctx, art, code);
  } catch (const SurfaceError& e) {
    code = config_stage_error(e.code) ? kConfigError : kFail;
    out["error"] = {{"code", e.code}, {"message", e.what()}};
  } catch (const std::exception& e) {
    code = kFail;
    out["error"] = {{"code", "Internal"}, {"message", e.what()}};
  }
  out["artifacts"] = json::object();
  for (const auto& [name, content] : art) out["artifacts"][name] = content;
  out["exit"] = code;
  return code;
}

}  // namespace vl::jobs
