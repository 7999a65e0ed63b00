#include "coarse.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace vl::coarse {

using origami::SurfaceError;

FiniteMetricSpace make_metric(std::vector<int> ids, std::vector<double> d,
                              std::string provenance, double tol) {
  FiniteMetricSpace m;
  m.ids = std::move(ids);
  m.d = std::move(d);
  m.provenance = std::move(provenance);
  const int n = m.size();
  if (m.d.size() != static_cast<size_t>(n) * n)
    throw SurfaceError("InvalidMetric", "matrix size does not match ids");
  for (int i = 0; i < n; ++i) {
    if (std::abs(m.at(i, i)) > tol)
      throw SurfaceError("InvalidMetric", "nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      if (m.at(i, j) < -tol || std::abs(m.at(i, j) - m.at(j, i)) > tol)
        throw SurfaceError("InvalidMetric", "asymmetric or negative entry");
      for (int k = 0; k < n; ++k)
        if (m.at(i, j) > m.at(i, k) + m.at(k, j) + tol)
          throw SurfaceError("InvalidMetric", "triangle inequality violated");
    }
  }
  return m;
}

DeltaResult delta_4pt(const FiniteMetricSpace& m) {
  DeltaResult r;
  const int n = m.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int e = c + 1; e < n; ++e) {
          double s1 = m.at(a, b) + m.at(c, e);
          double s2 = m.at(a, c) + m.at(b, e);
          double s3 = m.at(a, e) + m.at(b, c);
          if (s1 < s2) std::swap(s1, s2);
          if (s1 < s3) std::swap(s1, s3);
          if (s2 < s3) std::swap(s2, s3);
          // Convention: S1 <= S2 + 4*delta (the Gromov-product form of the
          // four-point condition); the unit 4-cycle scores 1/2.
          const double delta = (s1 - s2) / 4;
          if (delta > r.delta) {
            r.delta = delta;
            r.witness = {a, b, c, e};
          }
        }
  return r;
}

void Graph::add_edge(int a, int b) {
  adj[a].push_back(b);
  adj[b].push_back(a);
}

std::vector<int> bfs_dist(const Graph& g, int src) {
  std::vector<int> dist(g.n, -1);
  dist[src] = 0;
  std::deque<int> q{src};
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int w : g.adj[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
  }
  return dist;
}

namespace {

// One BFS geodesic from a to b, using parent pointers.
std::vector<int> bfs_geodesic(const Graph& g, int a, int b) {
  std::vector<int> parent(g.n, -2);
  parent[a] = -1;
  std::deque<int> q{a};
  while (!q.empty() && parent[b] == -2) {
    const int u = q.front();
    q.pop_front();
    for (int w : g.adj[u])
      if (parent[w] == -2) {
        parent[w] = u;
        q.push_back(w);
      }
  }
  std::vector<int> path;
  if (parent[b] == -2) return path;
  for (int u = b; u != -1; u = parent[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

bool connected_avoiding(const Graph& g, int a, int b, const std::vector<char>& banned) {
  if (banned[a] || banned[b]) return false;
  std::vector<char> seen(g.n, 0);
  seen[a] = 1;
  std::deque<int> q{a};
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    if (u == b) return true;
    for (int w : g.adj[u])
      if (!seen[w] && !banned[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
  }
  return false;
}

}  // namespace

BottleneckResult bottleneck(const Graph& g, double B,
                            const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::pair<int, int>> todo = pairs;
  if (todo.empty())
    for (int a = 0; a < g.n; ++a)
      for (int b = a + 1; b < g.n; ++b) todo.push_back({a, b});
  for (auto [a, b] : todo) {
    const std::vector<int> geo = bfs_geodesic(g, a, b);
    for (int v : geo) {
      const std::vector<int> dv = bfs_dist(g, v);
      std::vector<char> banned(g.n, 0);
      for (int u = 0; u < g.n; ++u) banned[u] = dv[u] >= 0 && dv[u] <= B;
      if (banned[a] || banned[b]) continue;  // ball contains an endpoint
      if (connected_avoiding(g, a, b, banned)) return {false, a, b};
    }
  }
  return {true, -1, -1};
}

QiFit qi_fit(const FiniteMetricSpace& dx, const FiniteMetricSpace& dy, double k_max) {
  if (dx.size() != dy.size())
    throw SurfaceError("InvalidMetric", "qi_fit spaces differ in size");
  const int n = dx.size();
  auto c_of = [&](double K, int& wa, int& wb) {
    double C = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double need =
            std::max(dy.at(i, j) - K * dx.at(i, j), dx.at(i, j) / K - dy.at(i, j));
        if (need > C) {
          C = need;
          wa = i;
          wb = j;
        }
      }
    return C;
  };
  QiFit best;
  int wa = -1, wb = -1;
  double c_inf = c_of(k_max, wa, wb);
  for (double K = 1; K <= k_max + 1e-9; K += 0.25) {
    int a = -1, b = -1;
    const double C = c_of(K, a, b);
    if (C <= c_inf + 1e-9) {
      best.K = K;
      best.C = C;
      best.binding_a = a;
      best.binding_b = b;
      best.max_residual = C;
      return best;
    }
  }
  best.K = k_max;
  best.C = c_inf;
  best.binding_a = wa;
  best.binding_b = wb;
  best.max_residual = c_inf;
  return best;
}

ApproxGraph graph_approx(const FiniteMetricSpace& m, const std::vector<int>& subset,
                         double R, double Rp) {
  if (!(Rp > 3 * R)) throw SurfaceError("BadParameter", "requires R' > 3R");
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int s : subset) best = std::min(best, m.at(i, s));
    if (best > R + 1e-9)
      throw SurfaceError("NotDense", "a sample point is farther than R from the subset");
  }
  ApproxGraph out;
  out.subset = subset;
  const int k = static_cast<int>(subset.size());
  out.graph.n = k;
  out.graph.adj.assign(k, {});
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (m.at(subset[i], subset[j]) <= Rp) out.graph.add_edge(i, j);

  // QI fit of the inclusion: graph hops scaled by R' against the metric.
  FiniteMetricSpace gx, gy;
  gx.ids = gy.ids = subset;
  gx.d.assign(static_cast<size_t>(k) * k, 0);
  gy.d = gx.d;
  for (int i = 0; i < k; ++i) {
    const std::vector<int> dist = bfs_dist(out.graph, i);
    for (int j = 0; j < k; ++j) {
      gx.at(i, j) = dist[j] < 0 ? 0 : dist[j] * Rp;
      gy.at(i, j) = m.at(subset[i], subset[j]);
    }
  }
  out.fit = qi_fit(gx, gy);
  return out;
}

FiniteMetricSpace collapsed_disk_ball(double radius, double scale, double step,
                                      int q_max, int max_points) {
  // Mesh: x on a step grid, y = exp(k * step); keep points within the
  // hyperbolic ball around i.
  struct Node {
    double x, y;
  };
  auto hyp = [](const Node& a, const Node& b) {
    const double num = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
    return std::acosh(1 + num / (2 * a.y * b.y));
  };
  const Node center{0, 1};
  std::vector<Node> nodes;
  std::vector<std::pair<int, int>> grid;  // (i, k) indices for adjacency
  const double xmax = 2 * std::sinh(radius);
  const int imax = static_cast<int>(xmax / step) + 1;
  const int kmax = static_cast<int>(radius / step) + 1;
  std::vector<std::vector<int>> id_of(2 * imax + 1, std::vector<int>(2 * kmax + 1, -1));
  for (int i = -imax; i <= imax; ++i)
    for (int k = -kmax; k <= kmax; ++k) {
      const Node p{i * step, std::exp(k * step)};
      if (hyp(p, center) > radius) continue;
      id_of[i + imax][k + kmax] = static_cast<int>(nodes.size());
      nodes.push_back(p);
      grid.push_back({i, k});
    }
  const int n = static_cast<int>(nodes.size());
  if (n < 4) throw SurfaceError("MeshTooCoarse", "ball mesh has too few points");

  // Horoball collapse: union-find over mesh points inside any horoball disk
  // at p/q, center (p/q, scale/(2q^2)), radius scale/(2q^2).
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](auto&& self, int x) -> int {
    return parent[x] == x ? x : parent[x] = self(self, parent[x]);
  };
  if (scale > 0) {
    for (int q = 1; q <= q_max; ++q)
      for (int p = static_cast<int>(-xmax * q) - 1; p <= static_cast<int>(xmax * q) + 1;
           ++p) {
        if (std::gcd(std::abs(p), q) != 1) continue;
        const double cx = static_cast<double>(p) / q;
        const double r = scale / (2.0 * q * q);
        int head = -1;
        for (int v = 0; v < n; ++v) {
          const double dx = nodes[v].x - cx, dy = nodes[v].y - r;
          if (dx * dx + dy * dy > r * r) continue;
          if (head < 0)
            head = v;
          else
            parent[find(find, v)] = find(find, head);
        }
      }
  }

  // Quotient graph with hyperbolic edge weights between grid neighbors
  // (collapsed classes get zero-internal-diameter by identification).
  std::vector<int> rep(n, -1);
  std::vector<int> reps;
  for (int v = 0; v < n; ++v) {
    const int r = find(find, v);
    if (rep[r] < 0) {
      rep[r] = static_cast<int>(reps.size());
      reps.push_back(r);
    }
  }
  const int qn = static_cast<int>(reps.size());
  std::vector<std::vector<std::pair<int, double>>> adj(qn);
  auto link = [&](int a, int b) {
    const int qa = rep[find(find, a)], qb = rep[find(find, b)];
    if (qa == qb) return;
    const double w = hyp(nodes[a], nodes[b]);
    adj[qa].push_back({qb, w});
    adj[qb].push_back({qa, w});
  };
  for (int v = 0; v < n; ++v) {
    const auto [i, k] = grid[v];
    const int right = id_of[i + imax + 1 <= 2 * imax ? i + imax + 1 : 0][k + kmax];
    if (i + imax + 1 <= 2 * imax && right >= 0) link(v, right);
    const int up = k + kmax + 1 <= 2 * kmax ? id_of[i + imax][k + kmax + 1] : -1;
    if (up >= 0) link(v, up);
  }

  // Subsample representatives and run Dijkstra from each.
  std::vector<int> pick;
  const int stride = std::max(1, qn / max_points);
  for (int i = 0; i < qn; i += stride) pick.push_back(i);
  if (static_cast<int>(pick.size()) > max_points) pick.resize(max_points);

  const double inf = std::numeric_limits<double>::infinity();
  FiniteMetricSpace m;
  m.ids = pick;
  m.provenance = "collapsed_disk_ball r=" + std::to_string(radius) +
                 " scale=" + std::to_string(scale);
  const int pn = static_cast<int>(pick.size());
  m.d.assign(static_cast<size_t>(pn) * pn, 0);
  for (int s = 0; s < pn; ++s) {
    std::vector<double> dist(qn, inf);
    dist[pick[s]] = 0;
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>>
        pq;
    pq.push({0, pick[s]});
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > dist[u]) continue;
      for (auto [w, len] : adj[u])
        if (du + len < dist[w]) {
          dist[w] = du + len;
          pq.push({dist[w], w});
        }
    }
    for (int t = 0; t < pn; ++t) {
      if (dist[pick[t]] == inf)
        throw SurfaceError("MeshTooCoarse", "mesh graph is disconnected");
      m.at(s, t) = dist[pick[t]];
    }
  }
  // Symmetrize tiny Dijkstra float drift.
  for (int i = 0; i < pn; ++i)
    for (int j = 0; j < pn; ++j) {
      const double v = (m.at(i, j) + m.at(j, i)) / 2;
      m.at(i, j) = m.at(j, i) = v;
    }
  return m;
}

std::string metric_to_csv(const FiniteMetricSpace& m) {
  std::ostringstream out;
  out << "id";
  for (int id : m.ids) out << "," << id;
  out << "\n";
  out.precision(17);
  for (int i = 0; i < m.size(); ++i) {
    out << m.ids[i];
    for (int j = 0; j < m.size(); ++j) out << "," << m.at(i, j);
    out << "\n";
  }
  return out.str();
}

FiniteMetricSpace metric_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SurfaceError("InvalidMetric", "empty csv");
  FiniteMetricSpace m;
  {
    std::istringstream hs(line);
    std::string tok;
    std::getline(hs, tok, ',');  // "id"
    while (std::getline(hs, tok, ',')) m.ids.push_back(std::stoi(tok));
  }
  const int n = m.size();
  m.d.assign(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw SurfaceError("InvalidMetric", "missing csv row");
    std::istringstream rs(line);
    std::string tok;
    std::getline(rs, tok, ',');  // row id
    for (int j = 0; j < n; ++j) {
      if (!std::getline(rs, tok, ','))
        throw SurfaceError("InvalidMetric", "short csv row");
      m.at(i, j) = std::stod(tok);
    }
  }
  m.provenance = "csv";
  return m;
}

std::vector<unsigned char> metric_to_binary(const FiniteMetricSpace& m) {
  const uint32_t n = static_cast<uint32_t>(m.size());
  std::vector<unsigned char> out(16 + static_cast<size_t>(n) * n * 8, 0);
  std::memcpy(out.data(), "CMS1", 4);
  for (int b = 0; b < 4; ++b) out[4 + b] = static_cast<unsigned char>(n >> (8 * b));
  for (size_t k = 0; k < static_cast<size_t>(n) * n; ++k) {
    uint64_t bits;
    std::memcpy(&bits, &m.d[k], 8);
    for (int b = 0; b < 8; ++b)
      out[16 + 8 * k + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return out;
}

FiniteMetricSpace metric_from_binary(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "CMS1", 4) != 0)
    throw SurfaceError("InvalidMetric", "bad CMS1 header");
  uint32_t n = 0;
  for (int b = 0; b < 4; ++b) n |= static_cast<uint32_t>(bytes[4 + b]) << (8 * b);
  if (bytes.size() != 16 + static_cast<size_t>(n) * n * 8)
    throw SurfaceError("InvalidMetric", "CMS1 payload size mismatch");
  FiniteMetricSpace m;
  m.ids.resize(n);
  std::iota(m.ids.begin(), m.ids.end(), 0);
  m.d.resize(static_cast<size_t>(n) * n);
  for (size_t k = 0; k < m.d.size(); ++k) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<uint64_t>(bytes[16 + 8 * k + b]) << (8 * b);
    std::memcpy(&m.d[k], &bits, 8);
  }
  m.provenance = "cms1";
  return m;
}

}  // namespace vl::coarse
