#include "convabuse/graphmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

namespace convabuse::metrics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kHitsMaxIterations = 200;

bool is_unit_weighted(const Graph& g) {
  return std::all_of(g.edges().begin(), g.edges().end(),
                     [](const graph::Edge& e) { return e.weight == 1.0; });
}

// Relative tolerance used to detect tied path lengths. Lengths are sums of
// 1/w terms, so equal paths can differ in the last bits.
bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::span<const graph::Arc> neighbors(const Graph& g, graph::Vertex v, Direction dir) {
  return dir == Direction::kIn ? g.in(v) : g.out(v);
}

// Single-source distances. BFS when every weight is 1, Dijkstra on 1/w
// lengths otherwise. Unreachable vertices get +inf.
void shortest_distances(const Graph& g, graph::Vertex s, Direction dir, bool unit,
                        std::vector<double>& dist) {
  const auto n = g.vertex_count();
  dist.assign(n, kInf);
  dist[s] = 0.0;
  if (unit) {
    std::vector<graph::Vertex> queue;
    queue.reserve(n);
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto v = queue[head];
      for (const auto& a : neighbors(g, v, dir)) {
        if (dist[a.to] == kInf) {
          dist[a.to] = dist[v] + 1.0;
          queue.push_back(a.to);
        }
      }
    }
    return;
  }
  using Item = std::pair<double, graph::Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.emplace(0.0, s);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& a : neighbors(g, v, dir)) {
      const double nd = d + 1.0 / a.weight;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        heap.emplace(nd, a.to);
      }
    }
  }
}

}  // namespace

std::vector<double> degree(const Graph& g, Direction dir) {
  std::vector<double> out(g.vertex_count(), 0.0);
  for (const auto& e : g.edges()) {
    if (!g.directed()) {
      out[e.src] += 1.0;
      out[e.dst] += 1.0;
      continue;
    }
    if (dir != Direction::kIn) out[e.src] += 1.0;
    if (dir != Direction::kOut) out[e.dst] += 1.0;
  }
  return out;
}

std::vector<double> strength(const Graph& g, Direction dir) {
  std::vector<double> out(g.vertex_count(), 0.0);
  for (const auto& e : g.edges()) {
    if (!g.directed()) {
      out[e.src] += e.weight;
      out[e.dst] += e.weight;
      continue;
    }
    if (dir != Direction::kIn) out[e.src] += e.weight;
    if (dir != Direction::kOut) out[e.dst] += e.weight;
  }
  return out;
}

std::vector<int> coreness(const Graph& g, Direction dir) {
  // Batagelj-Zaversnik bin-sort peeling.
  const auto n = g.vertex_count();
  std::vector<int> deg(n, 0);
  const auto d0 = degree(g, dir);
  for (std::size_t v = 0; v < n; ++v) deg[v] = static_cast<int>(d0[v]);
  if (n == 0) return deg;

  const int max_deg = *std::max_element(deg.begin(), deg.end());
  std::vector<std::size_t> bin(static_cast<std::size_t>(max_deg) + 2, 0);
  for (int d : deg) ++bin[static_cast<std::size_t>(d) + 1];
  std::partial_sum(bin.begin(), bin.end(), bin.begin());
  std::vector<std::size_t> pos(n);
  std::vector<graph::Vertex> vert(n);
  {
    std::vector<std::size_t> fill(bin.begin(), bin.end() - 1);
    for (std::size_t v = 0; v < n; ++v) {
      pos[v] = fill[static_cast<std::size_t>(deg[v])]++;
      vert[pos[v]] = static_cast<graph::Vertex>(v);
    }
  }

  // Removing v lowers the directional degree of the vertices it points into
  // (for in-degree), the vertices pointing at it (for out-degree), or both.
  auto lower = [&](graph::Vertex u, int dv) {
    if (deg[u] <= dv) return;
    const auto du = static_cast<std::size_t>(deg[u]);
    const std::size_t pu = pos[u];
    const std::size_t pw = bin[du];
    const graph::Vertex w = vert[pw];
    if (u != w) {
      std::swap(vert[pu], vert[pw]);
      pos[u] = pw;
      pos[w] = pu;
    }
    ++bin[du];
    --deg[u];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const graph::Vertex v = vert[i];
    const int dv = deg[v];
    if (!g.directed()) {
      for (const auto& a : g.out(v)) lower(a.to, dv);
      continue;
    }
    if (dir != Direction::kOut) {
      for (const auto& a : g.out(v)) lower(a.to, dv);
    }
    if (dir != Direction::kIn) {
      for (const auto& a : g.in(v)) lower(a.to, dv);
    }
  }
  return deg;
}

DistanceSummary closeness_eccentricity(const Graph& g, Direction dir) {
  const auto n = g.vertex_count();
  if (!g.directed() || dir == Direction::kAll) dir = Direction::kOut;
  const bool unit = is_unit_weighted(g);

  DistanceSummary s;
  s.closeness.assign(n, 0.0);
  s.eccentricity.assign(n, 0.0);
  double path_sum = 0.0;
  std::size_t pairs = 0;
  bool any = false;
  std::vector<double> dist;
  for (std::size_t v = 0; v < n; ++v) {
    shortest_distances(g, static_cast<graph::Vertex>(v), dir, unit, dist);
    std::size_t reach = 0;
    double sum = 0.0;
    double ecc = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v || dist[u] == kInf) continue;
      ++reach;
      sum += dist[u];
      ecc = std::max(ecc, dist[u]);
    }
    if (reach == 0) continue;
    s.closeness[v] = static_cast<double>(reach) / sum;
    s.eccentricity[v] = ecc;
    path_sum += sum;
    pairs += reach;
    if (!any) {
      s.diameter = s.radius = ecc;
      any = true;
    } else {
      s.diameter = std::max(s.diameter, ecc);
      s.radius = std::min(s.radius, ecc);
    }
  }
  if (pairs > 0) s.average_path_length = path_sum / static_cast<double>(pairs);
  return s;
}

std::vector<double> betweenness(const Graph& g) {
  const auto n = g.vertex_count();
  const bool unit = is_unit_weighted(g);
  std::vector<double> bc(n, 0.0);
  std::vector<double> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<std::vector<graph::Vertex>> preds(n);
  std::vector<graph::Vertex> order;
  order.reserve(n);

  for (std::size_t si = 0; si < n; ++si) {
    const auto s = static_cast<graph::Vertex>(si);
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();
    dist[s] = 0.0;
    sigma[s] = 1.0;

    if (unit) {
      std::vector<graph::Vertex> queue{s};
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        order.push_back(v);
        for (const auto& a : g.out(v)) {
          if (dist[a.to] == kInf) {
            dist[a.to] = dist[v] + 1.0;
            queue.push_back(a.to);
          }
          if (dist[a.to] == dist[v] + 1.0) {
            sigma[a.to] += sigma[v];
            preds[a.to].push_back(v);
          }
        }
      }
    } else {
      using Item = std::pair<double, graph::Vertex>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      std::vector<char> settled(n, 0);
      heap.emplace(0.0, s);
      while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (settled[v] || d > dist[v]) continue;
        settled[v] = 1;
        order.push_back(v);
        for (const auto& a : g.out(v)) {
          if (settled[a.to]) continue;
          const double nd = d + 1.0 / a.weight;
          if (dist[a.to] != kInf && nearly_equal(nd, dist[a.to])) {
            sigma[a.to] += sigma[v];
            preds[a.to].push_back(v);
          } else if (nd < dist[a.to]) {
            dist[a.to] = nd;
            sigma[a.to] = sigma[v];
            preds[a.to].assign(1, v);
            heap.emplace(nd, a.to);
          }
        }
      }
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto w = *it;
      for (const auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  if (!g.directed()) {
    for (auto& b : bc) b /= 2.0;
  }
  return bc;
}

std::vector<double> pagerank(const Graph& g, double damping) {
  const auto n = g.vertex_count();
  if (n == 0) return {};
  const double nd = static_cast<double>(n);
  const auto out_w = strength(g, Direction::kOut);

  std::vector<double> rank(n, 1.0 / nd);
  std::vector<double> next(n);
  for (int iter = 0; iter < 200; ++iter) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (out_w[v] == 0.0) dangling += rank[v];
    }
    const double base = (1.0 - damping) / nd + damping * dangling / nd;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t v = 0; v < n; ++v) {
      if (out_w[v] == 0.0) continue;
      const double share = damping * rank[v] / out_w[v];
      for (const auto& a : g.out(static_cast<graph::Vertex>(v))) next[a.to] += share * a.weight;
    }
    double change = 0.0;
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      change += std::abs(next[v] - rank[v]);
      total += next[v];
    }
    for (auto& x : next) x /= total;
    rank.swap(next);
    if (change < 1e-10) break;
  }
  return rank;
}

HitsScores hits(const Graph& g) {
  const auto n = g.vertex_count();
  HitsScores h;
  h.hubs.assign(n, 0.0);
  h.authorities.assign(n, 0.0);
  if (g.edge_count() == 0) return h;

  auto normalize = [](std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    for (auto& x : v) x /= norm;
    return true;
  };
  // hub = A auth, auth = A^T hub, on undirected graphs both follow the edges.
  auto mul_a = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& a : g.out(static_cast<graph::Vertex>(v))) y[v] += a.weight * x[a.to];
    }
  };
  auto mul_at = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& a : g.in(static_cast<graph::Vertex>(v))) y[v] += a.weight * x[a.to];
    }
  };

  std::vector<double> auth(n, 1.0);
  normalize(auth);
  std::vector<double> hub(n);
  std::vector<double> next(n);
  for (int iter = 0; iter < kHitsMaxIterations; ++iter) {
    mul_a(auth, hub);
    mul_at(hub, next);
    if (!normalize(next)) return h;
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += (next[v] - auth[v]) * (next[v] - auth[v]);
    auth.swap(next);
    if (std::sqrt(change) < 1e-10) break;
  }
  mul_a(auth, hub);
  if (!normalize(hub)) return h;
  h.hubs = std::move(hub);
  h.authorities = std::move(auth);
  return h;
}

GlobalCounts reciprocity_density_counts(const Graph& g) {
  GlobalCounts c;
  const double n = static_cast<double>(g.vertex_count());
  const double m = static_cast<double>(g.edge_count());
  c.vertex_count = n;
  c.edge_count = m;
  if (n > 1) c.density = g.directed() ? m / (n * (n - 1.0)) : m / (n * (n - 1.0) / 2.0);
  if (g.directed() && m > 0) {
    std::size_t mutual = 0;
    for (const auto& e : g.edges()) {
      for (const auto& a : g.out(e.dst)) {
        if (a.to == e.src) {
          ++mutual;
          break;
        }
      }
    }
    c.reciprocity = static_cast<double>(mutual) / m;
  }
  return c;
}

Clustering clustering_transitivity(const Graph& g, bool weighted) {
  const auto n = g.vertex_count();
  Clustering c;
  c.local.assign(n, 0.0);
  double max_w = 0.0;
  for (const auto& e : g.edges()) max_w = std::max(max_w, e.weight);

  // Dense neighbor weights for the current vertex; neighbor lists are sorted.
  std::vector<double> mark(n, 0.0);
  double triangles3 = 0.0;  // sum over vertices of closed pairs (3 x triangles)
  double triples = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto nb = g.out(static_cast<graph::Vertex>(v));
    const double k = static_cast<double>(nb.size());
    if (nb.size() < 2) continue;
    for (const auto& a : nb) mark[a.to] = a.weight;
    double closed = 0.0;
    double intensity = 0.0;
    for (const auto& a : nb) {
      for (const auto& b : g.out(a.to)) {
        if (b.to <= a.to || mark[b.to] == 0.0) continue;
        closed += 1.0;
        if (weighted) intensity += std::cbrt((a.weight / max_w) * (mark[b.to] / max_w) * (b.weight / max_w));
      }
    }
    for (const auto& a : nb) mark[a.to] = 0.0;
    const double pairs = k * (k - 1.0) / 2.0;
    c.local[v] = (weighted ? intensity : closed) / pairs;
    triangles3 += closed;
    triples += pairs;
  }
  if (triples > 0.0) c.transitivity = triangles3 / triples;
  return c;
}

double modularity(const Graph& g, const std::vector<int>& community) {
  const double m2 = 2.0 * g.total_weight();
  if (m2 == 0.0) return 0.0;
  const int k = community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  std::vector<double> inside(static_cast<std::size_t>(k), 0.0);
  std::vector<double> total(static_cast<std::size_t>(k), 0.0);
  for (const auto& e : g.edges()) {
    const auto cu = static_cast<std::size_t>(community[e.src]);
    const auto cv = static_cast<std::size_t>(community[e.dst]);
    total[cu] += e.weight;
    total[cv] += e.weight;
    if (cu == cv) inside[cu] += 2.0 * e.weight;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < inside.size(); ++c) {
    q += inside[c] / m2 - (total[c] / m2) * (total[c] / m2);
  }
  return q;
}

namespace {

// Weighted undirected multigraph used between Louvain levels. Self-loop
// weight is kept separately and counted twice in the vertex strength.
struct LevelGraph {
  std::vector<std::vector<graph::Arc>> adj;
  std::vector<double> self_loop;
  std::vector<double> strength;
};

// One round of local moving. Returns true when any vertex changed community.
bool local_moving(const LevelGraph& lg, double m2, std::vector<int>& comm) {
  const auto n = lg.adj.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) tot[static_cast<std::size_t>(comm[v])] += lg.strength[v];
  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  bool moved_any = false;
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool moved = false;
    for (std::size_t v = 0; v < n; ++v) {
      const int own = comm[v];
      const double kv = lg.strength[v];
      touched.clear();
      for (const auto& a : lg.adj[v]) {
        const int c = comm[static_cast<std::size_t>(a.to)];
        if (link[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
        link[static_cast<std::size_t>(c)] += a.weight;
      }
      tot[static_cast<std::size_t>(own)] -= kv;
      int best = own;
      double best_gain =
          link[static_cast<std::size_t>(own)] - tot[static_cast<std::size_t>(own)] * kv / m2;
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        const double gain =
            link[static_cast<std::size_t>(c)] - tot[static_cast<std::size_t>(c)] * kv / m2;
        if (gain > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
          best_gain = gain;
          best = c;
        }
      }
      tot[static_cast<std::size_t>(best)] += kv;
      for (int c : touched) link[static_cast<std::size_t>(c)] = 0.0;
      if (best != own) {
        comm[v] = best;
        moved = true;
        moved_any = true;
      }
    }
    if (!moved) break;
  }
  return moved_any;
}

}  // namespace

Partition greedy_modularity(const Graph& g) {
  const auto n = g.vertex_count();
  Partition result;
  result.community.resize(n);
  std::iota(result.community.begin(), result.community.end(), 0);
  const double m2 = 2.0 * g.total_weight();
  if (n == 0 || m2 == 0.0) return result;

  LevelGraph lg;
  lg.adj.resize(n);
  lg.self_loop.assign(n, 0.0);
  lg.strength.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& a : g.out(static_cast<graph::Vertex>(v))) {
      lg.adj[v].push_back(a);
      lg.strength[v] += a.weight;
    }
  }

  std::vector<int>& membership = result.community;  // original vertex -> level vertex
  for (int level = 0; level < 64; ++level) {
    const auto ln = lg.adj.size();
    std::vector<int> comm(ln);
    std::iota(comm.begin(), comm.end(), 0);
    if (!local_moving(lg, m2, comm)) break;

    // Renumber communities by first appearance in vertex order.
    std::vector<int> renum(ln, -1);
    int k = 0;
    for (std::size_t v = 0; v < ln; ++v) {
      auto& r = renum[static_cast<std::size_t>(comm[v])];
      if (r < 0) r = k++;
      comm[v] = r;
    }
    for (auto& c : membership) c = comm[static_cast<std::size_t>(c)];

    LevelGraph next;
    const auto kn = static_cast<std::size_t>(k);
    next.adj.resize(kn);
    next.self_loop.assign(kn, 0.0);
    next.strength.assign(kn, 0.0);
    std::vector<std::vector<graph::Arc>> links(kn);
    for (std::size_t v = 0; v < ln; ++v) {
      const auto cv = static_cast<std::size_t>(comm[v]);
      next.self_loop[cv] += lg.self_loop[v];
      next.strength[cv] += lg.strength[v];
      for (const auto& a : lg.adj[v]) {
        const int cu = comm[static_cast<std::size_t>(a.to)];
        if (static_cast<std::size_t>(cu) == cv) {
          next.self_loop[cv] += a.weight;  // each internal edge is seen from both ends
        } else {
          links[cv].push_back({cu, a.weight});
        }
      }
    }
    for (std::size_t c = 0; c < kn; ++c) {
      auto& row = links[c];
      std::stable_sort(row.begin(), row.end(),
                       [](const graph::Arc& x, const graph::Arc& y) { return x.to < y.to; });
      for (const auto& a : row) {
        if (!next.adj[c].empty() && next.adj[c].back().to == a.to) {
          next.adj[c].back().weight += a.weight;
        } else {
          next.adj[c].push_back(a);
        }
      }
    }
    lg = std::move(next);
    if (kn == ln) break;
  }
  result.modularity = modularity(g, result.community);
  return result;
}

ComponentStats components_assortativity(const Graph& g) {
  const auto n = g.vertex_count();
  ComponentStats s;
  if (n == 0) return s;
  std::vector<int> comp(n, -1);
  std::size_t count = 0;
  std::size_t largest = 0;
  std::vector<graph::Vertex> stack;
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] >= 0) continue;
    std::size_t size = 0;
    stack.assign(1, static_cast<graph::Vertex>(v));
    comp[v] = static_cast<int>(count);
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      ++size;
      auto visit = [&](std::span<const graph::Arc> arcs) {
        for (const auto& a : arcs) {
          if (comp[a.to] < 0) {
            comp[a.to] = static_cast<int>(count);
            stack.push_back(a.to);
          }
        }
      };
      visit(g.out(u));
      if (g.directed()) visit(g.in(u));
    }
    largest = std::max(largest, size);
    ++count;
  }
  s.component_count = static_cast<double>(count);
  s.largest_fraction = static_cast<double>(largest) / static_cast<double>(n);

  // Newman's degree assortativity over undirected edges.
  const auto deg = degree(g, Direction::kAll);
  double m = 0.0;
  double sum_prod = 0.0;
  double sum_half = 0.0;
  double sum_sq = 0.0;
  for (const auto& e : g.edges()) {
    const double j = deg[e.src];
    const double k = deg[e.dst];
    m += 1.0;
    sum_prod += j * k;
    sum_half += 0.5 * (j + k);
    sum_sq += 0.5 * (j * j + k * k);
  }
  if (m > 0.0) {
    const double mean = sum_half / m;
    const double num = sum_prod / m - mean * mean;
    const double den = sum_sq / m - mean * mean;
    if (den > 1e-12 * std::max(1.0, sum_sq / m)) s.assortativity = num / den;
  }
  return s;
}

}  // namespace convabuse::metrics
