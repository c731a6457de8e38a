#include "convabuse/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace convabuse::graph {

Graph::Graph(std::size_t vertex_count, bool directed, std::vector<Edge> edges)
    : n_(vertex_count), directed_(directed) {
  for (auto& e : edges) {
    if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= n_ ||
        static_cast<std::size_t>(e.dst) >= n_) {
      throw std::out_of_range("edge endpoint out of range");
    }
    if (!directed_ && e.src > e.dst) std::swap(e.src, e.dst);
  }
  std::erase_if(edges, [](const Edge& e) { return e.src == e.dst; });
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (const auto& e : edges) {
    if (!edges_.empty() && edges_.back().src == e.src && edges_.back().dst == e.dst) {
      edges_.back().weight += e.weight;
    } else {
      edges_.push_back(e);
    }
  }

  auto build = [this](std::vector<std::size_t>& off, std::vector<Arc>& arcs, bool forward,
                      bool both) {
    off.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
      ++off[(forward ? e.src : e.dst) + 1];
      if (both) ++off[(forward ? e.dst : e.src) + 1];
    }
    for (std::size_t v = 0; v < n_; ++v) off[v + 1] += off[v];
    arcs.resize(off[n_]);
    std::vector<std::size_t> fill(off.begin(), off.end() - 1);
    for (const auto& e : edges_) {
      const Vertex a = forward ? e.src : e.dst;
      const Vertex b = forward ? e.dst : e.src;
      arcs[fill[a]++] = Arc{b, e.weight};
      if (both) arcs[fill[b]++] = Arc{a, e.weight};
    }
    // Keep neighbor lists sorted so traversal order is canonical.
    for (std::size_t v = 0; v < n_; ++v) {
      std::sort(arcs.begin() + static_cast<std::ptrdiff_t>(off[v]),
                arcs.begin() + static_cast<std::ptrdiff_t>(off[v + 1]),
                [](const Arc& x, const Arc& y) { return x.to < y.to; });
    }
  };
  if (directed_) {
    build(out_off_, out_arcs_, true, false);
    build(in_off_, in_arcs_, false, false);
  } else {
    build(out_off_, out_arcs_, true, true);
  }
}

double Graph::total_weight() const noexcept {
  double s = 0.0;
  for (const auto& e : edges_) s += e.weight;
  return s;
}

Graph to_undirected(const Graph& g) {
  if (!g.directed()) return g;
  return Graph(g.vertex_count(), false, g.edges());
}

Graph to_unweighted(const Graph& g) {
  std::vector<Edge> edges = g.edges();
  for (auto& e : edges) e.weight = 1.0;
  return Graph(g.vertex_count(), g.directed(), std::move(edges));
}

}  // namespace convabuse::graph
