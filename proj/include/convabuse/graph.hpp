#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace convabuse::graph {

using Vertex = int;

struct Edge {
  Vertex src;
  Vertex dst;
  double weight;

  bool operator==(const Edge&) const = default;
};

/// Neighbor entry in an adjacency list.
struct Arc {
  Vertex to;
  double weight;
};

/// Immutable simple graph in compressed adjacency form. Vertices are 0..n-1.
/// Parallel edges are merged by summing weights; self-loops are dropped.
/// Undirected graphs store each edge once with src < dst and expose the same
/// neighbor list through out() and in().
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t vertex_count, bool directed, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  bool empty() const noexcept { return n_ == 0; }

  /// Canonical edge list sorted by (src, dst).
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const Arc> out(Vertex v) const {
    return {out_arcs_.data() + out_off_[v], out_arcs_.data() + out_off_[v + 1]};
  }
  std::span<const Arc> in(Vertex v) const {
    if (!directed_) return out(v);
    return {in_arcs_.data() + in_off_[v], in_arcs_.data() + in_off_[v + 1]};
  }

  double total_weight() const noexcept;

 private:
  std::size_t n_ = 0;
  bool directed_ = true;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_off_{0};
  std::vector<Arc> out_arcs_;
  std::vector<std::size_t> in_off_{0};
  std::vector<Arc> in_arcs_;
};

/// Merges antiparallel edges by summing their weights.
Graph to_undirected(const Graph& g);
/// Same topology with every weight set to 1.
Graph to_unweighted(const Graph& g);

}  // namespace convabuse::graph
