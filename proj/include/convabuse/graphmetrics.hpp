#pragma once

#include <vector>

#include "convabuse/graph.hpp"

/// Topological measures over graph::Graph. Every function uses the weights of
/// the graph it is given, so weighted and unweighted variants are selected by
/// passing the matching view (see graph_views()). Weighted path lengths are
/// 1 / weight: heavier interaction means shorter distance.
namespace convabuse::metrics {

using graph::Graph;

enum class Direction { kIn, kOut, kAll };

/// Number of incident edges. kAll counts in + out on directed graphs.
std::vector<double> degree(const Graph& g, Direction dir);
/// Sum of incident edge weights.
std::vector<double> strength(const Graph& g, Direction dir);

/// k-core index under the directional degree (in, out, or in + out).
std::vector<int> coreness(const Graph& g, Direction dir);

struct DistanceSummary {
  std::vector<double> closeness;     // (r - 1) / sum of distances, 0 when r == 1
  std::vector<double> eccentricity;  // max distance to a reachable vertex
  double diameter = 0.0;             // max eccentricity over vertices with r > 1
  double radius = 0.0;               // min eccentricity over vertices with r > 1
  double average_path_length = 0.0;  // mean over reachable ordered pairs
};

/// Distances follow out-edges for kOut and in-edges for kIn; ignored on
/// undirected graphs. Only reachable vertices contribute.
DistanceSummary closeness_eccentricity(const Graph& g, Direction dir = Direction::kOut);

/// Shortest-path betweenness (Brandes), ties share credit. Undirected graphs
/// count each unordered pair once.
std::vector<double> betweenness(const Graph& g);

inline constexpr double kDefaultDamping = 0.85;

/// Power iteration; dangling vertices spread uniformly. Stops when the L1
/// change drops below 1e-10 or after 200 iterations.
std::vector<double> pagerank(const Graph& g, double damping = kDefaultDamping);

struct HitsScores {
  std::vector<double> hubs;
  std::vector<double> authorities;
};

/// Kleinberg hubs and authorities, each L2-normalised, or all zeros when the
/// graph has no edges.
HitsScores hits(const Graph& g);

struct GlobalCounts {
  double vertex_count = 0.0;
  double edge_count = 0.0;
  double density = 0.0;
  double reciprocity = 0.0;  // 0 on undirected graphs
};

GlobalCounts reciprocity_density_counts(const Graph& g);

struct Clustering {
  std::vector<double> local;
  double transitivity = 0.0;
};

/// Expects an undirected graph. With weighted = true the local value is the
/// geometric-mean triangle intensity (weights scaled by the maximum weight).
Clustering clustering_transitivity(const Graph& g, bool weighted);

struct Partition {
  std::vector<int> community;  // community id per vertex, ids are 0..k-1
  double modularity = 0.0;
};

/// Deterministic multilevel greedy optimisation on an undirected graph.
/// Vertices are swept in ascending id order and a vertex only leaves its
/// community for a strictly better one.
Partition greedy_modularity(const Graph& g);

/// Modularity of an arbitrary partition of an undirected graph.
double modularity(const Graph& g, const std::vector<int>& community);

struct ComponentStats {
  double component_count = 0.0;
  double largest_fraction = 0.0;
  double assortativity = 0.0;
};

/// Expects an undirected unweighted graph.
ComponentStats components_assortativity(const Graph& g);

}  // namespace convabuse::metrics
