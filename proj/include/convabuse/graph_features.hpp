#pragma once

#include <string>
#include <vector>

#include "convabuse/convgraph.hpp"

namespace convabuse {

/// One column of the graph feature matrix. Letters follow the usual
/// notation: graph B/A/F, weights U/W/- , directions U/D/I/O/-, scale G/N.
struct MeasureSpec {
  std::string measure;
  char graph = 'F';
  char weights = '-';
  char direction = '-';
  char scale = 'G';

  /// "<graph>.<measure>.<weights>.<direction>.<scale>", e.g. "F.Strength.W.O.N".
  std::string name() const;
  bool operator==(const MeasureSpec&) const = default;
};

struct GraphFeatureConfig {
  bool before = true;
  bool after = true;
  bool full = true;
  double damping = 0.85;  // PageRank
};

/// Ordered manifest: the per-graph block (82 measures) for each enabled graph
/// in B, A, F order.
std::vector<MeasureSpec> graph_feature_specs(const GraphFeatureConfig& config = {});
std::vector<std::string> graph_feature_manifest(const GraphFeatureConfig& config = {});

/// Number of columns in one per-graph block.
std::size_t graph_block_size();

struct GraphFeatureVector {
  std::vector<double> values;
  /// True where the value is a placeholder 0 (target absent, empty graph).
  std::vector<bool> missing;
};

/// Evaluates the manifest on the three graphs. Vertex-scale columns report the
/// targeted author's value; graph-scale columns report the global value, or
/// the vertex mean for per-vertex measures. Always finite.
GraphFeatureVector compute_feature_vector(const ConvGraph& before, const ConvGraph& after,
                                          const ConvGraph& full,
                                          const GraphFeatureConfig& config = {});

/// Extracts the three graphs from a context and evaluates the manifest.
GraphFeatureVector context_graph_features(const ContextSlice& context, int window_len,
                                          const GraphFeatureConfig& config = {});

}  // namespace convabuse
