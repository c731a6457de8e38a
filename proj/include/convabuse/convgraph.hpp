#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convabuse/corpus.hpp"
#include "convabuse/graph.hpp"

namespace convabuse {

/// Which part of the context period feeds the graph. The targeted message
/// belongs to both the before and the after range.
enum class GraphMode { kBefore, kAfter, kFull };

std::string_view to_string(GraphMode mode);
/// Throws ConfigError.
GraphMode parse_graph_mode(std::string_view name);

inline constexpr int kDefaultWindowLength = 10;

struct WindowParams {
  int window_len = kDefaultWindowLength;
  GraphMode mode = GraphMode::kFull;
};

/// Directed weighted conversational graph. Vertex i is authors[i]; authors
/// are sorted, so vertex ids are a function of the author set alone.
struct ConvGraph {
  std::vector<std::string> authors;
  graph::Graph graph;
  std::string targeted_author;
  /// Vertex of the targeted author, absent when the author did not post in
  /// the processed range.
  std::optional<graph::Vertex> target;
  GraphMode mode = GraphMode::kFull;

  /// Weight of u -> v, 0 when absent.
  double weight(std::string_view from, std::string_view to) const;
};

/// Slides a window of at most window_len messages over the processed range.
/// The author of the last message in the window gains an edge towards each
/// other author in the window, weighted (L - d) / (L - 1) where d is the
/// backward distance in messages. Increments accumulate.
ConvGraph extract_graph(const ContextSlice& context, const WindowParams& params);

/// Same vertex set and target for all four.
struct GraphViews {
  graph::Graph directed_weighted;
  graph::Graph directed_unweighted;
  graph::Graph undirected_weighted;
  graph::Graph undirected_unweighted;
  std::optional<graph::Vertex> target;
};

GraphViews graph_views(const ConvGraph& g);

/// Edge-list dump: "# target=<author> mode=<mode>" then "u v w" lines.
void write_edge_list(std::ostream& out, const ConvGraph& g);

}  // namespace convabuse
