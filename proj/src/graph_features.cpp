#include "convabuse/graph_features.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numeric>

#include "convabuse/graphmetrics.hpp"

namespace convabuse {

std::string MeasureSpec::name() const {
  std::string out;
  out.reserve(measure.size() + 9);
  out += graph;
  out += '.';
  out += measure;
  out += '.';
  out += weights;
  out += '.';
  out += direction;
  out += '.';
  out += scale;
  return out;
}

namespace {

using metrics::Direction;

// Index 0 = unweighted view, 1 = weighted view.
struct BlockData {
  std::size_t n = 0;
  std::optional<graph::Vertex> target;
  std::array<std::vector<double>, 3> degree;  // I, O, all
  std::array<std::vector<double>, 3> strength;
  std::array<std::vector<double>, 3> coreness;
  std::array<std::array<metrics::DistanceSummary, 3>, 2> distance;  // [w][I, O, U]
  std::array<std::array<std::vector<double>, 2>, 2> betweenness;    // [w][D, U]
  std::array<std::vector<double>, 2> pagerank;
  std::array<std::vector<double>, 2> hub;
  std::array<std::vector<double>, 2> authority;
  std::array<std::vector<double>, 2> clustering;
  double transitivity = 0.0;
  metrics::GlobalCounts counts;
  std::array<double, 2> modularity{};
  metrics::ComponentStats components;
};

using VertexGetter = std::function<const std::vector<double>&(const BlockData&)>;
using GlobalGetter = std::function<double(const BlockData&)>;

struct Column {
  MeasureSpec spec;
  VertexGetter vertex;  // set for per-vertex measures
  GlobalGetter global;  // set for graph-level measures
};

constexpr std::array<char, 3> kDirLetters{'I', 'O', 'U'};
constexpr std::array<char, 2> kWeightLetters{'U', 'W'};

std::vector<Column> make_block() {
  std::vector<Column> cols;
  auto vertex = [&cols](std::string measure, char w, char d, VertexGetter get) {
    cols.push_back({{measure, '?', w, d, 'N'}, get, {}});
    cols.push_back({{measure, '?', w, d, 'G'}, get, {}});
  };
  auto global = [&cols](std::string measure, char w, char d, GlobalGetter get) {
    cols.push_back({{std::move(measure), '?', w, d, 'G'}, {}, std::move(get)});
  };

  for (std::size_t d = 0; d < 3; ++d) {
    vertex("Degree", 'U', kDirLetters[d], [d](const BlockData& b) -> const auto& { return b.degree[d]; });
  }
  for (std::size_t d = 0; d < 3; ++d) {
    vertex("Strength", 'W', kDirLetters[d],
           [d](const BlockData& b) -> const auto& { return b.strength[d]; });
  }
  for (std::size_t d = 0; d < 3; ++d) {
    vertex("Coreness", '-', kDirLetters[d],
           [d](const BlockData& b) -> const auto& { return b.coreness[d]; });
  }
  for (std::size_t w = 0; w < 2; ++w) {
    for (std::size_t d = 0; d < 3; ++d) {
      vertex("Closeness", kWeightLetters[w], kDirLetters[d],
             [w, d](const BlockData& b) -> const auto& { return b.distance[w][d].closeness; });
    }
  }
  // Hop-count eccentricity carries no weight letter.
  for (std::size_t w = 0; w < 2; ++w) {
    for (std::size_t d = 0; d < 3; ++d) {
      vertex("Eccentricity", w == 0 ? '-' : 'W', kDirLetters[d],
             [w, d](const BlockData& b) -> const auto& { return b.distance[w][d].eccentricity; });
    }
  }
  for (std::size_t w = 0; w < 2; ++w) {
    for (std::size_t d = 0; d < 2; ++d) {
      vertex("Betweenness", kWeightLetters[w], d == 0 ? 'D' : 'U',
             [w, d](const BlockData& b) -> const auto& { return b.betweenness[w][d]; });
    }
  }
  for (std::size_t w = 0; w < 2; ++w) {
    vertex("PageRank", kWeightLetters[w], 'D',
           [w](const BlockData& b) -> const auto& { return b.pagerank[w]; });
  }
  for (std::size_t w = 0; w < 2; ++w) {
    vertex("Hub", kWeightLetters[w], 'D', [w](const BlockData& b) -> const auto& { return b.hub[w]; });
  }
  for (std::size_t w = 0; w < 2; ++w) {
    vertex("Authority", kWeightLetters[w], 'D',
           [w](const BlockData& b) -> const auto& { return b.authority[w]; });
  }
  for (std::size_t w = 0; w < 2; ++w) {
    vertex("ClusteringCoefficient", kWeightLetters[w], 'U',
           [w](const BlockData& b) -> const auto& { return b.clustering[w]; });
  }

  global("VertexCount", '-', '-', [](const BlockData& b) { return b.counts.vertex_count; });
  global("EdgeCount", '-', 'D', [](const BlockData& b) { return b.counts.edge_count; });
  global("Density", '-', 'D', [](const BlockData& b) { return b.counts.density; });
  global("Reciprocity", '-', 'D', [](const BlockData& b) { return b.counts.reciprocity; });
  for (std::size_t w = 0; w < 2; ++w) {
    global("Diameter", kWeightLetters[w], 'U',
           [w](const BlockData& b) { return b.distance[w][2].diameter; });
  }
  for (std::size_t w = 0; w < 2; ++w) {
    global("Radius", kWeightLetters[w], 'U', [w](const BlockData& b) { return b.distance[w][2].radius; });
  }
  for (std::size_t w = 0; w < 2; ++w) {
    global("AveragePathLength", kWeightLetters[w], 'U',
           [w](const BlockData& b) { return b.distance[w][2].average_path_length; });
  }
  global("Transitivity", '-', 'U', [](const BlockData& b) { return b.transitivity; });
  for (std::size_t w = 0; w < 2; ++w) {
    global("Modularity", kWeightLetters[w], 'U', [w](const BlockData& b) { return b.modularity[w]; });
  }
  global("Assortativity", '-', 'U', [](const BlockData& b) { return b.components.assortativity; });
  global("ComponentCount", '-', 'U', [](const BlockData& b) { return b.components.component_count; });
  global("LargestComponentFraction", '-', 'U',
         [](const BlockData& b) { return b.components.largest_fraction; });
  return cols;
}

const std::vector<Column>& block_columns() {
  static const std::vector<Column> cols = make_block();
  return cols;
}

std::vector<double> to_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

BlockData measure_all(const ConvGraph& cg, double damping) {
  BlockData b;
  const auto views = graph_views(cg);
  b.n = cg.graph.vertex_count();
  b.target = cg.target;
  const std::array<Direction, 3> dirs{Direction::kIn, Direction::kOut, Direction::kAll};
  for (std::size_t d = 0; d < 3; ++d) {
    b.degree[d] = metrics::degree(views.directed_unweighted, dirs[d]);
    b.strength[d] = metrics::strength(views.directed_weighted, dirs[d]);
    b.coreness[d] = to_double(metrics::coreness(views.directed_unweighted, dirs[d]));
  }
  const std::array<const graph::Graph*, 2> directed{&views.directed_unweighted, &views.directed_weighted};
  const std::array<const graph::Graph*, 2> undirected{&views.undirected_unweighted,
                                                      &views.undirected_weighted};
  for (std::size_t w = 0; w < 2; ++w) {
    b.distance[w][0] = metrics::closeness_eccentricity(*directed[w], Direction::kIn);
    b.distance[w][1] = metrics::closeness_eccentricity(*directed[w], Direction::kOut);
    b.distance[w][2] = metrics::closeness_eccentricity(*undirected[w]);
    b.betweenness[w][0] = metrics::betweenness(*directed[w]);
    b.betweenness[w][1] = metrics::betweenness(*undirected[w]);
    b.pagerank[w] = metrics::pagerank(*directed[w], damping);
    auto h = metrics::hits(*directed[w]);
    b.hub[w] = std::move(h.hubs);
    b.authority[w] = std::move(h.authorities);
    auto c = metrics::clustering_transitivity(*undirected[w], w == 1);
    b.clustering[w] = std::move(c.local);
    if (w == 0) b.transitivity = c.transitivity;
    b.modularity[w] = metrics::greedy_modularity(*undirected[w]).modularity;
  }
  b.counts = metrics::reciprocity_density_counts(views.directed_unweighted);
  b.components = metrics::components_assortativity(views.undirected_unweighted);
  return b;
}

void append_block(const ConvGraph& cg, double damping, GraphFeatureVector& out) {
  const auto& cols = block_columns();
  if (cg.graph.vertex_count() == 0) {
    out.values.insert(out.values.end(), cols.size(), 0.0);
    out.missing.insert(out.missing.end(), cols.size(), true);
    return;
  }
  const BlockData b = measure_all(cg, damping);
  for (const auto& col : cols) {
    double value = 0.0;
    bool missing = false;
    if (col.global) {
      value = col.global(b);
    } else {
      const auto& per_vertex = col.vertex(b);
      if (col.spec.scale == 'N') {
        if (b.target) {
          value = per_vertex[static_cast<std::size_t>(*b.target)];
        } else {
          missing = true;
        }
      } else {
        value = std::accumulate(per_vertex.begin(), per_vertex.end(), 0.0) /
                static_cast<double>(per_vertex.size());
      }
    }
    if (!std::isfinite(value)) {
      value = 0.0;
      missing = true;
    }
    out.values.push_back(value);
    out.missing.push_back(missing);
  }
}

}  // namespace

std::size_t graph_block_size() { return block_columns().size(); }

std::vector<MeasureSpec> graph_feature_specs(const GraphFeatureConfig& config) {
  std::vector<MeasureSpec> specs;
  const std::array<std::pair<char, bool>, 3> graphs{
      {{'B', config.before}, {'A', config.after}, {'F', config.full}}};
  for (const auto& [letter, enabled] : graphs) {
    if (!enabled) continue;
    for (const auto& col : block_columns()) {
      MeasureSpec s = col.spec;
      s.graph = letter;
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

std::vector<std::string> graph_feature_manifest(const GraphFeatureConfig& config) {
  std::vector<std::string> names;
  for (const auto& s : graph_feature_specs(config)) names.push_back(s.name());
  return names;
}

GraphFeatureVector compute_feature_vector(const ConvGraph& before, const ConvGraph& after,
                                          const ConvGraph& full, const GraphFeatureConfig& config) {
  GraphFeatureVector out;
  out.values.reserve(3 * graph_block_size());
  out.missing.reserve(3 * graph_block_size());
  if (config.before) append_block(before, config.damping, out);
  if (config.after) append_block(after, config.damping, out);
  if (config.full) append_block(full, config.damping, out);
  return out;
}

GraphFeatureVector context_graph_features(const ContextSlice& context, int window_len,
                                          const GraphFeatureConfig& config) {
  const ConvGraph empty;
  auto extract = [&](bool enabled, GraphMode mode) {
    return enabled ? extract_graph(context, {window_len, mode}) : empty;
  };
  return compute_feature_vector(extract(config.before, GraphMode::kBefore),
                                extract(config.after, GraphMode::kAfter),
                                extract(config.full, GraphMode::kFull), config);
}

}  // namespace convabuse
