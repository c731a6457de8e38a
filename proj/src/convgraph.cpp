#include "convabuse/convgraph.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include "convabuse/error.hpp"

namespace convabuse {

std::string_view to_string(GraphMode mode) {
  switch (mode) {
    case GraphMode::kBefore:
      return "before";
    case GraphMode::kAfter:
      return "after";
    case GraphMode::kFull:
      return "full";
  }
  return "full";
}

GraphMode parse_graph_mode(std::string_view name) {
  if (name == "before") return GraphMode::kBefore;
  if (name == "after") return GraphMode::kAfter;
  if (name == "full") return GraphMode::kFull;
  throw ConfigError("invalid graph mode '" + std::string(name) + "'");
}

double ConvGraph::weight(std::string_view from, std::string_view to) const {
  auto find = [this](std::string_view a) -> int {
    auto it = std::lower_bound(authors.begin(), authors.end(), a);
    if (it == authors.end() || *it != a) return -1;
    return static_cast<int>(it - authors.begin());
  };
  const int u = find(from);
  const int v = find(to);
  if (u < 0 || v < 0) return 0.0;
  for (const auto& arc : graph.out(u)) {
    if (arc.to == v) return arc.weight;
  }
  return 0.0;
}

ConvGraph extract_graph(const ContextSlice& context, const WindowParams& params) {
  if (params.window_len < 2) throw ConfigError("window length must be at least 2");
  if (params.mode != GraphMode::kBefore && params.mode != GraphMode::kAfter &&
      params.mode != GraphMode::kFull) {
    throw ConfigError("invalid graph mode");
  }

  ConvGraph out;
  out.mode = params.mode;
  if (context.messages.empty()) return out;
  if (context.target_index >= context.messages.size()) {
    throw ConfigError("target index outside the context");
  }
  out.targeted_author = context.target().author_id;

  std::size_t first = 0;
  std::size_t last = context.messages.size();  // exclusive
  if (params.mode == GraphMode::kBefore) last = context.target_index + 1;
  if (params.mode == GraphMode::kAfter) first = context.target_index;
  const auto range = context.messages.subspan(first, last - first);

  std::vector<std::string_view> names;
  names.reserve(range.size());
  for (const auto& m : range) names.push_back(m.author_id);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  std::unordered_map<std::string_view, graph::Vertex> id_of;
  id_of.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) id_of.emplace(names[i], static_cast<int>(i));

  std::vector<graph::Vertex> seq;
  seq.reserve(range.size());
  for (const auto& m : range) seq.push_back(id_of.at(m.author_id));

  const auto n = static_cast<std::uint64_t>(names.size());
  const int L = params.window_len;
  const double denom = static_cast<double>(L - 1);
  std::unordered_map<std::uint64_t, double> acc;
  acc.reserve(seq.size() * 4);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto a = static_cast<std::uint64_t>(seq[i]);
    const std::size_t reach = std::min<std::size_t>(static_cast<std::size_t>(L - 1), i);
    for (std::size_t d = 1; d <= reach; ++d) {
      const auto b = static_cast<std::uint64_t>(seq[i - d]);
      if (a == b) continue;
      acc[a * n + b] += static_cast<double>(L - static_cast<int>(d)) / denom;
    }
  }
  // Summation order above is fixed by the message sequence, so weights are
  // reproducible regardless of hash-map iteration order.
  std::vector<graph::Edge> edges;
  edges.reserve(acc.size());
  for (const auto& [key, w] : acc) {
    edges.push_back({static_cast<int>(key / n), static_cast<int>(key % n), w});
  }
  out.graph = graph::Graph(names.size(), true, std::move(edges));
  out.authors.assign(names.begin(), names.end());
  if (auto it = id_of.find(out.targeted_author); it != id_of.end()) out.target = it->second;
  return out;
}

GraphViews graph_views(const ConvGraph& g) {
  GraphViews v;
  v.directed_weighted = g.graph;
  v.directed_unweighted = graph::to_unweighted(g.graph);
  v.undirected_weighted = graph::to_undirected(g.graph);
  v.undirected_unweighted = graph::to_unweighted(v.undirected_weighted);
  v.target = g.target;
  return v;
}

void write_edge_list(std::ostream& out, const ConvGraph& g) {
  out << "# target=" << g.targeted_author << " mode=" << to_string(g.mode) << '\n';
  char buf[64];
  for (const auto& e : g.graph.edges()) {
    std::snprintf(buf, sizeof buf, "%.6f", e.weight);
    out << g.authors[e.src] << ' ' << g.authors[e.dst] << ' ' << buf << '\n';
  }
}

}  // namespace convabuse
