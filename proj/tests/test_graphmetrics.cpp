#include <algorithm>
#include <cmath>
#include <numeric>

#include "convabuse/graph.hpp"
#include "convabuse/graphmetrics.hpp"
#include "convabuse/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace convabuse;
using graph::Edge;
using graph::Graph;
using metrics::Direction;

namespace {

constexpr double kTol = 1e-8;

Graph random_digraph(Rng& rng, int max_n = 7, double p = 0.35) {
  const int n = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_n)));
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.uniform() < p) edges.push_back({i, j, static_cast<double>(1 + rng.index(9)) / 9.0});
    }
  }
  return Graph(static_cast<std::size_t>(n), true, edges);
}

oracle::Dir odir(Direction d) {
  return d == Direction::kIn ? oracle::Dir::kIn : d == Direction::kOut ? oracle::Dir::kOut : oracle::Dir::kAll;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double tol = kTol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

/// Compares every measure that applies to `g` with the oracles.
void check_view(const Graph& g, bool weighted) {
  const auto d = oracle::dense(g);
  for (auto dir : {Direction::kIn, Direction::kOut, Direction::kAll}) {
    check_close(metrics::degree(g, dir), oracle::degree(d, odir(dir)), 0.0);
    check_close(metrics::strength(g, dir), oracle::strength(d, odir(dir)));
    if (!weighted) CHECK(metrics::coreness(g, dir) == oracle::coreness(d, odir(dir)));
  }
  for (auto dir : {Direction::kIn, Direction::kOut}) {
    const auto got = metrics::closeness_eccentricity(g, dir);
    const auto want = oracle::distance_summary(d, dir == Direction::kIn);
    check_close(got.closeness, want.closeness);
    check_close(got.eccentricity, want.eccentricity);
    CHECK(std::abs(got.diameter - want.diameter) <= kTol);
    CHECK(std::abs(got.radius - want.radius) <= kTol);
    CHECK(std::abs(got.average_path_length - want.average_path_length) <= kTol);
  }
  check_close(metrics::betweenness(g), oracle::betweenness(d));

  const auto counts = metrics::reciprocity_density_counts(g);
  CHECK(counts.vertex_count == d.n);
  CHECK(counts.edge_count == g.edge_count());
  CHECK(std::abs(counts.density - oracle::density(d)) <= kTol);

  if (g.directed()) {
    check_close(metrics::pagerank(g), oracle::pagerank(d, 0.85));
    const auto h = metrics::hits(g);
    std::vector<double> hubs;
    std::vector<double> auth;
    oracle::hits(d, hubs, auth);
    check_close(h.hubs, hubs);
    check_close(h.authorities, auth);
    CHECK(std::abs(counts.reciprocity - oracle::reciprocity(d)) <= kTol);
  } else {
    const auto c = metrics::clustering_transitivity(g, weighted);
    const auto want = oracle::clustering(d, weighted);
    check_close(c.local, want.local);
    CHECK(std::abs(c.transitivity - want.transitivity) <= kTol);

    const auto part = metrics::greedy_modularity(g);
    REQUIRE(part.community.size() == g.vertex_count());
    CHECK(std::abs(part.modularity - oracle::modularity(d, part.community)) <= kTol);
    if (!part.community.empty()) {
      const int k = *std::max_element(part.community.begin(), part.community.end()) + 1;
      for (int c = 0; c < k; ++c) {
        CHECK(std::count(part.community.begin(), part.community.end(), c) > 0);
      }
    }
    if (!weighted) {
      const auto got = metrics::components_assortativity(g);
      const auto want = oracle::components(d);
      CHECK(got.component_count == want.count);
      CHECK(std::abs(got.largest_fraction - want.largest_fraction) <= kTol);
      CHECK(std::abs(got.assortativity - want.assortativity) <= kTol);
    }
  }
}

Graph undirected(std::size_t n, std::vector<Edge> edges) { return Graph(n, false, std::move(edges)); }

Graph hand_example() { return Graph(3, true, {{1, 0, 1.0}, {0, 1, 1.0}, {2, 0, 1.0}, {2, 1, 0.5}}); }

Graph permuted(const Graph& g, const std::vector<int>& perm) {
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({perm[e.src], perm[e.dst], e.weight});
  return Graph(g.vertex_count(), g.directed(), edges);
}

template <class T>
std::vector<T> relabel(const std::vector<T>& v, const std::vector<int>& perm) {
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[perm[i]] = v[i];
  return out;
}

}  // namespace

TEST_SUITE("graphmetrics") {
  TEST_CASE("100 random digraphs match the oracles on all four views") {
    Rng rng(20240917);
    for (int trial = 0; trial < 100; ++trial) {
      CAPTURE(trial);
      const auto g = random_digraph(rng);
      check_view(g, true);
      check_view(graph::to_unweighted(g), false);
      check_view(graph::to_undirected(g), true);
      check_view(graph::to_undirected(graph::to_unweighted(g)), false);
    }
  }

  TEST_CASE("degree and strength on the hand example") {
    const auto g = hand_example();
    CHECK(metrics::strength(g, Direction::kOut)[2] == 1.5);
    CHECK(metrics::degree(g, Direction::kIn)[0] == 2.0);
    const Graph iso(2, true, {});
    CHECK(metrics::degree(iso, Direction::kAll)[0] == 0.0);
    CHECK(metrics::strength(iso, Direction::kAll)[1] == 0.0);
  }

  TEST_CASE("unweighted view: strength equals degree, closeness ignores unit weights") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = graph::to_unweighted(random_digraph(rng));
      for (auto dir : {Direction::kIn, Direction::kOut, Direction::kAll}) {
        CHECK(metrics::strength(g, dir) == metrics::degree(g, dir));
      }
      // the same graph rebuilt with explicit unit weights, distances through Dijkstra
      std::vector<Edge> e = g.edges();
      const Graph unit(g.vertex_count(), true, e);
      check_close(metrics::closeness_eccentricity(unit).closeness, metrics::closeness_eccentricity(g).closeness);
    }
  }

  TEST_CASE("coreness of a clique and a star") {
    std::vector<Edge> k4;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) k4.push_back({i, j, 1.0});
    }
    CHECK(metrics::coreness(undirected(4, k4), Direction::kAll) == std::vector<int>(4, 3));
    std::vector<Edge> star;
    for (int i = 1; i <= 5; ++i) star.push_back({0, i, 1.0});
    CHECK(metrics::coreness(undirected(6, star), Direction::kAll) == std::vector<int>(6, 1));
  }

  TEST_CASE("path A-B-C closeness and diameter") {
    const auto g = undirected(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const auto s = metrics::closeness_eccentricity(g);
    CHECK(s.closeness[1] == 1.0);
    CHECK(s.diameter == 2.0);
    CHECK(s.radius == 1.0);
    const auto bc = metrics::betweenness(g);
    CHECK(bc == std::vector<double>{0.0, 1.0, 0.0});
  }

  TEST_CASE("two disconnected edges use reachable vertices only") {
    const auto g = undirected(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    const auto s = metrics::closeness_eccentricity(g);
    CHECK(s.diameter == 1.0);
    for (double c : s.closeness) CHECK(c == 1.0);
    const auto comp = metrics::components_assortativity(g);
    CHECK(comp.component_count == 2.0);
    CHECK(comp.largest_fraction == 0.5);
  }

  TEST_CASE("isolated vertex has closeness and eccentricity 0") {
    const Graph g(3, true, {{0, 1, 1.0}});
    const auto s = metrics::closeness_eccentricity(g, Direction::kOut);
    CHECK(s.closeness[1] == 0.0);
    CHECK(s.eccentricity[2] == 0.0);
  }

  TEST_CASE("weighted triangle distances use 1/w") {
    const auto g = undirected(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 2.0}});
    const auto s = metrics::closeness_eccentricity(g);
    // d(0,2) = 0.5, d(0,1) = 1, d(1,2) = 1
    CHECK(s.closeness[0] == doctest::Approx(2.0 / 1.5));
    CHECK(s.eccentricity[1] == 1.0);
    check_close(s.closeness, oracle::distance_summary(oracle::dense(g), false).closeness);
  }

  TEST_CASE("C4 betweenness splits tied paths") {
    const auto g = undirected(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
    for (double b : metrics::betweenness(g)) CHECK(b == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("PageRank on a 3-cycle, a single vertex, and its sum") {
    const Graph cycle(3, true, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}});
    for (double p : metrics::pagerank(cycle)) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(metrics::pagerank(Graph(1, true, {})) == std::vector<double>{1.0});
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      const auto pr = metrics::pagerank(random_digraph(rng));
      CHECK(std::abs(std::accumulate(pr.begin(), pr.end(), 0.0) - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("HITS on a star pointing at its center, and degenerate cases") {
    std::vector<Edge> star;
    for (int i = 1; i <= 4; ++i) star.push_back({i, 0, 1.0});
    const auto h = metrics::hits(Graph(5, true, star));
    CHECK(h.authorities[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.hubs[0] == 0.0);
    for (int i = 1; i <= 4; ++i) CHECK(h.hubs[i] == doctest::Approx(0.5).epsilon(1e-12));
    const auto e = metrics::hits(Graph(3, true, {}));
    CHECK(e.hubs == std::vector<double>(3, 0.0));
    CHECK(e.authorities == std::vector<double>(3, 0.0));

    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const auto r = metrics::hits(random_digraph(rng));
      for (const auto* v : {&r.hubs, &r.authorities}) {
        double sq = 0.0;
        for (double x : *v) sq += x * x;
        CHECK((sq == 0.0 || std::abs(sq - 1.0) <= 1e-9));
      }
    }
  }

  TEST_CASE("reciprocity and density") {
    const auto pair = metrics::reciprocity_density_counts(Graph(2, true, {{0, 1, 1.0}, {1, 0, 1.0}}));
    CHECK(pair.reciprocity == 1.0);
    CHECK(pair.density == 1.0);
    CHECK(metrics::reciprocity_density_counts(Graph(2, true, {{0, 1, 1.0}})).reciprocity == 0.0);
    const auto hand = metrics::reciprocity_density_counts(hand_example());
    CHECK(hand.reciprocity == 0.5);
    CHECK(hand.vertex_count == 3.0);
    CHECK(hand.edge_count == 4.0);
    CHECK(metrics::reciprocity_density_counts(Graph(1, true, {})).density == 0.0);
    CHECK(metrics::reciprocity_density_counts(undirected(3, {{0, 1, 1.0}})).density == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("clustering of a triangle and a star") {
    const auto tri = metrics::clustering_transitivity(undirected(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}), false);
    CHECK(tri.local == std::vector<double>(3, 1.0));
    CHECK(tri.transitivity == 1.0);
    std::vector<Edge> star;
    for (int i = 1; i <= 4; ++i) star.push_back({0, i, 1.0});
    const auto s = metrics::clustering_transitivity(undirected(5, star), true);
    CHECK(s.local == std::vector<double>(5, 0.0));
    CHECK(s.transitivity == 0.0);
  }

  TEST_CASE("modularity of two triangles joined by a bridge") {
    const auto g = undirected(6, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {3, 5, 1.0},
                                  {2, 3, 1.0}});
    const auto p = metrics::greedy_modularity(g);
    CHECK(p.community == std::vector<int>{0, 0, 0, 1, 1, 1});
    // each side: 3 internal edges of 7, total degree 7 of 14
    const double q = 2 * (3.0 / 7 - 0.25);
    CHECK(p.modularity == doctest::Approx(q).epsilon(1e-12));
    CHECK(metrics::modularity(g, p.community) == doctest::Approx(q).epsilon(1e-12));
  }

  TEST_CASE("modularity of a clique and of an edgeless graph") {
    std::vector<Edge> k5;
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) k5.push_back({i, j, 1.0});
    }
    const auto p = metrics::greedy_modularity(undirected(5, k5));
    CHECK(p.community == std::vector<int>(5, 0));
    CHECK(p.modularity == doctest::Approx(0.0));
    CHECK(metrics::modularity(undirected(5, k5), {0, 0, 1, 1, 1}) < 0.0);
    CHECK(metrics::greedy_modularity(undirected(4, {})).modularity == 0.0);
  }

  TEST_CASE("assortativity of a regular graph is 0") {
    const auto c = metrics::components_assortativity(
        undirected(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}}));
    CHECK(c.assortativity == 0.0);
    CHECK(c.component_count == 1.0);
  }

  TEST_CASE("assortativity of a seeded 8-vertex graph") {
    Rng rng(8);
    std::vector<Edge> edges;
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) {
        if (rng.uniform() < 0.4) edges.push_back({i, j, 1.0});
      }
    }
    const auto g = undirected(8, edges);
    CHECK(metrics::components_assortativity(g).assortativity ==
          doctest::Approx(oracle::components(oracle::dense(g)).assortativity).epsilon(1e-12));
  }

  TEST_CASE("relabelling vertices permutes vertex values and keeps globals") {
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
      const auto g = random_digraph(rng);
      std::vector<int> perm(g.vertex_count());
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
      const auto h = permuted(g, perm);
      for (auto dir : {Direction::kIn, Direction::kOut, Direction::kAll}) {
        CHECK(relabel(metrics::coreness(graph::to_unweighted(g), dir), perm) ==
              metrics::coreness(graph::to_unweighted(h), dir));
        check_close(relabel(metrics::strength(g, dir), perm), metrics::strength(h, dir));
      }
      check_close(relabel(metrics::betweenness(g), perm), metrics::betweenness(h));
      check_close(relabel(metrics::pagerank(g), perm), metrics::pagerank(h));
      check_close(relabel(metrics::hits(g).authorities, perm), metrics::hits(h).authorities);
      const auto a = metrics::closeness_eccentricity(g);
      const auto b = metrics::closeness_eccentricity(h);
      check_close(relabel(a.closeness, perm), b.closeness);
      CHECK(a.diameter == doctest::Approx(b.diameter));
      CHECK(a.average_path_length == doctest::Approx(b.average_path_length));
      const auto ua = graph::to_undirected(g);
      const auto ub = graph::to_undirected(h);
      check_close(relabel(metrics::clustering_transitivity(ua, true).local, perm),
                  metrics::clustering_transitivity(ub, true).local);
      const auto ca = metrics::components_assortativity(graph::to_unweighted(ua));
      const auto cb = metrics::components_assortativity(graph::to_unweighted(ub));
      CHECK(ca.component_count == cb.component_count);
      CHECK(ca.assortativity == doctest::Approx(cb.assortativity));
    }
  }
}
