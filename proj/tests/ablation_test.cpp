#include "commgnn/ablation.hpp"
#include "commgnn/error.hpp"
#include "commgnn/infometrics.hpp"
#include "commgnn/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace commgnn;

namespace {

Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

Partition halves(std::size_t n) {
  std::vector<CommunityId> a(n);
  for (std::size_t u = 0; u < n; ++u) a[u] = u < n / 2 ? 0 : 1;
  return Partition{a, 2};
}

BlockMatrix two_blocks(std::size_t size, double p_in, double p_out) {
  BlockMatrix b;
  b.sizes = {size, size};
  b.densities = Matrix{{p_in, p_out}, {p_out, p_in}};
  return b;
}

std::multiset<std::size_t> degree_multiset(const Graph& g) {
  const auto d = degree_sequence(g);
  return {d.begin(), d.end()};
}

}  // namespace

TEST(Variant, Names) {
  for (auto v : {VariantKind::Original, VariantKind::Sbm, VariantKind::Cm, VariantKind::Random}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_FALSE(parse_variant("nope"));
}

TEST(Sbm, ExtremeDensities) {
  auto full = generate_sbm(two_blocks(6, 1.0, 1.0), halves(12), 1);
  EXPECT_EQ(full.num_edges(), 66u);
  auto empty = generate_sbm(two_blocks(6, 0.0, 0.0), halves(12), 1);
  EXPECT_EQ(empty.num_edges(), 0u);
  EXPECT_EQ(empty.num_nodes(), 12u);
}

TEST(Sbm, EdgeCountWithinFourSigma) {
  const double mu = 2 * (100 * 99 / 2) * 0.2 + 100 * 100 * 0.01;
  const double sigma = std::sqrt(2 * (100 * 99 / 2) * 0.2 * 0.8 + 100 * 100 * 0.01 * 0.99);
  EXPECT_DOUBLE_EQ(mu, 2080.0);
  EXPECT_NEAR(sigma, 41.0244, 1e-4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_sbm(two_blocks(100, 0.2, 0.01), halves(200), seed);
    EXPECT_LE(std::abs(double(g.num_edges()) - mu), 4 * sigma) << seed;
  }
}

TEST(Sbm, BlockDensitiesRecovered) {
  BlockMatrix b;
  b.sizes = {30, 50, 20};
  b.densities = Matrix{{0.3, 0.05, 0.1}, {0.05, 0.2, 0.0}, {0.1, 0.0, 0.6}};
  std::vector<CommunityId> a;
  for (CommunityId c = 0; c < 3; ++c) a.insert(a.end(), b.sizes[c], c);
  const Partition p{a, 3};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto got = block_density_matrix(generate_sbm(b, p, seed), p);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double si = double(b.sizes[i]), sj = double(b.sizes[j]);
        const double pairs = i == j ? si * (si - 1) / 2 : si * sj;
        const double q = b.densities(i, j);
        const double sd = std::sqrt(q * (1 - q) / pairs);
        EXPECT_LE(std::abs(got.densities(i, j) - q), 4 * sd + 1e-15) << i << "," << j;
      }
    }
  }
}

TEST(Sbm, NodeIdentityAndDeterminism) {
  auto a = generate_sbm(two_blocks(40, 0.2, 0.05), halves(80), 5);
  EXPECT_EQ(a, generate_sbm(two_blocks(40, 0.2, 0.05), halves(80), 5));
  EXPECT_NE(a, generate_sbm(two_blocks(40, 0.2, 0.05), halves(80), 6));
  EXPECT_EQ(a.num_nodes(), 80u);
}

TEST(Sbm, RejectsInconsistentPartition) {
  EXPECT_THROW(generate_sbm(two_blocks(5, 0.5, 0.5), halves(12), 0), Error);
}

TEST(Rewire, PreservesDegreesOnRandomGraphs) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_graph(30, 0.05 + 0.3 * rng.uniform01(), rng);
    if (g.num_edges() < 2) continue;
    const auto r = rewire_configuration_model(g, trial);
    EXPECT_EQ(degree_sequence(r.graph), degree_sequence(g));
    EXPECT_EQ(r.graph.num_edges(), g.num_edges());
    // Simple by construction of Graph, so check nothing was silently merged away.
    EXPECT_EQ(r.graph.adjacency().size(), g.adjacency().size());
  }
}

TEST(Rewire, FourCycleStaysAFourCycle) {
  // Oracle: every simple graph on 4 nodes whose degrees are all 2.
  std::set<std::vector<Edge>> cycles;
  const std::vector<Edge> all{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<Edge> e;
    for (unsigned k = 0; k < 6; ++k)
      if (mask >> k & 1u) e.push_back(all[k]);
    const auto g = Graph::from_edges(4, e);
    if (degree_sequence(g) == std::vector<std::size_t>{2, 2, 2, 2}) cycles.insert(g.edges());
  }
  ASSERT_EQ(cycles.size(), 3u);
  const auto c4 = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  std::set<std::vector<Edge>> seen;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto out = rewire_configuration_model(c4, seed).graph.edges();
    EXPECT_TRUE(cycles.count(out));
    seen.insert(out);
  }
  EXPECT_GT(seen.size(), 1u);
}

TEST(Rewire, DestroysCommunityStructure) {
  std::vector<Edge> e;
  for (NodeId base : {0u, 8u})
    for (NodeId i = 0; i < 8; ++i)
      for (NodeId j = i + 1; j < 8; ++j) e.emplace_back(base + i, base + j);
  e.emplace_back(7, 8);
  const auto g = Graph::from_edges(16, e);
  const auto p = halves(16);
  EXPECT_GT(modularity(g, p), 0.4);
  int low = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    if (modularity(rewire_configuration_model(g, seed).graph, p) < 0.1) ++low;
  }
  EXPECT_GE(low, 9);
}

TEST(Rewire, StarIsDegenerate) {
  const auto star = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto r = rewire_configuration_model(star, 3);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.swaps_performed, 0u);
  EXPECT_EQ(r.graph, star);
}

TEST(Rewire, SwapBudget) {
  Rng rng(2);
  const auto g = random_graph(60, 0.1, rng);
  const auto r = rewire_configuration_model(g, 1, 10.0);
  EXPECT_EQ(r.swaps_requested, static_cast<std::size_t>(std::ceil(10.0 * double(g.num_edges()))));
  EXPECT_EQ(r.swaps_performed, r.swaps_requested);
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(rewire_configuration_model(g, 1, 10.0).graph, r.graph);
}

TEST(ErdosRenyi, ExactEdgeCounts) {
  EXPECT_EQ(generate_erdos_renyi(10, 45, 1).num_edges(), 45u);
  EXPECT_EQ(generate_erdos_renyi(10, 0, 1).num_edges(), 0u);
  EXPECT_THROW(generate_erdos_renyi(10, 46, 1), Error);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(60);
    const std::size_t m = rng.uniform_index(n * (n - 1) / 2 + 1);
    const auto g = generate_erdos_renyi(n, m, trial);
    EXPECT_EQ(g.num_edges(), m);
    EXPECT_EQ(g.num_nodes(), n);
  }
}

TEST(ErdosRenyi, MatchesDensityOfSource) {
  const auto g = generate_erdos_renyi(2485, 5209, 7);
  EXPECT_NEAR(edge_density(g), 0.001688, 5e-7);
}

TEST(ErdosRenyi, PairsRoughlyUniform) {
  // Each of the 6 pairs of K4 should be picked about half of the time for m = 3.
  std::vector<int> hits(6, 0);
  const int trials = 6000;
  for (int t = 0; t < trials; ++t) {
    for (auto [u, v] : generate_erdos_renyi(4, 3, t).edges()) {
      const int k = u == 0 ? v - 1 : u == 1 ? v + 1 : 5;
      ++hits[k];
    }
  }
  for (int h : hits) EXPECT_NEAR(h / double(trials), 0.5, 0.03);
}

TEST(Swap, ZeroFractionIsIdentity) {
  Rng rng(4);
  const auto g = random_graph(20, 0.2, rng);
  const auto s = swap_perturbation(g, halves(20), 0.0, 1);
  EXPECT_EQ(s.graph, g);
  EXPECT_TRUE(s.pairs.empty());
  for (NodeId u = 0; u < 20; ++u) EXPECT_EQ(s.position_of[u], u);
}

TEST(Swap, SinglePairExchangesAdjacency) {
  // 4 nodes, communities {0,1} and {2,3}; fraction 0.5 selects exactly one cross pair.
  const auto g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {0, 2}, {2, 3}});
  const auto p = Partition::compacted({0, 0, 1, 1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = swap_perturbation(g, p, 0.5, seed);
    if (s.pairs.empty()) continue;
    ASSERT_EQ(s.pairs.size(), 1u);
    const auto [u, v] = s.pairs[0];
    ASSERT_NE(p.assignment[u], p.assignment[v]);
    auto expected = [&](NodeId a, NodeId b) {
      std::set<NodeId> out;
      for (NodeId x : g.neighbors(b))
        if (x != a) out.insert(x);
      if (g.has_edge(a, b)) out.insert(b);
      return out;
    };
    const auto nu = s.graph.neighbors(u), nv = s.graph.neighbors(v);
    EXPECT_EQ(std::set<NodeId>(nu.begin(), nu.end()), expected(u, v));
    EXPECT_EQ(std::set<NodeId>(nv.begin(), nv.end()), expected(v, u));
    for (NodeId w = 0; w < 4; ++w) {
      if (w == u || w == v) continue;
      for (NodeId x = 0; x < 4; ++x) {
        if (x == u || x == v) continue;
        EXPECT_EQ(s.graph.has_edge(w, x), g.has_edge(w, x));
      }
    }
  }
}

TEST(Swap, PositionDegreesPreserved) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_graph(40, 0.15, rng);
    const double f = 0.1 + 0.9 * rng.uniform01();
    const auto s = swap_perturbation(g, halves(40), f, trial);
    EXPECT_EQ(degree_multiset(s.graph), degree_multiset(g));
    EXPECT_EQ(s.graph.num_edges(), g.num_edges());
    for (NodeId u = 0; u < 40; ++u) EXPECT_EQ(s.graph.degree(s.position_of[u]), g.degree(u));
    EXPECT_EQ(2 * s.pairs.size() + s.unpaired, static_cast<std::size_t>(std::floor(f * 40)));
    for (auto [a, b] : s.pairs) EXPECT_NE(halves(40).assignment[a], halves(40).assignment[b]);
    EXPECT_EQ(swap_perturbation(g, halves(40), f, trial).graph, s.graph);
  }
}

TEST(Swap, Errors) {
  const auto g = Graph::from_edges(10, std::vector<Edge>{{0, 1}});
  EXPECT_THROW(swap_perturbation(g, halves(10), 0.15, 0), DegenerateInputError);
  EXPECT_THROW(swap_perturbation(g, Partition::single(10), 0.5, 0), DegenerateInputError);
  EXPECT_THROW(swap_perturbation(g, halves(10), 1.5, 0), Error);
}

TEST(Swap, TransportedPartitionFollowsPositions) {
  Rng rng(6);
  const auto g = random_graph(30, 0.2, rng);
  const auto p = halves(30);
  const auto s = swap_perturbation(g, p, 0.4, 3);
  const auto t = transport_partition(p, s);
  for (NodeId u = 0; u < 30; ++u) {
    for (NodeId v = 0; v < 30; ++v) {
      EXPECT_EQ(t.assignment[u] == t.assignment[v], p.assignment[s.position_of[u]] == p.assignment[s.position_of[v]]);
    }
  }
}

TEST(Swap, PlantedSweepLowersUncertainty) {
  const auto p = halves(120);
  LabelVector labels{{}, 2, {}};
  for (auto c : p.assignment) labels.ids.push_back(c);
  std::vector<NodeId> all(120);
  for (NodeId u = 0; u < 120; ++u) all[u] = u;
  const auto g = generate_sbm(two_blocks(60, 0.25, 0.02), p, 9);
  double prev = 1.0 + 1e-9;
  for (double f : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const auto s = swap_perturbation(g, p, f, 3);
    const double u = uncertainty_coefficient(labels, louvain(s.graph, 1), all);
    EXPECT_LE(u, prev + 0.05) << f;
    prev = u;
  }
  EXPECT_LT(prev, 0.2);
}
