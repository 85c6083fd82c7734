#include "commgnn/ablation.hpp"

#include "commgnn/error.hpp"
#include "commgnn/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace commgnn {

std::string_view to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::Original:
      return "original";
    case VariantKind::Sbm:
      return "sbm";
    case VariantKind::Cm:
      return "cm";
    case VariantKind::Random:
      return "random";
  }
  return "unknown";
}

std::optional<VariantKind> parse_variant(std::string_view name) {
  for (auto k : {VariantKind::Original, VariantKind::Sbm, VariantKind::Cm, VariantKind::Random}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

// Index k of the k-th pair (j, i), j < i, in the order (0,1), (0,2), (1,2), (0,3), ...
Edge decode_triangular(std::uint64_t k) {
  auto i = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (i * (i - 1) / 2 > k) --i;
  while ((i + 1) * i / 2 <= k) ++i;
  const std::uint64_t j = k - i * (i - 1) / 2;
  return {static_cast<NodeId>(j), static_cast<NodeId>(i)};
}

// Visits the successes of `total` independent Bernoulli(p) trials in order,
// jumping between them with geometric skips.
template <typename Visit>
void bernoulli_successes(std::uint64_t total, double p, Rng& rng, Visit&& visit) {
  if (total == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < total; ++k) visit(k);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t k = 0;
  bool first = true;
  while (true) {
    const double u = rng.uniform01();
    const double skip = std::floor(std::log1p(-u) / log_q);
    if (skip >= static_cast<double>(total)) return;
    const auto step = static_cast<std::uint64_t>(skip);
    k = first ? step : k + 1 + step;
    first = false;
    if (k >= total) return;
    visit(k);
  }
}

std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

Graph generate_sbm(const BlockMatrix& blocks, const Partition& partition, std::uint64_t seed) {
  const std::size_t k = blocks.num_blocks();
  if (partition.num_communities != k) throw Error("generate_sbm: partition and block matrix disagree on K");
  std::vector<std::vector<NodeId>> members(k);
  for (NodeId u = 0; u < partition.size(); ++u) members[partition.assignment[u]].push_back(u);
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].size() != blocks.sizes[c]) throw Error("generate_sbm: community sizes disagree with the block matrix");
  }

  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const double p = blocks.densities(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      const auto& ma = members[a];
      const auto& mb = members[b];
      if (a == b) {
        const std::uint64_t pairs = ma.size() * (ma.size() - (ma.empty() ? 0 : 1)) / 2;
        bernoulli_successes(pairs, p, rng, [&](std::uint64_t idx) {
          const auto [j, i] = decode_triangular(idx);
          edges.emplace_back(ma[j], ma[i]);
        });
      } else {
        const std::uint64_t pairs = static_cast<std::uint64_t>(ma.size()) * mb.size();
        bernoulli_successes(pairs, p, rng, [&](std::uint64_t idx) {
          edges.emplace_back(ma[idx / mb.size()], mb[idx % mb.size()]);
        });
      }
    }
  }
  return Graph::from_edges(partition.size(), edges);
}

RewireResult rewire_configuration_model(const Graph& graph, std::uint64_t seed, double swaps_per_edge) {
  if (!(swaps_per_edge >= 0.0)) throw Error("swaps_per_edge must be non-negative");
  RewireResult result;
  auto edges = graph.edges();
  const std::size_t m = edges.size();
  result.swaps_requested = static_cast<std::size_t>(std::ceil(swaps_per_edge * static_cast<double>(m)));
  if (m < 2 || result.swaps_requested == 0) {
    result.graph = graph;
    result.degenerate = m < 2;
    return result;
  }

  std::unordered_set<std::uint64_t> present;
  present.reserve(m * 2);
  for (const auto& [u, v] : edges) present.insert(edge_key(u, v));

  Rng rng(seed);
  const std::size_t max_attempts = 100 * result.swaps_requested + 1000;
  while (result.swaps_performed < result.swaps_requested && result.attempts < max_attempts) {
    ++result.attempts;
    const auto i = static_cast<std::size_t>(rng.uniform_index(m));
    const auto j = static_cast<std::size_t>(rng.uniform_index(m));
    if (i == j) continue;
    const auto [a, b] = edges[i];
    auto [c, d] = edges[j];
    if (rng.bernoulli(0.5)) std::swap(c, d);
    if (a == d || c == b) continue;
    if (present.contains(edge_key(a, d)) || present.contains(edge_key(c, b))) continue;
    present.erase(edge_key(a, b));
    present.erase(edge_key(c, d));
    present.insert(edge_key(a, d));
    present.insert(edge_key(c, b));
    edges[i] = {a, d};
    edges[j] = {c, b};
    ++result.swaps_performed;
  }

  if (result.swaps_performed == 0) {
    result.graph = graph;
    result.degenerate = true;
  } else {
    result.graph = Graph::from_edges(graph.num_nodes(), edges);
  }
  return result;
}

Graph generate_erdos_renyi(std::size_t num_nodes, std::size_t num_edges, std::uint64_t seed) {
  const std::uint64_t pairs = static_cast<std::uint64_t>(num_nodes) * (num_nodes == 0 ? 0 : num_nodes - 1) / 2;
  if (num_edges > pairs) {
    throw Error("generate_erdos_renyi: " + std::to_string(num_edges) + " edges exceed the " + std::to_string(pairs) +
                " possible pairs");
  }
  // Floyd's sampling of num_edges distinct pair indices.
  Rng rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(num_edges * 2);
  for (std::uint64_t j = pairs - num_edges; j < pairs; ++j) {
    const std::uint64_t t = rng.uniform_index(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> indices(chosen.begin(), chosen.end());
  std::sort(indices.begin(), indices.end());
  std::vector<Edge> edges;
  edges.reserve(indices.size());
  for (std::uint64_t k : indices) edges.push_back(decode_triangular(k));
  return Graph::from_edges(num_nodes, edges);
}

SwapResult swap_perturbation(const Graph& graph, const Partition& partition, double fraction, std::uint64_t seed) {
  const std::size_t n = graph.num_nodes();
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("swap fraction must lie in [0, 1]");
  if (partition.size() != n) throw Error("swap_perturbation: partition size does not match the graph");

  SwapResult result;
  result.position_of.resize(n);
  std::iota(result.position_of.begin(), result.position_of.end(), NodeId{0});

  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (count == 0) {
    result.graph = graph;
    return result;
  }
  if (count < 2) throw DegenerateInputError("swap fraction selects fewer than two nodes");
  if (partition.num_communities < 2) throw DegenerateInputError("every node is in one community; nothing to swap across");

  Rng rng(seed);
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(nodes[i], nodes[j]);
  }

  const auto& comm = partition.assignment;
  auto cross = [&](NodeId a, NodeId b) { return comm[a] != comm[b]; };

  std::vector<Edge> pairs;
  for (std::size_t i = 0; i + 1 < count; i += 2) pairs.emplace_back(nodes[i], nodes[i + 1]);
  result.unpaired = count % 2;

  // Re-draw same-community pairs by exchanging partners with random pairs.
  std::vector<char> is_bad(pairs.size(), 0);
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!cross(pairs[k].first, pairs[k].second)) {
      is_bad[k] = 1;
      bad.push_back(k);
    }
  }
  std::size_t budget = 100 * pairs.size();
  while (!bad.empty() && budget > 0) {
    --budget;
    const std::size_t p = bad.back();
    const auto q = static_cast<std::size_t>(rng.uniform_index(pairs.size()));
    if (q == p) continue;
    const auto [u, v] = pairs[p];
    auto [x, y] = pairs[q];
    if (rng.bernoulli(0.5)) std::swap(x, y);
    if (!cross(u, x) || !cross(v, y)) continue;
    pairs[p] = {u, x};
    pairs[q] = {v, y};
    bad.pop_back();
    is_bad[p] = 0;
    if (is_bad[q]) {
      is_bad[q] = 0;
      bad.erase(std::find(bad.begin(), bad.end(), q));
    }
  }

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (is_bad[k]) {
      result.unpaired += 2;
      continue;
    }
    const auto [u, v] = pairs[k];
    result.position_of[u] = v;
    result.position_of[v] = u;
    result.pairs.push_back(pairs[k]);
  }

  // position_of is an involution, so it also maps old positions to new occupants.
  std::vector<Edge> edges = graph.edges();
  for (auto& [a, b] : edges) {
    a = result.position_of[a];
    b = result.position_of[b];
  }
  result.graph = Graph::from_edges(n, edges);
  return result;
}

Partition transport_partition(const Partition& partition, const SwapResult& swap) {
  std::vector<CommunityId> raw(partition.size());
  for (std::size_t u = 0; u < raw.size(); ++u) raw[u] = partition.assignment[swap.position_of[u]];
  return Partition::compacted(std::move(raw));
}

}  // namespace commgnn
