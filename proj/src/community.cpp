#include "commgnn/community.hpp"

#include "commgnn/error.hpp"
#include "commgnn/random.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace commgnn {

std::vector<std::size_t> Partition::community_sizes() const {
  std::vector<std::size_t> sizes(num_communities, 0);
  for (CommunityId c : assignment) ++sizes[c];
  return sizes;
}

Partition Partition::compacted(std::vector<CommunityId> raw) {
  std::vector<CommunityId> remap;
  constexpr CommunityId kUnset = std::numeric_limits<CommunityId>::max();
  CommunityId next = 0;
  for (auto& c : raw) {
    if (c >= remap.size()) remap.resize(static_cast<std::size_t>(c) + 1, kUnset);
    if (remap[c] == kUnset) remap[c] = next++;
    c = remap[c];
  }
  return Partition{std::move(raw), next};
}

Partition Partition::single(std::size_t n) {
  return Partition{std::vector<CommunityId>(n, 0), n == 0 ? 0u : 1u};
}

Partition Partition::singletons(std::size_t n) {
  std::vector<CommunityId> a(n);
  std::iota(a.begin(), a.end(), CommunityId{0});
  return Partition{std::move(a), n};
}

double modularity(const Graph& graph, const Partition& partition, double resolution) {
  const std::size_t m = graph.num_edges();
  if (m == 0) throw DegenerateInputError("modularity is undefined on an edgeless graph");
  if (partition.size() != graph.num_nodes()) throw Error("partition size does not match the graph");
  std::vector<double> internal(partition.num_communities, 0.0), degree(partition.num_communities, 0.0);
  for (NodeId u = 0; u < graph.num_nodes(); ++u) {
    const CommunityId cu = partition.assignment[u];
    degree[cu] += static_cast<double>(graph.degree(u));
    for (NodeId v : graph.neighbors(u)) {
      if (u < v && partition.assignment[v] == cu) internal[cu] += 1.0;
    }
  }
  const double md = static_cast<double>(m);
  double q = 0.0;
  for (std::size_t c = 0; c < partition.num_communities; ++c) {
    const double frac = degree[c] / (2.0 * md);
    q += internal[c] / md - resolution * frac * frac;
  }
  return q;
}

namespace {

// Weighted graph used by the aggregation levels. Self-loop weight counts each
// collapsed internal edge once; strength = sum of incident weights + 2 * loop.
struct WeightedGraph {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
  std::vector<double> weights;
  std::vector<double> loops;
  std::vector<double> strength;
  double total = 0.0;  // 2m

  std::size_t size() const { return loops.size(); }

  static WeightedGraph from(const Graph& g) {
    WeightedGraph w;
    const auto offs = g.offsets();
    w.offsets.assign(offs.begin(), offs.end());
    const auto adj = g.adjacency();
    w.targets.assign(adj.begin(), adj.end());
    w.weights.assign(adj.size(), 1.0);
    w.loops.assign(g.num_nodes(), 0.0);
    w.finish();
    return w;
  }

  void finish() {
    strength.assign(size(), 0.0);
    total = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      double s = 2.0 * loops[i];
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) s += weights[e];
      strength[i] = s;
      total += s;
    }
  }

  WeightedGraph aggregate(const std::vector<std::uint32_t>& community, std::size_t k) const {
    WeightedGraph out;
    out.loops.assign(k, 0.0);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(k);
    for (std::size_t i = 0; i < size(); ++i) {
      const auto ci = community[i];
      out.loops[ci] += loops[i];
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
        const auto j = targets[e];
        const auto cj = community[j];
        if (ci == cj) {
          if (i < j) out.loops[ci] += weights[e];
        } else {
          rows[ci].emplace_back(cj, weights[e]);
        }
      }
    }
    out.offsets.assign(k + 1, 0);
    for (std::size_t c = 0; c < k; ++c) {
      auto& row = rows[c];
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      const std::size_t start = out.targets.size();
      for (const auto& [t, w] : row) {
        if (out.targets.size() > start && out.targets.back() == t) {
          out.weights.back() += w;
        } else {
          out.targets.push_back(t);
          out.weights.push_back(w);
        }
      }
      out.offsets[c + 1] = out.targets.size();
    }
    out.finish();
    return out;
  }
};

// Local-move phase. Returns true when at least one node changed community.
bool move_nodes(const WeightedGraph& g, std::vector<std::uint32_t>& community, double resolution, Rng& rng) {
  constexpr double kMinGain = 1e-9;
  constexpr double kTieTolerance = 1e-15;
  const std::size_t n = g.size();
  const double m = g.total / 2.0;

  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[community[i]] += g.strength[i];

  std::vector<double> link(n, 0.0);
  std::vector<char> is_touched(n, 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);

  bool any_moved = false;
  bool moved = true;
  while (moved) {
    moved = false;
    rng.shuffle(order);
    for (const std::uint32_t i : order) {
      const std::uint32_t old_c = community[i];
      const double ki = g.strength[i];
      tot[old_c] -= ki;

      touched.clear();
      touched.push_back(old_c);
      is_touched[old_c] = 1;
      for (std::size_t e = g.offsets[i]; e < g.offsets[i + 1]; ++e) {
        const auto c = community[g.targets[e]];
        if (!is_touched[c]) {
          is_touched[c] = 1;
          touched.push_back(c);
        }
        link[c] += g.weights[e];
      }

      // Modularity change of inserting i into c, relative to leaving it isolated.
      auto delta_q = [&](std::uint32_t c) { return (link[c] - resolution * tot[c] * ki / (2.0 * m)) / m; };
      const double stay = delta_q(old_c);
      std::uint32_t best_c = old_c;
      double best = stay;
      for (const std::uint32_t c : touched) {
        const double dq = delta_q(c);
        if (dq > best + kTieTolerance || (dq >= best - kTieTolerance && c < best_c)) {
          best = dq;
          best_c = c;
        }
      }
      if (best_c != old_c && best - stay <= kMinGain) best_c = old_c;

      for (const std::uint32_t c : touched) {
        link[c] = 0.0;
        is_touched[c] = 0;
      }
      tot[best_c] += ki;
      if (best_c != old_c) {
        community[i] = best_c;
        moved = true;
        any_moved = true;
      }
    }
  }
  return any_moved;
}

std::size_t renumber(std::vector<std::uint32_t>& community) {
  std::vector<std::uint32_t> remap(community.size(), std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (auto& c : community) {
    if (remap[c] == std::numeric_limits<std::uint32_t>::max()) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

}  // namespace

LouvainResult louvain_detailed(const Graph& graph, std::uint64_t seed, double resolution) {
  if (graph.num_edges() == 0) throw DegenerateInputError("louvain needs at least one edge");
  Rng rng(seed);
  const std::size_t n = graph.num_nodes();

  LouvainResult result;
  std::vector<CommunityId> node_community(n);
  std::iota(node_community.begin(), node_community.end(), CommunityId{0});

  WeightedGraph level = WeightedGraph::from(graph);
  while (true) {
    std::vector<std::uint32_t> community(level.size());
    std::iota(community.begin(), community.end(), 0u);
    move_nodes(level, community, resolution, rng);
    const std::size_t k = renumber(community);
    for (auto& c : node_community) c = community[c];
    ++result.levels;
    result.level_modularity.push_back(modularity(graph, Partition::compacted(node_community), resolution));
    if (k == level.size()) break;
    level = level.aggregate(community, k);
  }
  result.partition = Partition::compacted(std::move(node_community));
  return result;
}

BlockMatrix block_density_matrix(const Graph& graph, const Partition& partition) {
  if (partition.size() != graph.num_nodes()) throw Error("partition size does not match the graph");
  const std::size_t k = partition.num_communities;
  BlockMatrix blocks;
  blocks.sizes = partition.community_sizes();
  Matrix counts = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (const auto& [u, v] : graph.edges()) {
    const auto a = partition.assignment[u];
    const auto b = partition.assignment[v];
    counts(a, b) += 1.0;
    if (a != b) counts(b, a) += 1.0;
  }
  blocks.densities = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a) {
    const double sa = static_cast<double>(blocks.sizes[a]);
    for (std::size_t b = 0; b < k; ++b) {
      const double sb = static_cast<double>(blocks.sizes[b]);
      const double pairs = a == b ? sa * (sa - 1.0) / 2.0 : sa * sb;
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      blocks.densities(ia, ib) = pairs > 0.0 ? counts(ia, ib) / pairs : 0.0;
    }
  }
  return blocks;
}

}  // namespace commgnn
