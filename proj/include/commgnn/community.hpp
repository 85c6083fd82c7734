#pragma once

#include "commgnn/graph.hpp"

#include <cstdint>
#include <vector>

namespace commgnn {

using CommunityId = std::uint32_t;

/// Node to community assignment with compact ids in [0, num_communities).
struct Partition {
  std::vector<CommunityId> assignment;
  std::size_t num_communities = 0;

  std::size_t size() const noexcept { return assignment.size(); }
  std::vector<std::size_t> community_sizes() const;

  /// Renumbers communities in order of their smallest member node.
  static Partition compacted(std::vector<CommunityId> raw);
  static Partition single(std::size_t n);
  static Partition singletons(std::size_t n);

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Within/between community edge densities.
///
/// densities(c, c) = internal edges / (s_c (s_c - 1) / 2), 0 when s_c < 2;
/// densities(a, b) = cross edges / (s_a s_b).
struct BlockMatrix {
  std::vector<std::size_t> sizes;
  Matrix densities;

  std::size_t num_blocks() const noexcept { return sizes.size(); }
};

/// Newman-Girvan modularity, Q = sum_c [ e_c / m - resolution * (d_c / 2m)^2 ].
double modularity(const Graph& graph, const Partition& partition, double resolution = 1.0);

struct LouvainResult {
  Partition partition;
  /// Modularity of the partition after each aggregation level (on the input graph).
  std::vector<double> level_modularity;
  std::size_t levels = 0;
};

/// Two-phase Louvain (local moves, then aggregation). The seed drives the
/// node visit order of every local-move pass.
LouvainResult louvain_detailed(const Graph& graph, std::uint64_t seed, double resolution = 1.0);

inline Partition louvain(const Graph& graph, std::uint64_t seed, double resolution = 1.0) {
  return louvain_detailed(graph, seed, resolution).partition;
}

BlockMatrix block_density_matrix(const Graph& graph, const Partition& partition);

}  // namespace commgnn
