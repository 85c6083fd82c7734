#pragma once

#include "commgnn/community.hpp"
#include "commgnn/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace commgnn {

enum class VariantKind { Original, Sbm, Cm, Random };

std::string_view to_string(VariantKind kind);
std::optional<VariantKind> parse_variant(std::string_view name);

/// Which graph a run used. Original carries no seed semantics.
struct AblationVariant {
  VariantKind kind = VariantKind::Original;
  std::uint64_t seed = 0;
};

/// Canonical SBM: every node pair (u, v), u < v, is an independent Bernoulli
/// draw with probability densities(C(u), C(v)). Node identities are kept.
Graph generate_sbm(const BlockMatrix& blocks, const Partition& partition, std::uint64_t seed);

struct RewireResult {
  Graph graph;
  std::size_t swaps_performed = 0;
  std::size_t swaps_requested = 0;
  std::size_t attempts = 0;
  /// Set when not a single swap could be performed (the input is returned).
  bool degenerate = false;
};

/// Degree-preserving double-edge-swap rewiring: repeats until
/// ceil(swaps_per_edge * m) swaps (a,b),(c,d) -> (a,d),(c,b) were accepted, rejecting
/// swaps that would create a self-loop or a duplicate edge.
RewireResult rewire_configuration_model(const Graph& graph, std::uint64_t seed, double swaps_per_edge = 10.0);

/// G(n, M): exactly `num_edges` distinct edges drawn uniformly without replacement.
Graph generate_erdos_renyi(std::size_t num_nodes, std::size_t num_edges, std::uint64_t seed);

struct SwapResult {
  Graph graph;
  /// Swapped pairs; each spans two communities.
  std::vector<Edge> pairs;
  /// Selected nodes left in place because no cross-community partner was found.
  std::size_t unpaired = 0;
  /// Node u now occupies the position that position_of[u] held before.
  std::vector<NodeId> position_of;
};

/// Picks floor(fraction * n) nodes, pairs them across communities and exchanges
/// the positions of each pair: u adopts v's adjacency and vice versa, while
/// features and labels stay with the node id.
SwapResult swap_perturbation(const Graph& graph, const Partition& partition, double fraction, std::uint64_t seed);

/// Community assignment carried along with the positions of a swap.
Partition transport_partition(const Partition& partition, const SwapResult& swap);

}  // namespace commgnn
