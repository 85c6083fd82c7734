#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace commgnn {

using NodeId = std::uint32_t;
using LabelId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Dense row-major real matrix; row i of a feature matrix is node i.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FeatureMatrix = Matrix;

/// Undirected simple graph in compressed sparse row form.
///
/// Every edge {u, v} is stored twice (v in N(u), u in N(v)); neighbor lists
/// are sorted and free of duplicates and self-loops. Immutable once built.
class Graph {
 public:
  Graph() : offsets_{0} {}

  /// Builds from an arbitrary list of ordered pairs over nodes [0, n):
  /// direction is ignored, duplicates and self-loops are dropped.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t num_nodes() const noexcept { return offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const noexcept;

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> adjacency() const noexcept { return neighbors_; }

  /// Each undirected edge once, as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
};

/// Symmetric simple graph from a directed edge list.
inline Graph to_undirected(std::size_t n, std::span<const Edge> edges) {
  return Graph::from_edges(n, edges);
}

struct LabelVector {
  std::vector<LabelId> ids;
  std::size_t num_classes = 0;
  /// Original label token per class id; may be empty for synthetic data.
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return ids.size(); }
  std::vector<std::size_t> class_counts() const;
};

/// Graph, features and labels over the same node set.
struct Dataset {
  Graph graph;
  FeatureMatrix features;
  LabelVector labels;
  /// Input token of each node, used when writing node-keyed files.
  std::vector<std::string> node_tokens;

  std::size_t num_nodes() const noexcept { return graph.num_nodes(); }
  /// Throws DegenerateInputError when the parts disagree in size or a label id is out of range.
  void validate() const;
};

/// Induced sub-dataset on the nodes in `keep` (any order; output keeps ascending
/// original id order). Label ids are re-compacted so every class is present.
Dataset induced_subdataset(const Dataset& dataset, std::span<const NodeId> keep);

/// Connected components, numbered in order of their smallest node id.
std::vector<std::vector<NodeId>> connected_components(const Graph& graph);

/// Largest component; ties go to the component with the smallest node id.
Dataset largest_connected_component(const Dataset& dataset);

/// Union of the k largest components (same tie rule), merged into one graph.
Dataset keep_top_k_components(const Dataset& dataset, std::size_t k);

/// Drops nodes whose class has fewer than min_count members.
Dataset remove_rare_labels(const Dataset& dataset, std::size_t min_count);

double edge_density(std::size_t num_nodes, std::size_t num_edges);
double edge_density(const Graph& graph);

std::vector<std::size_t> degree_sequence(const Graph& graph);

}  // namespace commgnn
