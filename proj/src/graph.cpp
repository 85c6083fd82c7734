#include "commgnn/graph.hpp"

#include "commgnn/error.hpp"

#include <algorithm>
#include <numeric>

namespace commgnn {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw Error("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                  ") references a node outside [0, " + std::to_string(n) + ")");
    }
    if (u == v) continue;
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.offsets_.assign(n + 1, 0);
  g.neighbors_.reserve(directed.size());
  for (const auto& [u, v] : directed) {
    ++g.offsets_[u + 1];
    g.neighbors_.push_back(v);
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<std::size_t> LabelVector::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (LabelId l : ids) ++counts[l];
  return counts;
}

void Dataset::validate() const {
  const std::size_t n = graph.num_nodes();
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw DegenerateInputError("feature rows (" + std::to_string(features.rows()) +
                               ") != node count (" + std::to_string(n) + ")");
  }
  if (labels.size() != n) {
    throw DegenerateInputError("label count (" + std::to_string(labels.size()) +
                               ") != node count (" + std::to_string(n) + ")");
  }
  if (!node_tokens.empty() && node_tokens.size() != n) {
    throw DegenerateInputError("node token count != node count");
  }
  for (LabelId l : labels.ids) {
    if (l >= labels.num_classes) throw DegenerateInputError("label id out of range");
  }
  if (!features.allFinite()) throw DegenerateInputError("feature matrix has non-finite entries");
}

Dataset induced_subdataset(const Dataset& dataset, std::span<const NodeId> keep) {
  const std::size_t n = dataset.num_nodes();
  std::vector<NodeId> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  constexpr NodeId kAbsent = ~NodeId{0};
  std::vector<NodeId> remap(n, kAbsent);
  for (std::size_t i = 0; i < kept.size(); ++i) remap[kept[i]] = static_cast<NodeId>(i);

  std::vector<Edge> edges;
  for (const auto& [u, v] : dataset.graph.edges()) {
    if (remap[u] != kAbsent && remap[v] != kAbsent) edges.emplace_back(remap[u], remap[v]);
  }

  Dataset out;
  out.graph = Graph::from_edges(kept.size(), edges);
  out.features.resize(static_cast<Eigen::Index>(kept.size()), dataset.features.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = dataset.features.row(kept[i]);
  }

  // Re-compact label ids in ascending order of the old id.
  std::vector<bool> present(dataset.labels.num_classes, false);
  for (NodeId u : kept) present[dataset.labels.ids[u]] = true;
  std::vector<LabelId> label_remap(dataset.labels.num_classes, 0);
  LabelId next = 0;
  for (std::size_t l = 0; l < present.size(); ++l) {
    if (!present[l]) continue;
    label_remap[l] = next++;
    if (!dataset.labels.class_names.empty()) out.labels.class_names.push_back(dataset.labels.class_names[l]);
  }
  out.labels.num_classes = next;
  out.labels.ids.reserve(kept.size());
  for (NodeId u : kept) out.labels.ids.push_back(label_remap[dataset.labels.ids[u]]);

  if (!dataset.node_tokens.empty()) {
    out.node_tokens.reserve(kept.size());
    for (NodeId u : kept) out.node_tokens.push_back(dataset.node_tokens[u]);
  }
  return out;
}

std::vector<std::vector<NodeId>> connected_components(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<NodeId>> components;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    auto& comp = components.emplace_back();
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (NodeId v : graph.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
  }
  return components;
}

Dataset keep_top_k_components(const Dataset& dataset, std::size_t k) {
  if (dataset.num_nodes() == 0) throw DegenerateInputError("empty graph has no components");
  if (k == 0) throw Error("keep_top_k_components: k must be positive");
  auto components = connected_components(dataset.graph);
  // Components arrive ordered by smallest member, so a stable sort by size
  // implements the tie rule.
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<NodeId> keep;
  for (std::size_t i = 0; i < std::min(k, components.size()); ++i) {
    keep.insert(keep.end(), components[i].begin(), components[i].end());
  }
  return induced_subdataset(dataset, keep);
}

Dataset largest_connected_component(const Dataset& dataset) { return keep_top_k_components(dataset, 1); }

Dataset remove_rare_labels(const Dataset& dataset, std::size_t min_count) {
  if (min_count == 0) throw Error("remove_rare_labels: min_count must be positive");
  const auto counts = dataset.labels.class_counts();
  std::vector<NodeId> keep;
  for (NodeId u = 0; u < dataset.num_nodes(); ++u) {
    if (counts[dataset.labels.ids[u]] >= min_count) keep.push_back(u);
  }
  if (keep.empty()) {
    throw DegenerateInputError("every class has fewer than " + std::to_string(min_count) + " members");
  }
  return induced_subdataset(dataset, keep);
}

double edge_density(std::size_t num_nodes, std::size_t num_edges) {
  if (num_nodes < 2) throw DegenerateInputError("edge density needs at least 2 nodes");
  const double n = static_cast<double>(num_nodes);
  return static_cast<double>(num_edges) / (n * (n - 1.0) / 2.0);
}

double edge_density(const Graph& graph) { return edge_density(graph.num_nodes(), graph.num_edges()); }

std::vector<std::size_t> degree_sequence(const Graph& graph) {
  std::vector<std::size_t> out(graph.num_nodes());
  for (NodeId u = 0; u < graph.num_nodes(); ++u) out[u] = graph.degree(u);
  return out;
}

}  // namespace commgnn
