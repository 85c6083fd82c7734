#pragma once

#include "commgnn/community.hpp"
#include "commgnn/graph.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace commgnn {

/// Dense ids for node tokens, assigned in first-appearance order.
class TokenIndex {
 public:
  /// Returns the id of `token`, inserting it if new.
  NodeId intern(const std::string& token);
  /// Looks up an existing token; false when absent.
  bool find(const std::string& token, NodeId& id) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::string> tokens_;
};

/// Labels file: one "node<TAB>label" line per node. The file defines the node
/// set and its order. Class ids follow the sorted label tokens (numerically
/// when every token is an integer).
LabelVector read_labels(std::istream& in, TokenIndex& nodes, const std::string& source = "labels");

/// Edge list: two whitespace-separated node tokens per line. Every token must
/// already be known to `nodes`.
Graph read_edge_list(std::istream& in, const TokenIndex& nodes, const std::string& source = "edges");

/// Features as CSV ("node,v1,...,vd") or triplets ("node col value", unlisted
/// entries zero). The format is picked from the first data line.
FeatureMatrix read_features(std::istream& in, const TokenIndex& nodes, const std::string& source = "features");

Dataset read_dataset(std::istream& edges, std::istream& features, std::istream& labels);
Dataset load_dataset(const std::filesystem::path& edge_path, const std::filesystem::path& feature_path,
                     const std::filesystem::path& label_path);

/// Writes "u v" lines, u < v. Uses tokens when given, numeric ids otherwise.
void write_edge_list(std::ostream& out, const Graph& graph, const std::vector<std::string>& tokens = {});
void write_labels(std::ostream& out, const LabelVector& labels, const std::vector<std::string>& tokens = {});
void write_features_csv(std::ostream& out, const FeatureMatrix& features, const std::vector<std::string>& tokens = {});

/// Writes edges.txt, features.csv and labels.tsv into `dir`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// "node<TAB>community_id" lines.
void write_partition(std::ostream& out, const Partition& partition, const std::vector<std::string>& tokens = {});
Partition read_partition(std::istream& in, const TokenIndex& nodes, const std::string& source = "partition");

}  // namespace commgnn
