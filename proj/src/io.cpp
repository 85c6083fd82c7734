#include "commgnn/io.hpp"

#include "commgnn/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace commgnn {

NodeId TokenIndex::intern(const std::string& token) {
  auto [it, inserted] = ids_.try_emplace(token, static_cast<NodeId>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

bool TokenIndex::find(const std::string& token, NodeId& id) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return false;
  id = it->second;
  return true;
}

namespace {

bool is_skipped(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& tok, const std::string& source, std::size_t line) {
  double value = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(source, line, "not a real number: '" + tok + "'");
  return value;
}

bool parse_integer(const std::string& tok, long long& value) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  return ec == std::errc() && ptr == end;
}

NodeId known_node(const TokenIndex& nodes, const std::string& token, const std::string& source,
                  std::size_t line) {
  NodeId id = 0;
  if (!nodes.find(token, id)) {
    throw ParseError(source, line, "node '" + token + "' does not appear in the labels file");
  }
  return id;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::string token_of(const std::vector<std::string>& tokens, std::size_t i) {
  return tokens.empty() ? std::to_string(i) : tokens[i];
}

}  // namespace

LabelVector read_labels(std::istream& in, TokenIndex& nodes, const std::string& source) {
  if (nodes.size() != 0) throw Error("read_labels: the labels file must define the node index");
  std::vector<std::string> raw_labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (is_skipped(line)) continue;
    auto fields = split_on(line, '\t');
    if (fields.size() != 2) throw ParseError(source, lineno, "expected 'node<TAB>label'");
    const std::string node = trim(fields[0]);
    const std::string label = trim(fields[1]);
    if (node.empty() || label.empty()) throw ParseError(source, lineno, "empty node or label token");
    const std::size_t before = nodes.size();
    nodes.intern(node);
    if (nodes.size() == before) throw ParseError(source, lineno, "node '" + node + "' labeled twice");
    raw_labels.push_back(label);
  }

  std::vector<std::string> names(raw_labels);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) {
    long long v = 0;
    return parse_integer(s, v);
  });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      long long x = 0, y = 0;
      parse_integer(a, x);
      parse_integer(b, y);
      return x < y;
    });
  }
  std::map<std::string, LabelId> class_of;
  for (std::size_t i = 0; i < names.size(); ++i) class_of[names[i]] = static_cast<LabelId>(i);

  LabelVector labels;
  labels.num_classes = names.size();
  labels.class_names = names;
  labels.ids.reserve(raw_labels.size());
  for (const auto& l : raw_labels) labels.ids.push_back(class_of.at(l));
  return labels;
}

Graph read_edge_list(std::istream& in, const TokenIndex& nodes, const std::string& source) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (is_skipped(line)) continue;
    const auto toks = split_whitespace(line);
    if (toks.size() != 2) throw ParseError(source, lineno, "expected two node tokens");
    edges.emplace_back(known_node(nodes, toks[0], source, lineno), known_node(nodes, toks[1], source, lineno));
  }
  return Graph::from_edges(nodes.size(), edges);
}

FeatureMatrix read_features(std::istream& in, const TokenIndex& nodes, const std::string& source) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (!is_skipped(line)) lines.emplace_back(lineno, line);
  }
  const std::size_t n = nodes.size();
  if (lines.empty()) throw ParseError(source, 0, "no feature rows");

  if (lines.front().second.find(',') != std::string::npos) {
    std::size_t dim = 0;
    std::vector<std::vector<double>> rows(n);
    std::vector<bool> seen(n, false);
    for (const auto& [no, text] : lines) {
      const auto fields = split_on(text, ',');
      if (fields.size() < 2) throw ParseError(source, no, "expected 'node,value,...'");
      if (dim == 0) dim = fields.size() - 1;
      if (fields.size() - 1 != dim) {
        throw ParseError(source, no,
                         "expected " + std::to_string(dim) + " values, found " + std::to_string(fields.size() - 1));
      }
      const NodeId u = known_node(nodes, trim(fields[0]), source, no);
      if (seen[u]) throw ParseError(source, no, "duplicate feature row for node '" + trim(fields[0]) + "'");
      seen[u] = true;
      auto& row = rows[u];
      row.reserve(dim);
      for (std::size_t j = 1; j < fields.size(); ++j) row.push_back(parse_real(trim(fields[j]), source, no));
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (!seen[u]) throw DegenerateInputError(source + ": no feature row for node '" + nodes.tokens()[u] + "'");
    }
    FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t j = 0; j < dim; ++j) x(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(j)) = rows[u][j];
    }
    return x;
  }

  struct Entry {
    NodeId node;
    std::size_t col;
    double value;
  };
  std::vector<Entry> entries;
  std::size_t dim = 0;
  for (const auto& [no, text] : lines) {
    const auto toks = split_whitespace(text);
    if (toks.size() != 3) throw ParseError(source, no, "expected 'node col value'");
    long long col = 0;
    if (!parse_integer(toks[1], col) || col < 0) throw ParseError(source, no, "bad column index '" + toks[1] + "'");
    entries.push_back({known_node(nodes, toks[0], source, no), static_cast<std::size_t>(col),
                       parse_real(toks[2], source, no)});
    dim = std::max(dim, static_cast<std::size_t>(col) + 1);
  }
  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (const auto& e : entries) x(e.node, static_cast<Eigen::Index>(e.col)) = e.value;
  return x;
}

Dataset read_dataset(std::istream& edges, std::istream& features, std::istream& labels) {
  TokenIndex nodes;
  Dataset ds;
  ds.labels = read_labels(labels, nodes);
  ds.graph = read_edge_list(edges, nodes);
  ds.features = read_features(features, nodes);
  ds.node_tokens = nodes.tokens();
  ds.validate();
  return ds;
}

Dataset load_dataset(const std::filesystem::path& edge_path, const std::filesystem::path& feature_path,
                     const std::filesystem::path& label_path) {
  auto labels_in = open_or_throw(label_path);
  auto edges_in = open_or_throw(edge_path);
  auto features_in = open_or_throw(feature_path);
  TokenIndex nodes;
  Dataset ds;
  ds.labels = read_labels(labels_in, nodes, label_path.string());
  ds.graph = read_edge_list(edges_in, nodes, edge_path.string());
  ds.features = read_features(features_in, nodes, feature_path.string());
  ds.node_tokens = nodes.tokens();
  ds.validate();
  return ds;
}

void write_edge_list(std::ostream& out, const Graph& graph, const std::vector<std::string>& tokens) {
  for (const auto& [u, v] : graph.edges()) out << token_of(tokens, u) << ' ' << token_of(tokens, v) << '\n';
}

void write_labels(std::ostream& out, const LabelVector& labels, const std::vector<std::string>& tokens) {
  for (std::size_t u = 0; u < labels.size(); ++u) {
    const LabelId l = labels.ids[u];
    out << token_of(tokens, u) << '\t' << (labels.class_names.empty() ? std::to_string(l) : labels.class_names[l])
        << '\n';
  }
}

void write_features_csv(std::ostream& out, const FeatureMatrix& features, const std::vector<std::string>& tokens) {
  char buf[32];
  for (Eigen::Index u = 0; u < features.rows(); ++u) {
    out << token_of(tokens, static_cast<std::size_t>(u));
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, features(u, j));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream edges(dir / "edges.txt"), features(dir / "features.csv"), labels(dir / "labels.tsv");
  if (!edges || !features || !labels) throw Error("cannot write dataset files into " + dir.string());
  write_edge_list(edges, dataset.graph, dataset.node_tokens);
  write_features_csv(features, dataset.features, dataset.node_tokens);
  write_labels(labels, dataset.labels, dataset.node_tokens);
}

void write_partition(std::ostream& out, const Partition& partition, const std::vector<std::string>& tokens) {
  for (std::size_t u = 0; u < partition.size(); ++u) out << token_of(tokens, u) << '\t' << partition.assignment[u] << '\n';
}

Partition read_partition(std::istream& in, const TokenIndex& nodes, const std::string& source) {
  constexpr CommunityId kUnset = ~CommunityId{0};
  std::vector<CommunityId> raw(nodes.size(), kUnset);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (is_skipped(line)) continue;
    const auto fields = split_on(line, '\t');
    long long cid = 0;
    if (fields.size() != 2 || !parse_integer(trim(fields[1]), cid) || cid < 0) {
      throw ParseError(source, lineno, "expected 'node<TAB>community_id'");
    }
    raw[known_node(nodes, trim(fields[0]), source, lineno)] = static_cast<CommunityId>(cid);
  }
  for (std::size_t u = 0; u < raw.size(); ++u) {
    if (raw[u] == kUnset) throw DegenerateInputError(source + ": node '" + nodes.tokens()[u] + "' has no community");
  }
  return Partition::compacted(std::move(raw));
}

}  // namespace commgnn
