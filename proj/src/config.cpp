#include "commgnn/config.hpp"

#include "commgnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace commgnn {
namespace {

using nlohmann::json;

// Wraps an object and remembers which keys were read so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw Error(where_ + ": expected a JSON object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (const json* v = get(key)) out = convert<T>(*v, where_ + "." + key);
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    if (const json* v = get(key)) out = convert<T>(*v, where_ + "." + key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw Error(where_ + ": unknown key '" + it.key() + "'");
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw Error(where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw Error(where + ": expected a non-negative integer");
      }
      return static_cast<T>(v.get<std::uint64_t>());
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw Error(where + ": expected a number");
      return v.get<double>();
    } else {
      if (!v.is_string()) throw Error(where + ": expected a string");
      return v.get<std::string>();
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

void StudyConfig::validate() const {
  if (dataset.has_value() == synthetic.has_value()) throw Error("config: exactly one of 'dataset' or 'synthetic' is required");
  if (n_splits < 1 || n_inits < 1 || n_graph_seeds < 1) throw Error("config: n_splits, n_inits and n_graph_seeds must be >= 1");
  if (ablation_splits && *ablation_splits < 1) throw Error("config: ablation_splits must be >= 1");
  if (ablation_inits && *ablation_inits < 1) throw Error("config: ablation_inits must be >= 1");
  if (train_per_class < 1 || val_per_class < 1) throw Error("config: per-class quotas must be >= 1");
  if (!(thresholds.low >= 0.0 && thresholds.low < thresholds.high && thresholds.high <= 1.0)) {
    throw Error("config: thresholds need 0 <= low < high <= 1");
  }
  if (!(slope_epsilon >= 0.0) || !std::isfinite(slope_epsilon)) throw Error("config: slope_epsilon must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("config: alpha must be in (0, 1)");
  if (hidden_dim < 1) throw Error("config: hidden_dim must be >= 1");
  if (!(swaps_per_edge > 0.0) || !std::isfinite(swaps_per_edge)) throw Error("config: swaps_per_edge must be > 0");
  if (jobs < 1) throw Error("config: jobs must be >= 1");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] >= 0.0 && fractions[i] <= 1.0)) throw Error("config: fractions must lie in [0, 1]");
    if (i > 0 && fractions[i] < fractions[i - 1]) throw Error("config: fractions must be sorted ascending");
  }
  auto unique = [](auto v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (!unique(models)) throw Error("config: duplicate model");
  if (!unique(variants)) throw Error("config: duplicate variant");
  train.validate();
}

StudyConfig parse_study_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  StudyConfig cfg;
  cfg.source = doc;
  ObjectReader top(doc, "config");

  if (const json* d = top.get("dataset")) {
    ObjectReader r(*d, "config.dataset");
    std::string edges, features, labels;
    r.read("edges", edges);
    r.read("features", features);
    r.read("labels", labels);
    r.finish();
    if (edges.empty() || features.empty() || labels.empty()) {
      throw Error("config.dataset: 'edges', 'features' and 'labels' are required");
    }
    cfg.dataset = DatasetPaths{resolve(base_dir, edges), resolve(base_dir, features), resolve(base_dir, labels)};
  }
  if (const json* s = top.get("synthetic")) {
    ObjectReader r(*s, "config.synthetic");
    SyntheticSpec spec;
    r.read("num_blocks", spec.num_blocks);
    r.read("block_size", spec.block_size);
    r.read("p_in", spec.p_in);
    r.read("p_out", spec.p_out);
    r.read("feature_dim", spec.feature_dim);
    r.read("feature_signal", spec.feature_signal);
    r.read("labels_follow_blocks", spec.labels_follow_blocks);
    r.read("seed", spec.seed);
    r.finish();
    cfg.synthetic = spec;
  }

  top.read("train_per_class", cfg.train_per_class);
  top.read("val_per_class", cfg.val_per_class);
  top.read("n_splits", cfg.n_splits);
  top.read("n_inits", cfg.n_inits);
  top.read("n_graph_seeds", cfg.n_graph_seeds);
  top.read("ablation_splits", cfg.ablation_splits);
  top.read("ablation_inits", cfg.ablation_inits);

  if (const json* m = top.get("models")) {
    if (!m->is_array()) throw Error("config.models: expected an array");
    cfg.models.clear();
    for (const auto& e : *m) {
      auto name = ObjectReader::convert<std::string>(e, "config.models");
      auto kind = parse_model(name);
      if (!kind) throw Error("config.models: unknown model '" + name + "'");
      cfg.models.push_back(*kind);
    }
  }
  if (const json* v = top.get("variants")) {
    if (!v->is_array()) throw Error("config.variants: expected an array");
    cfg.variants.clear();
    for (const auto& e : *v) {
      auto name = ObjectReader::convert<std::string>(e, "config.variants");
      auto kind = parse_variant(name);
      if (!kind) throw Error("config.variants: unknown variant '" + name + "'");
      cfg.variants.push_back(*kind);
    }
  }
  if (const json* t = top.get("train")) {
    ObjectReader r(*t, "config.train");
    r.read("learning_rate", cfg.train.learning_rate);
    r.read("max_epochs", cfg.train.max_epochs);
    r.read("weight_decay", cfg.train.weight_decay);
    r.read("patience", cfg.train.patience);
    r.read("hidden_dim", cfg.hidden_dim);
    r.read("sgc_k", cfg.sgc_k);
    r.finish();
  }
  if (const json* f = top.get("fractions")) {
    if (!f->is_array()) throw Error("config.fractions: expected an array");
    cfg.fractions.clear();
    for (const auto& e : *f) cfg.fractions.push_back(ObjectReader::convert<double>(e, "config.fractions"));
  }
  if (const json* t = top.get("thresholds")) {
    ObjectReader r(*t, "config.thresholds");
    r.read("low", cfg.thresholds.low);
    r.read("high", cfg.thresholds.high);
    r.finish();
  }
  top.read("slope_epsilon", cfg.slope_epsilon);
  top.read("alpha", cfg.alpha);
  top.read("seed", cfg.seed);
  top.read("keep_top_k_components", cfg.keep_top_k_components);
  top.read("drop_rare_labels", cfg.drop_rare_labels);
  top.read("swaps_per_edge", cfg.swaps_per_edge);
  top.read("jobs", cfg.jobs);
  top.finish();

  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return parse_study_config(doc, path.parent_path());
}

}  // namespace commgnn
