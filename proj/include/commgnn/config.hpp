#pragma once

#include "commgnn/ablation.hpp"
#include "commgnn/models.hpp"
#include "commgnn/synthetic.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace commgnn {

struct DatasetPaths {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
};

struct Thresholds {
  double low = 0.3;
  double high = 0.7;
};

struct StudyConfig {
  /// Exactly one of the two is set.
  std::optional<DatasetPaths> dataset;
  std::optional<SyntheticSpec> synthetic;

  std::size_t train_per_class = 20;
  std::size_t val_per_class = 30;
  std::size_t n_splits = 10;
  std::size_t n_inits = 3;
  std::size_t n_graph_seeds = 5;
  /// Splits and inits per ablated graph; default to n_splits / n_inits.
  std::optional<std::size_t> ablation_splits;
  std::optional<std::size_t> ablation_inits;

  std::vector<ModelKind> models{ModelKind::LogReg, ModelKind::Gcn, ModelKind::Sgc};
  std::vector<VariantKind> variants{VariantKind::Original, VariantKind::Sbm, VariantKind::Cm, VariantKind::Random};

  TrainConfig train;
  std::size_t hidden_dim = 16;
  unsigned sgc_k = 2;

  std::vector<double> fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  Thresholds thresholds;
  double slope_epsilon = 0.02;
  double alpha = 0.01;

  std::uint64_t seed = 0;
  /// 0 keeps every component.
  std::size_t keep_top_k_components = 1;
  /// Drop classes too small for the split quotas before anything else.
  bool drop_rare_labels = true;
  double swaps_per_edge = 10.0;
  std::size_t jobs = 1;

  /// The JSON document this config was parsed from, echoed into reports.
  nlohmann::json source = nlohmann::json::object();

  std::size_t splits_for(VariantKind v) const {
    return v == VariantKind::Original ? n_splits : ablation_splits.value_or(n_splits);
  }
  std::size_t inits_for(VariantKind v) const {
    return v == VariantKind::Original ? n_inits : ablation_inits.value_or(n_inits);
  }
  std::size_t graphs_for(VariantKind v) const { return v == VariantKind::Original ? 1 : n_graph_seeds; }

  /// Throws Error on a violated invariant.
  void validate() const;
};

/// Parses a config document; unknown keys anywhere are an error. Relative
/// dataset paths resolve against `base_dir`.
StudyConfig parse_study_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
StudyConfig load_study_config(const std::filesystem::path& path);

}  // namespace commgnn
