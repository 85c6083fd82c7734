#pragma once

#include "commgnn/community.hpp"
#include "commgnn/config.hpp"
#include "commgnn/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace commgnn {

/// Per split: `train_per_class` and `val_per_class` nodes drawn without
/// replacement from every class, the rest is test. Index lists are sorted.
std::vector<SplitSet> make_splits(const LabelVector& labels, std::size_t train_per_class, std::size_t val_per_class,
                                  std::size_t n_splits, std::uint64_t seed);

/// Loads or generates the configured dataset and applies preprocessing:
/// rare-label removal, then component filtering.
Dataset prepare_dataset(const StudyConfig& config);

struct DatasetSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double density = 0.0;
  std::size_t classes = 0;
  std::size_t features = 0;
  std::size_t components = 0;
};

DatasetSummary summarize(const Dataset& dataset);

struct Analysis {
  DatasetSummary summary;
  Partition partition;
  double modularity = 0.0;
  /// U(L|C) of the original graph's communities on each split's train+val nodes.
  std::vector<double> u_values;
  double u_mean = 0.0;
  double u_std = 0.0;
};

Analysis analyze(const Dataset& dataset, const StudyConfig& config);

struct RunRecord {
  ModelKind model;
  VariantKind variant;
  std::size_t graph_seed;
  std::size_t split;
  std::size_t init;
  double accuracy;
};

struct VariantUncertainty {
  VariantKind variant;
  double mean = 0.0;
  double std = 0.0;
  /// One value per (graph seed, split), graph-major.
  std::vector<double> values;
  double mean_communities = 0.0;
};

struct BaselineComparison {
  ModelKind model;
  VariantKind variant;
  UTestResult test;
  double adjusted_p = 1.0;
  double model_median = 0.0;
  double baseline_median = 0.0;
  /// adjusted_p < alpha and the model median is above the baseline's.
  bool model_significantly_better = false;
};

struct SweepRow {
  double fraction = 0.0;
  double u_mean = 0.0;
  double u_std = 0.0;
  /// U(L|C) of the planted blocks carried along by the swap, for reference.
  double planted_u_mean = 0.0;
  double planted_u_std = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  std::size_t u_samples = 0;
  std::size_t accuracy_samples = 0;
};

enum class Decision { GnnApplicable, FeatureOnly, Inconclusive, GnnApplicableAfterSweep, FeatureOnlyAfterSweep };

std::string_view to_string(Decision decision);
std::optional<Decision> parse_decision(std::string_view name);

struct Verdict {
  Decision decision = Decision::Inconclusive;
  double u_original = 0.0;
  std::optional<double> sweep_slope;
  std::string justification;
};

Verdict guideline_verdict(double u_original, const std::optional<std::vector<SweepRow>>& sweep,
                          const Thresholds& thresholds, double slope_epsilon = 0.02);

struct StudyReport {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  /// The config document exactly as given.
  nlohmann::json config = nlohmann::json::object();
  /// Every setting after defaults and overrides.
  nlohmann::json resolved_config = nlohmann::json::object();
  DatasetSummary dataset;
  std::vector<RunRecord> records;
  std::vector<VariantUncertainty> uncertainty;
  std::vector<BaselineComparison> comparisons;
  std::optional<std::vector<SweepRow>> sweep;
  Verdict verdict;
};

/// models x sum over variants of (graphs x splits x inits).
std::size_t expected_record_count(const StudyConfig& config);

StudyReport run_ablation_study(const StudyConfig& config);
StudyReport run_ablation_study(const Dataset& dataset, const StudyConfig& config);

std::vector<SweepRow> run_perturbation_sweep(const StudyConfig& config, const std::vector<double>& fractions);
std::vector<SweepRow> run_perturbation_sweep(const Dataset& dataset, const StudyConfig& config,
                                             const std::vector<double>& fractions);

/// The config fields that matter for reproduction, as resolved after defaults.
nlohmann::json effective_config(const StudyConfig& config);

}  // namespace commgnn
