#pragma once

#include "commgnn/graph.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace commgnn {

/// Train / validation / test node sets, each sorted ascending.
struct SplitSet {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;

  /// train followed by val; the nodes whose labels are "known".
  std::vector<NodeId> labeled() const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
struct NormalizedAdjacency {
  SparseMatrix matrix;
  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

NormalizedAdjacency normalized_adjacency(const Graph& graph);

/// A_hat^k X; k = 0 returns X.
FeatureMatrix sgc_propagate(const NormalizedAdjacency& adj, const FeatureMatrix& features, unsigned k);

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t max_epochs = 300;
  double weight_decay = 5e-4;
  std::size_t patience = 30;
  std::uint64_t init_seed = 0;

  void validate() const;
};

/// Softmax regression: logits = X W^T + b.
struct LogRegModel {
  Matrix weights;         // |labels| x d
  Eigen::VectorXd bias;   // |labels|
};

/// Two-layer GCN: softmax(A_hat ReLU(A_hat X W0) W1). No biases.
struct GcnModel {
  Matrix w0;  // d x hidden
  Matrix w1;  // hidden x |labels|

  std::size_t hidden_dim() const { return static_cast<std::size_t>(w0.cols()); }
};

template <typename Model>
struct LossAndGradient {
  double loss = 0.0;
  Model gradient;
};

template <typename Model>
struct TrainResult {
  Model model;
  /// Training objective after each epoch (index 0 = initial parameters); non-increasing.
  std::vector<double> loss_history;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::size_t epochs_run = 0;
  double final_learning_rate = 0.0;
};

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

Matrix logreg_predict(const LogRegModel& model, const FeatureMatrix& features);

/// Mean cross-entropy over `train` plus weight_decay * |W|^2 / 2 (bias not decayed).
LossAndGradient<LogRegModel> logreg_loss_and_gradient(const LogRegModel& model, const FeatureMatrix& features,
                                                      const LabelVector& labels, std::span<const NodeId> train,
                                                      double weight_decay);

/// Full-batch gradient descent from zero parameters; the learning rate is
/// halved (and the step rejected) whenever the objective would increase.
/// Returns the parameters of the epoch with the best validation accuracy.
TrainResult<LogRegModel> train_logreg(const FeatureMatrix& features, const LabelVector& labels, const SplitSet& split,
                                      const TrainConfig& config);

Matrix gcn_forward(const GcnModel& model, const NormalizedAdjacency& adj, const FeatureMatrix& features);

/// Mean cross-entropy over `train` plus weight_decay * (|W0|^2 + |W1|^2) / 2.
LossAndGradient<GcnModel> gcn_loss_and_gradient(const GcnModel& model, const NormalizedAdjacency& adj,
                                                const FeatureMatrix& features, const LabelVector& labels,
                                                std::span<const NodeId> train, double weight_decay);

/// Glorot-uniform initialization from `seed`.
GcnModel init_gcn(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes, std::uint64_t seed);

TrainResult<GcnModel> train_gcn(const NormalizedAdjacency& adj, const FeatureMatrix& features,
                                const LabelVector& labels, const SplitSet& split, const TrainConfig& config,
                                std::size_t hidden_dim);
TrainResult<GcnModel> train_gcn(const Graph& graph, const FeatureMatrix& features, const LabelVector& labels,
                                const SplitSet& split, const TrainConfig& config, std::size_t hidden_dim);

/// Fraction of `mask` whose argmax prediction (ties to the lowest class) is the label.
double accuracy(const Matrix& probabilities, const LabelVector& labels, std::span<const NodeId> mask);

/// Text serialization: header line, config line, then each matrix as
/// "name rows cols" followed by its values.
void save_model(std::ostream& out, const LogRegModel& model, const TrainConfig& config);
void save_model(std::ostream& out, const GcnModel& model, const TrainConfig& config);
std::pair<LogRegModel, TrainConfig> load_logreg_model(std::istream& in);
std::pair<GcnModel, TrainConfig> load_gcn_model(std::istream& in);

enum class ModelKind { LogReg, Gcn, Sgc };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model(std::string_view name);

}  // namespace commgnn
