#include "commgnn/models.hpp"

#include "commgnn/error.hpp"
#include "commgnn/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace commgnn {

std::vector<NodeId> SplitSet::labeled() const {
  std::vector<NodeId> out(train);
  out.insert(out.end(), val.begin(), val.end());
  return out;
}

NormalizedAdjacency normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId u = 0; u < n; ++u) inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(graph.degree(u) + 1));

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(graph.adjacency().size() + n);
  for (NodeId u = 0; u < n; ++u) {
    entries.emplace_back(u, u, inv_sqrt[u] * inv_sqrt[u]);
    for (NodeId v : graph.neighbors(u)) entries.emplace_back(u, v, inv_sqrt[u] * inv_sqrt[v]);
  }
  NormalizedAdjacency adj;
  adj.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  adj.matrix.setFromTriplets(entries.begin(), entries.end());
  adj.matrix.makeCompressed();
  return adj;
}

FeatureMatrix sgc_propagate(const NormalizedAdjacency& adj, const FeatureMatrix& features, unsigned k) {
  if (adj.size() != static_cast<std::size_t>(features.rows())) throw Error("sgc_propagate: dimension mismatch");
  FeatureMatrix x = features;
  for (unsigned i = 0; i < k; ++i) {
    FeatureMatrix next = adj.matrix * x;
    x.swap(next);
  }
  return x;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (max_epochs < 1) throw Error("max_epochs must be at least 1");
  if (patience < 1) throw Error("patience must be at least 1");
  if (!(weight_decay >= 0.0)) throw Error("weight_decay must be non-negative");
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    const auto e = (logits.row(i).array() - mx).exp();
    p.row(i) = e / e.sum();
  }
  return p;
}

namespace {

// Mean cross-entropy over `rows` and the gradient w.r.t. the logits (zero off `rows`).
double cross_entropy(const Matrix& logits, const LabelVector& labels, std::span<const NodeId> rows, Matrix* dlogits) {
  if (rows.empty()) throw Error("training set is empty");
  const double scale = 1.0 / static_cast<double>(rows.size());
  if (dlogits) *dlogits = Matrix::Zero(logits.rows(), logits.cols());
  double loss = 0.0;
  for (NodeId u : rows) {
    const auto z = logits.row(u);
    const double mx = z.maxCoeff();
    const auto e = (z.array() - mx).exp();
    const double sum = e.sum();
    const LabelId y = labels.ids[u];
    loss -= (z(y) - mx - std::log(sum)) * scale;
    if (dlogits) {
      dlogits->row(u) = e / sum * scale;
      (*dlogits)(u, y) -= scale;
    }
  }
  return loss;
}

void check_split(const SplitSet& split) {
  if (split.train.empty() || split.val.empty()) throw Error("training needs non-empty train and validation sets");
}

LogRegModel step(const LogRegModel& m, const LogRegModel& g, double lr) {
  return {m.weights - lr * g.weights, m.bias - lr * g.bias};
}

GcnModel step(const GcnModel& m, const GcnModel& g, double lr) { return {m.w0 - lr * g.w0, m.w1 - lr * g.w1}; }

template <typename Model, typename Objective, typename Predict>
TrainResult<Model> gradient_descent(Model init, Objective&& objective, Predict&& predict, const LabelVector& labels,
                                    const SplitSet& split, const TrainConfig& config) {
  config.validate();
  check_split(split);
  TrainResult<Model> result;
  double lr = config.learning_rate;

  Model current = std::move(init);
  LossAndGradient<Model> current_eval = objective(current);
  if (!std::isfinite(current_eval.loss)) throw DivergenceError(0, "non-finite initial loss");
  result.loss_history.push_back(current_eval.loss);
  result.model = current;
  result.best_val_accuracy = accuracy(predict(current), labels, split.val);
  result.best_epoch = 0;

  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    result.epochs_run = epoch;
    Model candidate = step(current, current_eval.gradient, lr);
    LossAndGradient<Model> candidate_eval = objective(candidate);
    if (!std::isfinite(candidate_eval.loss)) throw DivergenceError(epoch, "non-finite training loss");
    bool improved = false;
    if (candidate_eval.loss > current_eval.loss) {
      lr *= 0.5;
    } else {
      current = std::move(candidate);
      current_eval = std::move(candidate_eval);
      const double val_acc = accuracy(predict(current), labels, split.val);
      if (val_acc > result.best_val_accuracy) {
        result.best_val_accuracy = val_acc;
        result.best_epoch = epoch;
        result.model = current;
        improved = true;
      }
    }
    result.loss_history.push_back(current_eval.loss);
    if (improved) {
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.final_learning_rate = lr;
  return result;
}

// A_hat X is fixed during training, so the GCN objective takes it precomputed.
LossAndGradient<GcnModel> gcn_objective(const GcnModel& model, const NormalizedAdjacency& adj,
                                        const Matrix& propagated, const LabelVector& labels,
                                        std::span<const NodeId> train, double weight_decay) {
  const Matrix pre = propagated * model.w0;
  const Matrix hidden = pre.cwiseMax(0.0);
  const Matrix agg = adj.matrix * hidden;
  const Matrix logits = agg * model.w1;

  LossAndGradient<GcnModel> out;
  Matrix dlogits;
  out.loss = cross_entropy(logits, labels, train, &dlogits) +
             0.5 * weight_decay * (model.w0.squaredNorm() + model.w1.squaredNorm());

  out.gradient.w1 = agg.transpose() * dlogits + weight_decay * model.w1;
  const Matrix dagg = dlogits * model.w1.transpose();
  Matrix dpre = adj.matrix * dagg;  // A_hat is symmetric
  dpre = dpre.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  out.gradient.w0 = propagated.transpose() * dpre + weight_decay * model.w0;
  return out;
}

Matrix gcn_forward_propagated(const GcnModel& model, const NormalizedAdjacency& adj, const Matrix& propagated) {
  const Matrix hidden = (propagated * model.w0).cwiseMax(0.0);
  return softmax_rows((adj.matrix * hidden) * model.w1);
}

}  // namespace

Matrix logreg_predict(const LogRegModel& model, const FeatureMatrix& features) {
  Matrix logits = features * model.weights.transpose();
  logits.rowwise() += model.bias.transpose();
  return softmax_rows(logits);
}

LossAndGradient<LogRegModel> logreg_loss_and_gradient(const LogRegModel& model, const FeatureMatrix& features,
                                                      const LabelVector& labels, std::span<const NodeId> train,
                                                      double weight_decay) {
  Matrix logits = features * model.weights.transpose();
  logits.rowwise() += model.bias.transpose();
  Matrix dlogits;
  LossAndGradient<LogRegModel> out;
  out.loss = cross_entropy(logits, labels, train, &dlogits) + 0.5 * weight_decay * model.weights.squaredNorm();
  out.gradient.weights = dlogits.transpose() * features + weight_decay * model.weights;
  out.gradient.bias = dlogits.colwise().sum().transpose();
  return out;
}

TrainResult<LogRegModel> train_logreg(const FeatureMatrix& features, const LabelVector& labels, const SplitSet& split,
                                      const TrainConfig& config) {
  const auto k = static_cast<Eigen::Index>(labels.num_classes);
  LogRegModel init{Matrix::Zero(k, features.cols()), Eigen::VectorXd::Zero(k)};
  return gradient_descent(
      std::move(init),
      [&](const LogRegModel& m) {
        return logreg_loss_and_gradient(m, features, labels, split.train, config.weight_decay);
      },
      [&](const LogRegModel& m) { return logreg_predict(m, features); }, labels, split, config);
}

Matrix gcn_forward(const GcnModel& model, const NormalizedAdjacency& adj, const FeatureMatrix& features) {
  return gcn_forward_propagated(model, adj, adj.matrix * features);
}

LossAndGradient<GcnModel> gcn_loss_and_gradient(const GcnModel& model, const NormalizedAdjacency& adj,
                                                const FeatureMatrix& features, const LabelVector& labels,
                                                std::span<const NodeId> train, double weight_decay) {
  const Matrix propagated = adj.matrix * features;
  return gcn_objective(model, adj, propagated, labels, train, weight_decay);
}

GcnModel init_gcn(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes, std::uint64_t seed) {
  if (hidden_dim < 1) throw Error("hidden_dim must be at least 1");
  Rng rng(seed);
  auto glorot = [&](std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(static_cast<Eigen::Index>(fan_in), static_cast<Eigen::Index>(fan_out));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
    }
    return w;
  };
  GcnModel model;
  model.w0 = glorot(input_dim, hidden_dim);
  model.w1 = glorot(hidden_dim, num_classes);
  return model;
}

TrainResult<GcnModel> train_gcn(const NormalizedAdjacency& adj, const FeatureMatrix& features,
                                const LabelVector& labels, const SplitSet& split, const TrainConfig& config,
                                std::size_t hidden_dim) {
  const Matrix propagated = adj.matrix * features;
  GcnModel init = init_gcn(static_cast<std::size_t>(features.cols()), hidden_dim, labels.num_classes, config.init_seed);
  return gradient_descent(
      std::move(init),
      [&](const GcnModel& m) {
        return gcn_objective(m, adj, propagated, labels, split.train, config.weight_decay);
      },
      [&](const GcnModel& m) { return gcn_forward_propagated(m, adj, propagated); }, labels, split, config);
}

TrainResult<GcnModel> train_gcn(const Graph& graph, const FeatureMatrix& features, const LabelVector& labels,
                                const SplitSet& split, const TrainConfig& config, std::size_t hidden_dim) {
  return train_gcn(normalized_adjacency(graph), features, labels, split, config, hidden_dim);
}

double accuracy(const Matrix& probabilities, const LabelVector& labels, std::span<const NodeId> mask) {
  if (mask.empty()) throw Error("accuracy over an empty mask");
  std::size_t correct = 0;
  for (NodeId u : mask) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probabilities.cols(); ++c) {
      if (probabilities(u, c) > probabilities(u, best)) best = c;
    }
    correct += static_cast<LabelId>(best) == labels.ids[u];
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

namespace {

constexpr std::string_view kModelMagic = "commgnn-model";
constexpr int kModelVersion = 1;

void write_real(std::ostream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

void write_matrix(std::ostream& out, std::string_view name, const Matrix& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      write_real(out, m(i, j));
    }
    out << '\n';
  }
}

void write_header(std::ostream& out, std::string_view kind, const TrainConfig& c) {
  out << kModelMagic << ' ' << kModelVersion << ' ' << kind << '\n';
  out << "config ";
  write_real(out, c.learning_rate);
  out << ' ' << c.max_epochs << ' ';
  write_real(out, c.weight_decay);
  out << ' ' << c.patience << ' ' << c.init_seed << '\n';
}

double read_real(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw ParseError("model", 0, "truncated model file");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("model", 0, "bad number '" + tok + "'");
  return v;
}

Matrix read_matrix(std::istream& in, std::string_view name) {
  std::string got;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> got >> rows >> cols) || got != name || rows < 0 || cols < 0) {
    throw ParseError("model", 0, "expected matrix '" + std::string(name) + "'");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = read_real(in);
  }
  return m;
}

TrainConfig read_header(std::istream& in, std::string_view kind) {
  std::string magic, got_kind, config_tag;
  int version = 0;
  if (!(in >> magic >> version >> got_kind) || magic != kModelMagic || version != kModelVersion) {
    throw ParseError("model", 1, "not a commgnn model file");
  }
  if (got_kind != kind) throw ParseError("model", 1, "expected a " + std::string(kind) + " model, found " + got_kind);
  if (!(in >> config_tag) || config_tag != "config") throw ParseError("model", 2, "missing config line");
  TrainConfig c;
  c.learning_rate = read_real(in);
  if (!(in >> c.max_epochs)) throw ParseError("model", 2, "bad config line");
  c.weight_decay = read_real(in);
  if (!(in >> c.patience >> c.init_seed)) throw ParseError("model", 2, "bad config line");
  return c;
}

}  // namespace

void save_model(std::ostream& out, const LogRegModel& model, const TrainConfig& config) {
  write_header(out, "logreg", config);
  write_matrix(out, "weights", model.weights);
  write_matrix(out, "bias", model.bias.transpose());
}

void save_model(std::ostream& out, const GcnModel& model, const TrainConfig& config) {
  write_header(out, "gcn", config);
  write_matrix(out, "w0", model.w0);
  write_matrix(out, "w1", model.w1);
}

std::pair<LogRegModel, TrainConfig> load_logreg_model(std::istream& in) {
  TrainConfig c = read_header(in, "logreg");
  LogRegModel m;
  m.weights = read_matrix(in, "weights");
  m.bias = read_matrix(in, "bias").transpose();
  return {std::move(m), c};
}

std::pair<GcnModel, TrainConfig> load_gcn_model(std::istream& in) {
  TrainConfig c = read_header(in, "gcn");
  GcnModel m;
  m.w0 = read_matrix(in, "w0");
  m.w1 = read_matrix(in, "w1");
  return {std::move(m), c};
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LogReg:
      return "logreg";
    case ModelKind::Gcn:
      return "gcn";
    case ModelKind::Sgc:
      return "sgc";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  for (auto k : {ModelKind::LogReg, ModelKind::Gcn, ModelKind::Sgc}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace commgnn
