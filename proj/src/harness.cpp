#include "commgnn/harness.hpp"

#include "commgnn/ablation.hpp"
#include "commgnn/error.hpp"
#include "commgnn/infometrics.hpp"
#include "commgnn/io.hpp"
#include "commgnn/parallel.hpp"
#include "commgnn/random.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace commgnn {
namespace {

// Independent seed streams under the master seed.
enum Stream : std::uint64_t { kSplits = 1, kLouvain = 2, kGraph = 3, kInit = 4, kSwap = 5 };

std::uint64_t vkey(VariantKind v) { return static_cast<std::uint64_t>(v); }

std::uint64_t louvain_seed(const StudyConfig& c, VariantKind v, std::size_t g) {
  return derive_seed(c.seed, {kLouvain, vkey(v), g});
}
std::uint64_t graph_seed(const StudyConfig& c, VariantKind v, std::size_t g) {
  return derive_seed(c.seed, {kGraph, vkey(v), g});
}
std::uint64_t init_seed(const StudyConfig& c, VariantKind v, std::size_t g, std::size_t s, std::size_t i) {
  return derive_seed(c.seed, {kInit, vkey(v), g, s, i});
}

std::string tag(VariantKind v, std::optional<std::size_t> g = {}, std::optional<std::size_t> s = {},
                std::optional<std::size_t> i = {}) {
  std::ostringstream os;
  os << "[variant=" << to_string(v);
  if (g) os << " graph_seed=" << *g;
  if (s) os << " split=" << *s;
  if (i) os << " init=" << *i;
  os << "] ";
  return os.str();
}

template <typename Fn>
auto tagged(const std::string& prefix, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

std::vector<SplitSet> study_splits(const Dataset& ds, const StudyConfig& c, std::size_t count) {
  return make_splits(ds.labels, c.train_per_class, c.val_per_class, count, derive_seed(c.seed, {kSplits}));
}

std::size_t max_splits(const StudyConfig& c) { return std::max(c.n_splits, c.ablation_splits.value_or(c.n_splits)); }

TrainConfig train_config(const StudyConfig& c, std::uint64_t seed) {
  TrainConfig t = c.train;
  t.init_seed = seed;
  return t;
}

bool has_model(const StudyConfig& c, ModelKind m) {
  return std::find(c.models.begin(), c.models.end(), m) != c.models.end();
}

// Everything one evaluated graph needs.
struct GraphCell {
  VariantKind variant;
  std::size_t g = 0;
  Graph graph;
  Partition partition;
  NormalizedAdjacency adj;
  FeatureMatrix sgc_features;
};

Graph variant_graph(const Dataset& ds, const BlockMatrix& blocks, const Partition& original, VariantKind v,
                    std::size_t g, const StudyConfig& c) {
  const auto seed = graph_seed(c, v, g);
  switch (v) {
    case VariantKind::Original:
      return ds.graph;
    case VariantKind::Sbm:
      return generate_sbm(blocks, original, seed);
    case VariantKind::Cm:
      return rewire_configuration_model(ds.graph, seed, c.swaps_per_edge).graph;
    case VariantKind::Random:
      return generate_erdos_renyi(ds.num_nodes(), ds.graph.num_edges(), seed);
  }
  throw Error("unknown variant");
}

void finish_cell(GraphCell& cell, const Dataset& ds, const StudyConfig& c, bool need_sgc) {
  cell.adj = normalized_adjacency(cell.graph);
  if (need_sgc) cell.sgc_features = sgc_propagate(cell.adj, ds.features, c.sgc_k);
}

double gcn_accuracy(const GraphCell& cell, const Dataset& ds, const SplitSet& split, const StudyConfig& c,
                    std::uint64_t seed) {
  auto res = train_gcn(cell.adj, ds.features, ds.labels, split, train_config(c, seed), c.hidden_dim);
  return accuracy(gcn_forward(res.model, cell.adj, ds.features), ds.labels, split.test);
}

double logreg_accuracy(const FeatureMatrix& x, const Dataset& ds, const SplitSet& split, const StudyConfig& c,
                       std::uint64_t seed) {
  auto res = train_logreg(x, ds.labels, split, train_config(c, seed));
  return accuracy(logreg_predict(res.model, x), ds.labels, split.test);
}

std::vector<double> u_per_split(const Dataset& ds, const Partition& p, const std::vector<SplitSet>& splits,
                                std::size_t count) {
  std::vector<double> u(count);
  for (std::size_t s = 0; s < count; ++s) u[s] = uncertainty_coefficient(ds.labels, p, splits[s].labeled());
  return u;
}

}  // namespace

std::vector<SplitSet> make_splits(const LabelVector& labels, std::size_t train_per_class, std::size_t val_per_class,
                                  std::size_t n_splits, std::uint64_t seed) {
  std::vector<std::vector<NodeId>> members(labels.num_classes);
  for (std::size_t u = 0; u < labels.size(); ++u) {
    if (labels.ids[u] >= labels.num_classes) throw Error("make_splits: label id out of range");
    members[labels.ids[u]].push_back(static_cast<NodeId>(u));
  }
  const std::size_t quota = train_per_class + val_per_class;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].size() < quota) {
      const std::string name = c < labels.class_names.size() ? labels.class_names[c] : std::to_string(c);
      throw DegenerateInputError("class '" + name + "' has " + std::to_string(members[c].size()) +
                                 " nodes, fewer than the " + std::to_string(quota) + " needed for train+val");
    }
  }

  std::vector<SplitSet> splits(n_splits);
  for (std::size_t s = 0; s < n_splits; ++s) {
    Rng rng(derive_seed(seed, {s}));
    std::vector<char> used(labels.size(), 0);
    SplitSet& split = splits[s];
    for (const auto& cls : members) {
      std::vector<NodeId> pool = cls;
      // Partial Fisher-Yates: the first `quota` slots form a uniform sample.
      for (std::size_t i = 0; i < quota; ++i) {
        std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
      }
      for (std::size_t i = 0; i < quota; ++i) {
        (i < train_per_class ? split.train : split.val).push_back(pool[i]);
        used[pool[i]] = 1;
      }
    }
    for (std::size_t u = 0; u < labels.size(); ++u) {
      if (!used[u]) split.test.push_back(static_cast<NodeId>(u));
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
  }
  return splits;
}

Dataset prepare_dataset(const StudyConfig& config) {
  Dataset ds = config.synthetic ? make_planted_dataset(*config.synthetic)
                                : load_dataset(config.dataset->edges, config.dataset->features, config.dataset->labels);
  ds.validate();
  if (config.drop_rare_labels) ds = remove_rare_labels(ds, config.train_per_class + config.val_per_class);
  if (config.keep_top_k_components == 1) {
    ds = largest_connected_component(ds);
  } else if (config.keep_top_k_components > 1) {
    ds = keep_top_k_components(ds, config.keep_top_k_components);
  }
  if (ds.labels.num_classes < 2) throw DegenerateInputError("fewer than two classes remain after preprocessing");
  return ds;
}

DatasetSummary summarize(const Dataset& dataset) {
  DatasetSummary s;
  s.nodes = dataset.num_nodes();
  s.edges = dataset.graph.num_edges();
  s.density = s.nodes >= 2 ? edge_density(dataset.graph) : 0.0;
  s.classes = dataset.labels.num_classes;
  s.features = static_cast<std::size_t>(dataset.features.cols());
  s.components = connected_components(dataset.graph).size();
  return s;
}

Analysis analyze(const Dataset& dataset, const StudyConfig& config) {
  Analysis a;
  a.summary = summarize(dataset);
  a.partition = louvain(dataset.graph, louvain_seed(config, VariantKind::Original, 0));
  a.modularity = modularity(dataset.graph, a.partition);
  const auto splits = study_splits(dataset, config, config.n_splits);
  a.u_values = u_per_split(dataset, a.partition, splits, config.n_splits);
  a.u_mean = mean(a.u_values);
  a.u_std = stddev(a.u_values);
  return a;
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::GnnApplicable: return "GnnApplicable";
    case Decision::FeatureOnly: return "FeatureOnly";
    case Decision::Inconclusive: return "Inconclusive";
    case Decision::GnnApplicableAfterSweep: return "GnnApplicableAfterSweep";
    case Decision::FeatureOnlyAfterSweep: return "FeatureOnlyAfterSweep";
  }
  return "?";
}

std::optional<Decision> parse_decision(std::string_view name) {
  for (auto d : {Decision::GnnApplicable, Decision::FeatureOnly, Decision::Inconclusive,
                 Decision::GnnApplicableAfterSweep, Decision::FeatureOnlyAfterSweep}) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

Verdict guideline_verdict(double u_original, const std::optional<std::vector<SweepRow>>& sweep,
                          const Thresholds& thresholds, double slope_epsilon) {
  Verdict v;
  v.u_original = u_original;
  std::ostringstream why;
  why << "U(L|C) = " << u_original;
  if (u_original < thresholds.low) {
    v.decision = Decision::FeatureOnly;
    why << " < " << thresholds.low << ": communities carry little label information; use a feature-only model";
  } else if (u_original > thresholds.high) {
    v.decision = Decision::GnnApplicable;
    why << " > " << thresholds.high << ": communities align with labels; graph models are applicable";
  } else if (!sweep || sweep->size() < 2) {
    v.decision = Decision::Inconclusive;
    why << " lies in [" << thresholds.low << ", " << thresholds.high << "]; a perturbation sweep is needed";
  } else {
    std::vector<double> f, u;
    for (const auto& row : *sweep) {
      f.push_back(row.fraction);
      u.push_back(row.u_mean);
    }
    v.sweep_slope = least_squares_slope(f, u);
    why << " lies in [" << thresholds.low << ", " << thresholds.high << "]; sweep slope " << *v.sweep_slope;
    if (*v.sweep_slope < -slope_epsilon) {
      v.decision = Decision::GnnApplicableAfterSweep;
      why << " < " << -slope_epsilon << ": U drops under perturbation; graph models are applicable";
    } else {
      v.decision = Decision::FeatureOnlyAfterSweep;
      why << " >= " << -slope_epsilon << ": U is already converged; use a feature-only model";
    }
  }
  v.justification = why.str();
  return v;
}

std::size_t expected_record_count(const StudyConfig& config) {
  std::size_t per_model = 0;
  for (auto v : config.variants) per_model += config.graphs_for(v) * config.splits_for(v) * config.inits_for(v);
  return config.models.size() * per_model;
}

StudyReport run_ablation_study(const StudyConfig& config) {
  return run_ablation_study(prepare_dataset(config), config);
}

StudyReport run_ablation_study(const Dataset& ds, const StudyConfig& config) {
  config.validate();
  StudyReport report;
  report.config = config.source;
  report.resolved_config = effective_config(config);
  report.dataset = summarize(ds);

  const Analysis base = analyze(ds, config);
  report.verdict = guideline_verdict(base.u_mean, std::nullopt, config.thresholds, config.slope_epsilon);
  if (config.variants.empty() || config.models.empty()) {
    for (auto v : config.variants) report.uncertainty.push_back({v, 0.0, 0.0, {}, 0.0});
    return report;
  }

  const auto splits = study_splits(ds, config, max_splits(config));
  const BlockMatrix blocks = block_density_matrix(ds.graph, base.partition);
  const bool need_sgc = has_model(config, ModelKind::Sgc);

  std::vector<GraphCell> cells;
  for (auto v : config.variants) {
    for (std::size_t g = 0; g < config.graphs_for(v); ++g) cells.push_back(GraphCell{v, g, {}, {}, {}, {}});
  }
  parallel_for(cells.size(), config.jobs, [&](std::size_t k) {
    GraphCell& cell = cells[k];
    tagged(tag(cell.variant, cell.g), [&] {
      cell.graph = variant_graph(ds, blocks, base.partition, cell.variant, cell.g, config);
      cell.partition = cell.variant == VariantKind::Original ? base.partition
                                                             : louvain(cell.graph, louvain_seed(config, cell.variant, cell.g));
      finish_cell(cell, ds, config, need_sgc);
    });
  });

  // U(L|C) per (graph, split).
  for (auto v : config.variants) {
    VariantUncertainty vu{v, 0.0, 0.0, {}, 0.0};
    std::size_t graphs = 0;
    for (const auto& cell : cells) {
      if (cell.variant != v) continue;
      auto u = tagged(tag(v, cell.g), [&] { return u_per_split(ds, cell.partition, splits, config.splits_for(v)); });
      vu.values.insert(vu.values.end(), u.begin(), u.end());
      vu.mean_communities += static_cast<double>(cell.partition.num_communities);
      ++graphs;
    }
    vu.mean = mean(vu.values);
    vu.std = stddev(vu.values);
    vu.mean_communities /= static_cast<double>(graphs);
    report.uncertainty.push_back(std::move(vu));
  }

  // Training units. Logreg ignores the graph and starts from zero, so one run
  // per split serves every variant and init; SGC likewise needs one run per
  // (graph, split).
  struct Unit {
    ModelKind model;
    std::size_t cell;
    std::size_t split;
    std::size_t init;
  };
  std::vector<Unit> units;
  const bool need_logreg = has_model(config, ModelKind::LogReg);
  if (need_logreg) {
    for (std::size_t s = 0; s < splits.size(); ++s) units.push_back({ModelKind::LogReg, 0, s, 0});
  }
  std::vector<std::size_t> sgc_unit(cells.size() * splits.size(), 0);
  std::vector<std::size_t> gcn_base(cells.size(), 0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto v = cells[k].variant;
    if (need_sgc) {
      for (std::size_t s = 0; s < config.splits_for(v); ++s) {
        sgc_unit[k * splits.size() + s] = units.size();
        units.push_back({ModelKind::Sgc, k, s, 0});
      }
    }
    if (has_model(config, ModelKind::Gcn)) {
      gcn_base[k] = units.size();
      for (std::size_t s = 0; s < config.splits_for(v); ++s) {
        for (std::size_t i = 0; i < config.inits_for(v); ++i) units.push_back({ModelKind::Gcn, k, s, i});
      }
    }
  }

  std::vector<double> acc(units.size(), 0.0);
  parallel_for(units.size(), config.jobs, [&](std::size_t j) {
    const Unit& u = units[j];
    const GraphCell& cell = cells[u.cell];
    const SplitSet& split = splits[u.split];
    switch (u.model) {
      case ModelKind::LogReg:
        acc[j] = tagged(tag(VariantKind::Original, 0, u.split, 0),
                        [&] { return logreg_accuracy(ds.features, ds, split, config, 0); });
        break;
      case ModelKind::Sgc:
        acc[j] = tagged(tag(cell.variant, cell.g, u.split, 0), [&] {
          return logreg_accuracy(cell.sgc_features, ds, split, config, init_seed(config, cell.variant, cell.g, u.split, 0));
        });
        break;
      case ModelKind::Gcn:
        acc[j] = tagged(tag(cell.variant, cell.g, u.split, u.init), [&] {
          return gcn_accuracy(cell, ds, split, config, init_seed(config, cell.variant, cell.g, u.split, u.init));
        });
        break;
    }
  });

  // Records in (variant, graph, split, init, model) order.
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto v = cells[k].variant;
    const std::size_t ni = config.inits_for(v);
    for (std::size_t s = 0; s < config.splits_for(v); ++s) {
      for (std::size_t i = 0; i < ni; ++i) {
        for (auto m : config.models) {
          double a = 0.0;
          switch (m) {
            case ModelKind::LogReg: a = acc[s]; break;
            case ModelKind::Sgc: a = acc[sgc_unit[k * splits.size() + s]]; break;
            case ModelKind::Gcn: a = acc[gcn_base[k] + s * ni + i]; break;
          }
          report.records.push_back({m, v, cells[k].g, s, i, a});
        }
      }
    }
  }

  // Every graph model on every variant against logreg on the original graph.
  const bool have_baseline =
      need_logreg && std::find(config.variants.begin(), config.variants.end(), VariantKind::Original) != config.variants.end();
  if (have_baseline) {
    auto sample = [&](ModelKind m, VariantKind v) {
      std::vector<double> xs;
      for (const auto& r : report.records) {
        if (r.model == m && r.variant == v) xs.push_back(r.accuracy);
      }
      return xs;
    };
    const auto baseline = sample(ModelKind::LogReg, VariantKind::Original);
    const double baseline_median = median(baseline);
    std::vector<double> raw_p;
    for (auto m : config.models) {
      if (m == ModelKind::LogReg) continue;
      for (auto v : config.variants) {
        const auto xs = sample(m, v);
        BaselineComparison cmp{m, v, mann_whitney_u(xs, baseline), 1.0, median(xs), baseline_median, false};
        raw_p.push_back(cmp.test.p_value);
        report.comparisons.push_back(cmp);
      }
    }
    const auto adjusted = bonferroni(raw_p);
    for (std::size_t i = 0; i < adjusted.size(); ++i) {
      auto& cmp = report.comparisons[i];
      cmp.adjusted_p = adjusted[i];
      cmp.model_significantly_better = cmp.adjusted_p < config.alpha && cmp.model_median > cmp.baseline_median;
    }
  }
  return report;
}

std::vector<SweepRow> run_perturbation_sweep(const StudyConfig& config, const std::vector<double>& fractions) {
  return run_perturbation_sweep(prepare_dataset(config), config, fractions);
}

std::vector<SweepRow> run_perturbation_sweep(const Dataset& ds, const StudyConfig& config,
                                             const std::vector<double>& fractions) {
  config.validate();
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] >= 0.0 && fractions[i] <= 1.0)) throw Error("sweep fractions must lie in [0, 1]");
    if (i > 0 && fractions[i] < fractions[i - 1]) throw Error("sweep fractions must be sorted ascending");
  }
  constexpr VariantKind v = VariantKind::Sbm;
  const std::size_t n_graphs = config.graphs_for(v);
  const std::size_t n_splits = config.splits_for(v);
  const std::size_t n_inits = config.inits_for(v);

  const Partition original = louvain(ds.graph, louvain_seed(config, VariantKind::Original, 0));
  const BlockMatrix blocks = block_density_matrix(ds.graph, original);
  const auto splits = study_splits(ds, config, max_splits(config));

  std::vector<Graph> sbm(n_graphs);
  parallel_for(n_graphs, config.jobs, [&](std::size_t g) {
    sbm[g] = tagged(tag(v, g), [&] { return variant_graph(ds, blocks, original, v, g, config); });
  });

  // One cell per (fraction, graph): perturbed graph, re-detected and carried-over partitions.
  struct Cell {
    GraphCell graph;
    Partition planted;
  };
  const std::size_t n_cells = fractions.size() * n_graphs;
  std::vector<Cell> cells(n_cells);
  parallel_for(n_cells, config.jobs, [&](std::size_t k) {
    const std::size_t f = k / n_graphs, g = k % n_graphs;
    tagged(tag(v, g) + "[fraction=" + std::to_string(fractions[f]) + "] ", [&] {
      // The swap seed ignores the fraction, so larger fractions extend the same node selection.
      const SwapResult swap = swap_perturbation(sbm[g], original, fractions[f], derive_seed(config.seed, {kSwap, g}));
      Cell& c = cells[k];
      c.graph.variant = v;
      c.graph.g = g;
      c.graph.graph = swap.graph;
      c.graph.partition = louvain(swap.graph, louvain_seed(config, v, g));
      c.planted = transport_partition(original, swap);
      finish_cell(c.graph, ds, config, false);
    });
  });

  std::vector<double> acc(n_cells * n_splits * n_inits);
  parallel_for(acc.size(), config.jobs, [&](std::size_t j) {
    const std::size_t k = j / (n_splits * n_inits), s = (j / n_inits) % n_splits, i = j % n_inits;
    const GraphCell& cell = cells[k].graph;
    acc[j] = tagged(tag(v, cell.g, s, i),
                    [&] { return gcn_accuracy(cell, ds, splits[s], config, init_seed(config, v, cell.g, s, i)); });
  });

  std::vector<SweepRow> rows;
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    std::vector<double> u, planted, a;
    for (std::size_t g = 0; g < n_graphs; ++g) {
      const Cell& c = cells[f * n_graphs + g];
      auto uu = u_per_split(ds, c.graph.partition, splits, n_splits);
      auto pp = u_per_split(ds, c.planted, splits, n_splits);
      u.insert(u.end(), uu.begin(), uu.end());
      planted.insert(planted.end(), pp.begin(), pp.end());
      const auto first = acc.begin() + static_cast<std::ptrdiff_t>((f * n_graphs + g) * n_splits * n_inits);
      a.insert(a.end(), first, first + static_cast<std::ptrdiff_t>(n_splits * n_inits));
    }
    SweepRow row;
    row.fraction = fractions[f];
    row.u_mean = mean(u);
    row.u_std = stddev(u);
    row.planted_u_mean = mean(planted);
    row.planted_u_std = stddev(planted);
    row.accuracy_mean = mean(a);
    row.accuracy_std = stddev(a);
    row.u_samples = u.size();
    row.accuracy_samples = a.size();
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json effective_config(const StudyConfig& c) {
  nlohmann::json j;
  if (c.dataset) {
    j["dataset"] = {{"edges", c.dataset->edges.string()},
                    {"features", c.dataset->features.string()},
                    {"labels", c.dataset->labels.string()}};
  }
  if (c.synthetic) {
    const auto& s = *c.synthetic;
    j["synthetic"] = {{"num_blocks", s.num_blocks},   {"block_size", s.block_size},
                      {"p_in", s.p_in},               {"p_out", s.p_out},
                      {"feature_dim", s.feature_dim}, {"feature_signal", s.feature_signal},
                      {"labels_follow_blocks", s.labels_follow_blocks}, {"seed", s.seed}};
  }
  j["train_per_class"] = c.train_per_class;
  j["val_per_class"] = c.val_per_class;
  j["n_splits"] = c.n_splits;
  j["n_inits"] = c.n_inits;
  j["n_graph_seeds"] = c.n_graph_seeds;
  j["ablation_splits"] = c.splits_for(VariantKind::Sbm);
  j["ablation_inits"] = c.inits_for(VariantKind::Sbm);
  j["models"] = nlohmann::json::array();
  for (auto m : c.models) j["models"].push_back(std::string(to_string(m)));
  j["variants"] = nlohmann::json::array();
  for (auto v : c.variants) j["variants"].push_back(std::string(to_string(v)));
  j["train"] = {{"learning_rate", c.train.learning_rate}, {"max_epochs", c.train.max_epochs},
                {"weight_decay", c.train.weight_decay},   {"patience", c.train.patience},
                {"hidden_dim", c.hidden_dim},             {"sgc_k", c.sgc_k}};
  j["fractions"] = c.fractions;
  j["thresholds"] = {{"low", c.thresholds.low}, {"high", c.thresholds.high}};
  j["slope_epsilon"] = c.slope_epsilon;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["keep_top_k_components"] = c.keep_top_k_components;
  j["drop_rare_labels"] = c.drop_rare_labels;
  j["swaps_per_edge"] = c.swaps_per_edge;
  return j;
}

}  // namespace commgnn
