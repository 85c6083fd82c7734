#include "commgnn/error.hpp"
#include "commgnn/harness.hpp"
#include "commgnn/random.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace commgnn;

namespace {

LabelVector balanced(std::size_t classes, std::size_t per_class) {
  LabelVector l{{}, classes, {}};
  for (std::size_t u = 0; u < classes * per_class; ++u) l.ids.push_back(static_cast<LabelId>(u % classes));
  return l;
}

StudyConfig small_config(bool aligned = true) {
  StudyConfig c;
  SyntheticSpec s;
  s.block_size = 30;
  s.feature_dim = 4;
  s.feature_signal = 0.5;
  s.labels_follow_blocks = aligned;
  c.synthetic = s;
  c.train_per_class = 5;
  c.val_per_class = 5;
  c.n_splits = 2;
  c.n_inits = 2;
  c.n_graph_seeds = 2;
  c.train.max_epochs = 40;
  c.hidden_dim = 4;
  c.seed = 3;
  return c;
}

SweepRow row(double f, double u) {
  SweepRow r;
  r.fraction = f;
  r.u_mean = u;
  return r;
}

}  // namespace

TEST(Splits, Arithmetic) {
  const auto splits = make_splits(balanced(3, 100), 20, 30, 4, 1);
  ASSERT_EQ(splits.size(), 4u);
  for (const auto& s : splits) {
    EXPECT_EQ(s.train.size(), 60u);
    EXPECT_EQ(s.val.size(), 90u);
    EXPECT_EQ(s.test.size(), 150u);
  }
}

TEST(Splits, SmallQuotas) {
  const auto splits = make_splits(balanced(5, 40), 10, 15, 1, 1);
  EXPECT_EQ(splits[0].train.size(), 50u);
  EXPECT_EQ(splits[0].val.size(), 75u);
  EXPECT_EQ(splits[0].test.size(), 75u);
}

TEST(Splits, DeterministicDisjointAndPerClass) {
  const auto labels = balanced(4, 37);
  const auto a = make_splits(labels, 7, 9, 5, 11);
  const auto b = make_splits(labels, 7, 9, 5, 11);
  const auto c = make_splits(labels, 7, 9, 5, 12);
  for (std::size_t s = 0; s < a.size(); ++s) {
    EXPECT_EQ(a[s].train, b[s].train);
    EXPECT_EQ(a[s].val, b[s].val);
    EXPECT_EQ(a[s].test, b[s].test);
    std::set<NodeId> seen;
    std::vector<std::size_t> tr(4, 0), va(4, 0);
    for (auto u : a[s].train) {
      EXPECT_TRUE(seen.insert(u).second);
      ++tr[labels.ids[u]];
    }
    for (auto u : a[s].val) {
      EXPECT_TRUE(seen.insert(u).second);
      ++va[labels.ids[u]];
    }
    for (auto u : a[s].test) EXPECT_TRUE(seen.insert(u).second);
    EXPECT_EQ(seen.size(), labels.size());
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(tr[k], 7u);
      EXPECT_EQ(va[k], 9u);
    }
    EXPECT_TRUE(std::is_sorted(a[s].train.begin(), a[s].train.end()));
  }
  EXPECT_NE(a[0].train, a[1].train);
  EXPECT_NE(a[0].train, c[0].train);
}

TEST(Splits, ClassTooSmallIsNamed) {
  LabelVector l = balanced(2, 10);
  l.class_names = {"big", "small"};
  l.ids.erase(l.ids.begin() + 1);  // "small" now has 9 members
  try {
    make_splits(l, 5, 5, 1, 0);
    FAIL();
  } catch (const DegenerateInputError& e) {
    EXPECT_NE(std::string(e.what()).find("'small'"), std::string::npos);
  }
  EXPECT_NO_THROW(make_splits(balanced(2, 10), 5, 5, 1, 0));
}

TEST(Config, DefaultsAndParsing) {
  const auto c = parse_study_config(nlohmann::json::parse(R"({"synthetic": {}})"));
  EXPECT_EQ(c.n_splits, 10u);
  EXPECT_EQ(c.n_inits, 3u);
  EXPECT_EQ(c.n_graph_seeds, 5u);
  EXPECT_EQ(c.train_per_class, 20u);
  EXPECT_EQ(c.val_per_class, 30u);
  EXPECT_EQ(c.thresholds.low, 0.3);
  EXPECT_EQ(c.thresholds.high, 0.7);
  EXPECT_EQ(c.slope_epsilon, 0.02);
  EXPECT_EQ(c.hidden_dim, 16u);
  EXPECT_EQ(c.sgc_k, 2u);
  EXPECT_EQ(c.train.learning_rate, 0.05);
  EXPECT_EQ(c.train.weight_decay, 5e-4);
  EXPECT_EQ(c.train.max_epochs, 300u);
  EXPECT_EQ(c.train.patience, 30u);
  EXPECT_EQ(c.variants.size(), 4u);

  const auto d = parse_study_config(nlohmann::json::parse(R"({
    "dataset": {"edges": "e.txt", "features": "f.csv", "labels": "l.tsv"},
    "models": ["gcn"], "variants": ["original", "cm"], "n_splits": 4, "ablation_splits": 2,
    "train": {"hidden_dim": 8, "sgc_k": 3}, "thresholds": {"low": 0.2, "high": 0.8}})"),
                                    "/data");
  EXPECT_EQ(d.dataset->edges, std::filesystem::path("/data/e.txt"));
  EXPECT_EQ(d.models, (std::vector<ModelKind>{ModelKind::Gcn}));
  EXPECT_EQ(d.splits_for(VariantKind::Original), 4u);
  EXPECT_EQ(d.splits_for(VariantKind::Cm), 2u);
  EXPECT_EQ(d.inits_for(VariantKind::Cm), 3u);
  EXPECT_EQ(d.hidden_dim, 8u);
  EXPECT_EQ(d.thresholds.low, 0.2);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto bad = [](const char* text) { return [text] { parse_study_config(nlohmann::json::parse(text)); }; };
  EXPECT_THROW(bad(R"({"synthetic": {}, "n_split": 3})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {"blocks": 3}})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "train": {"lr": 0.1}})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "thresholds": {"low": 0.3, "hi": 0.7}})")(), Error);
  EXPECT_THROW(bad(R"({})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "n_splits": 0})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "n_inits": -1})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "thresholds": {"low": 0.7, "high": 0.3}})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "models": ["gat"]})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "fractions": [0.5, 0.1]})")(), Error);
  EXPECT_THROW(bad(R"({"synthetic": {}, "n_splits": "ten"})")(), Error);
}

TEST(Verdict, Examples) {
  const Thresholds t;
  // 0.69 sits inside the [0.3, 0.7] band, so it needs a sweep.
  EXPECT_EQ(guideline_verdict(0.69, std::nullopt, t).decision, Decision::Inconclusive);
  EXPECT_EQ(guideline_verdict(0.71, std::nullopt, t).decision, Decision::GnnApplicable);
  const auto mid = guideline_verdict(0.32, std::nullopt, t);
  EXPECT_EQ(mid.decision, Decision::Inconclusive);
  EXPECT_FALSE(mid.sweep_slope);
  const std::vector<SweepRow> flat{row(0, 0.32), row(0.3, 0.31), row(0.6, 0.32), row(0.9, 0.315)};
  const auto f = guideline_verdict(0.32, flat, t);
  EXPECT_EQ(f.decision, Decision::FeatureOnlyAfterSweep);
  ASSERT_TRUE(f.sweep_slope);
  EXPECT_GT(*f.sweep_slope, -0.02);
  const std::vector<SweepRow> falling{row(0, 0.5), row(0.25, 0.35), row(0.5, 0.2), row(0.75, 0.1)};
  const auto g = guideline_verdict(0.5, falling, t);
  EXPECT_EQ(g.decision, Decision::GnnApplicableAfterSweep);
  EXPECT_NEAR(*g.sweep_slope, -0.54, 1e-12);
  EXPECT_EQ(guideline_verdict(0.1, falling, t).decision, Decision::FeatureOnly);
  EXPECT_FALSE(g.justification.empty());
}

TEST(Verdict, MonotoneInU) {
  // Order from "feature only" toward "GNN applicable".
  auto rank = [](Decision d) {
    switch (d) {
      case Decision::FeatureOnly: return 0;
      case Decision::FeatureOnlyAfterSweep: return 1;
      case Decision::Inconclusive: return 2;
      case Decision::GnnApplicableAfterSweep: return 3;
      case Decision::GnnApplicable: return 4;
    }
    return -1;
  };
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::optional<std::vector<SweepRow>> sweep;
    if (trial % 3) {
      sweep.emplace();
      double u = rng.uniform01();
      for (int k = 0; k < 5; ++k) {
        sweep->push_back(row(0.1 * k, u));
        u += (rng.uniform01() - 0.6) * 0.1;
      }
    }
    int prev = -1;
    for (double u = 0.0; u <= 1.0; u += 0.01) {
      const int r = rank(guideline_verdict(u, sweep, Thresholds{}).decision);
      EXPECT_GE(r, prev);
      prev = r;
    }
  }
}

TEST(Verdict, DecisionNames) {
  for (auto d : {Decision::GnnApplicable, Decision::FeatureOnly, Decision::Inconclusive,
                 Decision::GnnApplicableAfterSweep, Decision::FeatureOnlyAfterSweep}) {
    EXPECT_EQ(parse_decision(to_string(d)), d);
  }
}

TEST(Study, RecordCountForUnitConfig) {
  auto c = small_config();
  c.n_splits = c.n_inits = c.n_graph_seeds = 1;
  const auto r = run_ablation_study(c);
  EXPECT_EQ(r.records.size(), c.models.size() * 4);
  EXPECT_EQ(expected_record_count(c), c.models.size() * 4);
}

TEST(Study, RecordCountArithmeticAndShape) {
  auto c = small_config();
  c.ablation_splits = 1;
  c.ablation_inits = 3;
  c.models = {ModelKind::Gcn, ModelKind::LogReg};
  c.variants = {VariantKind::Cm, VariantKind::Original};
  const auto r = run_ablation_study(c);
  // gcn/logreg x (original: 1 x 2 x 2 + cm: 2 x 1 x 3)
  EXPECT_EQ(r.records.size(), 2u * (4 + 6));
  EXPECT_EQ(r.records.size(), expected_record_count(c));
  for (const auto& rec : r.records) {
    EXPECT_GE(rec.accuracy, 0.0);
    EXPECT_LE(rec.accuracy, 1.0);
  }
  ASSERT_EQ(r.comparisons.size(), 2u);
  for (const auto& cmp : r.comparisons) {
    EXPECT_EQ(cmp.model, ModelKind::Gcn);
    EXPECT_EQ(cmp.test.n_b, 4u);
    EXPECT_NEAR(cmp.adjusted_p, std::min(1.0, 2 * cmp.test.p_value), 1e-15);
  }
  ASSERT_EQ(r.uncertainty.size(), 2u);
  EXPECT_EQ(r.uncertainty[0].values.size(), 2u);  // cm: 2 graphs x 1 split
  EXPECT_EQ(r.uncertainty[1].values.size(), 2u);  // original: 1 graph x 2 splits
}

TEST(Study, IndependentOfJobCount) {
  auto c = small_config();
  const auto a = run_ablation_study(c);
  c.jobs = 3;
  const auto b = run_ablation_study(c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].model, b.records[i].model);
    EXPECT_EQ(a.records[i].variant, b.records[i].variant);
    EXPECT_EQ(a.records[i].accuracy, b.records[i].accuracy);
  }
  for (std::size_t i = 0; i < a.uncertainty.size(); ++i) EXPECT_EQ(a.uncertainty[i].values, b.uncertainty[i].values);
}

TEST(Study, EmptyVariantsGiveNoRecords) {
  auto c = small_config();
  c.variants.clear();
  const auto r = run_ablation_study(c);
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.comparisons.empty());
}

TEST(Study, AlignedDataHasPerfectOriginalUncertainty) {
  const auto c = small_config();
  const auto ds = prepare_dataset(c);
  const auto a = analyze(ds, c);
  EXPECT_EQ(a.partition.num_communities, 2u);
  EXPECT_EQ(a.u_mean, 1.0);
  EXPECT_EQ(a.u_values.size(), c.n_splits);
  const auto r = run_ablation_study(ds, c);
  EXPECT_EQ(r.verdict.decision, Decision::GnnApplicable);
  EXPECT_EQ(r.verdict.u_original, a.u_mean);
}

TEST(Sweep, ZeroFractionMatchesSbmVariant) {
  auto c = small_config();
  c.models = {ModelKind::Gcn};
  c.variants = {VariantKind::Sbm};
  const auto ds = prepare_dataset(c);
  const auto study = run_ablation_study(ds, c);
  const auto sweep = run_perturbation_sweep(ds, c, {0.0, 0.2});
  ASSERT_EQ(sweep.size(), 2u);
  std::vector<double> acc;
  for (const auto& r : study.records) acc.push_back(r.accuracy);
  EXPECT_EQ(sweep[0].u_mean, study.uncertainty[0].mean);
  EXPECT_EQ(sweep[0].u_std, study.uncertainty[0].std);
  EXPECT_EQ(sweep[0].accuracy_mean, mean(acc));
  EXPECT_EQ(sweep[0].accuracy_std, stddev(acc));
  EXPECT_EQ(sweep[0].u_samples, c.n_graph_seeds * c.n_splits);
  EXPECT_EQ(sweep[0].accuracy_samples, c.n_graph_seeds * c.n_splits * c.n_inits);
  EXPECT_EQ(sweep[0].planted_u_mean, sweep[0].u_mean);
}

TEST(Sweep, ErrorsAreTagged) {
  const auto c = small_config();
  const auto ds = prepare_dataset(c);
  try {
    run_perturbation_sweep(ds, c, {0.02});  // selects a single node
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("[variant=sbm graph_seed=0]"), std::string::npos) << e.what();
  }
  EXPECT_THROW(run_perturbation_sweep(ds, c, {0.5, 0.1}), Error);
  EXPECT_THROW(run_perturbation_sweep(ds, c, {1.5}), Error);
}

TEST(Prepare, RareLabelsThenLargestComponent) {
  auto c = small_config();
  c.synthetic->p_in = 0.04;
  c.synthetic->p_out = 0.04;
  c.train_per_class = 2;
  c.val_per_class = 2;
  const auto ds = prepare_dataset(c);
  EXPECT_EQ(connected_components(ds.graph).size(), 1u);
  EXPECT_LT(ds.num_nodes(), 60u);
  c.keep_top_k_components = 0;
  EXPECT_EQ(prepare_dataset(c).num_nodes(), 60u);
}
