#include "commgnn/error.hpp"
#include "commgnn/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace commgnn;

namespace {

StudyReport sample_report() {
  StudyReport r;
  r.config = nlohmann::json::parse(R"({"synthetic": {"seed": 4}, "n_splits": 2, "note": [1, 2.5]})");
  r.resolved_config = {{"seed", 18446744073709551615ULL}};
  r.dataset = {120, 931, 0.13039215686274508, 2, 16, 1};
  const double accs[] = {0.1 + 0.2, 1.0 / 3.0, std::nextafter(0.7, 1.0), 5e-324, 1.0, 0.0};
  int k = 0;
  for (auto v : {VariantKind::Original, VariantKind::Cm}) {
    for (auto m : {ModelKind::LogReg, ModelKind::Gcn, ModelKind::Sgc}) {
      r.records.push_back({m, v, static_cast<std::size_t>(k % 2), 1, 2, accs[k]});
      ++k;
    }
  }
  r.uncertainty.push_back({VariantKind::Original, 0.6914, 0.0123456789012345, {0.7, 0.6828}, 7.25});
  BaselineComparison c{ModelKind::Gcn, VariantKind::Cm, {}, 2.8e-17, 0.5, 0.514285714285714, true};
  c.test = {12.5, 887.5, 1.4e-17, UTestMethod::NormalApprox, 30, 30};
  r.comparisons.push_back(c);
  SweepRow s;
  s.fraction = 0.1;
  s.u_mean = 0.605509162682056;
  s.u_std = 0.11776707325028579;
  s.accuracy_mean = 2.0 / 3.0;
  s.u_samples = 50;
  s.accuracy_samples = 150;
  r.sweep = std::vector<SweepRow>{s};
  r.verdict = {Decision::GnnApplicableAfterSweep, 0.50000000000000011, -0.54321, "line"};
  return r;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST(Report, JsonRoundTripIsBitExact) {
  const auto r = sample_report();
  const auto dir = fresh_dir("commgnn_report_rt");
  emit_report(r, dir);
  const auto back = load_report(dir / "report.json");
  EXPECT_EQ(back.schema_version, StudyReport::kSchemaVersion);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(back.resolved_config, r.resolved_config);
  EXPECT_EQ(back.dataset.density, r.dataset.density);
  ASSERT_EQ(back.records.size(), r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_EQ(back.records[i].accuracy, r.records[i].accuracy);
    EXPECT_EQ(back.records[i].model, r.records[i].model);
    EXPECT_EQ(back.records[i].variant, r.records[i].variant);
    EXPECT_EQ(back.records[i].graph_seed, r.records[i].graph_seed);
  }
  EXPECT_EQ(back.uncertainty[0].std, r.uncertainty[0].std);
  EXPECT_EQ(back.uncertainty[0].values, r.uncertainty[0].values);
  EXPECT_EQ(back.comparisons[0].test.p_value, r.comparisons[0].test.p_value);
  EXPECT_EQ(back.comparisons[0].adjusted_p, r.comparisons[0].adjusted_p);
  EXPECT_EQ(back.comparisons[0].test.method, UTestMethod::NormalApprox);
  EXPECT_EQ(back.sweep->at(0).u_std, r.sweep->at(0).u_std);
  EXPECT_EQ(back.sweep->at(0).accuracy_mean, r.sweep->at(0).accuracy_mean);
  EXPECT_EQ(back.verdict.decision, r.verdict.decision);
  EXPECT_EQ(back.verdict.u_original, r.verdict.u_original);
  EXPECT_EQ(back.verdict.sweep_slope, r.verdict.sweep_slope);
  // Serializing the reloaded report reproduces the document.
  EXPECT_EQ(report_to_json(back), report_to_json(r));
  std::filesystem::remove_all(dir);
}

TEST(Report, CsvRowsMatchRecords) {
  const auto r = sample_report();
  const auto dir = fresh_dir("commgnn_report_csv");
  const auto written = emit_report(r, dir);
  EXPECT_EQ(written.size(), 3u);
  EXPECT_EQ(count_lines(dir / "accuracies.csv"), r.records.size() + 1);
  EXPECT_EQ(count_lines(dir / "sweep.csv"), 2u);
  std::ifstream in(dir / "accuracies.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "model,variant,graph_seed,split,init,accuracy");
  EXPECT_EQ(first, "logreg,original,0,1,2,0.30000000000000004");
  std::filesystem::remove_all(dir);
}

TEST(Report, EmptyRecordsStillValid) {
  StudyReport r;
  const auto j = report_to_json(r);
  EXPECT_TRUE(j.at("records").is_array());
  EXPECT_TRUE(j.at("records").empty());
  EXPECT_TRUE(j.at("sweep").is_null());
  EXPECT_EQ(j.at("schema_version"), 1);
  const auto dir = fresh_dir("commgnn_report_empty");
  const auto written = emit_report(r, dir);
  EXPECT_EQ(written.size(), 2u);
  EXPECT_EQ(count_lines(dir / "accuracies.csv"), 1u);
  EXPECT_NO_THROW(load_report(dir / "report.json"));
  std::filesystem::remove_all(dir);
}

TEST(Report, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 0.5, 0.0, 123456789.125}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Report, RejectsWrongSchema) {
  auto j = report_to_json(sample_report());
  j["schema_version"] = 99;
  EXPECT_THROW(report_from_json(j), Error);
  j = report_to_json(sample_report());
  j.erase("records");
  EXPECT_THROW(report_from_json(j), Error);
}

TEST(Report, FormatsCanBeSelected) {
  const auto dir = fresh_dir("commgnn_report_fmt");
  const auto written = emit_report(sample_report(), dir, ReportFormats{true, false});
  ASSERT_EQ(written.size(), 1u);
  EXPECT_EQ(written[0].filename(), "report.json");
  std::filesystem::remove_all(dir);
}
