#include "commgnn/report.hpp"

#include "commgnn/error.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace commgnn {
namespace {

using nlohmann::json;

template <typename Enum, typename Parse>
Enum enum_from(const json& j, Parse parse, const char* what) {
  const auto name = j.get<std::string>();
  const auto e = parse(name);
  if (!e) throw Error(std::string("report: unknown ") + what + " '" + name + "'");
  return *e;
}

std::optional<UTestMethod> parse_method(std::string_view s) {
  if (s == to_string(UTestMethod::Exact)) return UTestMethod::Exact;
  if (s == to_string(UTestMethod::NormalApprox)) return UTestMethod::NormalApprox;
  return std::nullopt;
}

json sweep_row_json(const SweepRow& r) {
  return {{"fraction", r.fraction},
          {"u_mean", r.u_mean},
          {"u_std", r.u_std},
          {"planted_u_mean", r.planted_u_mean},
          {"planted_u_std", r.planted_u_std},
          {"accuracy_mean", r.accuracy_mean},
          {"accuracy_std", r.accuracy_std},
          {"u_samples", r.u_samples},
          {"accuracy_samples", r.accuracy_samples}};
}

SweepRow sweep_row_from(const json& j) {
  SweepRow r;
  r.fraction = j.at("fraction").get<double>();
  r.u_mean = j.at("u_mean").get<double>();
  r.u_std = j.at("u_std").get<double>();
  r.planted_u_mean = j.at("planted_u_mean").get<double>();
  r.planted_u_std = j.at("planted_u_std").get<double>();
  r.accuracy_mean = j.at("accuracy_mean").get<double>();
  r.accuracy_std = j.at("accuracy_std").get<double>();
  r.u_samples = j.at("u_samples").get<std::size_t>();
  r.accuracy_samples = j.at("accuracy_samples").get<std::size_t>();
  return r;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

void check(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("error writing '" + path.string() + "'");
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf, end);
}

json report_to_json(const StudyReport& report) {
  json j;
  j["schema_version"] = report.schema_version;
  j["config"] = report.config;
  j["resolved_config"] = report.resolved_config;
  const auto& d = report.dataset;
  j["dataset"] = {{"nodes", d.nodes},       {"edges", d.edges},       {"density", d.density},
                  {"classes", d.classes},   {"features", d.features}, {"components", d.components}};

  j["records"] = json::array();
  for (const auto& r : report.records) {
    j["records"].push_back({{"model", to_string(r.model)},
                            {"variant", to_string(r.variant)},
                            {"graph_seed", r.graph_seed},
                            {"split", r.split},
                            {"init", r.init},
                            {"accuracy", r.accuracy}});
  }
  j["uncertainty"] = json::array();
  for (const auto& u : report.uncertainty) {
    j["uncertainty"].push_back({{"variant", to_string(u.variant)},
                                {"mean", u.mean},
                                {"std", u.std},
                                {"values", u.values},
                                {"mean_communities", u.mean_communities}});
  }
  j["tests"] = json::array();
  for (const auto& c : report.comparisons) {
    j["tests"].push_back({{"model", to_string(c.model)},
                          {"variant", to_string(c.variant)},
                          {"baseline", "logreg/original"},
                          {"u_statistic", c.test.u_statistic},
                          {"u_a", c.test.u_a},
                          {"p_value", c.test.p_value},
                          {"method", to_string(c.test.method)},
                          {"n_a", c.test.n_a},
                          {"n_b", c.test.n_b},
                          {"adjusted_p", c.adjusted_p},
                          {"model_median", c.model_median},
                          {"baseline_median", c.baseline_median},
                          {"model_significantly_better", c.model_significantly_better}});
  }
  if (report.sweep) {
    j["sweep"] = json::array();
    for (const auto& r : *report.sweep) j["sweep"].push_back(sweep_row_json(r));
  } else {
    j["sweep"] = nullptr;
  }
  const auto& v = report.verdict;
  j["verdict"] = {{"decision", to_string(v.decision)},
                  {"u_original", v.u_original},
                  {"sweep_slope", v.sweep_slope ? json(*v.sweep_slope) : json(nullptr)},
                  {"justification", v.justification}};
  return j;
}

StudyReport report_from_json(const json& j) {
  try {
    StudyReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != StudyReport::kSchemaVersion) {
      throw Error("report: unsupported schema_version " + std::to_string(r.schema_version));
    }
    r.config = j.at("config");
    r.resolved_config = j.at("resolved_config");
    const auto& d = j.at("dataset");
    r.dataset = {d.at("nodes").get<std::size_t>(),   d.at("edges").get<std::size_t>(),
                 d.at("density").get<double>(),      d.at("classes").get<std::size_t>(),
                 d.at("features").get<std::size_t>(), d.at("components").get<std::size_t>()};
    for (const auto& e : j.at("records")) {
      r.records.push_back({enum_from<ModelKind>(e.at("model"), parse_model, "model"),
                           enum_from<VariantKind>(e.at("variant"), parse_variant, "variant"),
                           e.at("graph_seed").get<std::size_t>(), e.at("split").get<std::size_t>(),
                           e.at("init").get<std::size_t>(), e.at("accuracy").get<double>()});
    }
    for (const auto& e : j.at("uncertainty")) {
      r.uncertainty.push_back({enum_from<VariantKind>(e.at("variant"), parse_variant, "variant"),
                               e.at("mean").get<double>(), e.at("std").get<double>(),
                               e.at("values").get<std::vector<double>>(), e.at("mean_communities").get<double>()});
    }
    for (const auto& e : j.at("tests")) {
      BaselineComparison c{enum_from<ModelKind>(e.at("model"), parse_model, "model"),
                           enum_from<VariantKind>(e.at("variant"), parse_variant, "variant"),
                           {},
                           e.at("adjusted_p").get<double>(),
                           e.at("model_median").get<double>(),
                           e.at("baseline_median").get<double>(),
                           e.at("model_significantly_better").get<bool>()};
      c.test.u_statistic = e.at("u_statistic").get<double>();
      c.test.u_a = e.at("u_a").get<double>();
      c.test.p_value = e.at("p_value").get<double>();
      c.test.method = enum_from<UTestMethod>(e.at("method"), parse_method, "test method");
      c.test.n_a = e.at("n_a").get<std::size_t>();
      c.test.n_b = e.at("n_b").get<std::size_t>();
      r.comparisons.push_back(c);
    }
    if (!j.at("sweep").is_null()) {
      r.sweep.emplace();
      for (const auto& e : j.at("sweep")) r.sweep->push_back(sweep_row_from(e));
    }
    const auto& v = j.at("verdict");
    r.verdict.decision = enum_from<Decision>(v.at("decision"), parse_decision, "decision");
    r.verdict.u_original = v.at("u_original").get<double>();
    if (!v.at("sweep_slope").is_null()) r.verdict.sweep_slope = v.at("sweep_slope").get<double>();
    r.verdict.justification = v.at("justification").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("report: malformed document: ") + e.what());
  }
}

void write_accuracies_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "model,variant,graph_seed,split,init,accuracy\n";
  for (const auto& r : records) {
    out << to_string(r.model) << ',' << to_string(r.variant) << ',' << r.graph_seed << ',' << r.split << ','
        << r.init << ',' << format_double(r.accuracy) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "fraction,u_mean,u_std,planted_u_mean,planted_u_std,gcn_accuracy_mean,gcn_accuracy_std,u_samples,"
         "accuracy_samples\n";
  for (const auto& r : rows) {
    out << format_double(r.fraction) << ',' << format_double(r.u_mean) << ',' << format_double(r.u_std) << ','
        << format_double(r.planted_u_mean) << ',' << format_double(r.planted_u_std) << ','
        << format_double(r.accuracy_mean) << ',' << format_double(r.accuracy_std) << ',' << r.u_samples << ','
        << r.accuracy_samples << '\n';
  }
}

std::vector<std::filesystem::path> emit_report(const StudyReport& report, const std::filesystem::path& out_dir,
                                               ReportFormats formats) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create '" + out_dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  if (formats.json) {
    const auto path = out_dir / "report.json";
    auto out = open_out(path);
    out << report_to_json(report).dump(2) << '\n';
    check(out, path);
    written.push_back(path);
  }
  if (formats.csv) {
    const auto path = out_dir / "accuracies.csv";
    auto out = open_out(path);
    write_accuracies_csv(out, report.records);
    check(out, path);
    written.push_back(path);
    if (report.sweep) {
      const auto spath = out_dir / "sweep.csv";
      auto sout = open_out(spath);
      write_sweep_csv(sout, *report.sweep);
      check(sout, spath);
      written.push_back(spath);
    }
  }
  return written;
}

StudyReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return report_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

}  // namespace commgnn
