#include "commgnn/error.hpp"
#include "commgnn/harness.hpp"
#include "commgnn/io.hpp"
#include "commgnn/report.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace commgnn;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> keep_top_k;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& default_out) {
  opts.out_dir = default_out;
  cmd->add_option("config", opts.config_path, "Study config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--seed", opts.seed, "Master seed (overrides the config)");
  cmd->add_option("--jobs", opts.jobs, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--keep-top-k-components", opts.keep_top_k, "Keep the K largest components; 0 keeps all");
}

StudyConfig load(const CommonOptions& opts) {
  StudyConfig cfg = load_study_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.jobs) cfg.jobs = *opts.jobs;
  if (opts.keep_top_k) cfg.keep_top_k_components = *opts.keep_top_k;
  cfg.validate();
  return cfg;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw commgnn::Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

nlohmann::json analysis_json(const Analysis& a) {
  const auto& s = a.summary;
  return {{"nodes", s.nodes},
          {"edges", s.edges},
          {"density", s.density},
          {"classes", s.classes},
          {"features", s.features},
          {"components", s.components},
          {"communities", a.partition.num_communities},
          {"modularity", a.modularity},
          {"u_values", a.u_values},
          {"u_mean", a.u_mean},
          {"u_std", a.u_std}};
}

void print_analysis(const Analysis& a) {
  const auto& s = a.summary;
  std::cout << std::left << std::setw(14) << "nodes" << s.nodes << '\n'
            << std::setw(14) << "edges" << s.edges << '\n'
            << std::setw(14) << "density" << std::setprecision(4) << s.density << '\n'
            << std::setw(14) << "classes" << s.classes << '\n'
            << std::setw(14) << "features" << s.features << '\n'
            << std::setw(14) << "components" << s.components << '\n'
            << std::setw(14) << "communities" << a.partition.num_communities << '\n'
            << std::setw(14) << "modularity" << std::setprecision(4) << a.modularity << '\n'
            << std::setw(14) << "U(L|C)" << std::setprecision(4) << a.u_mean << " +/- " << a.u_std << '\n';
}

void print_verdict(const Verdict& v) {
  std::cout << "verdict: " << to_string(v.decision) << '\n' << v.justification << '\n';
}

nlohmann::json verdict_json(const Verdict& v) {
  return {{"decision", to_string(v.decision)},
          {"u_original", v.u_original},
          {"sweep_slope", v.sweep_slope ? nlohmann::json(*v.sweep_slope) : nlohmann::json(nullptr)},
          {"justification", v.justification}};
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    double f = 0.0;
    try {
      f = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw commgnn::Error("--fractions: cannot parse '" + item + "'");
    out.push_back(f);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community/label alignment diagnostics for graph-based node classification"};
  app.require_subcommand(1);

  CommonOptions analyze_opts, ablate_opts, perturb_opts, verdict_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "Preprocessing stats, Louvain partition and U(L|C)");
  add_common(analyze_cmd, analyze_opts, "");
  auto* ablate_cmd = app.add_subcommand("ablate", "Full ablation study; writes report.json and accuracies.csv");
  add_common(ablate_cmd, ablate_opts, "out");
  auto* perturb_cmd = app.add_subcommand("perturb", "Swap-perturbation sweep; writes sweep.csv");
  add_common(perturb_cmd, perturb_opts, "out");
  std::string fractions_text;
  perturb_cmd->add_option("--fractions", fractions_text, "Comma-separated swap fractions (default: from config)");
  auto* verdict_cmd = app.add_subcommand("verdict", "Guideline verdict, running a sweep in the middle band");
  add_common(verdict_cmd, verdict_opts, "");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze_cmd->parsed()) {
      const auto cfg = load(analyze_opts);
      const Dataset ds = prepare_dataset(cfg);
      const Analysis a = analyze(ds, cfg);
      print_analysis(a);
      if (!analyze_opts.out_dir.empty()) {
        std::filesystem::create_directories(analyze_opts.out_dir);
        write_json(std::filesystem::path(analyze_opts.out_dir) / "analysis.json", analysis_json(a));
        std::ofstream part(std::filesystem::path(analyze_opts.out_dir) / "partition.tsv");
        write_partition(part, a.partition, ds.node_tokens);
      }
    } else if (ablate_cmd->parsed()) {
      const auto cfg = load(ablate_opts);
      const StudyReport report = run_ablation_study(cfg);
      for (const auto& p : emit_report(report, ablate_opts.out_dir)) std::cout << "wrote " << p.string() << '\n';
      print_verdict(report.verdict);
    } else if (perturb_cmd->parsed()) {
      const auto cfg = load(perturb_opts);
      const auto fractions = fractions_text.empty() ? cfg.fractions : parse_fractions(fractions_text);
      const auto rows = run_perturbation_sweep(cfg, fractions);
      std::filesystem::create_directories(perturb_opts.out_dir);
      const auto path = std::filesystem::path(perturb_opts.out_dir) / "sweep.csv";
      std::ofstream out(path);
      if (!out) throw commgnn::Error("cannot write '" + path.string() + "'");
      write_sweep_csv(out, rows);
      write_sweep_csv(std::cout, rows);
    } else if (verdict_cmd->parsed()) {
      const auto cfg = load(verdict_opts);
      const Dataset ds = prepare_dataset(cfg);
      const Analysis a = analyze(ds, cfg);
      std::optional<std::vector<SweepRow>> sweep;
      if (a.u_mean >= cfg.thresholds.low && a.u_mean <= cfg.thresholds.high) {
        sweep = run_perturbation_sweep(ds, cfg, cfg.fractions);
      }
      const Verdict v = guideline_verdict(a.u_mean, sweep, cfg.thresholds, cfg.slope_epsilon);
      print_verdict(v);
      if (!verdict_opts.out_dir.empty()) {
        std::filesystem::create_directories(verdict_opts.out_dir);
        auto j = verdict_json(v);
        j["analysis"] = analysis_json(a);
        write_json(std::filesystem::path(verdict_opts.out_dir) / "verdict.json", j);
        if (sweep) {
          std::ofstream out(std::filesystem::path(verdict_opts.out_dir) / "sweep.csv");
          write_sweep_csv(out, *sweep);
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
