#pragma once

#include "commgnn/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace commgnn {

struct ReportFormats {
  bool json = true;
  bool csv = true;
};

nlohmann::json report_to_json(const StudyReport& report);
/// Inverse of report_to_json; numbers round-trip exactly.
StudyReport report_from_json(const nlohmann::json& doc);

/// Header `model,variant,graph_seed,split,init,accuracy`, one row per record,
/// accuracies in shortest round-trip form.
void write_accuracies_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Writes report.json, accuracies.csv and (when a sweep is present) sweep.csv
/// into out_dir, creating it if needed. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const StudyReport& report, const std::filesystem::path& out_dir,
                                               ReportFormats formats = {});

StudyReport load_report(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace commgnn
