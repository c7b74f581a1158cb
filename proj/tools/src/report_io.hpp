#pragma once

// Serialization of study outputs: structured JSON report, CSV tables and a
// matplotlib plot script. Formats are documented in docs/formats.md.

#include <string>
#include <vector>

#include <json.hpp>

#include <topeig/asymptotics.hpp>

namespace topeig::cli {

inline constexpr const char* kReportSchema = "topeig-report/1";
inline constexpr int kRecordsCsvVersion = 1;
inline constexpr int kModelCsvVersion = 1;

nlohmann::json report_to_json(const StudyReport& report, std::uint64_t seed);
/// Inverse of report_to_json (eigenvectors are not part of the report).
StudyReport report_from_json(const nlohmann::json& j);

std::string records_csv(const StudyReport& report);

struct ModelRow {
  int n = 1;
  double mu = 0.0;
  double residual = 0.0;
  int grid_n = 0;
  double grid_l = 0.0;
  std::string mode;
};
std::string model_csv(const std::vector<ModelRow>& rows);

/// Python script drawing scaled_gap against alpha per n with mu_n reference lines.
std::string plot_script(const StudyReport& report, const std::string& records_csv_name);

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace topeig::cli
