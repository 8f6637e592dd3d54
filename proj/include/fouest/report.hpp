#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fouest {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Shortest round-trip decimal representation (std::to_chars); used for every
// number written to CSV so the values match the JSON bit for bit.
std::string num_to_string(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Machine-readable bundle of one CLI run: JSON report plus a CSV series.
// Files are byte-identical under identical configs, so no timestamps go in.
struct ReportBundle {
  std::string command;
  nlohmann::json report;  // inputs echoed, values, pass flags, metadata
  CsvTable series;

  // writes <command>_report.json and <command>_series.csv, returns the paths
  std::vector<std::filesystem::path> write(const std::filesystem::path& out_dir) const;
};

}  // namespace fouest
