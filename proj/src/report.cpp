#include "fouest/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace fouest {

std::string num_to_string(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<std::filesystem::path> ReportBundle::write(
    const std::filesystem::path& out_dir) const {
  std::filesystem::create_directories(out_dir);
  const auto json_path = out_dir / (command + "_report.json");
  const auto csv_path = out_dir / (command + "_series.csv");
  {
    std::ofstream os(json_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + json_path.string());
    os << report.dump(2) << '\n';
  }
  {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + csv_path.string());
    for (std::size_t c = 0; c < series.header.size(); ++c) {
      // RFC 4180: quote fields containing separators or quotes
      std::string field = series.header[c];
      if (field.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (const char ch : field) {
          if (ch == '"') quoted += '"';
          quoted += ch;
        }
        quoted += '"';
        field = quoted;
      }
      os << field << (c + 1 < series.header.size() ? "," : "");
    }
    os << "\r\n";
    for (const auto& row : series.rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        os << num_to_string(row[c]) << (c + 1 < row.size() ? "," : "");
      os << "\r\n";
    }
  }
  return {json_path, csv_path};
}

}  // namespace fouest
