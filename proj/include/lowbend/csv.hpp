#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace lowbend {

/// Comma-separated table with a header row. Numbers are written with 17
/// significant digits so values round-trip exactly.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  /// Mixed row; cells are written verbatim.
  void row_text(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace lowbend
