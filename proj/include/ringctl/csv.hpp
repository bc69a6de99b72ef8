#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ringctl {

/// Minimal CSV writer: shortest round-trip number formatting (parsing the
/// text back reproduces the doubles bit-exactly), '\n' line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row_mixed(const std::vector<std::string>& values);
  std::string str() const;
  void write(const std::filesystem::path& file) const;

  static std::string format(double v);

 private:
  std::string out_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
  std::vector<double> column_values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& file);

void write_text_file(const std::filesystem::path& file, const std::string& text);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace ringctl
