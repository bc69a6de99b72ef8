#include "ringctl/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ringctl/errors.hpp"

namespace ringctl {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != 0) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

std::string CsvWriter::format(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_) throw IoError("csv: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out_ += ',';
    out_ += format(values[i]);
  }
  out_ += '\n';
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& values) {
  if (values.size() != columns_) throw IoError("csv: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out_ += ',';
    out_ += values[i];
  }
  out_ += '\n';
}

std::string CsvWriter::str() const { return out_; }

void CsvWriter::write(const std::filesystem::path& file) const {
  write_text_file(file, out_);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw IoError("csv: missing column " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(c)]);
  return out;
}

namespace {
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}
}  // namespace

CsvTable read_csv(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      table.header = split_line(line);
      first = false;
      continue;
    }
    const auto parts = split_line(line);
    std::vector<double> row;
    row.reserve(parts.size());
    for (const auto& p : parts) {
      if (p == "nan") {
        row.push_back(std::nan(""));
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
      if (res.ec != std::errc() || res.ptr != p.data() + p.size()) {
        throw IoError("csv: bad number '" + p + "' in " + file.string());
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out << text;
  if (!out) throw IoError("write failed: " + file.string());
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ringctl
