#include "blab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "blab/error.hpp"

namespace blab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string render(const CsvTable::Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return escape(*s);
  if (auto d = std::get_if<double>(&c)) return format_number(*d);
  return std::to_string(std::get<long long>(c));
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size())
    throw Error(ErrorKind::InvalidArgument, "CSV row has " + std::to_string(row.size()) + " cells, header has " +
                                                std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
  for (size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << escape(header_[i]);
  out << "\r\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << render(row[i]);
    out << "\r\n";
  }
}

std::string CsvTable::str() const {
  std::ostringstream s;
  write(s);
  return s.str();
}

void CsvTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  write(out);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path);
}

}  // namespace blab
