#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace blab {

/// Shortest round-trip form of a double ("%.17g"); non-finite values print as
/// nan / inf / -inf.
std::string format_number(double v);

/// RFC-4180 table: comma separated, CRLF line ends, fields quoted only when
/// they contain a comma, quote, CR or LF.
class CsvTable {
 public:
  using Cell = std::variant<std::string, double, long long>;

  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  void write(std::ostream& out) const;
  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace blab
