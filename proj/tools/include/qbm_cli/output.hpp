#pragma once

// CSV/JSON emission with round-trip-exact numbers.

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qbm::cli {

/// printf "%.17g".
std::string format_real(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& cell(double x);
  CsvTable& cell(long long x);
  CsvTable& cell(bool x);
  CsvTable& cell(std::string_view text);
  /// Throws std::logic_error when the row is shorter or longer than the header.
  void end_row();

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> pending_;
  std::string body_;
};

/// Writes to `path`, or to `fallback` when the path is empty.
void write_text(const std::string& path, const std::string& text, std::ostream& fallback);

std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace qbm::cli
