#include "qbm_cli/output.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace qbm::cli {

std::string format_real(double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i > 0) body_ += ',';
    body_ += header_[i];
  }
  body_ += '\n';
}

CsvTable& CsvTable::cell(double x) {
  pending_.push_back(format_real(x));
  return *this;
}

CsvTable& CsvTable::cell(long long x) {
  pending_.push_back(std::to_string(x));
  return *this;
}

CsvTable& CsvTable::cell(bool x) {
  pending_.emplace_back(x ? "true" : "false");
  return *this;
}

CsvTable& CsvTable::cell(std::string_view text) {
  pending_.emplace_back(text);
  return *this;
}

void CsvTable::end_row() {
  if (pending_.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match the header");
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    if (i > 0) body_ += ',';
    body_ += pending_[i];
  }
  body_ += '\n';
  pending_.clear();
}

std::string CsvTable::str() const { return body_; }

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace qbm::cli
