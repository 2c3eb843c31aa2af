#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace loggrowth::csv {

/// Shortest round-trippable-enough text for a double ("%.12g"); NaN becomes empty.
std::string num(double x);
std::string num(std::size_t x);

/// RFC-4180 table with '#' comment lines before the header.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void comment(std::string line) { comments_.push_back(std::move(line)); }
  void add_row(std::vector<std::string> row);
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace loggrowth::csv
