#include "loggrowth/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "loggrowth/error.hpp"

namespace loggrowth::csv {

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += quote(fields[i]);
  }
  out += "\r\n";
}

}  // namespace

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string num(std::size_t x) { return std::to_string(x); }

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns_.size()) {
    throw Error("csv: row has " + std::to_string(row.size()) + " fields, header has " +
                std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string Table::str() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\r\n";
  append_line(out, columns_);
  for (const auto& r : rows_) append_line(out, r);
  return out;
}

void Table::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << str();
  if (!f) throw Error("write failed for " + path.string());
}

}  // namespace loggrowth::csv
