#include "admitforge/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "admitforge/error.hpp"

namespace admitforge {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& cell, const std::string& where) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", where, cell));
  }
  return value;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError(fmt::format("{}: missing column '{}'", source, name));
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::at(std::size_t row, const std::string& column) const {
  return data.at(row).at(column_index(column));
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& r : data) out.push_back(r[c]);
  return out;
}

void CsvTable::require_columns(const std::vector<std::string>& names) const {
  for (const auto& n : names) column_index(n);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
  CsvTable table;
  table.source = path.string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ConfigError(fmt::format("{}:{}: expected {} columns, found {}", table.source, line_no,
                                    table.header.size(), cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    const std::string where = fmt::format("{}:{}", table.source, line_no);
    for (const auto& c : cells) row.push_back(parse_number(c, where));
    table.data.push_back(std::move(row));
  }
  if (table.header.empty()) throw ConfigError(fmt::format("{}: no header row", table.source));
  return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, int significant_digits) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  fmt::memory_buffer buf;
  for (const auto& c : comments) fmt::format_to(std::back_inserter(buf), "# {}\n", c);
  for (std::size_t i = 0; i < header.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{}{}", i ? "," : "", header[i]);
  }
  buf.push_back('\n');
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      fmt::format_to(std::back_inserter(buf), "{}{:.{}g}", i ? "," : "", r[i], significant_digits);
    }
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace admitforge
