#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace admitforge {

/// Numeric CSV with a header row. Lines starting with '#' are metadata and are
/// kept verbatim (without the leading '#') in `comments`.
class CsvTable {
 public:
  std::vector<std::string> header;
  std::vector<std::vector<double>> data;
  std::vector<std::string> comments;

  std::size_t rows() const { return data.size(); }
  std::size_t column_index(const std::string& name) const;
  double at(std::size_t row, const std::string& column) const;
  std::vector<double> column(const std::string& name) const;
  void require_columns(const std::vector<std::string>& names) const;

  std::string source;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Writes comments (each prefixed "# "), the header, then rows formatted with
/// "{:.17g}" so files round-trip bit-exactly. Bulky time-series logs may pass
/// fewer significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, int significant_digits = 17);

}  // namespace admitforge
