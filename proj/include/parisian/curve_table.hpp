#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace parisian {

/// Sampled curve for CSV output: numeric columns, an optional text `method`
/// column, and `# key=value` metadata lines.
struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> methods;  ///< empty, or one label per row
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<double> values, std::string method = {});
  void add_meta(std::string key, std::string value);
  [[nodiscard]] std::size_t column(const std::string& name) const;

  /// Writes metadata, header and rows; numbers use 17 significant digits.
  void write_csv(std::ostream& os) const;
};

/// 17-significant-digit text form.
[[nodiscard]] std::string format_number(double v);

}  // namespace parisian
