#include "parisian/curve_table.hpp"

#include <cstdio>

#include "parisian/errors.hpp"

namespace parisian {

void CurveTable::add_row(std::vector<double> values, std::string method) {
  if (values.size() != columns.size()) throw InvalidArgument("row width does not match the columns");
  if (!method.empty() && methods.size() != rows.size()) throw InvalidArgument("method labels must cover all rows");
  if (method.empty() && !methods.empty()) throw InvalidArgument("method labels must cover all rows");
  rows.push_back(std::move(values));
  if (!method.empty()) methods.push_back(std::move(method));
}

void CurveTable::add_meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }

std::size_t CurveTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument("no column named " + name);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CurveTable::write_csv(std::ostream& os) const {
  for (const auto& [k, v] : metadata) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  if (!methods.empty()) os << ",method";
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < rows[r].size(); ++i) os << (i ? "," : "") << format_number(rows[r][i]);
    if (!methods.empty()) os << ',' << methods[r];
    os << '\n';
  }
}

}  // namespace parisian
