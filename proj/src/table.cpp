#include "qwalk/table.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>

namespace qwalk {

std::size_t Table::column_index(const std::string &name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw validation_error("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string &name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &row : rows) out.push_back(row.at(j));
  return out;
}

} // namespace qwalk
