#pragma once

#include <string>
#include <vector>

namespace qwalk {

/// Rectangular numeric table with named columns; every row has one value per
/// column. NaN marks a value that is undefined for that row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column by name; throws validation_error if absent.
  std::size_t column_index(const std::string &name) const;
  std::vector<double> column(const std::string &name) const;
};

} // namespace qwalk
