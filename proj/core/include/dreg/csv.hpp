#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dreg/dataset.hpp"

namespace dreg {

/// A numeric CSV with a header row, stored column-major.
struct CsvTable {
  std::vector<std::string> header;
  MatrixXd values;

  /// Column position of `name`; throws invalid-argument naming the column.
  Eigen::Index column(const std::string& name) const;
};

/// Parses comma-separated numeric data. Errors carry the 1-based line number.
CsvTable read_csv(std::istream& in, const std::string& source = "<stream>");
CsvTable read_csv_file(const std::string& path);

struct ColumnRoles {
  std::string response;
  std::vector<std::string> d_columns;
  /// Empty means every column not used as response or target.
  std::vector<std::string> x_columns;
};

Dataset dataset_from_table(const CsvTable& table, const ColumnRoles& roles);

}  // namespace dreg
