#include "dreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "dreg/errors.hpp"

namespace dreg {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

Eigen::Index CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return static_cast<Eigen::Index>(k);
  }
  fail(ErrorKind::InvalidArgument, "column '" + name + "' not found in CSV header");
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) fail(ErrorKind::InvalidArgument, source + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  table.header = split(line);
  std::set<std::string> seen;
  for (const auto& h : table.header) {
    if (h.empty()) fail(ErrorKind::InvalidArgument, where(source, line_no) + "empty column name");
    if (!seen.insert(h).second) {
      fail(ErrorKind::InvalidArgument, where(source, line_no) + "duplicate column '" + h + "'");
    }
  }

  const std::size_t cols = table.header.size();
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols) {
      fail(ErrorKind::InvalidArgument, where(source, line_no) + "expected " + std::to_string(cols) +
                                           " fields, found " + std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < cols; ++k) {
      const std::string& cell = cells[k];
      if (cell.empty()) {
        fail(ErrorKind::InvalidArgument,
             where(source, line_no) + "missing value in column '" + table.header[k] + "'");
      }
      double v = 0.0;
      const char* begin = cell.data();
      if (*begin == '+') ++begin;
      const auto res = std::from_chars(begin, cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        fail(ErrorKind::InvalidArgument, where(source, line_no) + "column '" + table.header[k] +
                                             "': '" + cell + "' is not a finite number");
      }
      data.push_back(v);
    }
    ++rows;
  }
  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = data[i * cols + k];
    }
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return read_csv(in, path);
}

Dataset dataset_from_table(const CsvTable& table, const ColumnRoles& roles) {
  if (roles.d_columns.empty()) fail(ErrorKind::InvalidConfiguration, "no target (d) columns given");
  std::set<std::string> used{roles.response};
  const Eigen::Index yc = table.column(roles.response);
  auto take = [&](const std::vector<std::string>& names) {
    MatrixXd m(table.values.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
      m.col(static_cast<Eigen::Index>(k)) = table.values.col(table.column(names[k]));
      if (!used.insert(names[k]).second) {
        fail(ErrorKind::InvalidConfiguration, "column '" + names[k] + "' assigned to more than one role");
      }
    }
    return m;
  };
  MatrixXd d = take(roles.d_columns);
  std::vector<std::string> x_names = roles.x_columns;
  if (x_names.empty()) {
    for (const auto& h : table.header) {
      if (!used.count(h)) x_names.push_back(h);
    }
  }
  MatrixXd x = take(x_names);
  return Dataset(table.values.col(yc), std::move(d), std::move(x), roles.d_columns, x_names);
}

}  // namespace dreg
