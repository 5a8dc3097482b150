#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace predinfer::csv {

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool has_column(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const;  // IoError if missing or non-numeric
  std::vector<std::string> text_column(const std::string& name) const;
  std::size_t n_rows() const { return rows.size(); }
};

Table read_table(const std::string& path);

}  // namespace predinfer::csv
