#include "predinfer/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "predinfer/errors.hpp"

namespace predinfer::csv {

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

std::size_t column_index(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw IoError("csv: no column named '" + name + "'");
  return static_cast<std::size_t>(it - t.columns.begin());
}

}  // namespace

bool Table::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

Eigen::VectorXd Table::column(const std::string& name) const {
  const std::size_t idx = column_index(*this, name);
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string& field = rows[i][idx];
    char* end = nullptr;
    out[static_cast<Eigen::Index>(i)] = std::strtod(field.c_str(), &end);
    if (end == field.c_str()) {
      throw IoError("csv: column '" + name + "' row " + std::to_string(i + 1) +
                    ": cannot parse '" + field + "' as a number");
    }
  }
  return out;
}

std::vector<std::string> Table::text_column(const std::string& name) const {
  const std::size_t idx = column_index(*this, name);
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream iss(line);
  while (std::getline(iss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    fields.push_back(field.substr(start));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  t.columns = split_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (fields.size() != t.columns.size()) {
      throw IoError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                    std::to_string(t.columns.size()) + " fields, got " +
                    std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

}  // namespace predinfer::csv
