#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "grasstensor/io_util.hpp"
#include "grasstensor/linalg.hpp"
#include "grasstensor/solvers.hpp"

namespace gt {

namespace detail {

inline double parse_csv_number(const std::string& cell, const std::string& where, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw std::runtime_error(where + ":" + std::to_string(line) + ": not a number: '" + cell + "'");
  }
  while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
  if (used != cell.size())
    throw std::runtime_error(where + ":" + std::to_string(line) + ": trailing characters in '" + cell + "'");
  return v;
}

}  // namespace detail

// Numeric CSV: comma separated, one matrix row per line; blank lines and
// lines starting with '#' are skipped.  Errors carry file:line context.
inline MatX<double> read_csv_matrix(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(detail::parse_csv_number(cell, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(rows.front().size()) + " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  MatX<double> m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline std::vector<VecX<double>> read_csv_points(const std::string& path) {
  const MatX<double> m = read_csv_matrix(path);
  std::vector<VecX<double>> pts;
  pts.reserve(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) pts.push_back(m.row(i).transpose());
  return pts;
}

inline std::string matrix_to_csv(const MatX<double>& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      out += format_double(m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

inline void write_csv_matrix(const std::string& path, const MatX<double>& m) { atomic_write_file(path, matrix_to_csv(m)); }

inline std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iter,rho,relgrad,alpha,millis\n";
  for (const auto& row : trace) {
    out += std::to_string(row.iter);
    out.push_back(',');
    out += format_double(row.rho);
    out.push_back(',');
    out += format_double(row.relgrad);
    out.push_back(',');
    out += format_double(row.alpha);
    out.push_back(',');
    out += std::to_string(row.millis);
    out.push_back('\n');
  }
  return out;
}

inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  atomic_write_file(path, trace_to_csv(trace));
}

}  // namespace gt
