#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sindy/dense.hpp"
#include "sindy/dictionary.hpp"
#include "sindy/dynamics.hpp"
#include "sindy/errors.hpp"

namespace sindy {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view field, const std::string& file, std::size_t row,
                           std::size_t col) {
  double v = 0.0;
  // from_chars accepts no leading whitespace; trim both ends.
  std::size_t b = field.find_first_not_of(" \t\r");
  std::size_t e = field.find_last_not_of(" \t\r");
  if (b == std::string_view::npos) throw ParseError(file, row, col, "empty field");
  field = field.substr(b, e - b + 1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(file, row, col, "not a number: '" + std::string(field) + "'");
  return v;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline std::vector<std::vector<double>> read_numeric_rows(const std::filesystem::path& path,
                                                          bool skip_header) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (skip_header && lineno == 1) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(parse_double(fields[c], path.string(), lineno, c + 1));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path.string(), lineno, 1,
                       "inconsistent column count (" + std::to_string(row.size()) + " vs " +
                           std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string(), 0, 0, "no data rows");
  return rows;
}

}  // namespace detail

inline DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  const auto rows = detail::read_numeric_rows(path, /*skip_header=*/false);
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream out(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

/// One value per line (a single CSV column).
inline DenseVector read_vector_csv(const std::filesystem::path& path) {
  const auto rows = detail::read_numeric_rows(path, /*skip_header=*/false);
  DenseVector v;
  v.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1)
      throw ParseError(path.string(), i + 1, 2, "expected a single column");
    v.push_back(rows[i][0]);
  }
  return v;
}

inline void write_vector_csv(const std::filesystem::path& path, const DenseVector& v) {
  std::ofstream out(path);
  for (double x : v) out << format_double(x) << '\n';
}

/// Header "t,u1,...,ud", one row per sample, full round-trip precision.
inline void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts) {
  std::ofstream out(path);
  out << 't';
  for (std::size_t j = 0; j < ts.dim(); ++j) out << ",u" << (j + 1);
  out << '\n';
  for (std::size_t k = 0; k < ts.samples(); ++k) {
    out << format_double(ts.time(k));
    for (std::size_t j = 0; j < ts.dim(); ++j) out << ',' << format_double(ts.states(k, j));
    out << '\n';
  }
}

inline TimeSeries read_timeseries_csv(const std::filesystem::path& path) {
  const auto rows = detail::read_numeric_rows(path, /*skip_header=*/true);
  if (rows.size() < 2) throw ParseError(path.string(), 0, 0, "need at least 2 samples");
  if (rows.front().size() < 2) throw ParseError(path.string(), 2, 1, "need a time column and a state column");
  const std::size_t d = rows.front().size() - 1;
  DenseMatrix states(rows.size(), d);
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t j = 0; j < d; ++j) states(k, j) = rows[k][j + 1];
  const double t0 = rows.front()[0];
  const double h = rows[1][0] - t0;
  return TimeSeries(t0, h, std::move(states));
}

/// Coefficient table, one row per dictionary term, one column per equation.
inline void write_coefficient_table_csv(const std::filesystem::path& path,
                                        const std::vector<TermLabel>& labels,
                                        const DenseMatrix& coefficients) {
  if (labels.size() != coefficients.rows())
    throw DimensionError("write_coefficient_table_csv: label/row mismatch");
  std::ofstream out(path);
  out << "term";
  for (std::size_t eq = 0; eq < coefficients.cols(); ++eq) out << ",du" << (eq + 1);
  out << '\n';
  for (std::size_t j = 0; j < labels.size(); ++j) {
    out << to_string(labels[j]);
    for (std::size_t eq = 0; eq < coefficients.cols(); ++eq)
      out << ',' << format_double(coefficients(j, eq));
    out << '\n';
  }
}

}  // namespace sindy
