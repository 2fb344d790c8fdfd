#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oisma/errors.hpp"

namespace oisma {

/// Dense row-major matrix of doubles.
class MatrixReal {
 public:
  MatrixReal() = default;
  MatrixReal(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static MatrixReal identity(std::size_t n) {
    MatrixReal m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static MatrixReal from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    MatrixReal m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw DimensionError("ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const MatrixReal&, const MatrixReal&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// CSV: first line `<rows>,<cols>`, then one comma-separated line per row.
inline std::string to_csv(const MatrixReal& m) {
  std::ostringstream out;
  out.precision(17);
  out << m.rows() << ',' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  return out.str();
}

inline MatrixReal matrix_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    return fields;
  };
  auto to_double = [](const std::string& f) {
    try {
      std::size_t used = 0;
      const double v = std::stod(f, &used);
      if (f.find_first_not_of(" \t", used) != std::string::npos) throw ParseError("bad number '" + f + "'");
      return v;
    } catch (const std::logic_error&) {
      throw ParseError("bad number '" + f + "'");
    }
  };
  if (!next_line()) throw ParseError("empty matrix CSV");
  const auto header = split(line);
  if (header.size() != 2) throw ParseError("matrix CSV header must be '<rows>,<cols>'");
  const double r = to_double(header[0]), c = to_double(header[1]);
  if (r < 1 || c < 1 || r != std::floor(r) || c != std::floor(c)) {
    throw ParseError("matrix CSV header dimensions must be positive integers");
  }
  MatrixReal m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (!next_line()) throw ParseError("matrix CSV has fewer rows than its header states");
    const auto fields = split(line);
    if (fields.size() != m.cols()) {
      throw ParseError("matrix CSV row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                       " values, expected " + std::to_string(m.cols()));
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      m(i, j) = to_double(fields[j]);
      if (!std::isfinite(m(i, j))) throw ParseError("non-finite matrix element");
    }
  }
  if (next_line()) throw ParseError("matrix CSV has more rows than its header states");
  return m;
}

}  // namespace oisma
