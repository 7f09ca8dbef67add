#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sindy/errors.hpp"

namespace sindy {

using DenseVector = std::vector<double>;

/// Dense real matrix, column-major storage (column j is contiguous).
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) throw DimensionError("DenseMatrix: dimensions must be at least 1x1");
  }

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    if (rows.size() == 0 || rows.begin()->size() == 0)
      throw DimensionError("DenseMatrix::from_rows: empty initializer");
    DenseMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != m.cols_) throw DimensionError("DenseMatrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (double v : r) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) m(j, j) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

/// Strictly increasing set of column indices in [0, n).
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  }

  static SupportSet full(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t j = 0; j < n; ++j) idx[j] = j;
    return SupportSet(std::move(idx));
  }

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  bool contains(std::size_t j) const {
    return std::binary_search(indices_.begin(), indices_.end(), j);
  }

  bool subset_of(const SupportSet& other) const {
    return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(), indices_.end());
  }

  std::size_t max_index() const { return indices_.empty() ? 0 : indices_.back(); }

  const std::vector<std::size_t>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool operator==(const SupportSet&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_squared(std::span<const double> v) { return dot(v, v); }
inline double norm2(std::span<const double> v) { return std::sqrt(norm2_squared(v)); }

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
  if (x.size() != a.cols()) throw DimensionError("matvec: size mismatch");
  DenseVector y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto cj = a.col(j);
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += cj[i] * xj;
  }
  return y;
}

inline DenseVector matvec_transpose(const DenseMatrix& a, const DenseVector& x) {
  if (x.size() != a.rows()) throw DimensionError("matvec_transpose: size mismatch");
  DenseVector y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), std::span<const double>(x));
  return y;
}

/// r = A x - b on the raw (unscaled) system.
inline DenseVector residual(const DenseMatrix& a, const DenseVector& x, const DenseVector& b) {
  DenseVector r = matvec(a, x);
  if (b.size() != r.size()) throw DimensionError("residual: size mismatch");
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline DenseMatrix extract_columns(const DenseMatrix& a, const SupportSet& s) {
  if (s.empty()) throw DimensionError("extract_columns: empty support");
  if (s.max_index() >= a.cols()) throw DimensionError("extract_columns: index out of range");
  DenseMatrix sub(a.rows(), s.size());
  std::size_t k = 0;
  for (std::size_t j : s) {
    auto src = a.col(j);
    auto dst = sub.col(k++);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return sub;
}

/// Expands values on a support into a full n-vector, exact zeros elsewhere.
inline DenseVector scatter(const DenseVector& values, const SupportSet& s, std::size_t n) {
  DenseVector x(n, 0.0);
  std::size_t k = 0;
  for (std::size_t j : s) x[j] = values[k++];
  return x;
}

}  // namespace sindy
