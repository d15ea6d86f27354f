#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kstab/error.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// Dense row-major matrix of exact rationals. Sizes in this library stay
/// tiny (at most (l+1) x (l+1) with l <= 4), so no attempt at blocking.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(const std::vector<Point>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require_same_dim(m.cols_, rows[i].size(), "matrix row");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  /// Matrix whose columns are the given vectors.
  static Matrix from_columns(const std::vector<Point>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      require_same_dim(rows, cols[j].size(), "matrix column");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Point row(std::size_t i) const { return Point(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }

  Point column(std::size_t j) const {
    Point out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  bool is_square() const { return rows_ == cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_dim(a.cols(), b.rows(), "matrix product");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

inline Point operator*(const Matrix& a, const Point& x) {
  require_same_dim(a.cols(), x.size(), "matrix-vector product");
  Point out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
  return out;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

namespace detail {

// Fraction-free (Bareiss) forward elimination with row pivoting on the first
// nonzero entry. Returns the rank; `m` is overwritten by the echelon form and
// `pivots` receives the pivot column of each nonzero row. `sign` tracks row
// swaps for the determinant.
inline std::size_t bareiss_eliminate(Matrix& m, std::vector<std::size_t>& pivots, int& sign) {
  sign = 1;
  pivots.clear();
  Rational prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      for (std::size_t j = c + 1; j < m.cols(); ++j) {
        m(i, j) = (m(r, c) * m(i, j) - m(i, c) * m(r, j)) / prev;
      }
      m(i, c) = 0;
    }
    prev = m(r, c);
    pivots.push_back(c);
    ++r;
  }
  return r;
}

}  // namespace detail

inline std::size_t rank(Matrix m) {
  std::vector<std::size_t> pivots;
  int sign = 1;
  return detail::bareiss_eliminate(m, pivots, sign);
}

inline Rational determinant(Matrix m) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "determinant of a non-square matrix");
  if (m.rows() == 0) return 1;
  std::vector<std::size_t> pivots;
  int sign = 1;
  const auto r = detail::bareiss_eliminate(m, pivots, sign);
  if (r < m.rows()) return 0;
  // Bareiss leaves the determinant in the last pivot, but the columns skipped
  // never arise for a full-rank square matrix, so m(n-1, n-1) is it.
  return sign * m(m.rows() - 1, m.cols() - 1);
}

/// Solves A x = b; returns nullopt when A is singular. A must be square.
inline std::optional<Point> solve(const Matrix& a, const Point& b) {
  if (!a.is_square()) throw Error(ErrorCode::DimensionMismatch, "solve needs a square matrix");
  require_same_dim(a.rows(), b.size(), "solve right-hand side");
  const std::size_t n = a.rows();
  Matrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  std::vector<std::size_t> pivots;
  int sign = 1;
  const auto r = detail::bareiss_eliminate(aug, pivots, sign);
  if (r < n || pivots.back() >= n) return std::nullopt;
  Point x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Rational acc = aug(ii, n);
    for (std::size_t j = ii + 1; j < n; ++j) acc -= aug(ii, j) * x[j];
    x[ii] = acc / aug(ii, ii);
  }
  return x;
}

/// Solves a possibly rectangular system; returns the solution only when it
/// exists and is unique.
inline std::optional<Point> solve_unique(const Matrix& a, const Point& b) {
  require_same_dim(a.rows(), b.size(), "solve right-hand side");
  const std::size_t n = a.cols();
  Matrix aug(a.rows(), n + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  std::vector<std::size_t> pivots;
  int sign = 1;
  const auto r = detail::bareiss_eliminate(aug, pivots, sign);
  if (r != n) return std::nullopt;  // inconsistent (pivot in last column) or underdetermined
  for (std::size_t k = 0; k < r; ++k)
    if (pivots[k] != k) return std::nullopt;
  Point x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Rational acc = aug(ii, n);
    for (std::size_t j = ii + 1; j < n; ++j) acc -= aug(ii, j) * x[j];
    x[ii] = acc / aug(ii, ii);
  }
  return x;
}

/// Basis of the right null space {x : A x = 0}.
inline std::vector<Point> null_space(const Matrix& a) {
  Matrix m = a;
  std::vector<std::size_t> pivots;
  int sign = 1;
  const auto r = detail::bareiss_eliminate(m, pivots, sign);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<Point> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    Point x(a.cols());
    x[free] = 1;
    for (std::size_t k = r; k-- > 0;) {
      const auto c = pivots[k];
      Rational acc = 0;
      for (std::size_t j = c + 1; j < a.cols(); ++j) acc += m(k, j) * x[j];
      x[c] = -acc / m(k, c);
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

inline std::optional<Matrix> inverse(const Matrix& a) {
  if (!a.is_square()) throw Error(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Point e(n);
    e[j] = 1;
    auto col = solve(a, e);
    if (!col) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = (*col)[i];
  }
  return inv;
}

/// Dimension of the affine hull of a point set (-1 for the empty set).
inline long affine_dimension(const std::vector<Point>& pts) {
  if (pts.empty()) return -1;
  std::vector<Point> diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(pts[i] - pts[0]);
  if (diffs.empty()) return 0;
  return static_cast<long>(rank(Matrix::from_rows(diffs)));
}

}  // namespace kstab
