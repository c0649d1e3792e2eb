#pragma once

#include "logfol/rational.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace logfol {

/// Dense row-major matrix over an exact field (or ring, for the integer routines).
template <class T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols_if_empty = 0) {
    const std::size_t c = rows.empty() ? cols_if_empty : rows.front().size();
    Matrix m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != c) throw DomainError("ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return x == 0; });
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DomainError("matrix sum shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DomainError("matrix difference shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  std::vector<T> apply(std::span<const T> v) const {
    if (v.size() != cols_) throw DomainError("matrix-vector shape mismatch");
    std::vector<T> out(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (v[j] != 0) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = Matrix<Rational>;
using QVector = std::vector<Rational>;

/// Reduced row echelon form over a field; returns the pivot columns.
template <class T>
std::vector<std::size_t> rref_in_place(Matrix<T>& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(r, p);
    const T inv = T(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const T f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
std::size_t rank(Matrix<T> m) {
  return rref_in_place(m).size();
}

/// Basis of the right null space {x : m x = 0}, as columns of the returned matrix.
template <class T>
Matrix<T> nullspace(Matrix<T> m) {
  const auto pivots = rref_in_place(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix<T> basis(m.cols(), free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    basis(free_cols[k], k) = T(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) basis(pivots[i], k) = -m(i, free_cols[k]);
  }
  return basis;
}

/// Result of an exact linear solve: a particular solution (free variables set to zero)
/// and the dimension of the solution space, or nothing if the system is inconsistent.
template <class T>
struct LinearSolution {
  std::vector<T> x;
  std::size_t free_dimension = 0;
};

template <class T>
std::optional<LinearSolution<T>> solve(const Matrix<T>& a, std::span<const T> b) {
  if (b.size() != a.rows()) throw DomainError("solve: right-hand side length mismatch");
  Matrix<T> aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  const auto pivots = rref_in_place(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  LinearSolution<T> sol;
  sol.x.assign(a.cols(), T(0));
  for (std::size_t i = 0; i < pivots.size(); ++i) sol.x[pivots[i]] = aug(i, a.cols());
  sol.free_dimension = a.cols() - pivots.size();
  return sol;
}

template <class T>
std::optional<Matrix<T>> inverse(const Matrix<T>& m) {
  if (m.rows() != m.cols()) throw DomainError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  const auto pivots = rref_in_place(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
  Matrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Row-style Hermite normal form of an integer matrix: the nonzero rows of the result
/// form a canonical basis of the row lattice (upper echelon, positive pivots, entries
/// above each pivot reduced into [0, pivot)).
template <class Z>
Matrix<Z> hermite_normal_form(Matrix<Z> m) {
  using std::abs;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    // Euclid on column c among rows r.. until a single nonzero entry remains.
    for (;;) {
      std::size_t best = m.rows();
      for (std::size_t i = r; i < m.rows(); ++i) {
        if (m(i, c) == 0) continue;
        if (best == m.rows() || abs(m(i, c)) < abs(m(best, c))) best = i;
      }
      if (best == m.rows()) break;
      m.swap_rows(r, best);
      bool done = true;
      for (std::size_t i = r + 1; i < m.rows(); ++i) {
        if (m(i, c) == 0) continue;
        Z q = m(i, c) / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= q * m(r, j);
        if (m(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (m(r, c) == 0) continue;
    if (m(r, c) < 0)
      for (std::size_t j = c; j < m.cols(); ++j) m(r, j) = -m(r, j);
    for (std::size_t i = 0; i < r; ++i) {
      // floor division keeps the reduced entry in [0, pivot)
      Z q = m(i, c) / m(r, c);
      if (m(i, c) - q * m(r, c) < 0) q -= 1;
      if (q == 0) continue;
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= q * m(r, j);
    }
    ++r;
  }
  Matrix<Z> out(r, m.cols());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

/// Whether v lies in the row lattice spanned by a Hermite basis.
template <class Z>
bool in_row_lattice(const Matrix<Z>& hermite_basis, std::vector<Z> v) {
  if (v.size() != hermite_basis.cols()) throw DomainError("lattice membership: length mismatch");
  for (std::size_t i = 0; i < hermite_basis.rows(); ++i) {
    std::size_t c = 0;
    while (c < hermite_basis.cols() && hermite_basis(i, c) == 0) ++c;
    for (std::size_t j = 0; j < c; ++j)
      if (v[j] != 0) return false;
    if (v[c] % hermite_basis(i, c) != 0) return false;
    Z q = v[c] / hermite_basis(i, c);
    for (std::size_t j = c; j < v.size(); ++j) v[j] -= q * hermite_basis(i, j);
  }
  return std::all_of(v.begin(), v.end(), [](const Z& x) { return x == 0; });
}

}  // namespace logfol
