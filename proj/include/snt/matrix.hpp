#pragma once

// Dense matrices over an exact field, with reduced row echelon forms, linear
// solves and row-space (subspace) operations. Vectors are 1 x n matrices and
// act on matrices from the left, so a matrix g acts on a vector v as v * g.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "snt/errors.hpp"
#include "snt/scalar.hpp"

namespace snt {

template <class K>
class Matrix {
 public:
  using value_type = K;
  using field_type = FieldOf<K>;

  Matrix(field_type field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), data_(rows * cols, field.zero()) {}

  explicit Matrix(field_type field) : Matrix(field, 0, 0) {}

  static Matrix identity(field_type field, std::size_t n) {
    Matrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
    return m;
  }

  static Matrix from_ints(field_type field, std::initializer_list<std::initializer_list<long long>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(field, r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw DimensionMismatch("ragged matrix literal");
      std::size_t j = 0;
      for (long long v : row) m(i, j++) = field.from_int(v);
      ++i;
    }
    return m;
  }

  static Matrix row_vector(field_type field, const std::vector<K>& v) {
    Matrix m(field, 1, v.size());
    for (std::size_t j = 0; j < v.size(); ++j) m(0, j) = v[j];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  const field_type& field() const { return field_; }

  K& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const K& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix row(std::size_t i) const { return block(i, 0, 1, cols_); }
  Matrix col(std::size_t j) const { return block(0, j, rows_, 1); }

  void set_row(std::size_t i, const Matrix& r) {
    if (r.rows() != 1 || r.cols() != cols_) throw DimensionMismatch("set_row: shape mismatch");
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = r(0, j);
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
    Matrix b(field_, nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionMismatch("set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix select_rows(const std::vector<std::size_t>& idx) const {
    Matrix m(field_, idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(idx[i], j);
    return m;
  }

  Matrix select_cols(const std::vector<std::size_t>& idx) const {
    Matrix m(field_, rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(i, idx[j]);
    return m;
  }

  Matrix transpose() const {
    Matrix t(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const K& x) { return x.is_zero(); });
  }

  bool is_square() const { return rows_ == cols_; }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const K& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const K& s) { return a *= s; }
  friend Matrix operator*(const K& s, Matrix a) { return a *= s; }
  Matrix operator-() const {
    Matrix r = *this;
    for (auto& x : r.data_) x = -x;
    return r;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_)
      throw DimensionMismatch("matrix product " + a.shape() + " * " + b.shape());
    Matrix c(a.field_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const K& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  Matrix pow(std::size_t e) const {
    if (!is_square()) throw DimensionMismatch("pow of non-square matrix");
    Matrix r = identity(field_, rows_);
    for (std::size_t i = 0; i < e; ++i) r = r * (*this);
    return r;
  }

  /// Vertical concatenation; either operand may have zero rows.
  static Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.rows_ == 0) return b;
    if (b.rows_ == 0) return a;
    if (a.cols_ != b.cols_) throw DimensionMismatch("vstack: column mismatch");
    Matrix m(a.field_, a.rows_ + b.rows_, a.cols_);
    m.set_block(0, 0, a);
    m.set_block(a.rows_, 0, b);
    return m;
  }

  static Matrix hstack(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_) throw DimensionMismatch("hstack: row mismatch");
    Matrix m(a.field_, a.rows_, a.cols_ + b.cols_);
    m.set_block(0, 0, a);
    m.set_block(0, a.cols_, b);
    return m;
  }

  static Matrix block_diagonal(const Matrix& a, const Matrix& b) {
    Matrix m(a.field_, a.rows_ + b.rows_, a.cols_ + b.cols_);
    m.set_block(0, 0, a);
    m.set_block(a.rows_, a.cols_, b);
    return m;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  const std::vector<K>& data() const { return data_; }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionMismatch("shape mismatch " + shape() + " vs " + o.shape());
  }

  field_type field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<K> data_;
};

template <class K>
struct Echelon {
  Matrix<K> reduced;                 // same shape as the input
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

/// Reduced row echelon form by Gauss-Jordan elimination; the first pivot
/// candidate in row order is used, so the result is canonical.
template <class K>
Echelon<K> rref(Matrix<K> a) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c).is_zero()) ++p;
    if (p == a.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
    K inv = a(r, c).inverse();
    for (std::size_t j = c; j < a.cols(); ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      K f = a(i, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(a), std::move(pivots)};
}

template <class K>
std::size_t rank(const Matrix<K>& a) {
  return rref(a).pivots.size();
}

/// Canonical basis (nonzero RREF rows) of the row space of `a`.
template <class K>
Matrix<K> row_space(const Matrix<K>& a) {
  auto e = rref(a);
  return e.reduced.block(0, 0, e.pivots.size(), a.cols());
}

/// Basis (as rows) of { x : a * x^T = 0 }.
template <class K>
Matrix<K> right_kernel(const Matrix<K>& a) {
  auto e = rref(a);
  const auto& f = a.field();
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (!is_pivot[j]) free.push_back(j);
  Matrix<K> ker(f, free.size(), a.cols());
  for (std::size_t k = 0; k < free.size(); ++k) {
    ker(k, free[k]) = f.one();
    for (std::size_t i = 0; i < e.pivots.size(); ++i) ker(k, e.pivots[i]) = -e.reduced(i, free[k]);
  }
  return ker;
}

/// Basis (as rows) of { y : y * a = 0 }.
template <class K>
Matrix<K> left_kernel(const Matrix<K>& a) {
  return right_kernel(a.transpose());
}

template <class K>
struct LinearSolution {
  bool consistent = false;
  std::optional<Matrix<K>> particular;  // 1 x n row holding x
  Matrix<K> kernel;                     // rows span { x : A x = 0 }
  std::size_t rank = 0;
};

/// Solves A x = b for x (b given as a 1 x rows(A) or rows(A) x 1 matrix).
template <class K>
LinearSolution<K> solve_linear(const Matrix<K>& a, const Matrix<K>& b) {
  Matrix<K> rhs = b.rows() == 1 && b.cols() == a.rows() && a.rows() != 1 ? b.transpose() : b;
  if (rhs.rows() != a.rows() || rhs.cols() != 1)
    throw DimensionMismatch("solve_linear: A is " + a.shape() + ", b is " + b.shape());
  auto aug = rref(Matrix<K>::hstack(a, rhs));
  LinearSolution<K> out{false, std::nullopt, right_kernel(a), 0};
  std::size_t n = a.cols();
  std::size_t rk = 0;
  for (auto p : aug.pivots) {
    if (p == n) return {false, std::nullopt, out.kernel, rk};
    ++rk;
  }
  out.rank = rk;
  out.consistent = true;
  Matrix<K> x(a.field(), 1, n);
  for (std::size_t i = 0; i < aug.pivots.size(); ++i) x(0, aug.pivots[i]) = aug.reduced(i, n);
  out.particular = std::move(x);
  return out;
}

/// Solves x * a = b for the row vector x; returns nullopt when inconsistent.
template <class K>
std::optional<Matrix<K>> solve_left(const Matrix<K>& a, const Matrix<K>& b) {
  if (b.rows() != 1 || b.cols() != a.cols()) throw DimensionMismatch("solve_left: shape mismatch");
  auto s = solve_linear(a.transpose(), b.transpose());
  if (!s.consistent) return std::nullopt;
  return *s.particular;
}

template <class K>
Matrix<K> inverse(const Matrix<K>& a) {
  if (!a.is_square()) throw DimensionMismatch("inverse of non-square matrix");
  std::size_t n = a.rows();
  auto e = rref(Matrix<K>::hstack(a, Matrix<K>::identity(a.field(), n)));
  if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) throw NotAUnit("matrix is singular");
  return e.reduced.block(0, n, n, n);
}

template <class K>
bool is_invertible(const Matrix<K>& a) {
  return a.is_square() && rank(a) == a.rows();
}

// --- subspaces, represented by spanning rows ---

template <class K>
bool span_contains(const Matrix<K>& basis, const Matrix<K>& v) {
  if (basis.rows() == 0) return v.is_zero();
  return rank(Matrix<K>::vstack(basis, v)) == rank(basis);
}

template <class K>
bool same_span(const Matrix<K>& a, const Matrix<K>& b) {
  return row_space(a) == row_space(b);
}

template <class K>
Matrix<K> span_sum(const Matrix<K>& a, const Matrix<K>& b) {
  return row_space(Matrix<K>::vstack(a, b));
}

/// Intersection of two row spaces inside the same ambient space.
template <class K>
Matrix<K> span_intersection(const Matrix<K>& a, const Matrix<K>& b) {
  Matrix<K> ra = row_space(a), rb = row_space(b);
  if (ra.rows() == 0 || rb.rows() == 0) return Matrix<K>(a.field(), 0, a.cols());
  // y*ra = z*rb  <=>  [y z] * [ra; -rb] = 0
  Matrix<K> stacked = Matrix<K>::vstack(ra, -rb);
  Matrix<K> rel = left_kernel(stacked);
  Matrix<K> gens = rel.block(0, 0, rel.rows(), ra.rows()) * ra;
  return row_space(gens);
}

/// Coordinates of v (1 x n) with respect to the rows of `basis` (assumed independent).
template <class K>
std::optional<Matrix<K>> coordinates(const Matrix<K>& basis, const Matrix<K>& v) {
  return solve_left(basis, v);
}

/// Basis of the complement obtained by adjoining standard basis vectors greedily.
template <class K>
Matrix<K> complement(const Matrix<K>& basis) {
  std::size_t n = basis.cols();
  Matrix<K> cur = row_space(basis);
  Matrix<K> out(basis.field(), 0, n);
  for (std::size_t j = 0; j < n && cur.rows() < n; ++j) {
    Matrix<K> e(basis.field(), 1, n);
    e(0, j) = basis.field().one();
    if (!span_contains(cur, e)) {
      cur = Matrix<K>::vstack(cur, e);
      out = Matrix<K>::vstack(out, e);
    }
  }
  return out;
}

}  // namespace snt
