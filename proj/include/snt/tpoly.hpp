#pragma once

// The truncated polynomial ring F[t]/(t^K) and matrices over it, including
// the Smith normal form over this local ring.

#include <cstddef>
#include <string>
#include <vector>

#include "snt/errors.hpp"
#include "snt/matrix.hpp"
#include "snt/scalar.hpp"

namespace snt {

template <class K>
class TruncPoly {
 public:
  using field_type = FieldOf<K>;

  TruncPoly(field_type field, std::size_t order) : field_(field), c_(order, field.zero()) {
    if (order == 0) throw Error("truncation order must be positive");
  }

  TruncPoly(field_type field, std::vector<K> coeffs) : field_(field), c_(std::move(coeffs)) {
    if (c_.empty()) throw Error("truncation order must be positive");
  }

  static TruncPoly constant(field_type field, std::size_t order, const K& c) {
    TruncPoly p(field, order);
    p.c_[0] = c;
    return p;
  }

  /// t^e truncated at `order` (zero when e >= order).
  static TruncPoly monomial(field_type field, std::size_t order, std::size_t e) {
    TruncPoly p(field, order);
    if (e < order) p.c_[e] = field.one();
    return p;
  }

  std::size_t order() const { return c_.size(); }
  const field_type& field() const { return field_; }
  const K& operator[](std::size_t i) const { return c_[i]; }
  K& operator[](std::size_t i) { return c_[i]; }
  const std::vector<K>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }
  bool is_unit() const { return !c_[0].is_zero(); }

  /// Smallest i with a nonzero coefficient, or order() for zero.
  std::size_t valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return i;
    return c_.size();
  }

  /// The element b with a = t^e * b whose coefficients are a's shifted down by e
  /// (top e coefficients zero). Requires valuation() >= e.
  TruncPoly shift_down(std::size_t e) const {
    TruncPoly r(field_, c_.size());
    for (std::size_t i = e; i < c_.size(); ++i) r.c_[i - e] = c_[i];
    return r;
  }

  TruncPoly shift_up(std::size_t e) const {
    TruncPoly r(field_, c_.size());
    for (std::size_t i = 0; i + e < c_.size(); ++i) r.c_[i + e] = c_[i];
    return r;
  }

  /// Reduction modulo t^k (k <= order): coefficients of degree >= k cleared.
  TruncPoly reduce(std::size_t k) const {
    TruncPoly r = *this;
    for (std::size_t i = k; i < c_.size(); ++i) r.c_[i] = field_.zero();
    return r;
  }

  TruncPoly& operator+=(const TruncPoly& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  TruncPoly& operator-=(const TruncPoly& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  TruncPoly operator-() const {
    TruncPoly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  TruncPoly& operator*=(const K& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend TruncPoly operator+(TruncPoly a, const TruncPoly& b) { return a += b; }
  friend TruncPoly operator-(TruncPoly a, const TruncPoly& b) { return a -= b; }
  friend TruncPoly operator*(TruncPoly a, const K& s) { return a *= s; }

  /// Truncated convolution.
  friend TruncPoly operator*(const TruncPoly& a, const TruncPoly& b) {
    a.check(b);
    std::size_t n = a.c_.size();
    TruncPoly r(a.field_, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; i + j < n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return r;
  }

  friend bool operator==(const TruncPoly& a, const TruncPoly& b) { return a.c_ == b.c_; }

  /// Inverse in the local ring; throws NotAUnit when the constant term is zero.
  TruncPoly inverse() const {
    if (!is_unit()) throw NotAUnit("truncated polynomial with zero constant term is not a unit");
    std::size_t n = c_.size();
    TruncPoly r(field_, n);
    K inv0 = c_[0].inverse();
    r.c_[0] = inv0;
    for (std::size_t k = 1; k < n; ++k) {
      K s = field_.zero();
      for (std::size_t i = 1; i <= k; ++i) s += c_[i] * r.c_[k - i];
      r.c_[k] = -(s * inv0);
    }
    return r;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + c_[i].str() + ")";
      if (i == 1) s += "t";
      if (i > 1) s += "t^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
  }

 private:
  void check(const TruncPoly& o) const {
    if (o.c_.size() != c_.size())
      throw DimensionMismatch("truncation orders differ: " + std::to_string(c_.size()) + " vs " +
                              std::to_string(o.c_.size()));
  }

  field_type field_;
  std::vector<K> c_;
};

/// Rectangular matrix with entries in F[t]/(t^K).
template <class K>
class TPolyMatrix {
 public:
  using field_type = FieldOf<K>;
  using entry_type = TruncPoly<K>;

  TPolyMatrix(field_type field, std::size_t order, std::size_t rows, std::size_t cols)
      : field_(field), order_(order), rows_(rows), cols_(cols),
        data_(rows * cols, TruncPoly<K>(field, order)) {}

  static TPolyMatrix identity(field_type field, std::size_t order, std::size_t n) {
    TPolyMatrix m(field, order, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = TruncPoly<K>::constant(field, order, field.one());
    return m;
  }

  /// Constant matrix over F[t]/(t^order).
  static TPolyMatrix constant(const Matrix<K>& m, std::size_t order) {
    TPolyMatrix r(m.field(), order, m.rows(), m.cols());
    r.set_coefficient(0, m);
    return r;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t order() const { return order_; }
  const field_type& field() const { return field_; }

  entry_type& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const entry_type& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  friend TPolyMatrix operator*(const TPolyMatrix& a, const TPolyMatrix& b) {
    if (a.cols_ != b.rows_ || a.order_ != b.order_) throw DimensionMismatch("TPolyMatrix product");
    TPolyMatrix c(a.field_, a.order_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend TPolyMatrix operator+(TPolyMatrix a, const TPolyMatrix& b) {
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }

  friend TPolyMatrix operator-(TPolyMatrix a, const TPolyMatrix& b) {
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }

  friend bool operator==(const TPolyMatrix& a, const TPolyMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  TPolyMatrix transpose() const {
    TPolyMatrix t(field_, order_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Coefficient matrix of t^s.
  Matrix<K> coefficient(std::size_t s) const {
    Matrix<K> m(field_, rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j)[s];
    return m;
  }

  void set_coefficient(std::size_t s, const Matrix<K>& m) {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j)[s] = m(i, j);
  }

  TPolyMatrix row(std::size_t i) const { return block_rows(i, 1); }

  TPolyMatrix block_rows(std::size_t r0, std::size_t nr) const {
    if (r0 + nr > rows_) throw DimensionMismatch("row block out of range");
    TPolyMatrix m(field_, order_, nr, cols_);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(r0 + i, j);
    return m;
  }

  void set_row(std::size_t i, const TPolyMatrix& r) {
    if (r.rows_ != 1 || r.cols_ != cols_) throw DimensionMismatch("set_row: shape mismatch");
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = r(0, j);
  }

  TPolyMatrix scaled(const TruncPoly<K>& s) const {
    TPolyMatrix r = *this;
    for (auto& x : r.data_) x = s * x;
    return r;
  }

  /// Entries reduced modulo t^k (same order).
  TPolyMatrix reduce(std::size_t k) const {
    TPolyMatrix r = *this;
    for (auto& x : r.data_) x = x.reduce(k);
    return r;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!x.is_zero()) return false;
    return true;
  }

  bool is_invertible() const;

  /// Inverse by Newton iteration from the inverse of the constant term.
  TPolyMatrix inverse() const;

 private:
  field_type field_;
  std::size_t order_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<entry_type> data_;
};

/// Over the local ring a square matrix is invertible iff it is invertible mod t.
template <class K>
bool TPolyMatrix<K>::is_invertible() const {
  return rows_ == cols_ && snt::is_invertible(coefficient(0));
}

template <class K>
TPolyMatrix<K> TPolyMatrix<K>::inverse() const {
  if (!is_invertible()) throw NotAUnit("matrix is not invertible modulo t");
  TPolyMatrix x = constant(snt::inverse(coefficient(0)), order_);
  TPolyMatrix two = identity(field_, order_, rows_).scaled(TruncPoly<K>::constant(field_, order_, field_.from_int(2)));
  // Each step doubles the t-adic precision of x.
  for (std::size_t prec = 1; prec < order_; prec *= 2) x = x * (two - (*this) * x);
  return x;
}

template <class K>
struct SmithForm {
  TPolyMatrix<K> left;                 // U
  TPolyMatrix<K> diagonal;             // D = U * A * V
  TPolyMatrix<K> right;                // V
  std::vector<std::size_t> exponents;  // d_i with D_ii = t^{d_i}; d_i == order means 0
};

/// Smith normal form over F[t]/(t^K). Pivots are chosen by minimal
/// t-valuation, ties broken by the lowest (row, column) index.
template <class K>
SmithForm<K> smith_form_t(const TPolyMatrix<K>& a) {
  const auto& f = a.field();
  std::size_t n = a.order(), rows = a.rows(), cols = a.cols();
  TPolyMatrix<K> d = a;
  TPolyMatrix<K> u = TPolyMatrix<K>::identity(f, n, rows);
  TPolyMatrix<K> v = TPolyMatrix<K>::identity(f, n, cols);
  std::vector<std::size_t> exps;

  auto swap_rows = [](TPolyMatrix<K>& m, std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(i, c), m(j, c));
  };
  auto swap_cols = [](TPolyMatrix<K>& m, std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < m.rows(); ++r) std::swap(m(r, i), m(r, j));
  };

  std::size_t steps = std::min(rows, cols);
  for (std::size_t k = 0; k < steps; ++k) {
    std::size_t best = n, bi = k, bj = k;
    for (std::size_t i = k; i < rows; ++i)
      for (std::size_t j = k; j < cols; ++j) {
        std::size_t val = d(i, j).valuation();
        if (val < best) {
          best = val;
          bi = i;
          bj = j;
        }
      }
    if (best == n) {
      for (std::size_t r = k; r < steps; ++r) exps.push_back(n);
      break;
    }
    swap_rows(d, k, bi);
    swap_rows(u, k, bi);
    swap_cols(d, k, bj);
    swap_cols(v, k, bj);

    // Normalize the pivot to exactly t^best by scaling row k with a unit.
    TruncPoly<K> unit = d(k, k).shift_down(best);
    // unit has nonzero constant term; its top `best` coefficients are free, so
    // t^best * unit^{-1} * d(k,k) == t^best holds exactly.
    TruncPoly<K> uinv = unit.inverse();
    for (std::size_t c = 0; c < cols; ++c) d(k, c) = uinv * d(k, c);
    for (std::size_t c = 0; c < rows; ++c) u(k, c) = uinv * u(k, c);

    for (std::size_t i = 0; i < rows; ++i) {
      if (i == k || d(i, k).is_zero()) continue;
      TruncPoly<K> factor = d(i, k).shift_down(best);
      for (std::size_t c = 0; c < cols; ++c) d(i, c) -= factor * d(k, c);
      for (std::size_t c = 0; c < rows; ++c) u(i, c) -= factor * u(k, c);
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (j == k || d(k, j).is_zero()) continue;
      TruncPoly<K> factor = d(k, j).shift_down(best);
      for (std::size_t r = 0; r < rows; ++r) d(r, j) -= d(r, k) * factor;
      for (std::size_t r = 0; r < cols; ++r) v(r, j) -= v(r, k) * factor;
    }
    exps.push_back(best);
  }
  return {std::move(u), std::move(d), std::move(v), std::move(exps)};
}

}  // namespace snt
