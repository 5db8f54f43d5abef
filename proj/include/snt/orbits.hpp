#pragma once

// Orbits of the orthogonal group G(F[t]/t^K) of a quadratic space (V, Q) on
// M_- (x) V, where M_- carries a nilpotent operator t_-. An element
// x = sum_{a,b} X_ab u_a (x) v_b is stored as the matrix X (u_a a basis of
// M_-, v_b a basis of V); g = sum_j g_j t^j acts by X -> sum_j (T_-^j)^T X g_j.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "snt/errors.hpp"
#include "snt/guard.hpp"
#include "snt/matrix.hpp"
#include "snt/snt_module.hpp"
#include "snt/tpoly.hpp"

namespace snt {

template <class K>
struct TensorSetting {
  Matrix<K> t_minus;      // m x m, nilpotent
  Matrix<K> v_gram;       // n x n, symmetric invertible
  std::size_t precision;  // K: t_minus^K = 0

  const FieldOf<K>& field() const { return v_gram.field(); }
  std::size_t m() const { return t_minus.rows(); }
  std::size_t n() const { return v_gram.rows(); }
};

template <class K>
void validate_orth_space(const Matrix<K>& q) {
  if (!q.is_square()) throw InvalidModule("gram of V must be square");
  if (!(q == q.transpose())) throw InvalidModule("gram of V is not symmetric");
  if (!is_invertible(q)) throw InvalidModule("gram of V is degenerate");
}

/// Nilpotency index of t (at least 1, so that F[t]/t^K is a ring).
template <class K>
std::size_t nilpotency_index(const Matrix<K>& t) {
  Matrix<K> p = Matrix<K>::identity(t.field(), t.rows());
  for (std::size_t j = 1; j <= t.rows() + 1; ++j) {
    p = p * t;
    if (p.is_zero()) return j;
  }
  throw InvalidModule("t is not nilpotent");
}

template <class K>
TensorSetting<K> make_setting(const Matrix<K>& t_minus, const Matrix<K>& v_gram) {
  validate_orth_space(v_gram);
  if (!t_minus.is_square()) throw DimensionMismatch("t on M_- must be square");
  return {t_minus, v_gram, t_minus.rows() ? nilpotency_index(t_minus) : 1};
}

/// t on M_- read through M_- = M / M_+: u -> pi_-(u t). When M_- is t-stable
/// this is the restriction of t.
template <class K>
Matrix<K> minus_action(const SntModule<K>& m, const LagrangianFlag<K>& fl) {
  check_flag(m, fl);
  if (!is_t_stable(m.t_action, fl.minus) && !is_t_stable(m.t_action, fl.plus))
    throw NotTStable("neither M_- nor M_+ is t-stable");
  Matrix<K> basis = Matrix<K>::vstack(fl.minus, fl.plus);
  Matrix<K> c = fl.minus * m.t_action * inverse(basis);
  return c.block(0, 0, fl.minus.rows(), fl.minus.rows());
}

template <class K>
TensorSetting<K> make_setting(const SntModule<K>& m, const LagrangianFlag<K>& fl, const Matrix<K>& v_gram) {
  return make_setting(minus_action(m, fl), v_gram);
}

/// The standard setting: M = H_{k_1} + ... + H_{k_r} with M_- spanned by the
/// e1-chains, so t_- is a sum of Jordan blocks of sizes k_i.
template <class K>
TensorSetting<K> standard_setting(const FieldOf<K>& f, const std::vector<std::size_t>& partition, const Matrix<K>& v_gram) {
  auto m = standard_module<K>(f, partition);
  return make_setting(m, standard_flag<K>(f, partition), v_gram);
}

// --- V[t]/t^K: vectors are 1 x n (tuples m x n) TPolyMatrix rows ---

template <class K>
TPolyMatrix<K> pairings(const TPolyMatrix<K>& a, const TPolyMatrix<K>& b, const Matrix<K>& q) {
  return a * TPolyMatrix<K>::constant(q, a.order()) * b.transpose();
}

template <class K>
bool is_orthogonal(const TPolyMatrix<K>& g, const Matrix<K>& q) {
  return pairings(g, g, q) == TPolyMatrix<K>::constant(q, g.order());
}

/// Rows independent modulo t (the span is a primitive submodule with these rows as basis).
template <class K>
bool is_primitive(const TPolyMatrix<K>& a) {
  return rank(a.coefficient(0)) == a.rows();
}

template <class K>
void check_element(const TensorSetting<K>& s, const Matrix<K>& x) {
  if (x.rows() != s.m() || x.cols() != s.n())
    throw DimensionMismatch("tensor coordinates must be " + std::to_string(s.m()) + "x" + std::to_string(s.n()));
}

/// x . g = sum_j (T_-^j)^T X g_j.
template <class K>
Matrix<K> act(const TensorSetting<K>& s, const Matrix<K>& x, const TPolyMatrix<K>& g) {
  check_element(s, x);
  Matrix<K> y(s.field(), s.m(), s.n());
  Matrix<K> tp = Matrix<K>::identity(s.field(), s.m());
  for (std::size_t j = 0; j < g.order(); ++j) {
    Matrix<K> gj = g.coefficient(j);
    if (!gj.is_zero()) y += tp.transpose() * x * gj;
    tp = tp * s.t_minus;
  }
  return y;
}

/// Matrix of f_x: row d is f_x(v_d) in M_- coordinates; f_x(t^s v) = t^s f_x(v).
template <class K>
Matrix<K> f_matrix(const TensorSetting<K>& s, const Matrix<K>& x) {
  check_element(s, x);
  return s.v_gram * x.transpose();
}

/// Im f_x with its canonical quasi-basis.
template <class K>
QuasiBasis<K> image_of(const TensorSetting<K>& s, const Matrix<K>& x) {
  return quasi_basis(s.t_minus, t_closure(s.t_minus, f_matrix(s, x)));
}

/// Vectors w_i in V[t]/t^K of degree < k_i with x = sum_i e_i (x) w_i, for the
/// quasi-basis e_i of a t-stable W containing Im f_x.
template <class K>
TPolyMatrix<K> normal_form(const TensorSetting<K>& s, const Matrix<K>& x, const QuasiBasis<K>& w) {
  check_element(s, x);
  const auto& f = s.field();
  Matrix<K> basis = expand_quasi_basis(s.t_minus, w);
  TPolyMatrix<K> out(f, s.precision, w.size(), s.n());
  for (std::size_t b = 0; b < s.n(); ++b) {
    Matrix<K> col = x.col(b).transpose();
    if (col.is_zero()) continue;
    if (basis.rows() == 0) throw Error("x does not lie in W (x) V");
    auto c = solve_left(basis, col);
    if (!c) throw Error("x does not lie in W (x) V");
    std::size_t pos = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t t = 0; t < w.types[i]; ++t) out(i, b)[t] = (*c)(0, pos++);
  }
  return out;
}

/// sum_i e_i (x) w_i back to coordinates.
template <class K>
Matrix<K> from_normal_form(const TensorSetting<K>& s, const QuasiBasis<K>& w, const TPolyMatrix<K>& ws) {
  Matrix<K> x(s.field(), s.m(), s.n());
  for (std::size_t i = 0; i < w.size(); ++i) {
    Matrix<K> e = w.generators.row(i);
    for (std::size_t t = 0; t < s.precision; ++t) {
      for (std::size_t b = 0; b < s.n(); ++b)
        if (!ws(i, b)[t].is_zero())
          for (std::size_t a = 0; a < s.m(); ++a) x(a, b) += e(0, a) * ws(i, b)[t];
      e = e * s.t_minus;
    }
  }
  return x;
}

/// Coordinates of a symmetric tensor sum_{i,j} D_ij e_i (x) e_j on the quasi-basis
/// e_ij = e_i (x) e_j + e_j (x) e_i (i <= j) of S_t^2(W): D_ij for i < j and
/// D_ii / 2 on the diagonal, reduced modulo t^{k_j}. Listed for i <= j lexicographically.
template <class K>
std::vector<TruncPoly<K>> sym_coordinates(const TPolyMatrix<K>& d, const std::vector<std::size_t>& types) {
  const auto& f = d.field();
  K half = f.from_int(2).inverse();
  std::vector<TruncPoly<K>> out;
  for (std::size_t i = 0; i < types.size(); ++i)
    for (std::size_t j = i; j < types.size(); ++j) {
      TruncPoly<K> c = d(i, j);
      if (i == j) c *= half;
      out.push_back(c.reduce(types[j]));
    }
  return out;
}

/// dim_F S_t^2(W) = sum_{i <= j} k_j.
inline std::size_t sym_dimension(const std::vector<std::size_t>& types) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < types.size(); ++i)
    for (std::size_t j = i; j < types.size(); ++j) d += types[j];
  return d;
}

template <class K>
struct OrbitInvariant {
  Matrix<K> w;                        // RREF basis of W = Im f_x in M_- coordinates
  std::vector<std::size_t> types;     // type of W
  std::vector<TruncPoly<K>> coords;   // T_W(x) on the e_ij

  friend bool operator==(const OrbitInvariant& a, const OrbitInvariant& b) {
    return a.w == b.w && a.types == b.types && a.coords == b.coords;
  }

  std::string str() const {
    std::string s = "W[";
    for (std::size_t i = 0; i < w.rows(); ++i) {
      s += i ? ";" : "";
      for (std::size_t j = 0; j < w.cols(); ++j) s += (j ? "," : "") + w(i, j).str();
    }
    s += "] i[";
    for (std::size_t c = 0; c < coords.size(); ++c) s += (c ? "; " : "") + coords[c].str();
    return s + "]";
  }
};

/// T_W(x) for W given by its quasi-basis (W must contain Im f_x).
template <class K>
OrbitInvariant<K> t_sym(const TensorSetting<K>& s, const Matrix<K>& x, const QuasiBasis<K>& w) {
  TPolyMatrix<K> ws = normal_form(s, x, w);
  return {w.span, w.types, sym_coordinates(pairings(ws, ws, s.v_gram), w.types)};
}

template <class K>
OrbitInvariant<K> orbit_invariant(const TensorSetting<K>& s, const Matrix<K>& x) {
  return t_sym(s, x, image_of(s, x));
}

template <class K>
bool same_orbit(const TensorSetting<K>& s, const Matrix<K>& x, const Matrix<K>& y) {
  return orbit_invariant(s, x) == orbit_invariant(s, y);
}

// --- Witt lifting and isometry extension ---

/// Rows c_j with (b_i, c_j) = delta_ij over F[t]/t^K, for b primitive.
template <class K>
TPolyMatrix<K> dual_vectors(const TPolyMatrix<K>& b, const Matrix<K>& q) {
  const auto& f = b.field();
  std::size_t m = b.rows(), n = b.cols(), order = b.order();
  TPolyMatrix<K> x = b * TPolyMatrix<K>::constant(q, order);
  // pivot columns searched from the right, so trailing coordinates are preferred
  Matrix<K> x0 = x.coefficient(0);
  std::vector<std::size_t> rev(n);
  for (std::size_t j = 0; j < n; ++j) rev[j] = n - 1 - j;
  auto piv = rref(x0.select_cols(rev)).pivots;
  if (piv.size() != m) throw HypothesisFailed("vectors are not primitive");
  for (auto& p : piv) p = n - 1 - p;
  TPolyMatrix<K> xs(f, order, m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) xs(i, j) = x(i, piv[j]);
  TPolyMatrix<K> inv = xs.inverse();
  TPolyMatrix<K> c(f, order, m, n);  // c^T has rows piv filled by inv
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) c(j, piv[i]) = inv(i, j);
  return c;
}

/// Alters b_1..b_m to b~ with b~_i = b_i mod t^{k_i} and (b~_i, b~_j) = (a_i, a_j)
/// in F[t]/t^K, assuming (a_i, a_j) = (b_i, b_j) mod t^{min(k_i, k_j)} and
/// k_1 >= ... >= k_m >= 1. The correction of b_m is t^{k_m} sum_j h_j c_j with
/// (b_i, c_j) = delta_ij, solved one t-adic coefficient at a time.
template <class K>
TPolyMatrix<K> witt_lift(const TPolyMatrix<K>& a, const TPolyMatrix<K>& b, const std::vector<std::size_t>& types,
                         const Matrix<K>& q) {
  const auto& f = q.field();
  std::size_t m = a.rows(), order = a.order();
  if (b.rows() != m || types.size() != m || a.cols() != q.rows() || b.cols() != q.rows() || b.order() != order)
    throw DimensionMismatch("witt_lift: inconsistent shapes");
  for (std::size_t i = 0; i < m; ++i) {
    if (types[i] < 1 || types[i] > order) throw HypothesisFailed("types must lie in [1, K]");
    if (i && types[i] > types[i - 1]) throw HypothesisFailed("types must be nonincreasing");
  }
  if (!is_primitive(a) || !is_primitive(b)) throw HypothesisFailed("inputs must be primitive tuples");
  TPolyMatrix<K> ga = pairings(a, a, q), gb = pairings(b, b, q);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j)
      if (!(ga(i, j).reduce(types[j]) == gb(i, j).reduce(types[j])))
        throw HypothesisFailed("(a_i, a_j) and (b_i, b_j) differ modulo t^min(k_i, k_j) at (" + std::to_string(i + 1) +
                               ", " + std::to_string(j + 1) + ")");
  TPolyMatrix<K> cur = b;
  for (std::size_t mm = 0; mm < m; ++mm) {
    std::size_t k = types[mm];
    TPolyMatrix<K> head = cur.block_rows(0, mm + 1);
    TPolyMatrix<K> c = dual_vectors(head, q);
    for (std::size_t s = 0; k + s < order; ++s) {
      std::size_t deg = k + s;
      TPolyMatrix<K> bm = cur.row(mm);
      TPolyMatrix<K> lhs = pairings(cur.block_rows(0, mm + 1), bm, q);  // (b_i, b~_m), i <= mm
      TPolyMatrix<K> dual_pair = pairings(cur.block_rows(0, mm + 1), c, q);
      Matrix<K> sys(f, mm + 1, mm + 1), rhs(f, mm + 1, 1);
      for (std::size_t i = 0; i <= mm; ++i) {
        rhs(i, 0) = ga(i, mm)[deg] - lhs(i, 0)[deg];
        for (std::size_t j = 0; j <= mm; ++j) sys(i, j) = dual_pair(i, j)[0] * (i == mm ? f.from_int(2) : f.one());
      }
      auto sol = solve_linear(sys, rhs);
      if (!sol.consistent) throw Error("internal: Witt lifting system is singular");
      TPolyMatrix<K> corr(f, order, 1, q.rows());
      for (std::size_t j = 0; j <= mm; ++j) {
        K h = (*sol.particular)(0, j);
        if (h.is_zero()) continue;
        corr = corr + c.row(j).scaled(TruncPoly<K>::monomial(f, order, deg) * h);
      }
      cur.set_row(mm, bm + corr);
    }
  }
  if (!(pairings(cur, cur, q) == ga)) throw Error("internal: Witt lift failed to match the Gram matrix");
  return cur;
}

namespace detail {

/// Reflection x -> x - 2 (x, w) / (w, w) w as a matrix (row convention).
template <class K>
Matrix<K> reflection(const Matrix<K>& w, const Matrix<K>& q) {
  K ww = (w * q * w.transpose())(0, 0);
  return Matrix<K>::identity(q.field(), q.rows()) - q * w.transpose() * w * (q.field().from_int(2) / ww);
}

/// Orthogonal basis of the (nondegenerate) row space of `a`, anisotropic vectors only.
template <class K>
Matrix<K> orthogonal_basis(Matrix<K> a, const Matrix<K>& q) {
  const auto& f = q.field();
  Matrix<K> out(f, 0, q.rows());
  auto norm = [&](const Matrix<K>& v) { return (v * q * v.transpose())(0, 0); };
  while (a.rows() > 0) {
    std::optional<Matrix<K>> pick;
    for (std::size_t i = 0; i < a.rows() && !pick; ++i)
      if (!norm(a.row(i)).is_zero()) pick = a.row(i);
    for (std::size_t i = 0; i < a.rows() && !pick; ++i)
      for (std::size_t j = i + 1; j < a.rows() && !pick; ++j)
        if (!norm(a.row(i) + a.row(j)).is_zero()) pick = a.row(i) + a.row(j);
    if (!pick) throw IsometryMismatch("subspace is degenerate");
    Matrix<K> u = *pick;
    K uu = norm(u);
    Matrix<K> rest(f, 0, q.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      Matrix<K> v = a.row(i);
      v -= u * ((v * q * u.transpose())(0, 0) / uu);
      rest = Matrix<K>::vstack(rest, v);
    }
    out = Matrix<K>::vstack(out, u);
    a = row_space(rest);
  }
  return out;
}

/// Completes a tuple spanning a possibly degenerate subspace to one spanning
/// a nondegenerate subspace: each radical vector r_j gets an isotropic partner
/// s_j with (r_i, s_j) = delta_ij, orthogonal to a complement of the radical.
/// Returns coefficient data (z, y) and the partners s, so that the same recipe
/// can be replayed on an isometric tuple.
template <class K>
Matrix<K> hyperbolic_completion(const Matrix<K>& a, const Matrix<K>& y, const Matrix<K>& z, const Matrix<K>& q) {
  const auto& f = q.field();
  std::size_t n = q.rows();
  Matrix<K> r = y.rows() ? Matrix<K>(y * a) : Matrix<K>(f, 0, n);
  Matrix<K> u0 = z.rows() ? Matrix<K>(z * a) : Matrix<K>(f, 0, n);
  Matrix<K> s(f, 0, n);
  for (std::size_t j = 0; j < r.rows(); ++j) {
    Matrix<K> cond = Matrix<K>::vstack(Matrix<K>::vstack(r, u0), s);
    Matrix<K> rhs(f, cond.rows(), 1);
    rhs(j, 0) = f.one();
    auto sol = solve_linear(cond * q, rhs);
    if (!sol.consistent) throw Error("internal: hyperbolic completion failed");
    Matrix<K> sj = *sol.particular;
    K ss = (sj * q * sj.transpose())(0, 0);
    sj -= r.row(j) * (ss * f.from_int(2).inverse());
    s = Matrix<K>::vstack(s, sj);
  }
  return s;
}

}  // namespace detail

/// g in O(V)(F) with a0 g = b0, for tuples with equal Gram matrices and
/// independent rows: complete both to nondegenerate tuples, then match
/// orthogonal bases by reflections.
template <class K>
Matrix<K> residue_isometry(const Matrix<K>& a0, const Matrix<K>& b0, const Matrix<K>& q) {
  const auto& f = q.field();
  std::size_t n = q.rows(), m = a0.rows();
  if (m == 0) return Matrix<K>::identity(f, n);
  Matrix<K> gram = a0 * q * a0.transpose();
  if (!(gram == b0 * q * b0.transpose())) throw IsometryMismatch("Gram matrices differ");
  Matrix<K> y = left_kernel(gram);  // radical coefficients
  Matrix<K> z = complement(y.rows() ? y : Matrix<K>(f, 0, m));
  Matrix<K> sa = detail::hyperbolic_completion(a0, y, z, q);
  Matrix<K> sb = detail::hyperbolic_completion(b0, y, z, q);
  auto stack = [&](const Matrix<K>& base, const Matrix<K>& s) {
    Matrix<K> out = Matrix<K>::vstack(z.rows() ? Matrix<K>(z * base) : Matrix<K>(f, 0, n),
                                      y.rows() ? Matrix<K>(y * base) : Matrix<K>(f, 0, n));
    return Matrix<K>::vstack(out, s);
  };
  Matrix<K> ea = stack(a0, sa), eb = stack(b0, sb);
  if (!(ea * q * ea.transpose() == eb * q * eb.transpose())) throw Error("internal: completions differ");
  // orthogonal basis of span(ea), expressed in ea-coordinates, transferred to eb
  Matrix<K> ua = detail::orthogonal_basis(ea, q);
  Matrix<K> h = Matrix<K>::identity(f, n);
  for (std::size_t i = 0; i < ua.rows(); ++i) {
    Matrix<K> c = *solve_left(ea, ua.row(i));
    Matrix<K> x = ua.row(i) * h;
    Matrix<K> v = c * eb;
    Matrix<K> w = x - v;
    if (w.is_zero()) continue;
    if (!(w * q * w.transpose())(0, 0).is_zero()) {
      h = h * detail::reflection(w, q);
    } else {
      // (x + v, x + v) = 4 (x, x) != 0: reflect x to -v, then v to itself negated back
      h = h * detail::reflection(Matrix<K>(x + v), q) * detail::reflection(v, q);
    }
  }
  if (!(a0 * h == b0)) throw Error("internal: residue isometry does not match");
  return h;
}

/// g in O(V)(F[t]/t^K) with a_i g = b_i, for primitive tuples with (a_i, a_j) = (b_i, b_j).
/// The residue solution is lifted layer by layer: g_j solves
/// a_{i,0} g_j = b_{i,j} - sum_{s>=1} a_{i,s} g_{j-s} and
/// g_j Q g_0^T + g_0 Q g_j^T = - sum_{0<s<j} g_s Q g_{j-s}^T.
template <class K>
TPolyMatrix<K> extend_isometry(const TPolyMatrix<K>& a, const TPolyMatrix<K>& b, const Matrix<K>& q) {
  const auto& f = q.field();
  std::size_t n = q.rows(), m = a.rows(), order = a.order();
  if (b.rows() != m || a.cols() != n || b.cols() != n || b.order() != order)
    throw DimensionMismatch("extend_isometry: inconsistent shapes");
  if (!is_primitive(a) || !is_primitive(b)) throw IsometryMismatch("tuples must be primitive");
  if (!(pairings(a, a, q) == pairings(b, b, q))) throw IsometryMismatch("pairwise products differ");
  std::vector<Matrix<K>> g{residue_isometry(a.coefficient(0), b.coefficient(0), q)};
  std::vector<Matrix<K>> ac, bc;
  for (std::size_t s = 0; s < order; ++s) {
    ac.push_back(a.coefficient(s));
    bc.push_back(b.coefficient(s));
  }
  Matrix<K> qg0t = q * g[0].transpose();
  Matrix<K> g0q = g[0] * q;
  for (std::size_t j = 1; j < order; ++j) {
    std::size_t eqs = m * n + n * n;
    Matrix<K> sys(f, eqs, n * n), rhs(f, eqs, 1);
    Matrix<K> r1 = bc[j];
    for (std::size_t s = 1; s <= j; ++s) r1 -= ac[s] * g[j - s];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) sys(i * n + c, r * n + c) = ac[0](i, r);
        rhs(i * n + c, 0) = r1(i, c);
      }
    Matrix<K> r2(f, n, n);
    for (std::size_t s = 1; s < j; ++s) r2 -= g[s] * q * g[j - s].transpose();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t w = 0; w < n; ++w) {
        std::size_t row = m * n + p * n + w;
        for (std::size_t r = 0; r < n; ++r) {
          sys(row, p * n + r) += qg0t(r, w);  // (g_j Q g_0^T)_{pw}
          sys(row, w * n + r) += g0q(p, r);   // (g_0 Q g_j^T)_{pw}
        }
        rhs(row, 0) = r2(p, w);
      }
    auto sol = solve_linear(sys, rhs);
    if (!sol.consistent) throw Error("internal: isometry layer system is inconsistent");
    Matrix<K> gj(f, n, n);
    for (std::size_t v = 0; v < n * n; ++v) gj(v / n, v % n) = (*sol.particular)(0, v);
    g.push_back(gj);
  }
  TPolyMatrix<K> out(f, order, n, n);
  for (std::size_t j = 0; j < order; ++j) out.set_coefficient(j, g[j]);
  if (!is_orthogonal(out, q) || !(a * out == b)) throw Error("internal: extended isometry fails its checks");
  return out;
}

/// g in G(F[t]/t^K) with x . g = y when x and y share the orbit invariant.
template <class K>
std::optional<TPolyMatrix<K>> transport(const TensorSetting<K>& s, const Matrix<K>& x, const Matrix<K>& y) {
  auto wx = image_of(s, x);
  auto wy = image_of(s, y);
  if (!(wx.span == wy.span)) return std::nullopt;
  TPolyMatrix<K> a = normal_form(s, x, wx), b = normal_form(s, y, wx);
  if (!(sym_coordinates(pairings(a, a, s.v_gram), wx.types) == sym_coordinates(pairings(b, b, s.v_gram), wx.types)))
    return std::nullopt;
  if (wx.size() == 0) return TPolyMatrix<K>::identity(s.field(), s.precision, s.n());
  TPolyMatrix<K> bt = witt_lift(a, b, wx.types, s.v_gram);
  TPolyMatrix<K> g = extend_isometry(a, bt, s.v_gram);
  if (!(act(s, x, g) == y)) throw Error("internal: transport does not map x to y");
  return g;
}

/// Product of random reflections in vectors of V[t]/t^K with unit norm.
template <class K, class Rng>
TPolyMatrix<K> random_orthogonal(const Matrix<K>& q, std::size_t order, Rng& rng, std::size_t factors = 4) {
  const auto& f = q.field();
  std::size_t n = q.rows();
  TPolyMatrix<K> g = TPolyMatrix<K>::identity(f, order, n);
  TPolyMatrix<K> qh = TPolyMatrix<K>::constant(q, order);
  for (std::size_t k = 0; k < factors;) {
    TPolyMatrix<K> w(f, order, 1, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t = 0; t < order; ++t) w(0, j)[t] = f.random(rng, 2);
    TruncPoly<K> ww = pairings(w, w, q)(0, 0);
    if (!ww.is_unit()) continue;
    TruncPoly<K> c = ww.inverse() * f.from_int(2);
    TPolyMatrix<K> r = TPolyMatrix<K>::identity(f, order, n) - (qh * w.transpose() * w).scaled(c);
    g = g * r;
    ++k;
  }
  return g;
}

// --- tangent map of T_W ---

/// Matrix of dT_x : W (x) V -> S_t^2(W) over F. Domain basis t^s e_i (x) v_b
/// (i, then s < k_i, then b); codomain coordinates as in sym_coordinates,
/// t^0..t^{k_j - 1} for each (i <= j). Row r is the image of domain vector r.
template <class K>
Matrix<K> tangent_map(const TensorSetting<K>& s, const Matrix<K>& x, const QuasiBasis<K>& w) {
  const auto& f = s.field();
  TPolyMatrix<K> ws = normal_form(s, x, w);
  std::size_t r = w.size(), n = s.n(), order = s.precision;
  std::size_t dom = 0;
  for (auto k : w.types) dom += k * n;
  Matrix<K> out(f, dom, sym_dimension(w.types));
  std::size_t row = 0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t t = 0; t < w.types[i]; ++t)
      for (std::size_t b = 0; b < n; ++b, ++row) {
        TPolyMatrix<K> u(f, order, r, n);
        u(i, b) = TruncPoly<K>::monomial(f, order, t);
        TPolyMatrix<K> p = pairings(ws, u, s.v_gram);
        TPolyMatrix<K> d = p + p.transpose();
        auto coords = sym_coordinates(d, w.types);
        std::size_t col = 0, idx = 0;
        for (std::size_t a = 0; a < r; ++a)
          for (std::size_t c = a; c < r; ++c, ++idx)
            for (std::size_t e = 0; e < w.types[c]; ++e) out(row, col++) = coords[idx][e];
      }
  return out;
}

/// Flattened T_W coordinates (same order as the tangent map codomain).
template <class K>
Matrix<K> flatten_sym(const OrbitInvariant<K>& inv) {
  Matrix<K> out(inv.w.field(), 1, sym_dimension(inv.types));
  std::size_t col = 0, idx = 0;
  for (std::size_t a = 0; a < inv.types.size(); ++a)
    for (std::size_t c = a; c < inv.types.size(); ++c, ++idx)
      for (std::size_t e = 0; e < inv.types[c]; ++e) out(0, col++) = inv.coords[idx][e];
  return out;
}

/// Tensor u (x) ... with domain coordinates `u` (as in tangent_map) back to M_- (x) V coordinates.
template <class K>
Matrix<K> domain_vector(const TensorSetting<K>& s, const QuasiBasis<K>& w, const Matrix<K>& u) {
  TPolyMatrix<K> us(s.field(), s.precision, w.size(), s.n());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t t = 0; t < w.types[i]; ++t)
      for (std::size_t b = 0; b < s.n(); ++b) us(i, b)[t] = u(0, pos++);
  return from_normal_form(s, w, us);
}

struct SubmersiveReport {
  bool rank_criterion;   // rank dT_x = dim S_t^2(W)
  bool image_criterion;  // Im f_x = W
  std::size_t rank;
  std::size_t target_dim;
};

template <class K>
SubmersiveReport is_submersive(const TensorSetting<K>& s, const Matrix<K>& x, const QuasiBasis<K>& w) {
  std::size_t rk = rank(tangent_map(s, x, w));
  std::size_t dim = sym_dimension(w.types);
  bool image = image_of(s, x).span == w.span;
  return {rk == dim, image, rk, dim};
}

// --- brute force over finite fields ---

/// O(V)(F_q) by row-by-row search: row i ranges over vectors r with
/// (r, r_j) = Q_ij for all j <= i.
inline std::vector<Matrix<ModP>> orthogonal_group_residue(const Matrix<ModP>& q, std::uint64_t limit) {
  const auto& f = q.field();
  std::size_t n = q.rows();
  std::uint32_t p = f.modulus();
  require_within(saturating_pow(p, n), limit, "the space V(F_q)");
  auto vecs = all_vectors(Matrix<ModP>::identity(f, n), p);
  std::vector<Matrix<ModP>> out;
  std::vector<Matrix<ModP>> rows;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      Matrix<ModP> g(f, 0, n);
      for (const auto& r : rows) g = Matrix<ModP>::vstack(g, r);
      out.push_back(g);
      require_within(out.size(), limit, "O(V)(F_q)");
      return;
    }
    for (const auto& v : vecs) {
      if (!((v * q * v.transpose())(0, 0) == q(i, i))) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) ok = (v * q * rows[j].transpose())(0, 0) == q(i, j);
      if (!ok) continue;
      rows.push_back(v);
      rec(i + 1);
      rows.pop_back();
    }
  };
  rec(0);
  return out;
}

/// G(F_q[t]/t^K) = O(V) over the truncated ring, enumerated by lifting each
/// residue element through the t-adic layers (each layer is an affine space
/// of dimension n(n-1)/2).
inline std::vector<TPolyMatrix<ModP>> orthogonal_group(const Matrix<ModP>& q, std::size_t order, std::uint64_t limit) {
  const auto& f = q.field();
  std::size_t n = q.rows();
  std::uint32_t p = f.modulus();
  auto base = orthogonal_group_residue(q, limit);
  std::uint64_t expected = base.size();
  for (std::size_t j = 1; j < order; ++j) expected = std::min<std::uint64_t>(UINT64_MAX / 2, expected * saturating_pow(p, n * (n - 1) / 2));
  require_within(expected, limit, "G(F_q[t]/t^K)");
  std::vector<TPolyMatrix<ModP>> out;
  std::vector<Matrix<ModP>> layers;
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == order) {
      TPolyMatrix<ModP> g(f, order, n, n);
      for (std::size_t s = 0; s < order; ++s) g.set_coefficient(s, layers[s]);
      out.push_back(g);
      return;
    }
    const Matrix<ModP>& g0 = layers[0];
    Matrix<ModP> qg0t = q * g0.transpose(), g0q = g0 * q;
    Matrix<ModP> sys(f, n * n, n * n), rhs(f, n * n, 1);
    Matrix<ModP> r2(f, n, n);
    for (std::size_t s = 1; s < j; ++s) r2 -= layers[s] * q * layers[j - s].transpose();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t r = 0; r < n; ++r) {
          sys(a * n + w, a * n + r) += qg0t(r, w);
          sys(a * n + w, w * n + r) += g0q(a, r);
        }
        rhs(a * n + w, 0) = r2(a, w);
      }
    auto sol = solve_linear(sys, rhs);
    if (!sol.consistent) throw Error("internal: orthogonal layer has no solution");
    for (const auto& k : all_vectors(sol.kernel, p)) {
      Matrix<ModP> v = *sol.particular + k;
      Matrix<ModP> gj(f, n, n);
      for (std::size_t i = 0; i < n * n; ++i) gj(i / n, i % n) = v(0, i);
      layers.push_back(gj);
      rec(j + 1);
      layers.pop_back();
    }
  };
  for (const auto& g0 : base) {
    layers = {g0};
    rec(1);
  }
  return out;
}

struct BruteForceOrbits {
  std::vector<std::size_t> label;  // orbit label per element index (base-q digits of X, row-major)
  std::size_t orbits = 0;
  std::size_t group_order = 0;
};

inline Matrix<ModP> decode_element(const TensorSetting<ModP>& s, std::uint64_t idx) {
  std::uint32_t p = s.field().modulus();
  Matrix<ModP> x(s.field(), s.m(), s.n());
  for (std::size_t a = 0; a < s.m(); ++a)
    for (std::size_t b = 0; b < s.n(); ++b) {
      x(a, b) = ModP(static_cast<std::int64_t>(idx % p), p);
      idx /= p;
    }
  return x;
}

inline std::uint64_t encode_element(const Matrix<ModP>& x) {
  std::uint64_t idx = 0;
  std::uint32_t p = x.field().modulus();
  for (std::size_t k = x.data().size(); k-- > 0;) idx = idx * p + x.data()[k].value();
  return idx;
}

/// Orbit partition of M_- (x) V(F_q) under the full enumerated group.
inline BruteForceOrbits brute_force_orbits(const TensorSetting<ModP>& s, std::uint64_t limit = enumeration_limit(1'000'000)) {
  std::uint32_t p = s.field().modulus();
  std::size_t dim = s.m() * s.n();
  std::uint64_t count = saturating_pow(p, dim);
  require_within(count, limit, "M_- (x) V(F_q)");
  auto group = orthogonal_group(s.v_gram, s.precision, limit);
  std::vector<std::size_t> parent(count);
  for (std::size_t i = 0; i < count; ++i) parent[i] = i;
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  // The action is linear: precompute images of coordinate vectors.
  std::vector<std::uint64_t> weight(dim, 1);
  for (std::size_t k = 1; k < dim; ++k) weight[k] = weight[k - 1] * p;
  for (const auto& g : group) {
    std::vector<std::vector<std::uint32_t>> images(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      Matrix<ModP> e(s.field(), s.m(), s.n());
      e(k / s.n(), k % s.n()) = s.field().one();
      Matrix<ModP> y = act(s, e, g);
      for (const auto& c : y.data()) images[k].push_back(c.value());
    }
    std::vector<std::uint32_t> acc(dim);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::fill(acc.begin(), acc.end(), 0);
      std::uint64_t rest = idx;
      for (std::size_t k = 0; k < dim; ++k, rest /= p) {
        std::uint32_t c = static_cast<std::uint32_t>(rest % p);
        if (!c) continue;
        for (std::size_t l = 0; l < dim; ++l) acc[l] = (acc[l] + c * images[k][l]) % p;
      }
      std::uint64_t img = 0;
      for (std::size_t l = 0; l < dim; ++l) img += acc[l] * weight[l];
      std::size_t a = find(idx), b = find(img);
      if (a != b) parent[a] = b;
    }
  }
  BruteForceOrbits out;
  out.group_order = group.size();
  out.label.resize(count);
  std::map<std::size_t, std::size_t> ids;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    auto [it, fresh] = ids.emplace(find(idx), ids.size());
    out.label[idx] = it->second;
  }
  out.orbits = ids.size();
  return out;
}

struct CensusClass {
  std::vector<std::size_t> w_type;
  std::string invariant;
  std::size_t size = 0;          // elements with this invariant
  std::size_t orbit_size = 0;    // brute-force orbit of the first such element
  std::uint64_t representative = 0;
  OrbitInvariant<ModP> data;
};

struct OrbitCensus {
  std::size_t elements = 0;
  std::size_t group_order = 0;
  std::size_t brute_force_orbits = 0;
  std::size_t invariant_classes = 0;
  bool partitions_equal = false;
  std::vector<CensusClass> classes;
};

/// Compares the partition of M_- (x) V(F_q) by the invariant (Im f_x, T_W(x))
/// with the brute-force orbit partition, element by element.
inline OrbitCensus orbit_census(const TensorSetting<ModP>& s, std::uint64_t limit = enumeration_limit(1'000'000)) {
  auto bf = brute_force_orbits(s, limit);
  OrbitCensus c;
  c.elements = bf.label.size();
  c.group_order = bf.group_order;
  c.brute_force_orbits = bf.orbits;
  std::map<std::string, std::size_t> inv_ids;
  std::vector<std::size_t> inv_label(c.elements);
  for (std::uint64_t idx = 0; idx < c.elements; ++idx) {
    auto inv = orbit_invariant(s, decode_element(s, idx));
    auto key = inv.str();
    auto [it, fresh] = inv_ids.emplace(key, inv_ids.size());
    if (fresh) c.classes.push_back({inv.types, key, 0, 0, idx, inv});
    ++c.classes[it->second].size;
    inv_label[idx] = it->second;
  }
  c.invariant_classes = inv_ids.size();
  std::vector<std::size_t> orbit_sizes(bf.orbits, 0);
  for (auto l : bf.label) ++orbit_sizes[l];
  for (auto& cl : c.classes) cl.orbit_size = orbit_sizes[bf.label[cl.representative]];
  // equal partitions iff label <-> label is a bijection on the pairs that occur
  std::map<std::size_t, std::size_t> fwd, bwd;
  bool ok = true;
  for (std::uint64_t idx = 0; idx < c.elements && ok; ++idx) {
    auto [f1, n1] = fwd.emplace(bf.label[idx], inv_label[idx]);
    auto [b1, n2] = bwd.emplace(inv_label[idx], bf.label[idx]);
    ok = f1->second == inv_label[idx] && b1->second == bf.label[idx];
  }
  c.partitions_equal = ok && c.brute_force_orbits == c.invariant_classes;
  return c;
}

}  // namespace snt
