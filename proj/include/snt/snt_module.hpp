#pragma once

// Symplectic nilpotent t-modules: a finite-dimensional F-space M with a
// nondegenerate alternating form and a nilpotent self-adjoint operator t.
// Vectors are rows; t acts as v -> v * T and <u, v> = u * G * v^T.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "snt/errors.hpp"
#include "snt/guard.hpp"
#include "snt/matrix.hpp"
#include "snt/scalar.hpp"

namespace snt {

template <class K>
struct SntModule {
  Matrix<K> t_action;  // T
  Matrix<K> gram;      // G, alternating

  const FieldOf<K>& field() const { return gram.field(); }
  std::size_t dim() const { return gram.rows(); }

  K pair(const Matrix<K>& u, const Matrix<K>& v) const { return (u * gram * v.transpose())(0, 0); }
};

/// H_k: basis e1, t e1, ..., t^{k-1} e1, e2, ..., t^{k-1} e2 with
/// <t^i e1, t^j e2> = 1 exactly when i + j = k - 1.
template <class K>
SntModule<K> make_H(const FieldOf<K>& f, std::size_t k) {
  if (k == 0) throw InvalidModule("H_k needs k >= 1");
  Matrix<K> t(f, 2 * k, 2 * k), g(f, 2 * k, 2 * k);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t i = 0; i + 1 < k; ++i) t(b * k + i, b * k + i + 1) = f.one();
  for (std::size_t i = 0; i < k; ++i) {
    g(i, 2 * k - 1 - i) = f.one();
    g(2 * k - 1 - i, i) = -f.one();
  }
  return {t, g};
}

template <class K>
SntModule<K> direct_sum(const SntModule<K>& a, const SntModule<K>& b) {
  return {Matrix<K>::block_diagonal(a.t_action, b.t_action), Matrix<K>::block_diagonal(a.gram, b.gram)};
}

/// H_{k_1} + ... + H_{k_n} in the order given.
template <class K>
SntModule<K> standard_module(const FieldOf<K>& f, const std::vector<std::size_t>& partition) {
  SntModule<K> m{Matrix<K>(f, 0, 0), Matrix<K>(f, 0, 0)};
  for (auto k : partition) m = direct_sum(m, make_H<K>(f, k));
  return m;
}

/// Human-readable list of the module axioms that fail; empty when valid.
template <class K>
std::vector<std::string> validate(const SntModule<K>& m) {
  std::vector<std::string> bad;
  const auto& g = m.gram;
  const auto& t = m.t_action;
  if (!g.is_square() || !t.is_square() || g.rows() != t.rows()) {
    bad.push_back("gram and t_action must be square of the same size");
    return bad;
  }
  if (!(g.transpose() == -g)) bad.push_back("gram is not alternating: G^T != -G");
  for (std::size_t i = 0; i < g.rows(); ++i)
    if (!g(i, i).is_zero()) {
      bad.push_back("gram is not alternating: nonzero diagonal entry");
      break;
    }
  if (!is_invertible(g)) bad.push_back("gram is degenerate");
  if (!t.pow(t.rows()).is_zero()) bad.push_back("t_action is not nilpotent");
  if (!(t * g == g * t.transpose())) bad.push_back("t is not self-adjoint for the form");
  return bad;
}

template <class K>
void require_valid(const SntModule<K>& m) {
  auto bad = validate(m);
  if (!bad.empty()) {
    std::string msg = "invalid module:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw InvalidModule(msg);
  }
}

/// Smallest j with v * T^j = 0.
template <class K>
std::size_t element_order(const Matrix<K>& t, const Matrix<K>& v) {
  Matrix<K> w = v;
  std::size_t j = 0;
  while (!w.is_zero()) {
    w = w * t;
    if (++j > t.rows()) throw InvalidModule("t_action is not nilpotent");
  }
  return j;
}

/// Smallest t-stable subspace containing the rows of `gens`, as an RREF basis.
template <class K>
Matrix<K> t_closure(const Matrix<K>& t, const Matrix<K>& gens) {
  Matrix<K> cur = row_space(gens);
  while (true) {
    Matrix<K> next = span_sum(cur, cur * t);
    if (next.rows() == cur.rows()) return cur;
    cur = next;
  }
}

template <class K>
bool is_t_stable(const Matrix<K>& t, const Matrix<K>& basis) {
  if (basis.rows() == 0) return true;
  return rank(Matrix<K>::vstack(basis, basis * t)) == rank(basis);
}

template <class K>
bool is_isotropic(const Matrix<K>& gram, const Matrix<K>& basis) {
  if (basis.rows() == 0) return true;
  return (basis * gram * basis.transpose()).is_zero();
}

/// { v : <v, u> = 0 for all rows u of basis }.
template <class K>
Matrix<K> orthogonal_complement(const Matrix<K>& gram, const Matrix<K>& basis) {
  if (basis.rows() == 0) return Matrix<K>::identity(gram.field(), gram.rows());
  return row_space(right_kernel(basis * gram.transpose()));
}

/// Decomposition of a module as an orthogonal sum of H_k's. `from_standard`
/// has as rows the images in M of the standard basis of H_{k_1} + ... + H_{k_n}:
/// a vector with standard coordinates x has M-coordinates x * from_standard.
template <class K>
struct Decomposition {
  std::vector<std::size_t> partition;  // nonincreasing
  Matrix<K> from_standard;
  Matrix<K> to_standard;
};

/// Repeatedly split off a hyperbolic block F[t]xi + F[t]eta with xi of maximal
/// order and eta dual to the chain of xi, then recurse on its complement.
template <class K>
Decomposition<K> decompose(const SntModule<K>& m) {
  require_valid(m);
  const auto& f = m.field();
  const auto& t = m.t_action;
  const auto& g = m.gram;
  std::size_t n = m.dim();
  Matrix<K> sub = Matrix<K>::identity(f, n);
  Matrix<K> p(f, 0, n);
  std::vector<std::size_t> parts;
  while (sub.rows() > 0) {
    std::size_t best = 0, bi = 0;
    for (std::size_t i = 0; i < sub.rows(); ++i) {
      std::size_t o = element_order(t, sub.row(i));
      if (o > best) {
        best = o;
        bi = i;
      }
    }
    // The order of a sum never exceeds the largest order of its terms, so some
    // basis vector already has the maximal order in the subspace.
    Matrix<K> xi = sub.row(bi);
    std::size_t k = best;
    Matrix<K> chain(f, k, n);
    Matrix<K> w = xi;
    for (std::size_t s = 0; s < k; ++s) {
      chain.set_row(s, w);
      w = w * t;
    }
    // eta = y * sub with <t^j xi, eta> = [j == k-1].
    Matrix<K> a = chain * g * sub.transpose();
    Matrix<K> rhs(f, k, 1);
    rhs(k - 1, 0) = f.one();
    auto sol = solve_linear(a, rhs);
    if (!sol.consistent) throw InvalidModule("no dual partner for a maximal-order vector; form is degenerate");
    Matrix<K> eta = *sol.particular * sub;
    Matrix<K> dual(f, k, n);
    w = eta;
    for (std::size_t s = 0; s < k; ++s) {
      dual.set_row(s, w);
      w = w * t;
    }
    Matrix<K> block = Matrix<K>::vstack(chain, dual);
    // No correction of eta is needed: <eta, t^m eta> = <t^m eta, eta> = -<eta, t^m eta>,
    // so the chain of eta is isotropic just like the chain of xi.
    p = Matrix<K>::vstack(p, block);
    parts.push_back(k);
    Matrix<K> coeff = left_kernel(sub * g * block.transpose());
    sub = coeff.rows() ? row_space(coeff * sub) : Matrix<K>(f, 0, n);
  }
  Decomposition<K> d{parts, p, inverse(p)};
  return d;
}

/// Jordan type (block sizes, nonincreasing) of t restricted to a t-stable
/// subspace, computed from ranks of powers. Each H_k contributes two blocks of size k.
template <class K>
std::vector<std::size_t> jordan_type(const Matrix<K>& t, const Matrix<K>& basis) {
  std::size_t d = basis.rows();
  std::vector<std::size_t> r{d};
  Matrix<K> cur = basis;
  while (r.back() > 0) {
    cur = cur * t;
    r.push_back(rank(cur));
  }
  // number of blocks of size >= j is r[j-1] - r[j]
  std::vector<std::size_t> out;
  for (std::size_t j = r.size() - 1; j >= 1; --j) {
    std::size_t ge = r[j - 1] - r[j];
    std::size_t ge_next = j < r.size() - 1 ? r[j] - r[j + 1] : 0;
    for (std::size_t c = 0; c < ge - ge_next; ++c) out.push_back(j);
  }
  return out;
}

/// Generators e_1, ..., e_r of a t-stable subspace with t-orders k_1 >= ... >= k_r
/// such that t^s e_i (s < k_i) is an F-basis.
template <class K>
struct QuasiBasis {
  Matrix<K> generators;              // r x dim
  std::vector<std::size_t> types;    // k_i, nonincreasing
  Matrix<K> span;                    // RREF basis of the subspace

  std::size_t size() const { return types.size(); }
};

namespace detail {

template <class K>
Matrix<K> kernel_of_power(const Matrix<K>& t, const Matrix<K>& w, std::size_t j) {
  if (w.rows() == 0) return w;
  Matrix<K> tj = t.pow(j);
  Matrix<K> y = left_kernel(w * tj);
  if (y.rows() == 0) return Matrix<K>(w.field(), 0, w.cols());
  return row_space(y * w);
}

}  // namespace detail

/// Jordan-chain extraction: for each order k (largest first) pick RREF basis
/// vectors of W cap ker t^k that are independent modulo
/// (W cap ker t^{k-1}) + t (W cap ker t^{k+1}) and the vectors already picked.
template <class K>
QuasiBasis<K> quasi_basis(const Matrix<K>& t, const Matrix<K>& gens) {
  Matrix<K> w = row_space(gens);
  if (!is_t_stable(t, w)) throw NotTStable("generators do not span a t-stable subspace");
  const auto& f = t.field();
  std::size_t n = t.rows();
  QuasiBasis<K> qb{Matrix<K>(f, 0, n), {}, w};
  if (w.rows() == 0) return qb;
  std::size_t top = 0;
  for (std::size_t i = 0; i < w.rows(); ++i) top = std::max(top, element_order(t, w.row(i)));
  for (std::size_t k = top; k >= 1; --k) {
    Matrix<K> ker_k = detail::kernel_of_power(t, w, k);
    Matrix<K> below = detail::kernel_of_power(t, w, k - 1);
    Matrix<K> above = detail::kernel_of_power(t, w, k + 1);
    Matrix<K> cur = span_sum(below, above.rows() ? above * t : above);
    for (std::size_t i = 0; i < ker_k.rows(); ++i) {
      Matrix<K> c = ker_k.row(i);
      if (span_contains(cur, c)) continue;
      cur = Matrix<K>::vstack(cur, c);
      qb.generators = Matrix<K>::vstack(qb.generators, c);
      qb.types.push_back(k);
    }
  }
  return qb;
}

/// The F-basis t^s e_i, s < k_i, listed generator by generator.
template <class K>
Matrix<K> expand_quasi_basis(const Matrix<K>& t, const QuasiBasis<K>& qb) {
  Matrix<K> out(t.field(), 0, t.cols());
  for (std::size_t i = 0; i < qb.size(); ++i) {
    Matrix<K> v = qb.generators.row(i);
    for (std::size_t s = 0; s < qb.types[i]; ++s) {
      out = Matrix<K>::vstack(out, v);
      v = v * t;
    }
  }
  return out;
}

template <class K>
bool is_t_lagrangian(const SntModule<K>& m, const Matrix<K>& basis) {
  return 2 * rank(basis) == m.dim() && is_isotropic(m.gram, basis) && is_t_stable(m.t_action, basis);
}

/// L = L_{i_1} + ... + L_{i_n} inside the standard module, where L_i in H_k is
/// spanned by t^i e1, ..., t^{k-1} e1, t^{k-i} e2, ..., t^{k-1} e2.
template <class K>
Matrix<K> standard_t_lagrangian(const FieldOf<K>& f, const std::vector<std::size_t>& partition,
                                const std::vector<std::size_t>& indices) {
  if (indices.size() != partition.size()) throw DimensionMismatch("one index per H block is needed");
  std::size_t n = 0;
  for (auto k : partition) n += 2 * k;
  Matrix<K> out(f, 0, n);
  std::size_t off = 0;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    std::size_t k = partition[b], i = indices[b];
    if (i >= k) throw DimensionMismatch("index of L_i must be below k");
    for (std::size_t s = i; s < k; ++s) {
      Matrix<K> v(f, 1, n);
      v(0, off + s) = f.one();
      out = Matrix<K>::vstack(out, v);
    }
    for (std::size_t s = k - i; s < k; ++s) {
      Matrix<K> v(f, 1, n);
      v(0, off + k + s) = f.one();
      out = Matrix<K>::vstack(out, v);
    }
    off += 2 * k;
  }
  return row_space(out);
}

/// All index tuples (i_1, ..., i_n) with 0 <= i_b < k_b.
inline std::vector<std::vector<std::size_t>> standard_index_tuples(const std::vector<std::size_t>& partition) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (auto k : partition) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& o : out)
      for (std::size_t i = 0; i < k; ++i) {
        auto v = o;
        v.push_back(i);
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

/// Hashable key of a subspace over a prime field (its RREF entries).
inline std::vector<std::uint32_t> subspace_key(const Matrix<ModP>& basis) {
  Matrix<ModP> r = row_space(basis);
  std::vector<std::uint32_t> key{static_cast<std::uint32_t>(r.rows())};
  for (const auto& x : r.data()) key.push_back(x.value());
  return key;
}

/// Every vector of the row space of `basis` over F_p, in lexicographic order of coefficients.
inline std::vector<Matrix<ModP>> all_vectors(const Matrix<ModP>& basis, std::uint32_t p) {
  std::size_t d = basis.rows();
  std::vector<Matrix<ModP>> out;
  std::vector<std::uint32_t> c(d, 0);
  PrimeField f(p);
  while (true) {
    Matrix<ModP> v(f, 1, basis.cols());
    for (std::size_t i = 0; i < d; ++i)
      if (c[i]) v += basis.row(i) * ModP(c[i], p);
    out.push_back(std::move(v));
    std::size_t i = 0;
    while (i < d && ++c[i] == p) c[i++] = 0;
    if (i == d) break;
  }
  return out;
}

/// All t-stable subspaces U with U isotropic and t-stable, grown one cyclic
/// vector at a time; returns those of half dimension, each as an RREF basis.
inline std::vector<Matrix<ModP>> enumerate_t_lagrangians(const SntModule<ModP>& m,
                                                         std::uint64_t limit = enumeration_limit(10'000'000)) {
  require_valid(m);
  std::uint32_t p = m.field().modulus();
  require_within(saturating_pow(p, m.dim()), limit, "the module M(F_q)");
  const auto& f = m.field();
  std::size_t n = m.dim();
  std::map<std::vector<std::uint32_t>, Matrix<ModP>> level{{subspace_key(Matrix<ModP>(f, 0, n)), Matrix<ModP>(f, 0, n)}};
  std::map<std::vector<std::uint32_t>, Matrix<ModP>> found;
  // Every step strictly enlarges the subspace, so this terminates.
  while (!level.empty()) {
    std::map<std::vector<std::uint32_t>, Matrix<ModP>> next;
    for (const auto& [key, u] : level) {
      Matrix<ModP> perp = orthogonal_complement(m.gram, u);
      for (const auto& v : all_vectors(perp, p)) {
        if (span_contains(u, v)) continue;
        Matrix<ModP> w = t_closure(m.t_action, Matrix<ModP>::vstack(u, v));
        if (2 * w.rows() == n)
          found.emplace(subspace_key(w), w);
        else
          next.emplace(subspace_key(w), w);
      }
    }
    level = std::move(next);
  }
  std::vector<Matrix<ModP>> out;
  for (auto& [k, u] : found) out.push_back(u);
  return out;
}

/// All t-stable subspaces of an F_p-space with nilpotent operator t.
inline std::vector<Matrix<ModP>> enumerate_t_submodules(const Matrix<ModP>& t,
                                                        std::uint64_t limit = enumeration_limit(10'000'000)) {
  std::uint32_t p = t.field().modulus();
  std::size_t n = t.rows();
  require_within(saturating_pow(p, n), limit, "the space F_q^n");
  const auto& f = t.field();
  std::map<std::vector<std::uint32_t>, Matrix<ModP>> seen{{subspace_key(Matrix<ModP>(f, 0, n)), Matrix<ModP>(f, 0, n)}};
  std::vector<Matrix<ModP>> frontier{Matrix<ModP>(f, 0, n)};
  auto everything = all_vectors(Matrix<ModP>::identity(f, n), p);
  while (!frontier.empty()) {
    std::vector<Matrix<ModP>> next;
    for (const auto& u : frontier)
      for (const auto& v : everything) {
        if (span_contains(u, v)) continue;
        Matrix<ModP> w = t_closure(t, Matrix<ModP>::vstack(u, v));
        if (seen.emplace(subspace_key(w), w).second) next.push_back(w);
      }
    frontier = std::move(next);
  }
  std::vector<Matrix<ModP>> out;
  for (auto& [k, u] : seen) out.push_back(u);
  return out;
}

/// A pair of complementary Lagrangians M = M_- + M_+, each given by a basis.
template <class K>
struct LagrangianFlag {
  Matrix<K> minus;
  Matrix<K> plus;
};

/// The flag M_- = L_0, M_+ = L_1 ... in the standard module: M_- is spanned by the
/// e1-chains and M_+ by the e2-chains of each H block.
template <class K>
LagrangianFlag<K> standard_flag(const FieldOf<K>& f, const std::vector<std::size_t>& partition) {
  std::size_t n = 0;
  for (auto k : partition) n += 2 * k;
  Matrix<K> minus(f, 0, n), plus(f, 0, n);
  std::size_t off = 0;
  for (auto k : partition) {
    for (std::size_t s = 0; s < k; ++s) {
      Matrix<K> a(f, 1, n), b(f, 1, n);
      a(0, off + s) = f.one();
      b(0, off + k + s) = f.one();
      minus = Matrix<K>::vstack(minus, a);
      plus = Matrix<K>::vstack(plus, b);
    }
    off += 2 * k;
  }
  return {minus, plus};
}

template <class K>
void check_flag(const SntModule<K>& m, const LagrangianFlag<K>& fl) {
  std::size_t n = m.dim();
  if (fl.minus.cols() != n || fl.plus.cols() != n) throw DimensionMismatch("flag vectors have the wrong length");
  if (2 * rank(fl.minus) != n || 2 * rank(fl.plus) != n || rank(Matrix<K>::vstack(fl.minus, fl.plus)) != n)
    throw InvalidModule("M_- and M_+ must be complementary of half dimension");
  if (!is_isotropic(m.gram, fl.minus) || !is_isotropic(m.gram, fl.plus))
    throw InvalidModule("M_- and M_+ must be isotropic");
}

/// Data attached to a Lagrangian U relative to a flag: W = pi_-(U), the
/// kernel W^perp = U cap M_+, lifts rho(w_i) in M_+ of a basis w_i of W, and
/// the bilinear form beta(w, w') = <w, rho(w')> on W.
template <class K>
struct RhoMap {
  Matrix<K> w;        // basis of W (RREF), rows in M-coordinates
  Matrix<K> w_perp;   // basis of U cap M_+
  Matrix<K> rho;      // row i: a representative of rho(w_i) in M_+
  Matrix<K> beta;     // r x r
};

namespace detail {

template <class K>
std::pair<Matrix<K>, Matrix<K>> split_by_flag(const LagrangianFlag<K>& fl, const Matrix<K>& vecs) {
  Matrix<K> basis = Matrix<K>::vstack(fl.minus, fl.plus);
  Matrix<K> c = vecs * inverse(basis);
  std::size_t h = fl.minus.rows();
  Matrix<K> a = c.block(0, 0, c.rows(), h) * fl.minus;
  Matrix<K> b = c.block(0, h, c.rows(), h) * fl.plus;
  return {a, b};
}

}  // namespace detail

template <class K>
RhoMap<K> rho_of(const SntModule<K>& m, const LagrangianFlag<K>& fl, const Matrix<K>& u_in) {
  check_flag(m, fl);
  Matrix<K> u = row_space(u_in);
  if (2 * u.rows() != m.dim() || !is_isotropic(m.gram, u)) throw InvalidModule("U is not Lagrangian");
  const auto& f = m.field();
  auto [um, up] = detail::split_by_flag(fl, u);
  Matrix<K> w = row_space(um);
  Matrix<K> w_perp = span_intersection(u, fl.plus);
  Matrix<K> rho(f, w.rows(), m.dim());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto y = solve_left(um, w.row(i));
    if (!y) throw Error("internal: projection does not reach W");
    rho.set_row(i, *y * up);
  }
  Matrix<K> beta = w.rows() ? Matrix<K>(w * m.gram * rho.transpose()) : Matrix<K>(f, 0, 0);
  return {w, w_perp, rho, beta};
}

/// Matrix C of t on W in the basis w: w_i * T = sum_j C_ij w_j (W must be t-stable).
template <class K>
Matrix<K> restricted_action(const Matrix<K>& t, const Matrix<K>& w) {
  Matrix<K> c(t.field(), w.rows(), w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto y = solve_left(w, w.row(i) * t);
    if (!y) throw NotTStable("subspace is not t-stable");
    c.set_row(i, *y);
  }
  return c;
}

/// rho is t-linear iff beta(t w, w') = beta(w, t w'), i.e. C beta = beta C^T.
template <class K>
bool rho_is_t_linear(const SntModule<K>& m, const RhoMap<K>& r) {
  if (!is_t_stable(m.t_action, r.w)) return false;
  Matrix<K> c = restricted_action(m.t_action, r.w);
  return c * r.beta == r.beta * c.transpose();
}

/// Basis of F_W: symmetric r x r matrices beta with C beta = beta C^T.
template <class K>
std::vector<Matrix<K>> fw_basis(const Matrix<K>& t, const Matrix<K>& w) {
  const auto& f = t.field();
  std::size_t r = w.rows();
  if (r == 0) return {};
  Matrix<K> c = restricted_action(t, w);
  std::vector<std::pair<std::size_t, std::size_t>> vars;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) vars.push_back({i, j});
  auto unit = [&](std::size_t v) {
    Matrix<K> b(f, r, r);
    b(vars[v].first, vars[v].second) = f.one();
    b(vars[v].second, vars[v].first) = f.one();
    return b;
  };
  Matrix<K> eq(f, r * r, vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    Matrix<K> b = unit(v);
    Matrix<K> d = c * b - b * c.transpose();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) eq(i * r + j, v) = d(i, j);
  }
  Matrix<K> ker = right_kernel(eq);
  std::vector<Matrix<K>> out;
  for (std::size_t k = 0; k < ker.rows(); ++k) {
    Matrix<K> b(f, r, r);
    for (std::size_t v = 0; v < vars.size(); ++v) b += unit(v) * ker(k, v);
    out.push_back(b);
  }
  return out;
}

/// Inverse of rho_of: U = span{w_i + m_i} + W^perp where m_i in M_+ satisfies
/// <w_j, m_i> = beta(j, i) and W^perp = { x in M_+ : <W, x> = 0 }.
template <class K>
Matrix<K> graph_of(const SntModule<K>& m, const LagrangianFlag<K>& fl, const Matrix<K>& w, const Matrix<K>& beta) {
  check_flag(m, fl);
  const auto& f = m.field();
  Matrix<K> plus = row_space(fl.plus);
  Matrix<K> a = w.rows() ? Matrix<K>(w * m.gram * plus.transpose()) : Matrix<K>(f, 0, plus.rows());
  Matrix<K> perp_coeff = w.rows() ? right_kernel(a) : Matrix<K>::identity(f, plus.rows());
  Matrix<K> out = perp_coeff.rows() ? Matrix<K>(perp_coeff * plus) : Matrix<K>(f, 0, m.dim());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto sol = solve_linear(a, beta.col(i));
    if (!sol.consistent) throw InvalidModule("W is not a subspace of M_-");
    out = Matrix<K>::vstack(out, w.row(i) + *sol.particular * plus);
  }
  return row_space(out);
}

/// Random invertible base change B: the module with T' = B T B^{-1}, G' = B G B^T
/// (vector with new coordinates x has old coordinates x * B).
template <class K>
SntModule<K> change_basis(const SntModule<K>& m, const Matrix<K>& b) {
  Matrix<K> bi = inverse(b);
  return {b * m.t_action * bi, b * m.gram * b.transpose()};
}

template <class K, class Rng>
Matrix<K> random_invertible(const FieldOf<K>& f, std::size_t n, Rng& rng) {
  while (true) {
    Matrix<K> b(f, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = f.random(rng, 2);
    if (is_invertible(b)) return b;
  }
}

/// Product of random symplectic transvections x -> x + lambda <x, v> v.
template <class K, class Rng>
Matrix<K> random_symplectic(const Matrix<K>& gram, Rng& rng, std::size_t factors = 8) {
  const auto& f = gram.field();
  std::size_t n = gram.rows();
  Matrix<K> g = Matrix<K>::identity(f, n);
  for (std::size_t s = 0; s < factors; ++s) {
    Matrix<K> v(f, 1, n);
    for (std::size_t j = 0; j < n; ++j) v(0, j) = f.random(rng, 1);
    K lambda = f.random(rng, 2);
    g = g * (Matrix<K>::identity(f, n) + gram * v.transpose() * v * lambda);
  }
  return g;
}

}  // namespace snt
