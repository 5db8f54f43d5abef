#pragma once

// The automorphism group Sp(M,t): matrices commuting with t and preserving
// the form. Structure is read off in the standard coordinates produced by
// decompose(), where M splits into homogeneous levels M(l_1) + ... + M(l_s),
// l_1 > ... > l_s, each a sum of r_i copies of H_{l_i}.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "snt/errors.hpp"
#include "snt/guard.hpp"
#include "snt/matrix.hpp"
#include "snt/snt_module.hpp"
#include "snt/tpoly.hpp"

namespace snt {

template <class K>
bool is_member(const SntModule<K>& m, const Matrix<K>& g) {
  if (g.rows() != m.dim() || g.cols() != m.dim())
    throw DimensionMismatch("automorphism must be " + std::to_string(m.dim()) + "x" + std::to_string(m.dim()));
  return g * m.t_action == m.t_action * g && g * m.gram * g.transpose() == m.gram;
}

/// Level structure of a decomposition: H blocks with equal k are consecutive.
struct LevelLayout {
  std::vector<std::size_t> levels;          // l_1 > ... > l_s
  std::vector<std::size_t> multiplicities;  // r_i
  std::vector<std::size_t> block_offset;    // start of each H block in standard coordinates
  std::vector<std::size_t> block_level;     // level index of each H block

  /// Standard coordinates of e1 (or e2 when second) of every block of level i, s = 0.
  std::vector<std::size_t> heads(std::size_t i, const std::vector<std::size_t>& partition) const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < block_level.size(); ++b)
      if (block_level[b] == i) out.push_back(block_offset[b]);
    for (std::size_t b = 0; b < block_level.size(); ++b)
      if (block_level[b] == i) out.push_back(block_offset[b] + partition[b]);
    return out;
  }

  /// All standard coordinates belonging to level i.
  std::vector<std::size_t> coords(std::size_t i, const std::vector<std::size_t>& partition) const {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < block_level.size(); ++b)
      if (block_level[b] == i)
        for (std::size_t c = 0; c < 2 * partition[b]; ++c) out.push_back(block_offset[b] + c);
    return out;
  }
};

inline LevelLayout level_layout(const std::vector<std::size_t>& partition) {
  LevelLayout lay;
  std::size_t off = 0;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    if (lay.levels.empty() || lay.levels.back() != partition[b]) {
      if (!lay.levels.empty() && lay.levels.back() < partition[b])
        throw InvalidModule("partition must be nonincreasing");
      lay.levels.push_back(partition[b]);
      lay.multiplicities.push_back(0);
    }
    ++lay.multiplicities.back();
    lay.block_offset.push_back(off);
    lay.block_level.push_back(lay.levels.size() - 1);
    off += 2 * partition[b];
  }
  return lay;
}

/// g expressed in standard coordinates: P g P^{-1}.
template <class K>
Matrix<K> to_standard_coords(const Decomposition<K>& d, const Matrix<K>& g) {
  return d.from_standard * g * d.to_standard;
}

template <class K>
Matrix<K> from_standard_coords(const Decomposition<K>& d, const Matrix<K>& g_std) {
  return d.to_standard * g_std * d.from_standard;
}

/// The standard R_k-valued symplectic form [[0, I], [-I, 0]] on R_k^{2n}.
template <class K>
TPolyMatrix<K> ring_symplectic_form(const FieldOf<K>& f, std::size_t k, std::size_t n) {
  TPolyMatrix<K> j(f, k, 2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    j(i, n + i) = TruncPoly<K>::constant(f, k, f.one());
    j(n + i, i) = TruncPoly<K>::constant(f, k, -f.one());
  }
  return j;
}

template <class K>
bool is_ring_symplectic(const TPolyMatrix<K>& g) {
  if (g.rows() != g.cols() || g.rows() % 2) return false;
  auto j = ring_symplectic_form<K>(g.field(), g.order(), g.rows() / 2);
  return g * j * g.transpose() == j;
}

/// Identification of Sp(M,t) for homogeneous M = H_k^n with Sp_{2n}(F[t]/t^k):
/// t^s e1 of copy j corresponds to t^s E_j and t^s e2 to t^s F_j, basis E_1..E_n, F_1..F_n.
template <class K>
class HomogeneousIso {
 public:
  explicit HomogeneousIso(const SntModule<K>& m) : m_(m), d_(decompose(m)) {
    if (d_.partition.empty()) throw InvalidModule("empty module");
    k_ = d_.partition.front();
    n_ = d_.partition.size();
    for (auto k : d_.partition)
      if (k != k_) throw InvalidModule("module is not homogeneous");
  }

  std::size_t level() const { return k_; }
  std::size_t copies() const { return n_; }
  const Decomposition<K>& decomposition() const { return d_; }

  TPolyMatrix<K> to_ring(const Matrix<K>& g) const {
    if (!is_member(m_, g)) throw NotAMember("matrix is not in Sp(M,t)");
    Matrix<K> gs = to_standard_coords(d_, g);
    TPolyMatrix<K> out(m_.field(), k_, 2 * n_, 2 * n_);
    for (std::size_t a = 0; a < 2 * n_; ++a)
      for (std::size_t b = 0; b < 2 * n_; ++b)
        for (std::size_t s = 0; s < k_; ++s) out(a, b)[s] = gs(index(a), index(b) + s);
    return out;
  }

  Matrix<K> from_ring(const TPolyMatrix<K>& gh) const {
    if (gh.rows() != 2 * n_ || gh.cols() != 2 * n_ || gh.order() != k_)
      throw DimensionMismatch("ring matrix has the wrong shape or order");
    Matrix<K> gs(m_.field(), m_.dim(), m_.dim());
    for (std::size_t a = 0; a < 2 * n_; ++a)
      for (std::size_t b = 0; b < 2 * n_; ++b)
        for (std::size_t s = 0; s < k_; ++s)
          for (std::size_t r = s; r < k_; ++r) gs(index(a) + s, index(b) + r) = gh(a, b)[r - s];
    return from_standard_coords(d_, gs);
  }

 private:
  std::size_t index(std::size_t a) const { return a < n_ ? 2 * k_ * a : 2 * k_ * (a - n_) + k_; }

  SntModule<K> m_;
  Decomposition<K> d_;
  std::size_t k_ = 0, n_ = 0;
};

template <class K>
struct BlockProfile {
  std::vector<std::size_t> levels;          // l_1 > ... > l_s
  std::vector<std::size_t> multiplicities;  // r_i
  // blocks[i][j]: the component M(l_i) -> M(l_j) in standard coordinates
  std::vector<std::vector<Matrix<K>>> blocks;
  // reduced[i][j]: the induced map M(l_i)/t -> M(l_j)/t on the heads e1, e2 (2 r_i x 2 r_j)
  std::vector<std::vector<Matrix<K>>> reduced;
  // bar_forms[i](a, b) = <a, t^{l_i - 1} b> on the heads of level i
  std::vector<Matrix<K>> bar_forms;
  bool upper_triangular = true;             // reduced[i][j] = 0 whenever l_i < l_j
  bool diagonal_preserves_bar_form = true;
};

template <class K>
BlockProfile<K> block_profile(const SntModule<K>& m, const Decomposition<K>& d, const Matrix<K>& g) {
  if (!is_member(m, g)) throw NotAMember("matrix is not in Sp(M,t)");
  auto lay = level_layout(d.partition);
  auto std_mod = standard_module<K>(m.field(), d.partition);
  Matrix<K> gs = to_standard_coords(d, g);
  BlockProfile<K> bp;
  bp.levels = lay.levels;
  bp.multiplicities = lay.multiplicities;
  std::size_t s = lay.levels.size();
  bp.blocks.assign(s, {});
  bp.reduced.assign(s, {});
  for (std::size_t i = 0; i < s; ++i) {
    auto ci = lay.coords(i, d.partition);
    auto hi = lay.heads(i, d.partition);
    for (std::size_t j = 0; j < s; ++j) {
      auto cj = lay.coords(j, d.partition);
      auto hj = lay.heads(j, d.partition);
      bp.blocks[i].push_back(gs.select_rows(ci).select_cols(cj));
      Matrix<K> red = gs.select_rows(hi).select_cols(hj);
      if (i > j && !red.is_zero()) bp.upper_triangular = false;
      bp.reduced[i].push_back(red);
    }
    Matrix<K> heads = Matrix<K>::identity(m.field(), m.dim()).select_rows(hi);
    Matrix<K> bar = heads * std_mod.gram * (heads * std_mod.t_action.pow(lay.levels[i] - 1)).transpose();
    bp.bar_forms.push_back(bar);
    const Matrix<K>& r = bp.reduced[i][i];
    if (!(r * bar * r.transpose() == bar)) bp.diagonal_preserves_bar_form = false;
  }
  return bp;
}

template <class K>
BlockProfile<K> block_profile(const SntModule<K>& m, const Matrix<K>& g) {
  return block_profile(m, decompose(m), g);
}

/// True iff every reduced diagonal block is the identity, i.e. g lies in the
/// kernel of the projection to the Levi factor prod Sp_{2 r_i}(F).
template <class K>
bool unipotent_radical_test(const SntModule<K>& m, const Decomposition<K>& d, const Matrix<K>& g) {
  auto bp = block_profile(m, d, g);
  for (std::size_t i = 0; i < bp.levels.size(); ++i)
    if (!(bp.reduced[i][i] == Matrix<K>::identity(m.field(), 2 * bp.multiplicities[i]))) return false;
  return true;
}

template <class K>
bool unipotent_radical_test(const SntModule<K>& m, const Matrix<K>& g) {
  return unipotent_radical_test(m, decompose(m), g);
}

/// Basis of sp(M,t) = { S : S T = T S, S G + G S^T = 0 }.
template <class K>
std::vector<Matrix<K>> lie_algebra_basis(const SntModule<K>& m) {
  require_valid(m);
  const auto& f = m.field();
  std::size_t n = m.dim();
  Matrix<K> eq(f, 2 * n * n, n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Matrix<K> e(f, n, n);
      e(a, b) = f.one();
      Matrix<K> c1 = e * m.t_action - m.t_action * e;
      Matrix<K> c2 = e * m.gram + m.gram * e.transpose();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          eq(i * n + j, a * n + b) = c1(i, j);
          eq(n * n + i * n + j, a * n + b) = c2(i, j);
        }
    }
  Matrix<K> ker = right_kernel(eq);
  std::vector<Matrix<K>> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) {
    Matrix<K> s(f, n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) s(a, b) = ker(r, a * n + b);
    out.push_back(s);
  }
  return out;
}

/// Basis of the Lie algebra of the unipotent radical: elements of sp(M,t)
/// whose reduced diagonal blocks vanish.
template <class K>
std::vector<Matrix<K>> radical_lie_basis(const SntModule<K>& m, const Decomposition<K>& d) {
  auto lie = lie_algebra_basis(m);
  auto lay = level_layout(d.partition);
  const auto& f = m.field();
  std::vector<std::vector<K>> cols;
  for (const auto& s : lie) {
    Matrix<K> ss = to_standard_coords(d, s);
    std::vector<K> c;
    for (std::size_t i = 0; i < lay.levels.size(); ++i) {
      auto h = lay.heads(i, d.partition);
      Matrix<K> red = ss.select_rows(h).select_cols(h);
      c.insert(c.end(), red.data().begin(), red.data().end());
    }
    cols.push_back(std::move(c));
  }
  if (lie.empty()) return {};
  Matrix<K> a(f, cols.front().size(), lie.size());
  for (std::size_t j = 0; j < lie.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) a(i, j) = cols[j][i];
  Matrix<K> ker = right_kernel(a);
  std::vector<Matrix<K>> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) {
    Matrix<K> s(f, m.dim(), m.dim());
    for (std::size_t j = 0; j < lie.size(); ++j)
      if (!ker(r, j).is_zero()) s += lie[j] * ker(r, j);
    out.push_back(s);
  }
  return out;
}

/// Lift of h in Sp_{2r}(F) (basis E_1..E_r, F_1..F_r, standard form) to the
/// block-diagonal element acting on level i as the constant ring matrix h.
template <class K>
Matrix<K> levi_lift(const SntModule<K>& m, const Decomposition<K>& d, std::size_t level, const Matrix<K>& h) {
  auto lay = level_layout(d.partition);
  std::size_t r = lay.multiplicities.at(level), k = lay.levels.at(level);
  if (h.rows() != 2 * r || h.cols() != 2 * r) throw DimensionMismatch("Levi element has the wrong size");
  auto heads = lay.heads(level, d.partition);
  Matrix<K> gs = Matrix<K>::identity(m.field(), m.dim());
  for (auto c : lay.coords(level, d.partition))
    for (std::size_t c2 = 0; c2 < m.dim(); ++c2) gs(c, c2) = m.field().zero();
  for (std::size_t a = 0; a < 2 * r; ++a)
    for (std::size_t b = 0; b < 2 * r; ++b)
      for (std::size_t s = 0; s < k; ++s) gs(heads[a] + s, heads[b] + s) = h(a, b);
  return from_standard_coords(d, gs);
}

/// Symplectic transvection x -> x + lambda <x, v> v for the standard form on F^{2r}.
template <class K>
Matrix<K> symplectic_transvection(const Matrix<K>& v, const K& lambda) {
  std::size_t n = v.cols();
  const auto& f = v.field();
  Matrix<K> j(f, n, n);
  for (std::size_t i = 0; i < n / 2; ++i) {
    j(i, n / 2 + i) = f.one();
    j(n / 2 + i, i) = -f.one();
  }
  return Matrix<K>::identity(f, n) + j * v.transpose() * v * lambda;
}

/// Truncated exponential of a nilpotent matrix; nullopt when a needed factorial
/// is not invertible in the field.
template <class K>
std::optional<Matrix<K>> exp_nilpotent(const Matrix<K>& s) {
  const auto& f = s.field();
  std::size_t n = s.rows();
  Matrix<K> out = Matrix<K>::identity(f, n);
  Matrix<K> term = out;
  for (std::size_t j = 1;; ++j) {
    term = term * s;
    if (term.is_zero()) return out;
    if (j > n) throw Error("matrix is not nilpotent");
    std::uint32_t p = f.characteristic();
    if (p != 0 && j >= p) return std::nullopt;
    term = term * f.from_int(static_cast<long long>(j)).inverse();
    out += term;
  }
}

/// Cayley transform (1 + S/2)(1 - S/2)^{-1}; maps sp(M,t) into Sp(M,t).
template <class K>
Matrix<K> cayley(const Matrix<K>& s) {
  const auto& f = s.field();
  auto half = f.from_int(2).inverse();
  auto id = Matrix<K>::identity(f, s.rows());
  return (id + s * half) * inverse(id - s * half);
}

/// Validated generators: Cayley transforms of a Lie algebra basis and Levi
/// transvections along e_a and e_a + e_b in every level.
template <class K>
std::vector<Matrix<K>> group_generators(const SntModule<K>& m, const Decomposition<K>& d) {
  std::vector<Matrix<K>> out;
  const auto& f = m.field();
  for (const auto& s : lie_algebra_basis(m)) {
    auto id = Matrix<K>::identity(f, m.dim());
    if (is_invertible(Matrix<K>(id - s * f.from_int(2).inverse()))) out.push_back(cayley(s));
  }
  auto lay = level_layout(d.partition);
  for (std::size_t i = 0; i < lay.levels.size(); ++i) {
    std::size_t n = 2 * lay.multiplicities[i];
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        Matrix<K> v(f, 1, n);
        v(0, a) = f.one();
        if (b != a) v(0, b) = f.one();
        out.push_back(levi_lift(m, d, i, symplectic_transvection(v, f.one())));
      }
  }
  for (const auto& g : out)
    if (!is_member(m, g)) throw Error("internal: generator fails membership");
  return out;
}

/// exp(S) h with S a random element of the radical Lie algebra and h a
/// product of random Levi transvections. When the truncated exponential is
/// not available in the characteristic, a random word in the validated
/// generators is returned instead.
template <class K>
Matrix<K> random_element(const SntModule<K>& m, const Decomposition<K>& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& f = m.field();
  auto rad = radical_lie_basis(m, d);
  Matrix<K> s(f, m.dim(), m.dim());
  for (const auto& b : rad) s += b * f.random(rng, 2);
  auto e = exp_nilpotent(s);
  Matrix<K> g = Matrix<K>::identity(f, m.dim());
  if (e) {
    g = *e;
    auto lay = level_layout(d.partition);
    for (std::size_t i = 0; i < lay.levels.size(); ++i) {
      std::size_t n = 2 * lay.multiplicities[i];
      Matrix<K> h = Matrix<K>::identity(f, n);
      for (std::size_t t = 0; t < n + 2; ++t) {
        Matrix<K> v(f, 1, n);
        for (std::size_t j = 0; j < n; ++j) v(0, j) = f.random(rng, 1);
        h = h * symplectic_transvection(v, f.random(rng, 2));
      }
      g = g * levi_lift(m, d, i, h);
    }
  } else {
    auto gens = group_generators(m, d);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    for (int w = 0; w < 24; ++w) g = g * gens[pick(rng)];
  }
  if (!is_member(m, g)) throw Error("internal: sampled element fails membership");
  return g;
}

template <class K>
Matrix<K> random_element(const SntModule<K>& m, std::uint64_t seed) {
  return random_element(m, decompose(m), seed);
}

inline std::vector<std::uint32_t> matrix_key(const Matrix<ModP>& g) {
  std::vector<std::uint32_t> k;
  k.reserve(g.data().size());
  for (const auto& x : g.data()) k.push_back(x.value());
  return k;
}

/// The finite group generated by `gens`, by breadth-first closure.
inline std::vector<Matrix<ModP>> group_closure(const std::vector<Matrix<ModP>>& gens, std::uint64_t limit) {
  if (gens.empty()) return {};
  std::map<std::vector<std::uint32_t>, std::size_t> seen;
  std::vector<Matrix<ModP>> elems{Matrix<ModP>::identity(gens[0].field(), gens[0].rows())};
  seen.emplace(matrix_key(elems[0]), 0);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (const auto& g : gens) {
      Matrix<ModP> h = elems[i] * g;
      if (seen.emplace(matrix_key(h), elems.size()).second) {
        elems.push_back(std::move(h));
        require_within(elems.size(), limit, "the generated group");
      }
    }
  return elems;
}

/// |Sp_{2r}(F_q)| = q^{r^2} prod_{i=1}^r (q^{2i} - 1).
inline std::uint64_t symplectic_group_order(std::uint64_t q, std::size_t r) {
  std::uint64_t n = saturating_pow(q, r * r);
  for (std::size_t i = 1; i <= r; ++i) n *= saturating_pow(q, 2 * i) - 1;
  return n;
}

/// |Sp(M,t)(F_q)| = q^{dim N} prod_i |Sp_{2 r_i}(F_q)|.
inline std::uint64_t sp_group_order(const SntModule<ModP>& m, const Decomposition<ModP>& d) {
  std::uint64_t q = m.field().modulus();
  auto lay = level_layout(d.partition);
  std::uint64_t n = saturating_pow(q, radical_lie_basis(m, d).size());
  for (auto r : lay.multiplicities) n *= symplectic_group_order(q, r);
  return n;
}

/// |Sp(M,t)(F_q)| by testing every element of the centralizer of t.
inline std::uint64_t sp_group_order_exhaustive(const SntModule<ModP>& m, std::uint64_t limit) {
  const auto& f = m.field();
  std::size_t n = m.dim();
  std::uint32_t p = f.modulus();
  Matrix<ModP> eq(f, n * n, n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Matrix<ModP> e(f, n, n);
      e(a, b) = f.one();
      Matrix<ModP> c = e * m.t_action - m.t_action * e;
      for (std::size_t i = 0; i < n * n; ++i) eq(i, a * n + b) = c.data()[i];
    }
  Matrix<ModP> ker = right_kernel(eq);
  require_within(saturating_pow(p, ker.rows()), limit, "the centralizer of t");
  std::uint64_t count = 0;
  for (const auto& c : all_vectors(ker, p)) {
    Matrix<ModP> g(f, n, n);
    for (std::size_t i = 0; i < n * n; ++i) g(i / n, i % n) = c(0, i);
    if (g * m.gram * g.transpose() == m.gram) ++count;
  }
  return count;
}

struct LagrangianOrbits {
  std::size_t lagrangians = 0;
  std::vector<std::size_t> orbit_sizes;
  std::size_t orbits_with_standard = 0;  // orbits containing some standard L_{i_1} + ... + L_{i_n}
};

/// Orbits of Sp(M,t) on the t-Lagrangians of M over F_q, by union-find under
/// the validated generators.
inline LagrangianOrbits lagrangian_orbits(const SntModule<ModP>& m, std::uint64_t limit = enumeration_limit(10'000'000)) {
  auto d = decompose(m);
  auto lag = enumerate_t_lagrangians(m, limit);
  std::map<std::vector<std::uint32_t>, std::size_t> index;
  for (std::size_t i = 0; i < lag.size(); ++i) index.emplace(subspace_key(lag[i]), i);
  std::vector<std::size_t> parent(lag.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& g : group_generators(m, d))
    for (std::size_t i = 0; i < lag.size(); ++i) {
      auto it = index.find(subspace_key(lag[i] * g));
      if (it == index.end()) throw Error("internal: image of a t-Lagrangian is not a t-Lagrangian");
      parent[find(i)] = find(it->second);
    }
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t i = 0; i < lag.size(); ++i) ++sizes[find(i)];
  std::map<std::size_t, bool> has_standard;
  for (const auto& idx : standard_index_tuples(d.partition)) {
    Matrix<ModP> l = standard_t_lagrangian<ModP>(m.field(), d.partition, idx) * d.from_standard;
    auto it = index.find(subspace_key(l));
    if (it == index.end()) throw Error("internal: standard t-Lagrangian missing from the enumeration");
    has_standard[find(it->second)] = true;
  }
  LagrangianOrbits out;
  out.lagrangians = lag.size();
  for (const auto& [root, size] : sizes) {
    out.orbit_sizes.push_back(size);
    if (has_standard.count(root)) ++out.orbits_with_standard;
  }
  return out;
}

}  // namespace snt
