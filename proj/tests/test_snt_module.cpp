#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "snt/snt_module.hpp"
#include "snt/tpoly.hpp"

using namespace snt;

namespace {

using Partitions = std::vector<std::vector<std::size_t>>;

const Partitions kPartitions = {{1}, {2}, {3}, {1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 1, 1}, {3, 2, 1}, {4, 2}};

template <class K>
void check_decomposition(const SntModule<K>& m, const std::vector<std::size_t>& expected) {
  auto d = decompose(m);
  CHECK(d.partition == expected);
  auto std_mod = standard_module<K>(m.field(), d.partition);
  const auto& p = d.from_standard;
  CHECK(p * m.gram * p.transpose() == std_mod.gram);
  CHECK(p * m.t_action == std_mod.t_action * p);
  CHECK(p * d.to_standard == Matrix<K>::identity(m.field(), m.dim()));
}

// All d-dimensional subspaces of F_p^n, as RREF bases.
std::vector<Matrix<ModP>> all_subspaces(const PrimeField& f, std::size_t n, std::size_t d) {
  std::vector<Matrix<ModP>> out;
  std::uint32_t p = f.modulus();
  std::vector<std::size_t> piv(d);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t i, std::size_t start) {
    if (i == d) {
      // free positions: (row r, col c) with c > piv[r] and c not a pivot
      std::vector<std::pair<std::size_t, std::size_t>> free;
      std::set<std::size_t> pivset(piv.begin(), piv.end());
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = piv[r] + 1; c < n; ++c)
          if (!pivset.count(c)) free.push_back({r, c});
      std::vector<std::uint32_t> val(free.size(), 0);
      while (true) {
        Matrix<ModP> m(f, d, n);
        for (std::size_t r = 0; r < d; ++r) m(r, piv[r]) = f.one();
        for (std::size_t k = 0; k < free.size(); ++k) m(free[k].first, free[k].second) = f.from_int(val[k]);
        out.push_back(m);
        std::size_t k = 0;
        while (k < free.size() && ++val[k] == p) val[k++] = 0;
        if (k == free.size()) break;
      }
      return;
    }
    for (std::size_t c = start; c < n; ++c) {
      piv[i] = c;
      choose(i + 1, c + 1);
    }
  };
  choose(0, 0);
  return out;
}

}  // namespace

TEST_CASE("H_k is a valid module of Jordan type (k, k)") {
  RationalField q;
  for (std::size_t k = 1; k <= 5; ++k) {
    auto h = make_H<Rational>(q, k);
    CHECK(validate(h).empty());
    CHECK(jordan_type(h.t_action, Matrix<Rational>::identity(q, 2 * k)) == std::vector<std::size_t>{k, k});
  }
  CHECK_THROWS_AS(make_H<Rational>(q, 0), InvalidModule);
}

TEST_CASE("invalid modules are rejected with a reason") {
  PrimeField f(5);
  auto h = make_H<ModP>(f, 2);
  auto bad_gram = h;
  bad_gram.gram(0, 3) = f.from_int(2);
  CHECK_FALSE(validate(bad_gram).empty());
  CHECK_THROWS_AS(decompose(bad_gram), InvalidModule);

  auto not_self_adjoint = h;
  not_self_adjoint.t_action(0, 1) = f.zero();
  not_self_adjoint.t_action(0, 3) = f.one();
  CHECK_FALSE(validate(not_self_adjoint).empty());

  auto degenerate = h;
  degenerate.gram = Matrix<ModP>(f, 4, 4);
  CHECK_THROWS_AS(decompose(degenerate), InvalidModule);

  auto not_nilpotent = h;
  not_nilpotent.t_action = Matrix<ModP>::identity(f, 4);
  CHECK_FALSE(validate(not_nilpotent).empty());
}

TEST_CASE("decompose recovers the partition of standard modules") {
  RationalField q;
  PrimeField f5(5), f3(3);
  for (const auto& part : kPartitions) {
    check_decomposition(standard_module<Rational>(q, part), part);
    check_decomposition(standard_module<ModP>(f5, part), part);
    check_decomposition(standard_module<ModP>(f3, part), part);
  }
}

TEST_CASE("decompose is invariant under base change") {
  std::mt19937_64 rng(7);
  RationalField q;
  PrimeField f3(3), f7(7);
  for (const auto& part : kPartitions) {
    for (int trial = 0; trial < 3; ++trial) {
      auto mq = standard_module<Rational>(q, part);
      auto b = random_invertible<Rational>(q, mq.dim(), rng);
      check_decomposition(change_basis(mq, b), part);

      auto m3 = standard_module<ModP>(f3, part);
      auto s = random_symplectic(m3.gram, rng);
      auto conj = change_basis(m3, s);
      CHECK(conj.gram == m3.gram);
      check_decomposition(conj, part);

      auto m7 = standard_module<ModP>(f7, part);
      check_decomposition(change_basis(m7, random_invertible<ModP>(f7, m7.dim(), rng)), part);
    }
  }
}

TEST_CASE("decompose agrees with the Jordan type oracle on shuffled sums") {
  std::mt19937_64 rng(99);
  PrimeField f(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> part;
    std::size_t blocks = 1 + trial % 3;
    for (std::size_t i = 0; i < blocks; ++i) part.push_back(1 + (trial * 7 + i * 3) % 4);
    // direct sum in the given (unsorted) order
    auto m = standard_module<ModP>(f, part);
    m = change_basis(m, random_invertible<ModP>(f, m.dim(), rng));
    auto jt = jordan_type(m.t_action, Matrix<ModP>::identity(f, m.dim()));
    std::vector<std::size_t> halved;
    for (std::size_t i = 0; i < jt.size(); i += 2) halved.push_back(jt[i]);
    auto d = decompose(m);
    CHECK(d.partition == halved);
  }
}

TEST_CASE("a vector pairs trivially with its own t-chain") {
  std::mt19937_64 rng(17);
  RationalField q;
  for (const auto& part : kPartitions) {
    auto m = standard_module<Rational>(q, part);
    m = change_basis(m, random_invertible<Rational>(q, m.dim(), rng));
    for (int trial = 0; trial < 5; ++trial) {
      Matrix<Rational> xi(q, 1, m.dim());
      for (std::size_t j = 0; j < m.dim(); ++j) xi(0, j) = q.random(rng, 4);
      Matrix<Rational> w = xi;
      for (std::size_t k = 0; k <= 4; ++k) {
        CHECK(m.pair(xi, w).is_zero());
        w = w * m.t_action;
      }
    }
  }
}

TEST_CASE("element orders and small quasi-bases") {
  RationalField q;
  auto h3 = make_H<Rational>(q, 3);
  auto e1 = Matrix<Rational>::from_ints(q, {{1, 0, 0, 0, 0, 0}});
  CHECK(element_order(h3.t_action, e1) == 3);
  CHECK(element_order(h3.t_action, e1 * h3.t_action * h3.t_action) == 1);
  CHECK(element_order(h3.t_action, Matrix<Rational>(q, 1, 6)) == 0);
  auto h2 = make_H<Rational>(q, 2);
  auto qb = quasi_basis(h2.t_action, Matrix<Rational>::from_ints(q, {{1, 0, 0, 0}, {0, 1, 0, 0}}));
  CHECK(qb.types == std::vector<std::size_t>{2});
  CHECK(qb.generators == Matrix<Rational>::from_ints(q, {{1, 0, 0, 0}}));
  qb = quasi_basis(h2.t_action, Matrix<Rational>::from_ints(q, {{0, 1, 0, 0}}));
  CHECK(qb.types == std::vector<std::size_t>{1});
  auto plus = Matrix<Rational>::from_ints(q, {{0, 0, 1, 0}, {0, 0, 0, 1}});
  CHECK(is_t_lagrangian(h2, plus));
  CHECK_FALSE(is_t_lagrangian(h2, e1.block(0, 0, 1, 4)));
  CHECK(standard_t_lagrangian<Rational>(q, {2}, {1}) == Matrix<Rational>::from_ints(q, {{0, 1, 0, 0}, {0, 0, 0, 1}}));
  CHECK_THROWS_AS(standard_t_lagrangian<Rational>(q, {2}, {2}), DimensionMismatch);
}

TEST_CASE("quasi-basis spans the submodule with its Jordan type") {
  std::mt19937_64 rng(5);
  PrimeField f(3);
  for (const auto& part : kPartitions) {
    auto m = standard_module<ModP>(f, part);
    auto fl = standard_flag<ModP>(f, part);
    for (int trial = 0; trial < 4; ++trial) {
      Matrix<ModP> gens(f, 1 + trial % 2, m.dim());
      for (std::size_t i = 0; i < gens.rows(); ++i) {
        Matrix<ModP> v(f, 1, m.dim());
        for (std::size_t j = 0; j < fl.minus.rows(); ++j) v += fl.minus.row(j) * f.random(rng);
        gens.set_row(i, v);
      }
      Matrix<ModP> v0 = gens.row(0);
      if (rank(Matrix<ModP>::vstack(v0, v0 * m.t_action)) > rank(v0))
        CHECK_THROWS_AS(quasi_basis(m.t_action, v0), NotTStable);
      else
        CHECK_NOTHROW(quasi_basis(m.t_action, v0));
      auto qb = quasi_basis(m.t_action, t_closure(m.t_action, gens));
      auto expanded = expand_quasi_basis(m.t_action, qb);
      CHECK(rank(expanded) == qb.span.rows());
      CHECK(expanded.rows() == qb.span.rows());
      CHECK(same_span(expanded, t_closure(m.t_action, gens)));
      CHECK(std::is_sorted(qb.types.rbegin(), qb.types.rend()));
      CHECK(qb.types == jordan_type(m.t_action, qb.span));
      // canonical: depends only on the subspace
      auto again = quasi_basis(m.t_action, Matrix<ModP>::vstack(qb.span, gens));
      CHECK(again.generators == qb.generators);
    }
  }
}

TEST_CASE("quasi-basis types match the Smith form of a presentation") {
  // M_- of H_K^n is free of rank n over F[t]/t^K, so a submodule generated by
  // rows g_i has types K - d_i for the Smith exponents d_i < K.
  std::mt19937_64 rng(31);
  PrimeField f(3);
  for (std::size_t kk = 1; kk <= 3; ++kk)
    for (std::size_t n = 1; n <= 3; ++n)
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<std::size_t> part(n, kk);
        auto m = standard_module<ModP>(f, part);
        std::size_t r = 1 + (trial % 3);
        TPolyMatrix<ModP> a(f, kk, r, n);
        Matrix<ModP> gens(f, r, m.dim());
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t s = 0; s < kk; ++s) {
              ModP c = (s == 0 && trial % 2) ? f.zero() : f.random(rng);
              a(i, j)[s] = c;
              gens(i, j * 2 * kk + s) = c;  // t^s e1 of block j
            }
        auto qb = quasi_basis(m.t_action, t_closure(m.t_action, gens));
        auto sf = smith_form_t(a);
        std::vector<std::size_t> expected;
        for (auto d : sf.exponents)
          if (d < kk) expected.push_back(kk - d);
        std::sort(expected.rbegin(), expected.rend());
        CHECK(qb.types == expected);
      }
}

TEST_CASE("t-Lagrangian enumeration matches an exhaustive subspace oracle") {
  PrimeField f(3);
  for (const Partitions::value_type& part : Partitions{{1}, {2}, {1, 1}, {3}, {2, 1}}) {
    auto m = standard_module<ModP>(f, part);
    auto found = enumerate_t_lagrangians(m);
    std::size_t oracle = 0;
    for (const auto& u : all_subspaces(f, m.dim(), m.dim() / 2))
      if (is_t_lagrangian(m, u)) ++oracle;
    CHECK(found.size() == oracle);
    for (const auto& u : found) CHECK(is_t_lagrangian(m, u));
    for (const auto& idx : standard_index_tuples(part)) {
      auto l = standard_t_lagrangian<ModP>(f, part, idx);
      CHECK(is_t_lagrangian(m, l));
      bool present = false;
      for (const auto& u : found) present = present || u == l;
      CHECK(present);
    }
  }
}

TEST_CASE("t-Lagrangian counts for H_1 and H_2 over F_3") {
  PrimeField f(3);
  CHECK(enumerate_t_lagrangians(make_H<ModP>(f, 1)).size() == 4);
  CHECK(enumerate_t_lagrangians(make_H<ModP>(f, 2)).size() == 13);
}

TEST_CASE("enumeration respects the size guard") {
  PrimeField f(3);
  auto m = standard_module<ModP>(f, {2, 2});
  CHECK_THROWS_AS(enumerate_t_lagrangians(m, 100), GuardExceeded);
}

TEST_CASE("rho map is t-linear, self-dual and inverted by the graph construction") {
  PrimeField f(3);
  for (const Partitions::value_type& part : Partitions{{1}, {2}, {1, 1}, {2, 1}, {3}}) {
    auto m = standard_module<ModP>(f, part);
    auto fl = standard_flag<ModP>(f, part);
    auto lag = enumerate_t_lagrangians(m);
    std::map<std::vector<std::uint32_t>, std::size_t> per_w;
    for (const auto& u : lag) {
      auto r = rho_of(m, fl, u);
      CHECK(r.beta == r.beta.transpose());
      CHECK(is_t_stable(m.t_action, r.w));
      CHECK(rho_is_t_linear(m, r));
      CHECK(graph_of(m, fl, r.w, r.beta) == row_space(u));
      ++per_w[subspace_key(r.w)];
    }
    // every t-submodule W of M_- is realized, by exactly |F_W| Lagrangians
    auto tm = restricted_action(m.t_action, fl.minus);
    std::size_t total = 0;
    for (const auto& wc : enumerate_t_submodules(tm)) {
      Matrix<ModP> w = wc.rows() ? row_space(wc * fl.minus) : Matrix<ModP>(f, 0, m.dim());
      std::size_t fw = fw_basis(m.t_action, w).size();
      std::size_t count = 1;
      for (std::size_t i = 0; i < fw; ++i) count *= 3;
      CHECK(per_w[subspace_key(w)] == count);
      total += count;
      // every beta in F_W gives back a t-Lagrangian
      if (w.rows()) {
        auto basis = fw_basis(m.t_action, w);
        Matrix<ModP> beta(f, w.rows(), w.rows());
        for (const auto& b : basis) beta += b;
        CHECK(is_t_lagrangian(m, graph_of(m, fl, w, beta)));
      }
    }
    CHECK(total == lag.size());
  }
}

TEST_CASE("rho totals for H_1 and H_2 over F_3") {
  PrimeField f(3);
  auto totals = [&](std::size_t k) {
    auto m = make_H<ModP>(f, k);
    auto fl = standard_flag<ModP>(f, {k});
    std::map<std::size_t, std::size_t> by_dim;
    for (const auto& u : enumerate_t_lagrangians(m)) ++by_dim[rho_of(m, fl, u).w.rows()];
    return by_dim;
  };
  CHECK(totals(1) == std::map<std::size_t, std::size_t>{{0, 1}, {1, 3}});
  CHECK(totals(2) == std::map<std::size_t, std::size_t>{{0, 1}, {1, 3}, {2, 9}});
}
