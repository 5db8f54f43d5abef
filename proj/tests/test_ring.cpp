#include <random>

#include "doctest.h"
#include "snt/matrix.hpp"
#include "snt/tpoly.hpp"

using namespace snt;

namespace {

// F-rank of x -> x * A on (F[t]/t^j)^rows, with A reduced modulo t^j.
template <class K>
std::size_t rank_over_truncation(const TPolyMatrix<K>& a, std::size_t j) {
  const auto& f = a.field();
  Matrix<K> big(f, a.rows() * j, a.cols() * j);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t s = 0; s < j; ++s)  // basis vector t^s e_r
      for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t u = 0; s + u < j; ++u) big(r * j + s, c * j + s + u) = a(r, c)[u];
  return rank(big);
}

// Multiset of Smith exponents recovered from ranks over every truncation:
// rank over R_j equals sum_i max(0, j - d_i).
template <class K>
std::vector<std::size_t> exponents_oracle(const TPolyMatrix<K>& a) {
  std::size_t n = a.order();
  std::vector<std::size_t> rk(n + 2, 0);
  for (std::size_t j = 1; j <= n; ++j) rk[j] = rank_over_truncation(a, j);
  // #{i : d_i < j} = rk[j] - rk[j-1]
  std::vector<std::size_t> out;
  std::size_t prev = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t below = rk[j] - rk[j - 1];
    for (std::size_t c = prev; c < below; ++c) out.push_back(j - 1);
    prev = below;
  }
  std::size_t k = std::min(a.rows(), a.cols());
  while (out.size() < k) out.push_back(n);
  return out;
}

template <class K>
TPolyMatrix<K> random_tmatrix(const FieldOf<K>& f, std::size_t order, std::size_t r, std::size_t c,
                              std::mt19937_64& rng, bool sparse) {
  TPolyMatrix<K> a(f, order, r, c);
  std::uniform_int_distribution<int> coin(0, 2);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t s = 0; s < order; ++s)
        if (!sparse || coin(rng) == 0 || s > 0) a(i, j)[s] = f.random(rng, 2);
  return a;
}

}  // namespace

TEST_CASE("prime field rejects characteristic two and composites") {
  CHECK_THROWS_AS(PrimeField(2), FieldMismatch);
  CHECK_THROWS_AS(PrimeField(9), FieldMismatch);
  CHECK_NOTHROW(PrimeField(7));
  PrimeField f(7);
  CHECK(f.parse("3 mod 7") == f.from_int(3));
  CHECK(f.parse("-1") == f.from_int(6));
  CHECK_THROWS_AS(f.parse("3 mod 5"), FieldMismatch);
  CHECK((f.from_int(3) * f.from_int(5)).value() == 1);
  CHECK(f.from_int(3).inverse() == f.from_int(5));
  CHECK_THROWS_AS(f.zero().inverse(), NotAUnit);
}

TEST_CASE("rationals parse and print canonically") {
  RationalField q;
  CHECK(q.parse("6/4").str() == "3/2");
  CHECK(q.parse("-5").str() == "-5");
  CHECK_THROWS(q.parse("1/0"));
  CHECK_THROWS_AS(Rational(0).inverse(), NotAUnit);
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
}

TEST_CASE("truncated polynomial products and inverses") {
  PrimeField f(5);
  TruncPoly<ModP> one_plus_t(f, std::vector<ModP>{f.one(), f.one(), f.zero(), f.zero()});
  auto inv = one_plus_t.inverse();
  CHECK(inv == TruncPoly<ModP>(f, std::vector<ModP>{f.one(), -f.one(), f.one(), -f.one()}));
  CHECK(one_plus_t * inv == TruncPoly<ModP>::constant(f, 4, f.one()));
  CHECK_THROWS_AS(TruncPoly<ModP>::monomial(f, 4, 1).inverse(), NotAUnit);

  RationalField q;
  TruncPoly<Rational> p(q, std::vector<Rational>{Rational(2), Rational(1, 3), Rational(-1), Rational(4)});
  CHECK(p * p.inverse() == TruncPoly<Rational>::constant(q, 4, q.one()));
  auto t2 = TruncPoly<Rational>::monomial(q, 4, 2);
  CHECK((t2 * t2).is_zero());
  CHECK(t2.valuation() == 2);
}

TEST_CASE("solve_linear reports consistency and kernels") {
  RationalField q;
  auto a = Matrix<Rational>::from_ints(q, {{1, 2, 3}, {2, 4, 6}});
  auto b = Matrix<Rational>::from_ints(q, {{1}, {2}});
  auto s = solve_linear(a, b);
  REQUIRE(s.consistent);
  CHECK(s.rank == 1);
  CHECK(s.kernel.rows() == 2);
  CHECK(a * s.particular->transpose() == b);
  auto bad = solve_linear(a, Matrix<Rational>::from_ints(q, {{1}, {3}}));
  CHECK_FALSE(bad.consistent);
  CHECK_THROWS_AS(inverse(a.block(0, 0, 2, 2)), NotAUnit);
}

TEST_CASE("subspace operations") {
  PrimeField f(3);
  auto a = Matrix<ModP>::from_ints(f, {{1, 0, 0}, {0, 1, 0}});
  auto b = Matrix<ModP>::from_ints(f, {{0, 1, 0}, {0, 0, 1}});
  CHECK(span_intersection(a, b) == Matrix<ModP>::from_ints(f, {{0, 1, 0}}));
  CHECK(span_sum(a, b).rows() == 3);
  CHECK(complement(a) == Matrix<ModP>::from_ints(f, {{0, 0, 1}}));
}

TEST_CASE("matrix inverse over the truncated ring") {
  std::mt19937_64 rng(11);
  RationalField q;
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_tmatrix<Rational>(q, 4, 3, 3, rng, false);
    if (!a.is_invertible()) continue;
    CHECK(a * a.inverse() == TPolyMatrix<Rational>::identity(q, 4, 3));
  }
}

TEST_CASE("Smith form over F[t]/t^K matches rank oracle") {
  std::mt19937_64 rng(2024);
  PrimeField f(3);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t order = 1 + trial % 4, r = 1 + trial % 3, c = 1 + (trial / 3) % 4;
    auto a = random_tmatrix<ModP>(f, order, r, c, rng, true);
    // push some entries into higher valuation
    for (std::size_t i = 0; i < r; ++i)
      if ((trial + i) % 2 == 0)
        for (std::size_t j = 0; j < c; ++j) a(i, j) = a(i, j).shift_up(1 + trial % 2);
    auto sf = smith_form_t(a);
    CHECK(sf.left * a * sf.right == sf.diagonal);
    CHECK(sf.left.is_invertible());
    CHECK(sf.right.is_invertible());
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        if (i == j)
          CHECK(sf.diagonal(i, j) == TruncPoly<ModP>::monomial(f, order, sf.exponents[i]));
        else
          CHECK(sf.diagonal(i, j).is_zero());
      }
    CHECK(std::is_sorted(sf.exponents.begin(), sf.exponents.end()));
    CHECK(sf.exponents == exponents_oracle(a));
  }
}

TEST_CASE("Smith form of a fixed example") {
  RationalField q;
  TPolyMatrix<Rational> a(q, 3, 2, 2);
  a(0, 0) = TruncPoly<Rational>::monomial(q, 3, 2);
  a(0, 1) = TruncPoly<Rational>::monomial(q, 3, 1);
  a(1, 0) = TruncPoly<Rational>::monomial(q, 3, 1);
  auto sf = smith_form_t(a);
  // minors: min valuation 1, determinant -t^2
  CHECK(sf.exponents == std::vector<std::size_t>{1, 1});
  CHECK(sf.left * a * sf.right == sf.diagonal);
}

TEST_CASE("truncated product equals the reduced full product") {
  std::mt19937_64 rng(3);
  PrimeField f(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ModP> a(4), b(4);
    for (auto& x : a) x = f.random(rng);
    for (auto& x : b) x = f.random(rng);
    std::vector<ModP> full(7, f.zero());
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) full[i + j] += a[i] * b[j];
    auto prod = TruncPoly<ModP>(f, a) * TruncPoly<ModP>(f, b);
    for (std::size_t i = 0; i < 4; ++i) CHECK(prod[i] == full[i]);
  }
}

TEST_CASE("ring axioms on random triples") {
  std::mt19937_64 rng(4);
  RationalField q;
  auto rand_poly = [&] {
    std::vector<Rational> c(5);
    for (auto& x : c) x = q.random(rng, 5);
    return TruncPoly<Rational>(q, c);
  };
  for (int trial = 0; trial < 30; ++trial) {
    auto a = rand_poly(), b = rand_poly(), c = rand_poly();
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    if (a.is_unit()) CHECK(a * a.inverse() == TruncPoly<Rational>::constant(q, 5, q.one()));
  }
}

TEST_CASE("Smith exponents are invariant under invertible multiplication") {
  std::mt19937_64 rng(8);
  PrimeField f(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_tmatrix<ModP>(f, 3, 3, 3, rng, true);
    auto l = random_tmatrix<ModP>(f, 3, 3, 3, rng, false);
    auto r = random_tmatrix<ModP>(f, 3, 3, 3, rng, false);
    if (!l.is_invertible() || !r.is_invertible()) continue;
    CHECK(smith_form_t(l * a * r).exponents == smith_form_t(a).exponents);
  }
}

TEST_CASE("Smith form of small permutation examples") {
  RationalField q;
  TPolyMatrix<Rational> a(q, 3, 2, 2);
  a(0, 0) = TruncPoly<Rational>::monomial(q, 3, 1);
  a(1, 1) = TruncPoly<Rational>::constant(q, 3, q.one());
  CHECK(smith_form_t(a).exponents == std::vector<std::size_t>{0, 1});
  TPolyMatrix<Rational> b(q, 3, 2, 2);
  b(0, 1) = TruncPoly<Rational>::monomial(q, 3, 1);
  b(1, 0) = TruncPoly<Rational>::monomial(q, 3, 2);
  auto sf = smith_form_t(b);
  CHECK(sf.exponents == std::vector<std::size_t>{1, 2});
  CHECK(sf.left * b * sf.right == sf.diagonal);
}
