#include <random>
#include <set>

#include "doctest.h"
#include "snt/sp_group.hpp"

using namespace snt;

TEST_CASE("membership of simple matrices") {
  RationalField q;
  auto h2 = make_H<Rational>(q, 2);
  CHECK(is_member(h2, Matrix<Rational>::identity(q, 4)));
  // swap e1 <-> e2, t e1 <-> t e2: commutes with t but flips the sign of the form
  auto swap = Matrix<Rational>::from_ints(q, {{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}});
  CHECK(swap * h2.t_action == h2.t_action * swap);
  CHECK_FALSE(is_member(h2, swap));
  CHECK_THROWS_AS(is_member(h2, Matrix<Rational>::identity(q, 3)), DimensionMismatch);

  // t = 0: membership is just being symplectic
  std::mt19937_64 rng(1);
  auto h11 = standard_module<Rational>(q, {1, 1});
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_symplectic(h11.gram, rng, 4);
    CHECK(is_member(h11, s));
    auto b = random_invertible<Rational>(q, 4, rng);
    CHECK(is_member(h11, b) == (b * h11.gram * b.transpose() == h11.gram));
  }
}

TEST_CASE("Lie algebra dimensions") {
  RationalField q;
  CHECK(lie_algebra_basis(make_H<Rational>(q, 1)).size() == 3);
  CHECK(lie_algebra_basis(make_H<Rational>(q, 2)).size() == 6);
  CHECK(lie_algebra_basis(make_H<Rational>(q, 3)).size() == 9);
  // levels contribute l r (2r + 1) each; a pair of levels l_i > l_j adds
  // dim Hom_t(M(l_i), M(l_j)) = 4 r_i r_j l_j (the opposite block is its adjoint)
  auto m = standard_module<Rational>(q, {2, 1});
  auto basis = lie_algebra_basis(m);
  CHECK(basis.size() == 2 * 3 + 1 * 3 + 4);
  for (const auto& s : basis) {
    CHECK(s * m.t_action == m.t_action * s);
    CHECK(s * m.gram + m.gram * s.transpose() == Matrix<Rational>(q, 6, 6));
  }
  auto d = decompose(m);
  CHECK(radical_lie_basis(m, d).size() == 13 - 3 - 3);
}

TEST_CASE("homogeneous identification with the symplectic group over R_k") {
  PrimeField f(3);
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::size_t n = 1; n <= 2; ++n) {
      auto m = standard_module<ModP>(f, std::vector<std::size_t>(n, k));
      HomogeneousIso<ModP> iso(m);
      auto id = iso.to_ring(Matrix<ModP>::identity(f, m.dim()));
      CHECK(id == TPolyMatrix<ModP>::identity(f, k, 2 * n));
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto g = random_element(m, seed);
        auto gh = iso.to_ring(g);
        CHECK(is_ring_symplectic(gh));
        CHECK(iso.from_ring(gh) == g);
      }
    }
  RationalField q;
  CHECK_THROWS_AS(HomogeneousIso<Rational>(standard_module<Rational>(q, {2, 1})), InvalidModule);
}

TEST_CASE("the R_2 element diag(1+t, (1+t)^-1) is an automorphism of H_2 but the scalar 1+t is not") {
  RationalField q;
  auto m = make_H<Rational>(q, 2);
  HomogeneousIso<Rational> iso(m);
  TruncPoly<Rational> u(q, std::vector<Rational>{Rational(1), Rational(1)});
  TPolyMatrix<Rational> diag(q, 2, 2, 2);
  diag(0, 0) = u;
  diag(1, 1) = u.inverse();
  CHECK(is_ring_symplectic(diag));
  auto g = iso.from_ring(diag);
  CHECK(is_member(m, g));
  CHECK(iso.to_ring(g) == diag);

  TPolyMatrix<Rational> scalar(q, 2, 2, 2);
  scalar(0, 0) = u;
  scalar(1, 1) = u;
  CHECK_FALSE(is_ring_symplectic(scalar));
  CHECK_FALSE(is_member(m, iso.from_ring(scalar)));
}

TEST_CASE("random elements of Sp_2(F_3[t]/t^2) map into Sp(H_2, t)") {
  PrimeField f(3);
  auto m = make_H<ModP>(f, 2);
  HomogeneousIso<ModP> iso(m);
  std::mt19937_64 rng(5);
  int found = 0;
  while (found < 20) {
    TPolyMatrix<ModP> g(f, 2, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t s = 0; s < 2; ++s) g(i, j)[s] = f.random(rng);
    if (!is_ring_symplectic(g)) continue;
    ++found;
    CHECK(is_member(m, iso.from_ring(g)));
  }
}

TEST_CASE("block profile is upper triangular with bar-symplectic diagonal") {
  RationalField q;
  PrimeField f(3);
  auto mq = standard_module<Rational>(q, {2, 1});
  auto dq = decompose(mq);
  auto id = block_profile(mq, dq, Matrix<Rational>::identity(q, 6));
  CHECK(id.levels == std::vector<std::size_t>{2, 1});
  CHECK(unipotent_radical_test(mq, dq, Matrix<Rational>::identity(q, 6)));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto g = random_element(mq, dq, seed);
    CHECK(is_member(mq, g));
    auto bp = block_profile(mq, dq, g);
    CHECK(bp.upper_triangular);
    CHECK(bp.diagonal_preserves_bar_form);
    auto g2 = random_element(mq, dq, seed + 1000);
    CHECK(is_member(mq, g * g2));
  }
  std::mt19937_64 rng(3);
  auto m3 = standard_module<ModP>(f, {3, 1, 1});
  m3 = change_basis(m3, random_invertible<ModP>(f, m3.dim(), rng));
  auto d3 = decompose(m3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto g = random_element(m3, d3, seed);
    auto bp = block_profile(m3, d3, g);
    CHECK(bp.upper_triangular);
    CHECK(bp.diagonal_preserves_bar_form);
  }
  CHECK_THROWS_AS(block_profile(mq, dq, Matrix<Rational>::identity(q, 6) * Rational(2)), NotAMember);
}

TEST_CASE("random elements are deterministic in the seed") {
  RationalField q;
  auto m = standard_module<Rational>(q, {2, 1});
  CHECK(random_element(m, 42) == random_element(m, 42));
  CHECK_FALSE(random_element(m, 42) == random_element(m, 43));
}

TEST_CASE("unipotent radical and Levi elements") {
  RationalField q;
  auto m = standard_module<Rational>(q, {2, 1});
  auto d = decompose(m);
  auto rad = radical_lie_basis(m, d);
  Matrix<Rational> s(q, 6, 6);
  for (std::size_t i = 0; i < rad.size(); ++i) s += rad[i] * Rational(static_cast<long long>(i) + 1);
  auto n = *exp_nilpotent(s);
  CHECK(is_member(m, n));
  CHECK(unipotent_radical_test(m, d, n));
  auto levi = levi_lift(m, d, 0, Matrix<Rational>::from_ints(q, {{1, 1}, {0, 1}}));
  CHECK(is_member(m, levi));
  CHECK_FALSE(unipotent_radical_test(m, d, levi));
  auto g = random_element(m, d, 7);
  CHECK(unipotent_radical_test(m, d, g * levi * inverse(Matrix<Rational>(g * levi))));
  // radical is normal: conjugates of radical elements stay in the radical
  CHECK(unipotent_radical_test(m, d, inverse(g) * n * g));
}

TEST_CASE("truncated exponential needs a large enough characteristic") {
  PrimeField f3(3);
  auto m = make_H<ModP>(f3, 4);
  auto d = decompose(m);
  // t itself lies in the radical and has nilpotency index 4 > 3
  CHECK_FALSE(exp_nilpotent(m.t_action).has_value());
  auto g = random_element(m, d, 1);
  CHECK(is_member(m, g));
}

TEST_CASE("group orders over F_3") {
  PrimeField f(3);
  auto h1 = make_H<ModP>(f, 1);
  CHECK(sp_group_order_exhaustive(h1, 1'000'000) == 24);
  CHECK(sp_group_order(h1, decompose(h1)) == 24);

  auto h2 = make_H<ModP>(f, 2);
  auto d2 = decompose(h2);
  CHECK(sp_group_order(h2, d2) == 648);
  CHECK(sp_group_order_exhaustive(h2, 1'000'000) == 648);
  auto closure = group_closure(group_generators(h2, d2), 1'000'000);
  CHECK(closure.size() == 648);
  // reduction mod t is onto Sp_2(F_3)
  std::set<std::vector<std::uint32_t>> reductions;
  for (const auto& g : closure) reductions.insert(matrix_key(block_profile(h2, d2, g).reduced[0][0]));
  CHECK(reductions.size() == 24);

  auto h11 = standard_module<ModP>(f, {1, 1});
  CHECK(group_closure(group_generators(h11, decompose(h11)), 1'000'000).size() == 51840);
  CHECK_THROWS_AS(group_closure(group_generators(h11, decompose(h11)), 100), GuardExceeded);
}

TEST_CASE("every t-Lagrangian is in the orbit of a standard one") {
  PrimeField f(3);
  for (const std::vector<std::size_t>& part : std::vector<std::vector<std::size_t>>{{2}, {1, 1}, {2, 1}}) {
    auto lo = lagrangian_orbits(standard_module<ModP>(f, part));
    CHECK(lo.orbits_with_standard == lo.orbit_sizes.size());
    std::size_t total = 0;
    for (auto s : lo.orbit_sizes) total += s;
    CHECK(total == lo.lagrangians);
  }
}
