#include <map>
#include <random>

#include "doctest.h"
#include "snt/orbits.hpp"

using namespace snt;

namespace {

template <class K>
Matrix<K> random_element(const TensorSetting<K>& s, std::mt19937_64& rng, int bound = 2) {
  Matrix<K> x(s.field(), s.m(), s.n());
  for (std::size_t a = 0; a < s.m(); ++a)
    for (std::size_t b = 0; b < s.n(); ++b) x(a, b) = s.field().random(rng, bound);
  return x;
}

template <class K>
TPolyMatrix<K> poly_row(const FieldOf<K>& f, std::size_t order, const std::vector<std::vector<long long>>& coeffs) {
  TPolyMatrix<K> r(f, order, 1, coeffs.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    for (std::size_t s = 0; s < coeffs[j].size(); ++s) r(0, j)[s] = f.from_int(coeffs[j][s]);
  return r;
}

// Witt-lift postconditions checked by substitution.
template <class K>
void check_witt(const TPolyMatrix<K>& a, const TPolyMatrix<K>& b, const TPolyMatrix<K>& bt,
                const std::vector<std::size_t>& types, const Matrix<K>& q) {
  for (std::size_t i = 0; i < a.rows(); ++i) CHECK(bt.row(i).reduce(types[i]) == b.row(i).reduce(types[i]));
  CHECK(pairings(bt, bt, q) == pairings(a, a, q));
  CHECK(is_primitive(bt));
}

// Random primitive tuple of m vectors in V[t]/t^K.
template <class K>
TPolyMatrix<K> random_primitive(const FieldOf<K>& f, std::size_t order, std::size_t m, std::size_t n,
                                std::mt19937_64& rng) {
  for (;;) {
    TPolyMatrix<K> a(f, order, m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t s = 0; s < order; ++s) a(i, j)[s] = f.random(rng, 2);
    if (is_primitive(a)) return a;
  }
}

}  // namespace

TEST_CASE("f_x and its image on H_2") {
  RationalField q;
  auto v = Matrix<Rational>::from_ints(q, {{1}});
  auto s = standard_setting<Rational>(q, {2}, v);
  CHECK(s.m() == 2);
  CHECK(s.precision == 2);
  Matrix<Rational> zero(q, 2, 1);
  CHECK(f_matrix(s, zero).is_zero());
  CHECK(image_of(s, zero).size() == 0);

  auto x = Matrix<Rational>::from_ints(q, {{1}, {0}});  // e1 (x) v
  auto w = image_of(s, x);
  CHECK(w.types == std::vector<std::size_t>{2});
  CHECK(f_matrix(s, x) == Matrix<Rational>::from_ints(q, {{1, 0}}));
  auto tx = Matrix<Rational>::from_ints(q, {{0}, {1}});  // t e1 (x) v
  CHECK(image_of(s, tx).types == std::vector<std::size_t>{1});
  CHECK(image_of(s, tx).span == Matrix<Rational>::from_ints(q, {{0, 1}}));

  auto s2 = standard_setting<Rational>(q, {2}, Matrix<Rational>::identity(q, 2));
  auto y = Matrix<Rational>::from_ints(q, {{1, 0}, {0, 1}});  // e1 (x) v1 + t e1 (x) v2
  CHECK(image_of(s2, y).types == std::vector<std::size_t>{2});
}

TEST_CASE("normal form reconstructs x with primitive w") {
  std::mt19937_64 rng(9);
  PrimeField f(5);
  auto s = standard_setting<ModP>(f, {3, 2, 1}, Matrix<ModP>::from_ints(f, {{1, 0, 0}, {0, 2, 0}, {0, 0, 1}}));
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_element(s, rng);
    if (trial % 3 == 0) x = s.t_minus.transpose() * x;  // push into t M_-
    auto w = image_of(s, x);
    auto ws = normal_form(s, x, w);
    CHECK(from_normal_form(s, w, ws) == x);
    CHECK(is_primitive(ws));
    // W containing Im f_x works too
    auto full = quasi_basis(s.t_minus, Matrix<ModP>::identity(f, s.m()));
    CHECK(from_normal_form(s, full, normal_form(s, x, full)) == x);
    if (w.span.rows() < s.m()) {
      auto small = quasi_basis(s.t_minus, Matrix<ModP>(f, 0, s.m()));
      if (!x.is_zero()) CHECK_THROWS_AS(normal_form(s, x, small), Error);
    }
  }
}

TEST_CASE("T_W on small examples") {
  RationalField q;
  auto s = standard_setting<Rational>(q, {1}, Matrix<Rational>::from_ints(q, {{2}}));
  auto inv = orbit_invariant(s, Matrix<Rational>::from_ints(q, {{1}}));
  // (v, v) = 2 gives the tensor 2 e (x) e = e_11
  REQUIRE(inv.coords.size() == 1);
  CHECK(inv.coords[0][0] == Rational(1));

  auto hyp = Matrix<Rational>::from_ints(q, {{0, 1}, {1, 0}});
  auto s11 = standard_setting<Rational>(q, {1, 1}, hyp);
  auto inv2 = orbit_invariant(s11, Matrix<Rational>::from_ints(q, {{1, 0}, {0, 1}}));
  REQUIRE(inv2.coords.size() == 3);
  CHECK(inv2.coords[0].is_zero());
  CHECK(inv2.coords[1][0] == Rational(1));
  CHECK(inv2.coords[2].is_zero());

  auto s2 = standard_setting<Rational>(q, {2}, Matrix<Rational>::from_ints(q, {{1}}));
  auto full = quasi_basis(s2.t_minus, Matrix<Rational>::identity(q, 2));
  auto inv3 = t_sym(s2, Matrix<Rational>::from_ints(q, {{0}, {1}}), full);
  CHECK(inv3.types == std::vector<std::size_t>{2});
  CHECK(inv3.coords[0].is_zero());  // t^2 e (x) e vanishes modulo t^2
}

TEST_CASE("invariants are constant along random orthogonal orbits") {
  std::mt19937_64 rng(17);
  RationalField q;
  auto v = Matrix<Rational>::from_ints(q, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}});
  auto s = standard_setting<Rational>(q, {3, 1}, v);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_orthogonal(v, s.precision, rng, 3);
    CHECK(is_orthogonal(g, v));
    auto x = random_element(s, rng);
    auto y = act(s, x, g);
    CHECK(image_of(s, y).span == image_of(s, x).span);
    CHECK(same_orbit(s, x, y));
  }
  auto x = Matrix<Rational>(q, s.m(), s.n());
  x(0, 0) = Rational(1);
  CHECK_FALSE(same_orbit(s, x, Matrix<Rational>(q, s.m(), s.n())));
}

TEST_CASE("action is a right action") {
  std::mt19937_64 rng(2);
  PrimeField f(7);
  auto v = Matrix<ModP>::from_ints(f, {{1, 0}, {0, 3}});
  auto s = standard_setting<ModP>(f, {3, 1}, v);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_orthogonal(v, s.precision, rng);
    auto h = random_orthogonal(v, s.precision, rng);
    auto x = random_element(s, rng);
    CHECK(act(s, act(s, x, g), h) == act(s, x, g * h));
  }
}

TEST_CASE("Witt lift on the hyperbolic plane") {
  RationalField q;
  auto hyp = Matrix<Rational>::from_ints(q, {{0, 1}, {1, 0}});
  auto a = poly_row<Rational>(q, 2, {{1}, {1}});
  auto b = poly_row<Rational>(q, 2, {{1}, {1, 1}});
  CHECK(pairings(b, b, hyp)(0, 0)[1] == Rational(2));
  auto bt = witt_lift(a, b, {1}, hyp);
  CHECK(bt == a);
  check_witt(a, b, bt, {1}, hyp);
  // equal Gram data: nothing changes
  CHECK(witt_lift(a, a, {1}, hyp) == a);
  // hypothesis violated at the residue
  auto bad = poly_row<Rational>(q, 2, {{1}, {2}});
  CHECK_THROWS_AS(witt_lift(a, bad, {1}, hyp), HypothesisFailed);
  CHECK_THROWS_AS(witt_lift(a, b, {3}, hyp), HypothesisFailed);
}

TEST_CASE("Witt lift on random instances") {
  std::mt19937_64 rng(31);
  PrimeField f(5);
  RationalField q;
  auto vf = Matrix<ModP>::from_ints(f, {{1, 0, 0}, {0, 2, 0}, {0, 0, 1}});
  auto vq = Matrix<Rational>::from_ints(q, {{1, 0, 0}, {0, -1, 0}, {0, 0, 3}});
  int done = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t order = 1 + trial % 4, m = 1 + trial % 2;
    std::vector<std::size_t> types(m);
    for (std::size_t i = 0; i < m; ++i) types[i] = std::max<std::size_t>(1, order - i);
    auto run = [&](auto field, const auto& v) {
      using K = typename std::decay_t<decltype(v)>::value_type;
      auto a = random_primitive<K>(field, order, m, 3, rng);
      auto g = random_orthogonal(v, order, rng, 3);
      // b agrees with a g modulo t^{k_i} and is perturbed above
      auto b = a * g;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < 3; ++j)
          for (std::size_t s = types[i]; s < order; ++s) b(i, j)[s] = field.random(rng, 2);
      auto bt = witt_lift(a, b, types, v);
      check_witt(a, b, bt, types, v);
      auto h = extend_isometry(a, bt, v);
      CHECK(is_orthogonal(h, v));
      CHECK(a * h == bt);
    };
    run(f, vf);
    run(q, vq);
    ++done;
  }
  CHECK(done == 60);
}

TEST_CASE("isometry extension") {
  RationalField q;
  auto v = Matrix<Rational>::from_ints(q, {{1, 0}, {0, 1}});
  auto a = poly_row<Rational>(q, 1, {{1}, {0}});
  auto b = poly_row<Rational>(q, 1, {{-1}, {0}});
  auto g = extend_isometry(a, b, v);
  auto g0 = g.coefficient(0);
  CHECK(g0 * v * g0.transpose() == v);
  CHECK(a * g == b);
  CHECK(g0 == Matrix<Rational>::from_ints(q, {{-1, 0}, {0, 1}}));
  CHECK(extend_isometry(a, a, v) == TPolyMatrix<Rational>::identity(q, 1, 2));
  CHECK_THROWS_AS(extend_isometry(a, poly_row<Rational>(q, 1, {{2}, {0}}), v), IsometryMismatch);

  // isotropic x - y forces the two-reflection route
  auto hyp = Matrix<Rational>::from_ints(q, {{0, 1}, {1, 0}});
  auto c = poly_row<Rational>(q, 1, {{1}, {0}});
  auto d = poly_row<Rational>(q, 1, {{0}, {1}});
  auto gc = extend_isometry(c, d, hyp);
  CHECK(is_orthogonal(gc, hyp));
  CHECK(c * gc == d);

  std::mt19937_64 rng(5);
  PrimeField f(3);
  auto vf = Matrix<ModP>::from_ints(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t m = 1 + trial % 3;
    auto a3 = random_primitive<ModP>(f, 2, m, 4, rng);
    auto g3 = random_orthogonal(vf, 2, rng, 5);
    auto b3 = a3 * g3;
    auto h = extend_isometry(a3, b3, vf);
    CHECK(is_orthogonal(h, vf));
    CHECK(a3 * h == b3);
  }
}

TEST_CASE("transport finds group elements between equivalent tensors") {
  std::mt19937_64 rng(77);
  PrimeField f(5);
  auto v = Matrix<ModP>::from_ints(f, {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}});
  auto s = standard_setting<ModP>(f, {3, 2}, v);
  for (int trial = 0; trial < 40; ++trial) {
    auto x = random_element(s, rng);
    if (trial % 4 == 1) x = s.t_minus.transpose() * x;
    auto g0 = random_orthogonal(v, s.precision, rng, 4);
    auto y = act(s, x, g0);
    auto g = transport(s, x, y);
    REQUIRE(g.has_value());
    CHECK(is_orthogonal(*g, v));
    CHECK(act(s, x, *g) == y);
    CHECK(transport(s, x, x).has_value());
    auto z = random_element(s, rng);
    CHECK(transport(s, x, z).has_value() == same_orbit(s, x, z));
  }
}

TEST_CASE("tangent map matches the polynomial expansion of T_W") {
  std::mt19937_64 rng(12);
  RationalField q;
  auto v = Matrix<Rational>::from_ints(q, {{2, 1, 0}, {1, 1, 0}, {0, 0, -1}});
  auto s = standard_setting<Rational>(q, {3, 2, 1}, v);
  auto full = quasi_basis(s.t_minus, Matrix<Rational>::identity(q, s.m()));
  CHECK(tangent_map(s, Matrix<Rational>(q, s.m(), s.n()), full).is_zero());
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_element(s, rng, 3);
    auto d = tangent_map(s, x, full);
    Matrix<Rational> u(q, 1, d.rows());
    for (std::size_t i = 0; i < u.cols(); ++i) u(0, i) = q.random(rng, 3);
    auto ux = domain_vector(s, full, u);
    // T(x + u) - T(x - u) = 2 dT_x(u) exactly
    auto plus = flatten_sym(t_sym(s, Matrix<Rational>(x + ux), full));
    auto minus = flatten_sym(t_sym(s, Matrix<Rational>(x - ux), full));
    CHECK((plus - minus) * Rational(1, 2) == u * d);
    auto rep = is_submersive(s, x, full);
    CHECK(rep.rank_criterion == rep.image_criterion);
  }
  auto s2 = standard_setting<Rational>(q, {2}, Matrix<Rational>::from_ints(q, {{1}}));
  auto w2 = quasi_basis(s2.t_minus, Matrix<Rational>::identity(q, 2));
  auto rep = is_submersive(s2, Matrix<Rational>::from_ints(q, {{0}, {1}}), w2);
  CHECK_FALSE(rep.rank_criterion);
  CHECK_FALSE(rep.image_criterion);
  CHECK(is_submersive(s2, Matrix<Rational>::from_ints(q, {{1}, {0}}), w2).rank_criterion);
}

TEST_CASE("submersiveness criteria agree over F_5") {
  std::mt19937_64 rng(100);
  PrimeField f(5);
  auto v = Matrix<ModP>::from_ints(f, {{1, 0}, {0, 2}});
  auto s = standard_setting<ModP>(f, {2, 2, 1}, v);
  int agree = 0, submersive = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_element(s, rng);
    if (trial % 2) x.set_row(trial % s.m(), Matrix<ModP>(f, 1, s.n()));
    auto w = image_of(s, x);
    // test against both Im f_x and a larger W
    auto big = quasi_basis(s.t_minus, t_closure(s.t_minus, Matrix<ModP>::vstack(w.span, random_element(s, rng).transpose())));
    for (const auto& ww : {w, big}) {
      auto rep = is_submersive(s, x, ww);
      agree += rep.rank_criterion == rep.image_criterion;
      submersive += rep.rank_criterion;
    }
  }
  CHECK(agree == 200);
  CHECK(submersive >= 100);
}

TEST_CASE("orthogonal groups over small rings") {
  PrimeField f3(3);
  CHECK(orthogonal_group_residue(Matrix<ModP>::identity(f3, 3), 1'000'000).size() == 48);
  auto hyp = Matrix<ModP>::from_ints(f3, {{0, 1}, {1, 0}});
  CHECK(orthogonal_group_residue(hyp, 1'000'000).size() == 4);
  auto g = orthogonal_group(hyp, 2, 1'000'000);
  CHECK(g.size() == 12);
  for (const auto& e : g) CHECK(is_orthogonal(e, hyp));
  PrimeField f5(5);
  // O_2 of the split form diag(1,1) over F_5 has 2(q - 1), the anisotropic diag(1,2) has 2(q + 1)
  CHECK(orthogonal_group_residue(Matrix<ModP>::identity(f5, 2), 1'000'000).size() == 8);
  CHECK(orthogonal_group_residue(Matrix<ModP>::from_ints(f5, {{1, 0}, {0, 2}}), 1'000'000).size() == 12);
  CHECK_THROWS_AS(orthogonal_group_residue(Matrix<ModP>::identity(f3, 3), 10), GuardExceeded);
}

TEST_CASE("brute-force orbits of a ternary form over F_3") {
  PrimeField f(3);
  auto s = standard_setting<ModP>(f, {1}, Matrix<ModP>::identity(f, 3));
  auto bf = brute_force_orbits(s);
  CHECK(bf.group_order == 48);
  // zero, (v, v) = 1, (v, v) = 2, isotropic nonzero
  CHECK(bf.orbits == 4);
  std::size_t zero_orbit = 0;
  for (auto l : bf.label) zero_orbit += l == bf.label[0];
  CHECK(zero_orbit == 1);
  auto c = orbit_census(s);
  CHECK(c.partitions_equal);
  CHECK(c.invariant_classes == 4);
}

TEST_CASE("census equality and transport on all same-orbit pairs") {
  PrimeField f3(3), f5(5);
  struct Case {
    TensorSetting<ModP> s;
    bool all_pairs;
  };
  std::vector<Case> cases{
      {standard_setting<ModP>(f3, {2}, Matrix<ModP>::from_ints(f3, {{0, 1}, {1, 0}})), true},
      {standard_setting<ModP>(f3, {1}, Matrix<ModP>::identity(f3, 3)), true},
      {standard_setting<ModP>(f5, {1}, Matrix<ModP>::identity(f5, 2)), true},
      {standard_setting<ModP>(f5, {1}, Matrix<ModP>::from_ints(f5, {{1, 0}, {0, 2}})), true},
      {standard_setting<ModP>(f5, {1, 1}, Matrix<ModP>::from_ints(f5, {{1, 0}, {0, 2}})), false},
      {standard_setting<ModP>(f3, {2, 1}, Matrix<ModP>::from_ints(f3, {{0, 1}, {1, 0}})), false},
  };
  for (const auto& cs : cases) {
    const auto& s = cs.s;
    auto bf = brute_force_orbits(s);
    auto census = orbit_census(s);
    CHECK(census.partitions_equal);
    CHECK(census.invariant_classes == bf.orbits);
    std::size_t total = 0;
    for (const auto& cl : census.classes) total += cl.size;
    CHECK(total == bf.label.size());
    // invariance on every orbit and transport within orbits
    std::map<std::size_t, std::vector<std::uint64_t>> members;
    for (std::uint64_t idx = 0; idx < bf.label.size(); ++idx) members[bf.label[idx]].push_back(idx);
    std::size_t failures = 0;
    for (const auto& [label, idxs] : members) {
      auto x0 = decode_element(s, idxs[0]);
      auto inv0 = orbit_invariant(s, x0);
      for (auto i : idxs) {
        auto xi = decode_element(s, i);
        failures += !(orbit_invariant(s, xi) == inv0);
        auto g = transport(s, x0, xi);
        failures += !g || !(act(s, x0, *g) == xi);
        if (cs.all_pairs)
          for (auto j : idxs) {
            auto xj = decode_element(s, j);
            auto h = transport(s, xi, xj);
            failures += !h || !(act(s, xi, *h) == xj);
          }
      }
      // a representative of another orbit is never reachable
      auto other = members.upper_bound(label);
      if (other != members.end()) failures += transport(s, x0, decode_element(s, other->second[0])).has_value();
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("M_- need not be t-stable") {
  PrimeField f(3);
  auto m = make_H<ModP>(f, 2);
  // basis e1, t e1, e2, t e2: M_+ = span{t e1, t e2} is t-stable, M_- = span{e1, e2} is not
  LagrangianFlag<ModP> fl{Matrix<ModP>::from_ints(f, {{1, 0, 0, 0}, {0, 0, 1, 0}}),
                          Matrix<ModP>::from_ints(f, {{0, 1, 0, 0}, {0, 0, 0, 1}})};
  auto t = minus_action(m, fl);
  CHECK(t.is_zero());
  auto s = make_setting(m, fl, Matrix<ModP>::identity(f, 2));
  CHECK(s.precision == 1);
  CHECK(orbit_census(s).partitions_equal);
  auto std_s = make_setting(m, standard_flag<ModP>(f, {2}), Matrix<ModP>::identity(f, 2));
  CHECK(std_s.precision == 2);
}
