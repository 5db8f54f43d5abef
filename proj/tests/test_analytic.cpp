#include <cmath>

#include "doctest.h"
#include "snt/analytic.hpp"

using namespace snt;
using namespace snt::analytic;

namespace {

std::uint64_t sigma3(std::uint64_t n) {
  std::uint64_t s = 0;
  for (std::uint64_t d = 1; d <= n; ++d)
    if (n % d == 0) s += d * d * d;
  return s;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("E8 is even unimodular and its shells match 240 sigma_3") {
  auto l = e8();
  CHECK(l.is_even());
  CHECK(l.is_unimodular());
  auto counts = enumerate_by_norm(l, 8);
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 0);
  CHECK(counts[2] == 240);
  CHECK(counts[4] == 2160);
  CHECK(counts[6] == 6720);
  CHECK(enumerate_by_norm(l, 0) == std::vector<std::uint64_t>{1});
  auto coeff = theta_q_coefficients(l, 10);
  for (std::uint64_t n = 1; n <= 10; ++n) CHECK(coeff[n] == 240 * sigma3(n));
  // primitive counts: norm 8 shell = 240 sigma_3(4) minus the doubled roots
  auto prim = primitive_counts(enumerate_by_norm(l, 8));
  CHECK(prim[2] == 240);
  CHECK(prim[8] == 240 * sigma3(4) - 240);
}

TEST_CASE("count bound dominates enumeration") {
  auto l = e8();
  auto counts = enumerate_by_norm(l, 12);
  std::uint64_t cum = 0;
  for (long long n = 0; n <= 12; ++n) {
    cum += counts[n];
    CHECK(double(cum) <= count_bound(l, double(n)));
  }
  auto z2 = make_lattice("Z2", {{1, 0}, {0, 1}});
  CHECK(enumerate_by_norm(z2, 5) == std::vector<std::uint64_t>{1, 4, 4, 0, 4, 8});
  CHECK(vectors_by_norm(z2, 2).size() == 9);
  CHECK_THROWS_AS(vectors_by_norm(l, 4, 100), GuardExceeded);
}

TEST_CASE("invalid lattices are rejected") {
  CHECK_THROWS_AS(make_lattice("bad", {{1, 2}, {2, 1}}), InvalidInput);
  CHECK_THROWS_AS(make_lattice("bad", {{1, 2}, {1, 1}}), InvalidInput);
  CHECK_FALSE(make_lattice("A1", {{2}}).is_unimodular());
  CHECK_FALSE(make_lattice("Z", {{1}}).is_even());
}

TEST_CASE("Bernoulli numbers and Eisenstein coefficients") {
  CHECK(bernoulli(1) == mpq_class(-1, 2));
  CHECK(bernoulli(2) == mpq_class(1, 6));
  CHECK(bernoulli(4) == mpq_class(-1, 30));
  CHECK(bernoulli(12) == mpq_class(-691, 2730));
  CHECK(bernoulli(7) == 0);
  auto e4 = eisenstein_q_coefficients(4, 5);
  for (std::uint64_t n = 1; n <= 5; ++n) CHECK(e4[n] == mpq_class(240 * sigma3(n)));
  auto e12 = eisenstein_q_coefficients(12, 2);
  CHECK(e12[1] == mpq_class(65520, 691));
  CHECK(divisor_sigma(3, 6) == 1 + 8 + 27 + 216);
  CHECK_THROWS_AS(eisenstein_q_coefficients(3, 2), InvalidInput);
}

TEST_CASE("theta and E_4 agree at points on the imaginary axis") {
  auto l = e8();
  for (double y : {1.5, 2.0, 3.0}) {
    cplx tau(0, y);
    auto th = theta_basic(l, tau);
    auto e = eisenstein_rank1(tau, 4);
    CHECK(rel(e.accelerated.value, th.value) < 1e-12);
    CHECK(rel(e.direct.value, e.accelerated.value) < 1e-8);
    CHECK(std::abs(e.direct.value - e.accelerated.value) <= e.direct.tail + e.accelerated.tail);
    CHECK(th.value.real() > 1);
    CHECK(std::abs(th.value.imag()) < 1e-15);
  }
  // off the axis too
  cplx tau(0.3, 1.2);
  CHECK(rel(eisenstein_qexp(tau, 4).value, theta_basic(l, tau).value) < 1e-12);
  // large imaginary part: both tend to 1
  CHECK(std::abs(theta_basic(l, cplx(0, 12)).value - 1.0) < 1e-15);
  CHECK(std::abs(eisenstein_qexp(cplx(0, 12), 4).value - 1.0) < 1e-15);
  CHECK_THROWS_AS(theta_basic(l, cplx(0, 0.01), 1e-14, 20), TruncationError);
  CHECK_THROWS_AS(theta_basic(l, cplx(0, -1)), InvalidInput);
}

TEST_CASE("colinear theta: accelerated, product form and direct double loop") {
  auto l = e8();
  SiegelPoint diag{cplx(0, 2), 0, cplx(0, 2)};
  auto a = theta_colinear(l, diag);
  auto p = theta_colinear_product(l, diag.t11, diag.t22);
  CHECK(rel(a.value, p.value) < 1e-14);

  SiegelPoint off{cplx(0, 3), cplx(0, 0.5), cplx(0, 3)};
  auto acc = theta_colinear(l, off);
  auto direct = theta_colinear_direct(l, off, 4);
  CHECK(rel(direct.value, acc.value) < 1e-6);
  CHECK(std::abs(direct.value - acc.value) <= direct.tail + acc.tail);

  SiegelPoint far{cplx(0, 15), 0, cplx(0, 15)};
  CHECK(std::abs(theta_colinear(l, far).value - 1.0) < 1e-15);
  CHECK_THROWS_AS(theta_colinear(l, SiegelPoint{cplx(0, 1), cplx(0, 2), cplx(0, 1)}), InvalidInput);
}

TEST_CASE("left side: acceleration against direct summation") {
  SiegelPoint p{cplx(0, 2), cplx(0, 0.5), cplx(0, 2)};
  auto e = eisenstein_lhs(p, 8);
  CHECK(rel(e.direct.value, e.accelerated.value) < 1e-3);
  CHECK(std::abs(e.direct.value - e.accelerated.value) <= e.direct.tail + e.accelerated.tail);
  SiegelPoint far{cplx(0, 15), 0, cplx(0, 15)};
  CHECK(std::abs(eisenstein_lhs(far, 8, false).accelerated.value - 1.0) < 1e-15);
}

TEST_CASE("mass constant") {
  auto w = weyl_group_order_e8();
  CHECK(w == 696729600);
  mpz_class factored = 1;
  for (int i = 0; i < 14; ++i) factored *= 2;
  factored *= 243 * 25 * 7;
  CHECK(w == factored);
  CHECK(mass_constant({w}) == mpq_class(w));
  CHECK(mass_constant({w, w}) == mpq_class(w / 2));
  CHECK(mass_constant({2, 3}) == mpq_class(6, 5));
  CHECK_THROWS_AS(mass_constant({}), InvalidInput);
}

TEST_CASE("colinear identity for E8") {
  std::vector<GenusMember> genus{{e8(), weyl_group_order_e8()}};
  for (auto p : {SiegelPoint{cplx(0, 2), 0, cplx(0, 2)}, SiegelPoint{cplx(0, 2), cplx(0, 0.5), cplx(0, 2)},
                 SiegelPoint{cplx(0, 3), cplx(0.3, 0.5), cplx(0, 2.5)}}) {
    auto rep = verify_identity(genus, p, 8, 1e-8);
    CHECK(rep.pass);
    CHECK(rep.rel_diff < 1e-12);
    // the difference is explained by the reported tails and rounding
    CHECK(rep.abs_diff <= rep.lhs_tail + rep.rhs_tail + precision_floor());
  }
  // a tail bound far out must stay positive
  SiegelPoint d6{cplx(0, 2), 0, cplx(0, 2)};
  CHECK(theta_colinear(e8(), d6, 1e-14).tail > 0);
  // the diagonal case matches the product-form evaluator
  SiegelPoint d{cplx(0, 2), 0, cplx(0, 2)};
  auto rep = verify_identity(genus, d, 8, 1e-8);
  CHECK(rep.specialization);
  CHECK(rel(rep.rhs, theta_colinear_product(e8(), d.t11, d.t22).value) < 1e-14);

  // halving C is detected
  mpq_class half = mpq_class(weyl_group_order_e8()) / 2;
  auto bad = verify_identity(genus, d, 8, 1e-8, false, &half);
  CHECK_FALSE(bad.pass);
  CHECK(bad.rel_diff > 0.4);

  CHECK_THROWS_AS(verify_identity(genus, d, 8, 1e-15), TruncationError);
  CHECK_THROWS_AS(verify_identity(genus, d, 16, 1e-8), InvalidInput);

  // tightening the tolerance never moves the result outside the earlier budget
  auto loose = verify_identity(genus, d, 8, 1e-6);
  auto tight = verify_identity(genus, d, 8, 1e-10);
  CHECK(tight.abs_diff <= loose.lhs_tail + loose.rhs_tail + loose.abs_diff);
  CHECK(std::abs(tight.lhs - loose.lhs) <= loose.lhs_tail + tight.lhs_tail);
}
