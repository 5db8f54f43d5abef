#pragma once

// Numerical side: lattice enumeration, theta series, Eisenstein series and
// the colinear-pair identity for even unimodular lattices. Every evaluator
// returns its value together with a bound on the discarded tail.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "snt/errors.hpp"

namespace snt::analytic {

using cplx = std::complex<double>;

struct IntegralLattice {
  std::string name;
  std::vector<std::vector<long long>> gram;

  std::size_t rank() const { return gram.size(); }
  bool is_even() const;
  bool is_unimodular() const;
};

/// Symmetric positive definite integer Gram matrix, else InvalidInput.
IntegralLattice make_lattice(std::string name, std::vector<std::vector<long long>> gram);

/// E8 with the Cartan matrix as Gram matrix.
IntegralLattice e8();

/// Exact determinant of an integer matrix.
mpz_class determinant(const std::vector<std::vector<long long>>& a);

/// counts[n] = #{u : (u, u) = n} for 0 <= n <= bound.
std::vector<std::uint64_t> enumerate_by_norm(const IntegralLattice& l, long long bound);

/// All vectors (coordinates in the lattice basis) with (u, u) <= bound.
std::vector<std::vector<long long>> vectors_by_norm(const IntegralLattice& l, long long bound,
                                                    std::uint64_t limit = 2'000'000);

/// Primitive shell counts from c(n) = sum_{d^2 | n} c_prim(n / d^2).
std::vector<std::uint64_t> primitive_counts(const std::vector<std::uint64_t>& counts);

/// Upper bound on #{u : (u, u) <= n} by a volume argument: each such u owns a
/// translate of the centered fundamental parallelepiped inside the ball of
/// radius sqrt(n) + half the sum of the basis lengths.
double count_bound(const IntegralLattice& l, double n);

struct Evaluation {
  cplx value;
  double tail = 0;  // bound on |true value - value| from truncation
  std::size_t terms = 0;
};

struct DualEvaluation {
  Evaluation accelerated;
  Evaluation direct;
};

struct SiegelPoint {
  cplx t11, t12, t22;

  /// Smaller eigenvalue of the imaginary part.
  double min_imag_eigenvalue() const;
  bool is_diagonal() const { return t12 == cplx(0, 0); }
  /// Imaginary part positive definite, else InvalidInput.
  void validate() const;
  /// m^2 t11 + 2 m n t12 + n^2 t22.
  cplx form(long long m, long long n) const { return double(m * m) * t11 + 2.0 * double(m * n) * t12 + double(n * n) * t22; }
};

/// sum_u exp(pi i tau (u, u)) with the tail below `target`.
Evaluation theta_basic(const IntegralLattice& l, cplx tau, double target = 1e-14, long long max_norm = 40);

/// Coefficients of q^0..q^n_max of theta_L in q = exp(2 pi i tau) (L even).
std::vector<std::uint64_t> theta_q_coefficients(const IntegralLattice& l, std::size_t n_max);

/// Bernoulli number B_k (B_1 = -1/2).
mpq_class bernoulli(unsigned k);

/// Coefficients a_0..a_n of E_w = 1 - (2w / B_w) sum sigma_{w-1}(n) q^n.
std::vector<mpq_class> eisenstein_q_coefficients(unsigned w, std::size_t n);

mpz_class divisor_sigma(unsigned k, std::uint64_t n);

/// E_w(z) from its q-expansion, tail below `target`.
Evaluation eisenstein_qexp(cplx z, unsigned w, double target = 1e-15);

struct DirectPlan {
  long long pair_radius = 3;  // max(|m|, |n|) for the outer (m, n) sum
  long long a_max = 100;      // a (or m in rank one) runs over 1..a_max
  long long b_max = 5000;     // |b| <= b_max
};

/// 1/2 sum_{(m, n) = 1} (m tau + n)^{-w}: q-expansion and direct coprime sum.
DualEvaluation eisenstein_rank1(cplx tau, unsigned w, const DirectPlan& plan = {}, double target = 1e-15);

/// sum_{a >= 1, (a, b) = 1} (a z + b)^{-w} by direct summation with a certified tail.
Evaluation coprime_sum(cplx z, unsigned w, const DirectPlan& plan);

/// 1 + 1/2 sum_{(m, n) = 1} sum_{a >= 1, (a, b) = 1} (a Q_tau(m, n) + b)^{-N/2}, accelerated through
/// E_{N/2}(Q_tau(m, n)) - 1 and directly. The direct sum is skipped when `with_direct` is false.
DualEvaluation eisenstein_lhs(const SiegelPoint& tau, unsigned n, bool with_direct = true, const DirectPlan& plan = {},
                              double target = 1e-15);

/// sum over colinear pairs (u, v) of exp(pi i (t11 (u,u) + 2 t12 (u,v) + t22 (v,v))),
/// regrouped as 1 + 1/2 sum_{w primitive} [theta_{Z^2}((w, w) Q_tau) - 1].
Evaluation theta_colinear(const IntegralLattice& l, const SiegelPoint& tau, double target = 1e-15, long long max_norm = 40);

/// The t12 = 0 case as 1 + 1/2 sum_w [theta_1((w,w) t11) theta_1((w,w) t22) - 1].
Evaluation theta_colinear_product(const IntegralLattice& l, cplx t1, cplx t2, double target = 1e-15,
                                  long long max_norm = 40);

/// Double loop over all colinear pairs with (u, u), (v, v) <= norm_bound.
Evaluation theta_colinear_direct(const IntegralLattice& l, const SiegelPoint& tau, long long norm_bound);

/// C = (sum_j 1 / |Aut_j|)^{-1}.
mpq_class mass_constant(const std::vector<mpz_class>& aut_orders);

/// |W(E8)| as the product of the degrees 2, 8, 12, 14, 18, 20, 24, 30.
mpz_class weyl_group_order_e8();

/// Smallest relative tolerance that double evaluation can certify.
double precision_floor();

struct GenusMember {
  IntegralLattice lattice;
  mpz_class aut_order;
};

struct IdentityReport {
  SiegelPoint tau;
  unsigned n = 0;
  double tolerance = 0;
  mpq_class mass;
  cplx lhs, rhs;
  double lhs_tail = 0, rhs_tail = 0;
  double abs_diff = 0, rel_diff = 0;
  bool pass = false;
  bool specialization = false;  // t12 = 0
  // direct cross-check of the left side, when requested
  bool has_direct = false;
  cplx lhs_direct;
  double lhs_direct_tail = 0, direct_rel_diff = 0;
};

/// Evaluates both sides of the colinear identity. `mass_override` replaces C
/// (used to check that a wrong constant is detected). Throws TruncationError
/// when the tolerance is below what the truncation and double precision can certify.
IdentityReport verify_identity(const std::vector<GenusMember>& genus, const SiegelPoint& tau, unsigned n,
                               double tolerance, bool with_direct = false,
                               const mpq_class* mass_override = nullptr);

}  // namespace snt::analytic
