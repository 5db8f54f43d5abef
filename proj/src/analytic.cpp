#include "snt/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

namespace snt::analytic {

namespace {

constexpr double pi = std::numbers::pi;

// Neumaier-compensated complex sum.
class Accumulator {
 public:
  void add(cplx v) {
    add_part(re_, cre_, v.real());
    add_part(im_, cim_, v.imag());
    ++terms_;
  }
  cplx value() const { return {re_ + cre_, im_ + cim_}; }
  std::size_t terms() const { return terms_; }

 private:
  static void add_part(double& s, double& c, double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double re_ = 0, cre_ = 0, im_ = 0, cim_ = 0;
  std::size_t terms_ = 0;
};

cplx ipow(cplx u, unsigned w) {
  cplx r(1, 0);
  while (w) {
    if (w & 1) r *= u;
    u *= u;
    w >>= 1;
  }
  return r;
}

// Upper bound for zeta(s), s > 1.
double zeta_bound(double s) {
  double z = 0;
  for (int k = 1; k <= 1000; ++k) z += std::pow(double(k), -s);
  return z + std::pow(1000.0, 1 - s) / (s - 1);
}

// Sum of f(n) over n >= start for a positive f whose ratio f(n+1)/f(n) is
// eventually decreasing below 1; the remainder is bounded geometrically.
std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double tail_sum(const std::function<double(long long)>& f, long long start) {
  double total = 0;
  for (long long n = start; n < start + 1'000'000; ++n) {
    double a = f(n), b = f(n + 1);
    total += a;
    if (a == 0) return total;
    double r = b / a;
    if (r < 0.5 && a < 1e-30 * std::max(total, 1e-300)) return total + b / (1 - r);
    if (r < 0.5 && a < 1e-300) return total;
  }
  return std::numeric_limits<double>::infinity();
}

// theta_3-type bound: sum over (a, b) != (0, 0) of exp(-c (a^2 + b^2)).
double gaussian_pair_bound(double c) {
  double e = std::exp(-c);
  double u = 2 * e / (1 - std::exp(-3 * c));
  return u * (2 + u);
}

// Bound for |S_w(z)| = |sum_n (z + n)^{-w}| through its Lipschitz expansion.
double lipschitz_bound(double y, unsigned w) {
  double fact = std::tgamma(double(w));
  double c = std::pow(2 * pi, double(w)) / fact;
  return c * tail_sum([&](long long r) { return std::pow(double(r), double(w - 1)) * std::exp(-2 * pi * double(r) * y); }, 1);
}

std::vector<std::vector<double>> fincke_pohst_form(const IntegralLattice& l) {
  std::size_t n = l.rank();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i][j] = double(l.gram[i][j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      q[j][i] = q[i][j];
      q[i][j] /= q[i][i];
    }
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t m = k; m < n; ++m) q[k][m] -= q[k][i] * q[i][m];
  }
  return q;
}

// Visits every x with x^T G x <= bound, passing the exact norm.
void enumerate(const IntegralLattice& l, long long bound,
               const std::function<void(const std::vector<long long>&, long long)>& visit) {
  std::size_t n = l.rank();
  if (n == 0) {
    visit({}, 0);
    return;
  }
  auto q = fincke_pohst_form(l);
  std::vector<long long> x(n, 0);
  const double slack = 1e-7;
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double budget) {
    double c = 0;
    for (std::size_t j = i + 1; j < n; ++j) c -= q[i][j] * double(x[j]);
    double r = std::sqrt(std::max(0.0, budget + slack) / q[i][i]);
    long long lo = (long long)std::ceil(c - r), hi = (long long)std::floor(c + r);
    for (long long v = lo; v <= hi; ++v) {
      x[i] = v;
      double d = double(v) - c;
      double rest = budget - q[i][i] * d * d;
      if (rest < -slack) continue;
      if (i == 0) {
        long long norm = 0;
        for (std::size_t a = 0; a < n; ++a) {
          if (!x[a]) continue;
          long long row = 0;
          for (std::size_t b = 0; b < n; ++b) row += l.gram[a][b] * x[b];
          norm += x[a] * row;
        }
        if (norm <= bound) visit(x, norm);
      } else {
        rec(i - 1, rest);
      }
    }
    x[i] = 0;
  };
  rec(n - 1, double(bound));
}

// Chooses the smallest norm bound whose lattice tail is below target.
long long plan_norm_bound(const std::function<double(long long)>& tail, double target, long long max_norm,
                          const std::string& what) {
  for (long long b = 0; b <= max_norm; ++b)
    if (tail(b) <= target) return b;
  double achieved = tail(max_norm);
  throw TruncationError(what + ": lattice tail " + sci(achieved) + " above target " +
                            sci(target) + " at the norm guard " + std::to_string(max_norm),
                        achieved);
}

// Volume bound of count_bound with the determinant computed once.
struct CountBound {
  double vol, radius, dim;
  explicit CountBound(const IntegralLattice& l) : dim(double(l.rank())) {
    radius = 0;
    for (std::size_t i = 0; i < l.rank(); ++i) radius += std::sqrt(double(l.gram[i][i]));
    radius /= 2;
    vol = std::pow(pi, dim / 2) / std::tgamma(dim / 2 + 1) / std::sqrt(determinant(l.gram).get_d());
  }
  double operator()(double n) const { return vol * std::pow(std::sqrt(n) + radius, dim); }
};

// sum_{n > b} A(n) g(n), A the cumulative count bound.
double lattice_tail(const IntegralLattice& l, long long b, const std::function<double(long long)>& g) {
  CountBound a(l);
  return tail_sum([&](long long n) { return a(double(n)) * g(n); }, b + 1);
}

long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }

}  // namespace

bool IntegralLattice::is_even() const {
  for (std::size_t i = 0; i < rank(); ++i)
    if (gram[i][i] % 2 != 0) return false;
  return true;
}

bool IntegralLattice::is_unimodular() const { return determinant(gram) == 1; }

mpz_class determinant(const std::vector<std::vector<long long>>& a) {
  std::size_t n = a.size();
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = mpz_class(std::to_string(a[i][j]));
  mpq_class det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      mpq_class f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det.get_num();
}

IntegralLattice make_lattice(std::string name, std::vector<std::vector<long long>> gram) {
  std::size_t n = gram.size();
  for (const auto& row : gram)
    if (row.size() != n) throw InvalidInput("lattice Gram matrix must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (gram[i][j] != gram[j][i]) throw InvalidInput("lattice Gram matrix must be symmetric");
  // leading principal minors
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::vector<long long>> sub(k, std::vector<long long>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = gram[i][j];
    if (determinant(sub) <= 0) throw InvalidInput("lattice Gram matrix must be positive definite");
  }
  return {std::move(name), std::move(gram)};
}

IntegralLattice e8() {
  std::vector<std::vector<long long>> g(8, std::vector<long long>(8, 0));
  for (int i = 0; i < 8; ++i) g[i][i] = 2;
  // Bourbaki labelling: chain 1-3-4-5-6-7-8 with 2 attached to 4
  const int edges[7][2] = {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {1, 3}};
  for (auto& e : edges) g[e[0]][e[1]] = g[e[1]][e[0]] = -1;
  return make_lattice("E8", g);
}

std::vector<std::uint64_t> enumerate_by_norm(const IntegralLattice& l, long long bound) {
  if (bound < 0) throw InvalidInput("norm bound must be nonnegative");
  std::vector<std::uint64_t> counts(bound + 1, 0);
  enumerate(l, bound, [&](const std::vector<long long>&, long long norm) { ++counts[norm]; });
  return counts;
}

std::vector<std::vector<long long>> vectors_by_norm(const IntegralLattice& l, long long bound, std::uint64_t limit) {
  if (bound < 0) throw InvalidInput("norm bound must be nonnegative");
  std::vector<std::vector<long long>> out;
  enumerate(l, bound, [&](const std::vector<long long>& x, long long) {
    if (out.size() >= limit)
      throw GuardExceeded("more than " + std::to_string(limit) + " lattice vectors below norm " + std::to_string(bound) +
                          " (use counts only)");
    out.push_back(x);
  });
  return out;
}

std::vector<std::uint64_t> primitive_counts(const std::vector<std::uint64_t>& counts) {
  std::vector<std::uint64_t> prim(counts.size(), 0);
  for (std::size_t n = 1; n < counts.size(); ++n) {
    std::uint64_t c = counts[n];
    for (std::size_t d = 2; d * d <= n; ++d)
      if (n % (d * d) == 0) c -= prim[n / (d * d)];
    prim[n] = c;
  }
  return prim;
}

double count_bound(const IntegralLattice& l, double n) { return CountBound(l)(n); }

double SiegelPoint::min_imag_eigenvalue() const {
  double a = t11.imag(), b = t12.imag(), c = t22.imag();
  double mean = (a + c) / 2, dev = std::sqrt((a - c) * (a - c) / 4 + b * b);
  return mean - dev;
}

void SiegelPoint::validate() const {
  if (!(min_imag_eigenvalue() > 0)) throw InvalidInput("imaginary part of the Siegel point is not positive definite");
}

Evaluation theta_basic(const IntegralLattice& l, cplx tau, double target, long long max_norm) {
  double y = tau.imag();
  if (!(y > 0)) throw InvalidInput("theta needs Im tau > 0");
  auto g = [&](long long n) { return std::exp(-pi * y * double(n)); };
  long long b = plan_norm_bound([&](long long bb) { return lattice_tail(l, bb, g); }, target, max_norm, "theta");
  auto counts = enumerate_by_norm(l, b);
  Accumulator acc;
  for (long long n = 0; n <= b; ++n)
    if (counts[n]) acc.add(double(counts[n]) * std::exp(cplx(0, pi) * tau * double(n)));
  return {acc.value(), lattice_tail(l, b, g), acc.terms()};
}

std::vector<std::uint64_t> theta_q_coefficients(const IntegralLattice& l, std::size_t n_max) {
  if (!l.is_even()) throw InvalidInput("q-expansion in integral powers needs an even lattice");
  auto counts = enumerate_by_norm(l, 2 * (long long)n_max);
  std::vector<std::uint64_t> out(n_max + 1);
  for (std::size_t k = 0; k <= n_max; ++k) out[k] = counts[2 * k];
  return out;
}

mpq_class bernoulli(unsigned k) {
  std::vector<mpq_class> b(k + 1);
  b[0] = 1;
  for (unsigned m = 1; m <= k; ++m) {
    mpq_class s = 0;
    mpz_class binom = 1;  // C(m + 1, j)
    for (unsigned j = 0; j < m; ++j) {
      s += binom * b[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    b[m] = -s / (m + 1);
  }
  return b[k];
}

mpz_class divisor_sigma(unsigned k, std::uint64_t n) {
  mpz_class s = 0;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), d, k);
    s += p;
    if (d * d != n) {
      mpz_ui_pow_ui(p.get_mpz_t(), n / d, k);
      s += p;
    }
  }
  return s;
}

namespace {

void check_weight(unsigned w) {
  if (w < 4 || w % 2) throw InvalidInput("Eisenstein weight must be even and at least 4");
}

mpq_class eisenstein_factor(unsigned w) { return mpq_class(-2 * (long)w) / bernoulli(w); }

}  // namespace

std::vector<mpq_class> eisenstein_q_coefficients(unsigned w, std::size_t n) {
  check_weight(w);
  mpq_class c = eisenstein_factor(w);
  std::vector<mpq_class> out(n + 1);
  out[0] = 1;
  for (std::size_t k = 1; k <= n; ++k) out[k] = c * mpq_class(divisor_sigma(w - 1, k));
  return out;
}

Evaluation eisenstein_qexp(cplx z, unsigned w, double target) {
  check_weight(w);
  double y = z.imag();
  if (!(y > 0)) throw InvalidInput("Eisenstein series needs Im z > 0");
  double cf = eisenstein_factor(w).get_d();
  double c = std::abs(cf);
  double zeta = zeta_bound(double(w - 1));
  double aq = std::exp(-2 * pi * y);
  cplx q = std::exp(cplx(0, 2 * pi) * z);
  Accumulator acc;
  acc.add(1);
  cplx qk(1, 0);
  for (std::uint64_t k = 1; k < 10'000'000; ++k) {
    // bound of the remainder from index k on
    double tk = c * zeta * std::pow(double(k), double(w - 1)) * std::pow(aq, double(k));
    double rk = std::pow(double(k + 1) / double(k), double(w - 1)) * aq;
    if (rk < 1 && tk / (1 - rk) <= target) return {acc.value(), tk / (1 - rk), acc.terms()};
    qk *= q;
    acc.add(cf * divisor_sigma(w - 1, k).get_d() * qk);
  }
  throw TruncationError("q-expansion did not converge (Im z too small)", std::numeric_limits<double>::infinity());
}

Evaluation coprime_sum(cplx z, unsigned w, const DirectPlan& plan) {
  check_weight(w);
  double x = z.real(), y = z.imag();
  if (!(y > 0)) throw InvalidInput("direct Eisenstein sum needs Im z > 0");
  long long amax = plan.a_max, bmax = plan.b_max;
  if (double(bmax) - double(amax) * std::abs(x) < 1)
    throw TruncationError("b range too short for Re z", std::numeric_limits<double>::infinity());
  Accumulator acc;
  double tail = 0;
  std::vector<char> coprime;
  for (long long a = 1; a <= amax; ++a) {
    coprime.assign(a, 0);
    for (long long r = 0; r < a; ++r) coprime[r] = gcd_ll(a, r) == 1;
    cplx az = double(a) * z;
    for (long long b = -bmax; b <= bmax; ++b) {
      long long r = ((b % a) + a) % a;
      if (!coprime[r]) continue;
      acc.add(ipow(1.0 / (az + double(b)), w));
    }
    tail += 2 * std::pow(double(bmax) - double(a) * std::abs(x), 1.0 - w) / (w - 1);
  }
  // a > amax: sum_{d} d^{-w} sum_{k d > amax} |S_w(k z)|
  double decay = 1 / (1 - std::exp(-2 * pi * y));
  for (long long d = 1; d <= amax; ++d) {
    long long k0 = amax / d + 1;
    tail += std::pow(double(d), -double(w)) * lipschitz_bound(double(k0) * y, w) * decay;
  }
  tail += lipschitz_bound(y, w) * decay * std::pow(double(amax), 1.0 - w) / (w - 1);
  return {acc.value(), tail, acc.terms()};
}

DualEvaluation eisenstein_rank1(cplx tau, unsigned w, const DirectPlan& plan, double target) {
  DualEvaluation out;
  out.accelerated = eisenstein_qexp(tau, w, target);
  auto d = coprime_sum(tau, w, plan);
  out.direct = {1.0 + d.value, d.tail, d.terms + 1};
  return out;
}

namespace {

// Primitive (m, n) with m > 0, or m = 0 and n = 1, with max(|m|, |n|) = r.
template <class F>
void half_plane_shell(long long r, F&& f) {
  if (r == 1) f(0, 1);
  for (long long m = 1; m <= r; ++m)
    for (long long n = -r; n <= r; ++n) {
      if (std::max(m, std::abs(n)) != r) continue;
      if (gcd_ll(m, std::abs(n)) != 1) continue;
      f(m, n);
    }
}

}  // namespace

DualEvaluation eisenstein_lhs(const SiegelPoint& tau, unsigned n, bool with_direct, const DirectPlan& plan,
                              double target) {
  tau.validate();
  if (n % 2) throw InvalidInput("rank must be even");
  unsigned w = n / 2;
  check_weight(w);
  double lam = tau.min_imag_eigenvalue();
  double c = std::abs(eisenstein_factor(w).get_d()) * zeta_bound(double(w - 1));
  // |E_w(z) - 1| <= c sum_k k^{w-1} exp(-2 pi k Im z)
  auto e_bound = [&](double y) {
    return c * tail_sum([&](long long k) { return std::pow(double(k), double(w - 1)) * std::exp(-2 * pi * double(k) * y); }, 1);
  };
  auto shell_bound = [&](long long r) { return 4.0 * double(r) * e_bound(lam * double(r * r)); };

  DualEvaluation out;
  Accumulator acc;
  acc.add(1);
  double tail = 0;
  long long r = 1;
  for (;; ++r) {
    half_plane_shell(r, [&](long long m, long long k) {
      auto e = eisenstein_qexp(tau.form(m, k), w, target * 1e-3);
      acc.add(e.value - 1.0);
      tail += e.tail;
    });
    double rest = tail_sum(shell_bound, r + 1);
    if (rest <= target / 2) {
      tail += rest;
      break;
    }
    if (r > 10000) throw TruncationError("outer (m, n) sum did not converge", rest);
  }
  out.accelerated = {acc.value(), tail, acc.terms()};

  if (with_direct) {
    Accumulator dacc;
    dacc.add(1);
    double dtail = 0;
    for (long long rr = 1; rr <= plan.pair_radius; ++rr)
      half_plane_shell(rr, [&](long long m, long long k) {
        auto e = coprime_sum(tau.form(m, k), w, plan);
        dacc.add(e.value);
        dtail += e.tail;
      });
    double zw = zeta_bound(double(w));
    dtail += tail_sum(
        [&](long long rr) {
          double y = lam * double(rr * rr);
          return 4.0 * double(rr) * zw * lipschitz_bound(y, w) / (1 - std::exp(-2 * pi * y));
        },
        plan.pair_radius + 1);
    out.direct = {dacc.value(), dtail, dacc.terms()};
  }
  return out;
}

namespace {

// theta_{Z^2}(s Q_tau) - 1 summed over (a, b) != 0, with its own tail.
Evaluation binary_theta_minus_one(const SiegelPoint& tau, double s, double target) {
  double lam = tau.min_imag_eigenvalue();
  Accumulator acc;
  double tail = 0;
  for (long long r = 1;; ++r) {
    for (long long a = 0; a <= r; ++a)
      for (long long b = -r; b <= r; ++b) {
        if (std::max(a, std::abs(b)) != r) continue;
        if (a == 0 && b <= 0) continue;  // half plane; the other half is the mirror image
        acc.add(2.0 * std::exp(cplx(0, pi * s) * tau.form(a, b)));
      }
    tail = tail_sum([&](long long rr) { return 8.0 * double(rr) * std::exp(-pi * lam * s * double(rr * rr)); }, r + 1);
    if (tail <= target) break;
  }
  return {acc.value(), tail, acc.terms()};
}

Evaluation theta_one_minus_one(cplx t, double s, double target) {
  Accumulator acc;
  double y = t.imag();
  double tail = 0;
  for (long long m = 1;; ++m) {
    acc.add(2.0 * std::exp(cplx(0, pi * s * double(m * m)) * t));
    tail = tail_sum([&](long long k) { return 2.0 * std::exp(-pi * s * y * double(k * k)); }, m + 1);
    if (tail <= target) break;
  }
  return {acc.value(), tail, acc.terms()};
}

}  // namespace

Evaluation theta_colinear(const IntegralLattice& l, const SiegelPoint& tau, double target, long long max_norm) {
  tau.validate();
  double lam = tau.min_imag_eigenvalue();
  auto g = [&](long long s) { return 0.5 * gaussian_pair_bound(pi * lam * double(s)); };
  long long b = plan_norm_bound([&](long long bb) { return lattice_tail(l, bb, g); }, target / 2, max_norm,
                                "colinear theta");
  auto prim = primitive_counts(enumerate_by_norm(l, b));
  Accumulator acc;
  acc.add(1);
  double tail = lattice_tail(l, b, g);
  for (long long s = 1; s <= b; ++s) {
    if (!prim[s]) continue;
    auto th = binary_theta_minus_one(tau, double(s), target * 1e-3);
    acc.add(0.5 * double(prim[s]) * th.value);
    tail += 0.5 * double(prim[s]) * th.tail;
  }
  return {acc.value(), tail, acc.terms()};
}

Evaluation theta_colinear_product(const IntegralLattice& l, cplx t1, cplx t2, double target, long long max_norm) {
  SiegelPoint tau{t1, 0, t2};
  tau.validate();
  double lam = tau.min_imag_eigenvalue();
  auto g = [&](long long s) { return 0.5 * gaussian_pair_bound(pi * lam * double(s)); };
  long long b = plan_norm_bound([&](long long bb) { return lattice_tail(l, bb, g); }, target / 2, max_norm,
                                "colinear theta");
  auto prim = primitive_counts(enumerate_by_norm(l, b));
  Accumulator acc;
  acc.add(1);
  double tail = lattice_tail(l, b, g);
  for (long long s = 1; s <= b; ++s) {
    if (!prim[s]) continue;
    auto a = theta_one_minus_one(t1, double(s), target * 1e-4);
    auto c = theta_one_minus_one(t2, double(s), target * 1e-4);
    // (1 + a)(1 + c) - 1
    acc.add(0.5 * double(prim[s]) * (a.value + c.value + a.value * c.value));
    double ea = a.tail, ec = c.tail;
    tail += 0.5 * double(prim[s]) * (ea + ec + ea * std::abs(c.value) + ec * std::abs(a.value) + ea * ec);
  }
  return {acc.value(), tail, acc.terms()};
}

Evaluation theta_colinear_direct(const IntegralLattice& l, const SiegelPoint& tau, long long norm_bound) {
  tau.validate();
  auto vecs = vectors_by_norm(l, norm_bound, 200'000);
  std::size_t n = l.rank(), count = vecs.size();
  std::vector<std::vector<long long>> gv(count, std::vector<long long>(n, 0));
  std::vector<long long> norms(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) gv[i][a] += l.gram[a][b] * vecs[i][b];
    norms[i] = 0;
    for (std::size_t a = 0; a < n; ++a) norms[i] += vecs[i][a] * gv[i][a];
  }
  auto colinear = [&](const std::vector<long long>& u, const std::vector<long long>& v) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (u[a] * v[b] != u[b] * v[a]) return false;
    return true;
  };
  Accumulator acc;
  const cplx ipi(0, pi);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j) {
      if (!colinear(vecs[i], vecs[j])) continue;
      long long uv = 0;
      for (std::size_t a = 0; a < n; ++a) uv += vecs[i][a] * gv[j][a];
      acc.add(std::exp(ipi * (tau.t11 * double(norms[i]) + 2.0 * tau.t12 * double(uv) + tau.t22 * double(norms[j]))));
    }
  // pairs with (u,u) + (v,v) > norm_bound, counted through L + L
  IntegralLattice doubled{"L+L", std::vector<std::vector<long long>>(2 * n, std::vector<long long>(2 * n, 0))};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) doubled.gram[a][b] = doubled.gram[a + n][b + n] = l.gram[a][b];
  double lam = tau.min_imag_eigenvalue();
  double tail = lattice_tail(doubled, norm_bound, [&](long long t) { return std::exp(-pi * lam * double(t)); });
  return {acc.value(), tail, acc.terms()};
}

mpq_class mass_constant(const std::vector<mpz_class>& aut_orders) {
  if (aut_orders.empty()) throw InvalidInput("mass constant needs at least one lattice");
  mpq_class s = 0;
  for (const auto& a : aut_orders) {
    if (a <= 0) throw InvalidInput("automorphism group orders must be positive");
    s += mpq_class(1, 1) / mpq_class(a);
  }
  mpq_class c = 1 / s;
  c.canonicalize();
  return c;
}

mpz_class weyl_group_order_e8() {
  mpz_class p = 1;
  for (int d : {2, 8, 12, 14, 18, 20, 24, 30}) p *= d;
  return p;
}

double precision_floor() { return 64 * std::numeric_limits<double>::epsilon(); }

IdentityReport verify_identity(const std::vector<GenusMember>& genus, const SiegelPoint& tau, unsigned n,
                               double tolerance, bool with_direct, const mpq_class* mass_override) {
  tau.validate();
  if (genus.empty()) throw InvalidInput("empty genus");
  for (const auto& g : genus) {
    if (g.lattice.rank() != n) throw InvalidInput("lattice " + g.lattice.name + " does not have rank " + std::to_string(n));
    if (!g.lattice.is_even() || !g.lattice.is_unimodular())
      throw InvalidInput("lattice " + g.lattice.name + " is not even unimodular");
  }
  if (!(tolerance > 0)) throw InvalidInput("tolerance must be positive");
  if (tolerance < precision_floor())
    throw TruncationError("tolerance below the double precision floor " + sci(precision_floor()),
                          precision_floor());
  IdentityReport rep;
  rep.tau = tau;
  rep.n = n;
  rep.tolerance = tolerance;
  rep.specialization = tau.is_diagonal();
  std::vector<mpz_class> auts;
  for (const auto& g : genus) auts.push_back(g.aut_order);
  rep.mass = mass_override ? *mass_override : mass_constant(auts);
  double target = std::max(tolerance * 1e-3, 1e-16);

  auto lhs = eisenstein_lhs(tau, n, with_direct, {}, target);
  rep.lhs = lhs.accelerated.value;
  rep.lhs_tail = lhs.accelerated.tail;
  cplx rhs = 0;
  double rtail = 0;
  for (const auto& g : genus) {
    double weight = mpq_class(rep.mass / mpq_class(g.aut_order)).get_d();
    auto th = theta_colinear(g.lattice, tau, target / weight);
    rhs += weight * th.value;
    rtail += weight * th.tail;
  }
  rep.rhs = rhs;
  rep.rhs_tail = rtail;
  rep.abs_diff = std::abs(rep.lhs - rep.rhs);
  rep.rel_diff = rep.abs_diff / std::abs(rep.lhs);
  double certified = (rep.lhs_tail + rep.rhs_tail) / std::abs(rep.lhs);
  if (certified > tolerance)
    throw TruncationError("relative truncation tails " + sci(certified) + " exceed the tolerance " + sci(tolerance), certified);
  rep.pass = rep.rel_diff <= tolerance;
  if (with_direct) {
    rep.has_direct = true;
    rep.lhs_direct = lhs.direct.value;
    rep.lhs_direct_tail = lhs.direct.tail;
    rep.direct_rel_diff = std::abs(lhs.direct.value - rep.lhs) / std::abs(rep.lhs);
  }
  return rep;
}

}  // namespace snt::analytic
