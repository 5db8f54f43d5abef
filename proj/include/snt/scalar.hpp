#pragma once

// Exact scalars: arbitrary-precision rationals and residues modulo an odd
// prime. Every algorithm in the library is a template over one of these two
// types; the accompanying field object constructs values and carries the
// modulus.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <random>
#include <string>

#include "snt/errors.hpp"

namespace snt {

class RationalField;
class PrimeField;

class Rational {
 public:
  using field_type = RationalField;

  Rational() = default;
  Rational(long long n) : q_(static_cast<long>(n)) {}  // NOLINT: implicit on purpose
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
  Rational(long long num, long long den) {
    if (den == 0) throw Error("rational with zero denominator");
    q_ = mpq_class(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    q_.canonicalize();
  }

  const mpq_class& value() const { return q_; }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_one() const { return q_ == 1; }

  Rational inverse() const {
    if (is_zero()) throw NotAUnit("division by zero rational");
    return Rational(mpq_class(1) / q_);
  }

  /// "num/den", with the denominator omitted when it is 1.
  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw NotAUnit("division by zero rational");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class q_{0};
};

/// Residue modulo an odd prime. A default-constructed value is a modulus-free
/// zero that adopts the modulus of whatever it is combined with.
class ModP {
 public:
  using field_type = PrimeField;

  ModP() = default;
  ModP(std::int64_t v, std::uint32_t p) : p_(p) {
    std::int64_t r = v % static_cast<std::int64_t>(p);
    v_ = static_cast<std::uint32_t>(r < 0 ? r + p : r);
  }

  std::uint32_t value() const { return v_; }
  std::uint32_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  ModP inverse() const {
    if (v_ == 0) throw NotAUnit("inverse of zero residue");
    // Fermat: v^(p-2).
    std::uint64_t result = 1, base = v_, e = p_ - 2;
    while (e) {
      if (e & 1) result = result * base % p_;
      base = base * base % p_;
      e >>= 1;
    }
    return raw(static_cast<std::uint32_t>(result), p_);
  }

  std::string str() const { return std::to_string(v_) + " mod " + std::to_string(p_); }

  ModP operator-() const { return raw(v_ == 0 ? 0 : p_ - v_, p_); }
  ModP& operator+=(const ModP& o) {
    adopt(o);
    std::uint32_t s = v_ + o.v_;
    v_ = s >= p_ ? s - p_ : s;
    return *this;
  }
  ModP& operator-=(const ModP& o) {
    adopt(o);
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + p_ - o.v_;
    return *this;
  }
  ModP& operator*=(const ModP& o) {
    adopt(o);
    v_ = static_cast<std::uint32_t>(static_cast<std::uint64_t>(v_) * o.v_ % (p_ ? p_ : 1));
    return *this;
  }
  ModP& operator/=(const ModP& o) { return *this *= o.inverse(); }

  friend ModP operator+(ModP a, const ModP& b) { return a += b; }
  friend ModP operator-(ModP a, const ModP& b) { return a -= b; }
  friend ModP operator*(ModP a, const ModP& b) { return a *= b; }
  friend ModP operator/(ModP a, const ModP& b) { return a /= b; }
  friend bool operator==(const ModP& a, const ModP& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const ModP& a, const ModP& b) { return a.v_ <=> b.v_; }

 private:
  static ModP raw(std::uint32_t v, std::uint32_t p) {
    ModP r;
    r.v_ = v;
    r.p_ = p;
    return r;
  }
  void adopt(const ModP& o) {
    if (p_ == 0) {
      p_ = o.p_;
    } else if (o.p_ != 0 && o.p_ != p_) {
      throw FieldMismatch("residues with different moduli");
    }
  }

  std::uint32_t v_ = 0;
  std::uint32_t p_ = 0;
};

class RationalField {
 public:
  using value_type = Rational;

  Rational zero() const { return Rational(0); }
  Rational one() const { return Rational(1); }
  Rational from_int(long long n) const { return Rational(n); }
  std::uint32_t characteristic() const { return 0; }
  std::string name() const { return "Q"; }

  /// Accepts "a", "a/b" and (for symmetry with prime fields) plain integers.
  Rational parse(const std::string& s) const;

  template <class Rng>
  Rational random(Rng& rng, int bound = 3) const {
    std::uniform_int_distribution<int> d(-bound, bound);
    return Rational(d(rng));
  }

  friend bool operator==(const RationalField&, const RationalField&) { return true; }
};

class PrimeField {
 public:
  using value_type = ModP;

  /// Characteristic 2 and composite moduli are rejected.
  explicit PrimeField(std::uint32_t p);

  ModP zero() const { return ModP(0, p_); }
  ModP one() const { return ModP(1, p_); }
  ModP from_int(long long n) const { return ModP(n, p_); }
  std::uint32_t characteristic() const { return p_; }
  std::uint32_t modulus() const { return p_; }
  std::string name() const { return "GF(" + std::to_string(p_) + ")"; }

  /// Accepts "r mod p" (p must match), or a plain (possibly negative) integer.
  ModP parse(const std::string& s) const;

  template <class Rng>
  ModP random(Rng& rng, int /*bound*/ = 0) const {
    std::uniform_int_distribution<std::uint32_t> d(0, p_ - 1);
    return ModP(d(rng), p_);
  }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  std::uint32_t p_;
};

template <class K>
using FieldOf = typename K::field_type;

template <class F>
concept ExactField = requires(const F& f) {
  typename F::value_type;
  { f.zero() } -> std::same_as<typename F::value_type>;
  { f.one() } -> std::same_as<typename F::value_type>;
  { f.characteristic() } -> std::convertible_to<std::uint32_t>;
};

inline std::string to_string(const Rational& x) { return x.str(); }
inline std::string to_string(const ModP& x) { return x.str(); }

}  // namespace snt
