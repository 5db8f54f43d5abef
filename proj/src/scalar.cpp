#include "snt/scalar.hpp"

#include <cctype>

namespace snt {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

Rational RationalField::parse(const std::string& text) const {
  std::string s = trim(text);
  if (s.empty()) throw Error("empty rational literal");
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw Error("malformed rational literal '" + text + "'");
  if (q.get_den() == 0) throw Error("rational with zero denominator: '" + text + "'");
  q.canonicalize();
  return Rational(q);
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (p == 2) throw FieldMismatch("characteristic 2 is not supported");
  if (!is_prime(p)) throw FieldMismatch("modulus " + std::to_string(p) + " is not a prime");
}

ModP PrimeField::parse(const std::string& text) const {
  std::string s = trim(text);
  auto pos = s.find("mod");
  std::string body = trim(pos == std::string::npos ? s : s.substr(0, pos));
  if (pos != std::string::npos) {
    std::string mod = trim(s.substr(pos + 3));
    if (mod.empty() || std::stoul(mod) != p_)
      throw FieldMismatch("residue '" + text + "' does not belong to " + name());
  }
  if (body.empty()) throw Error("malformed residue literal '" + text + "'");
  mpz_class z;
  if (z.set_str(body, 10) != 0) throw Error("malformed residue literal '" + text + "'");
  mpz_class r = z % p_;
  if (r < 0) r += p_;
  return ModP(static_cast<std::int64_t>(r.get_si()), p_);
}

}  // namespace snt
