#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>

#include "snt/errors.hpp"

namespace snt {

/// Size limit for exhaustive enumerations. SNT_MAX_ENUM overrides the default.
inline std::uint64_t enumeration_limit(std::uint64_t fallback) {
  if (const char* env = std::getenv("SNT_MAX_ENUM")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return fallback;
}

/// q^e, saturating at UINT64_MAX.
inline std::uint64_t saturating_pow(std::uint64_t q, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (r > UINT64_MAX / q) return UINT64_MAX;
    r *= q;
  }
  return r;
}

inline void require_within(std::uint64_t size, std::uint64_t limit, const std::string& what) {
  if (size > limit)
    throw GuardExceeded(what + " has size " + (size == UINT64_MAX ? std::string("> 2^64") : std::to_string(size)) +
                        ", above the enumeration limit " + std::to_string(limit) +
                        " (set SNT_MAX_ENUM to raise it)");
}

}  // namespace snt
