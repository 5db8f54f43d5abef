#pragma once

// The work behind each CLI subcommand, shared with the Python bindings. Each
// command fills a RunReport (checks and machine-readable result) and a
// human-readable text; errors propagate as snt exceptions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snt/fixtures.hpp"
#include "snt/io.hpp"

namespace snt::commands {

struct Output {
  io::RunReport report;
  std::string text;
};

/// Module JSON {field, dim, t_action, gram, metadata?}.
Output decompose(const io::json& module);

/// Tensor JSON {field, v_gram, x, partition | t_minus | module + flag}.
Output orbit(const io::json& x, const std::optional<io::json>& y = std::nullopt);

struct CensusOptions {
  std::uint32_t q = 3;
  std::size_t k = 0;               // M = H_k
  std::vector<std::size_t> partition;  // overrides k when nonempty
  std::vector<long long> v_diag;
  std::size_t v_hyperbolic = 0;    // hyperbolic planes, placed first
  std::size_t dim_v = 0;           // identity form of this size when nothing else is given
  std::uint64_t limit = 0;         // 0: default or SNT_MAX_ENUM
  std::size_t transport_samples = 0;
  std::uint64_t seed = fixtures::kDefaultSeed;
};

Output census(const CensusOptions& o);

struct IdentityOptions {
  std::vector<io::json> lattices;  // {name, gram, aut_order}; empty means E8
  std::string tau11 = "2i", tau12 = "0.5i", tau22 = "2i";
  unsigned rank = 8;
  double tol = 1e-8;
  bool direct = false;
  std::string mass;  // optional override of C
};

Output verify_sw(const IdentityOptions& o);

}  // namespace snt::commands
