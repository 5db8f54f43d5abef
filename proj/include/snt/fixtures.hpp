#pragma once

// Deterministic generator for the JSON fixtures shipped under fixtures/.
// The same seed always produces byte-identical files.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace snt::fixtures {

inline constexpr std::uint64_t kDefaultSeed = 1729;

struct FixtureFile {
  std::string path;  // relative to the fixture root
  nlohmann::json content;
};

std::vector<FixtureFile> generate(std::uint64_t seed = kDefaultSeed);

/// Writes every file below `root`, creating directories; returns the paths written.
std::vector<std::string> write(const std::string& root, const std::vector<FixtureFile>& files);

}  // namespace snt::fixtures
