#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hfock::acceptance {

inline constexpr std::uint64_t kSeed = 1545;

struct CriterionResult {
  std::string id;  // "1", "4a", ...
  std::string title;
  bool passed = false;
  std::string detail;
};

/// Serialized outputs of the stochastic criteria, keyed by name; two runs with
/// the same seeds must produce identical maps.
using Artifacts = std::map<std::string, std::string>;

/// Runs every acceptance criterion in order. When `progress` is set, one line
/// per criterion is written as soon as it finishes.
std::vector<CriterionResult> run_all(std::ostream* progress = nullptr);

std::string format_line(const CriterionResult& result);

}  // namespace hfock::acceptance
