#pragma once

#include "elts/distribution.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace elts {

struct LawConfig {
  std::uint64_t seed = 0;
  int samples = 100;
  double tol = 1e-8;
  // Mutation hook: corrupt the sorting permutation inside the boxtimes
  // commutativity law so the suite demonstrably detects defects.
  bool corrupt_sort = false;
  // Restrict the monad laws to one weight context: "all" | "probability" |
  // "quantum".
  std::string context_filter = "all";
};

struct LawResult {
  std::string name;
  int samples = 0;
  double worst = 0.0;  // worst deviation seen (0 for exact laws)
  bool pass = false;
  std::string note;
};

// scope: "algebra" | "monad" | "quantum" | "all"
std::vector<LawResult> run_laws(const std::string& scope, const LawConfig& cfg);

std::vector<LawResult> algebra_laws(const LawConfig& cfg);
std::vector<LawResult> monad_laws(const LawConfig& cfg);
std::vector<LawResult> quantum_laws(const LawConfig& cfg);

}  // namespace elts
