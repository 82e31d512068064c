#pragma once

#include "elts/coupling.hpp"
#include "elts/elts.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace elts {

// Disjoint blocks covering the combined state space, ordered by least member.
struct Partition {
  std::vector<std::vector<std::string>> blocks;
  std::map<std::string, int> block_of;

  bool same_block(const std::string& x, const std::string& y) const;
  // True when every pair related by `this` is related by coarser.
  bool refines(const Partition& coarser) const;
};

struct CouplingRecord {
  std::string label;
  int left_index = 0, right_index = 0;
  std::vector<std::string> row_ids, col_ids;
  std::vector<std::vector<EffectValue>> cells;
};

struct BisimVerdict {
  std::string kind;  // "kernel" | "am"
  std::optional<std::pair<std::string, std::string>> pair;
  std::optional<bool> related;
  Partition partition;                                        // kernel witness
  std::vector<std::pair<std::string, std::string>> relation;  // am witness
  std::vector<CouplingRecord> couplings;                      // am, queried pair
  bool numerical = false;      // some quantum verdict came from Dykstra iteration
  double max_residual = 0.0;
  // For an unrelated queried pair: true when every coupling refutation behind
  // its deletion was exact (rank-1/component analysis or an exact backend).
  std::optional<bool> refutation_certified;
  double tol = 0.0, feas_tol = 0.0;
  std::vector<std::string> diagnostics;
};

// Two systems glued for comparison. Equal systems are shared; clashing state
// ids on distinct systems are renamed with a "#b" suffix.
struct Combined {
  Elts sys;
  std::map<std::string, std::string> a_map, b_map;
  std::vector<std::string> a_states, b_states;  // combined ids per side
};
Combined combine(const Elts& a, const Elts& b);

/**
 * Coarsest partition such that two states share a block iff, for every label,
 * the sets of distributions quotiented onto blocks are equal. Starts from a
 * single block and splits by signature until the fixpoint; the result is
 * re-checked to be a cocongruence before returning.
 */
Partition kernel_partition(const Elts& sys);

BisimVerdict kernel_bisim(const Elts& a, const Elts& b,
                          std::optional<std::pair<std::string, std::string>> query = {});
bool kernel_equiv(const Elts& a, const Elts& b, const std::string& x, const std::string& y);

/**
 * Greatest fixpoint of the coupling transfer condition, starting from the
 * kernel relation (a sound upper bound). A pair survives iff for every label
 * each distribution on one side has a partner on the other admitting a
 * relation-supported coupling with matching marginals.
 */
BisimVerdict am_bisim(const Elts& a, const Elts& b,
                      std::optional<std::pair<std::string, std::string>> query = {},
                      const CouplingOptions& opts = {});
bool am_equiv(const Elts& a, const Elts& b, const std::string& x, const std::string& y,
              const CouplingOptions& opts = {});

// Per-distribution subset sums of the system's weights, deduplicated within
// tol: the finite effect algebra every quotient weight lives in.
std::vector<Matrix> effect_closure(const Elts& sys);

struct DesideratumReport {
  std::string kind;
  bool quantum_related = false;
  bool rho_hat_related = false;
  std::uint64_t rho_hat_seed = 0;
  double rho_hat_min_gap = 0.0;
  std::vector<bool> random_related;  // desiderata1 only
  bool agree = false;
  bool defect = false;
};

// Desideratum: quantum-level kernel equivalence must coincide with kernel
// equivalence after instantiation at a verified distinguishing density; the
// report also samples n_random random densities.
DesideratumReport check_desiderata1(const Elts& a, const Elts& b, const std::string& x,
                                    const std::string& y, int n_random, std::uint64_t seed);

// Representation consistency: kernel bisimilarity with matrix-equality
// weights against kernel bisimilarity with weights compared through the Born
// rule at a verified distinguishing density.
DesideratumReport check_desiderata2(const Elts& a, const Elts& b, const std::string& x,
                                    const std::string& y, std::uint64_t seed);

}  // namespace elts
