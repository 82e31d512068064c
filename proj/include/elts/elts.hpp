#pragma once

#include "elts/distribution.hpp"
#include "elts/errors.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace elts {

// Labels with a silent action tau and an involution on the visible labels.
struct LabelSet {
  std::string tau = "tau";
  std::set<std::string> visible;
  std::map<std::string, std::string> bar;

  bool is_label(const std::string& l) const { return l == tau || visible.count(l) > 0; }
  const std::string& bar_of(const std::string& l) const;
  std::vector<Violation> check() const;
  friend bool operator==(const LabelSet& a, const LabelSet& b) {
    return a.tau == b.tau && a.visible == b.visible && a.bar == b.bar;
  }
};

/**
 * An effect-labelled transition system: per-state, per-label finite sets of
 * effect distributions over a shared grade. markov_chain mode asserts exactly
 * one label and exactly one distribution per state.
 *
 * Transition sets are kept deduplicated under distribution equality and the
 * whole structure is immutable after construction.
 */
class Elts {
 public:
  Elts() = default;
  Elts(EffectAlgebraContext ctx, SystemCollection grade, std::vector<std::string> states,
       LabelSet labels,
       std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions,
       bool markov_chain = false);

  const EffectAlgebraContext& ctx() const { return ctx_; }
  const SystemCollection& grade() const { return grade_; }
  const std::vector<std::string>& states() const { return states_; }
  const LabelSet& labels() const { return labels_; }
  bool markov_chain() const { return markov_chain_; }
  const std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>>&
  transitions() const {
    return transitions_;
  }

  bool has_state(const std::string& id) const;
  // The transition set for (state, label); empty when none are declared.
  const std::vector<EffectDistribution>& dists(const std::string& state,
                                               const std::string& label) const;

 private:
  EffectAlgebraContext ctx_;
  SystemCollection grade_;
  std::vector<std::string> states_;  // sorted, unique
  LabelSet labels_;
  std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions_;
  bool markov_chain_ = false;
};

// Invariant check; every entry names the state/label/distribution at fault.
std::vector<Violation> validate(const Elts& sys);

bool elts_equal(const Elts& a, const Elts& b);

// Bijective state relabeling.
Elts rename_states(const Elts& sys, const std::map<std::string, std::string>& f);

struct InstantiateOptions {
  BornOptions born;
  // Map tolerance-equal weights to a shared representative before applying
  // the Born rule, so downstream exact rational comparison agrees with the
  // quantum equality.
  bool canonicalize = true;
};

// Born-rule instantiation: every weight L becomes tr(L rho); the result is a
// probability system at the empty grade with unchanged structure.
Elts instantiate(const Elts& sys, const DensityOperator& rho, const InstantiateOptions& opts = {});

// map_weights on every distribution.
Elts remap_weights(const Elts& sys, const EffectMorphism& m);

// Partial evaluation: weights L become tr_{C'}(L (rho (x) I)) over C \ C'
// where C' = rho.systems. With C' = C this is exactly instantiate.
Elts partial_eval(const Elts& sys, const DensityOperator& rho, const InstantiateOptions& opts = {});

struct ParallelOptions {
  std::string separator = "|";
};

// CCS-style synchronization: interleaving moves pair a move with the idle
// partner extended to the partner's grade; matching label/bar(label) moves
// synchronize into a tau move. Grades must be disjoint (no-cloning).
Elts parallel(const Elts& a, const Elts& b, const ParallelOptions& opts = {});

}  // namespace elts
