#pragma once

#include "elts/coupling.hpp"
#include "elts/effect_algebra.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace elts {

/**
 * A finite-support map from state ids to effect values, graded by a system
 * collection (empty for probability/finite contexts). Canonical form: weights
 * keyed by state id, zero weights dropped, total weight below one in the
 * algebra. Sub-distributions are allowed; nothing renormalizes.
 */
class EffectDistribution {
 public:
  EffectDistribution(EffectAlgebraContext ctx, SystemCollection grade,
                     std::map<std::string, EffectValue> weights);

  const EffectAlgebraContext& ctx() const { return ctx_; }
  const SystemCollection& grade() const { return grade_; }
  const std::map<std::string, EffectValue>& weights() const { return weights_; }

  bool empty() const { return weights_.empty(); }
  std::vector<std::string> support() const;
  const EffectValue* weight(const std::string& id) const;

  // n-ary sum of all weights (defined by the invariant).
  EffectValue total() const;

 private:
  EffectAlgebraContext ctx_;
  SystemCollection grade_;
  std::map<std::string, EffectValue> weights_;
};

bool dist_equal(const EffectDistribution& a, const EffectDistribution& b);

// Deterministic canonical serialization (quantized matrix entries).
std::string dist_key(const EffectDistribution& d);

// D_E(f): the weight of y is the sum over the preimage of y.
EffectDistribution pushforward(const std::map<std::string, std::string>& f,
                               const EffectDistribution& d);

// A registered effect morphism between algebra contexts; applying it to a
// distribution transforms every weight (naturality of m o -).
struct EffectMorphism {
  std::string name;
  EffectAlgebraContext source;
  SystemCollection source_grade;
  EffectAlgebraContext target;
  SystemCollection target_grade;
  std::function<EffectValue(const EffectValue&)> fn;
};

EffectDistribution map_weights(const EffectMorphism& m, const EffectDistribution& d);

// eta(x) = 1 at grade 0 (the empty collection).
EffectDistribution unit_distribution(const EffectAlgebraContext& ctx, const std::string& id,
                                     SystemRegistry registry = {});

// mu: weight of x is sum_i e_i (x) Delta_i(x). Outer weights are graded by
// outer_grade, the inner distributions must share a grade disjoint from it
// (no-cloning: a grade clash is an error).
EffectDistribution graded_mult(
    const EffectAlgebraContext& ctx, const SystemCollection& outer_grade,
    const std::vector<std::pair<EffectValue, EffectDistribution>>& items);

// alpha: weight of (x,y) is Delta(x) (x) Theta(y); grades must be disjoint.
EffectDistribution product_alpha(
    const EffectDistribution& left, const EffectDistribution& right,
    const std::function<std::string(const std::string&, const std::string&)>& pair_id);

EffectDistribution product_alpha(const EffectDistribution& left, const EffectDistribution& right);

// xi_{m <= n}: each weight tensored with the identity on the missing factor;
// the identity operation for probability/finite contexts.
EffectDistribution extend(const EffectDistribution& d, const SystemCollection& target_grade);

// Morphism factories.
EffectMorphism identity_morphism(const EffectAlgebraContext& ctx, SystemCollection grade);
EffectMorphism born_morphism(const EffectAlgebraContext& source, const DensityOperator& rho,
                             const BornOptions& opts = {});
EffectMorphism partial_eval_morphism(const EffectAlgebraContext& source,
                                     const SystemCollection& grade, const DensityOperator& rho);
// Validated table homomorphism into the target algebra (checked exhaustively
// against the table's sums and complements at construction).
EffectMorphism finite_hom_morphism(const EffectAlgebraContext& source,
                                   const EffectAlgebraContext& target,
                                   const std::map<std::string, EffectValue>& images);

}  // namespace elts
