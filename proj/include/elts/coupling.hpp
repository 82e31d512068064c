#pragma once

#include "elts/effect_algebra.hpp"

#include <optional>
#include <vector>

namespace elts {

struct CouplingOptions {
  double feas_tol = 1e-6;
  int max_iters = 20000;
  // The analytic path for instances whose row/column sums are all rank-1;
  // exposed so tests can force the numerical path.
  bool rank1_shortcut = true;
};

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<std::vector<std::vector<EffectValue>>> witness;
  double residual = 0.0;
  // True when the verdict is exact (rational flow, exhaustive table search,
  // component/rank-1 analysis); false when Dykstra iteration decided.
  bool certified = true;
  int iterations = 0;
};

/**
 * Decides whether a matrix (m_xy) with entries from the algebra exists with
 * the given row and column sums, and m_xy = 0 wherever support is false.
 *
 * Backends: probability -- exact rational max-flow; finite -- exhaustive
 * search with row/column remainder pruning; quantum -- per-component total
 * analysis and a rank-1 analytic reduction where applicable, otherwise
 * Dykstra alternating projections between the per-cell PSD cone and the
 * row/column-sum affine subspace.
 */
FeasibilityVerdict coupling_feasible(const EffectAlgebraContext& ctx,
                                     const std::vector<EffectValue>& row_sums,
                                     const std::vector<EffectValue>& col_sums,
                                     const std::vector<std::vector<bool>>& support,
                                     const CouplingOptions& opts = {});

// Rows [a,b] vs columns [c,d] with full support; preconditions a orthogonal b,
// c orthogonal d, a+b = c+d.
FeasibilityVerdict is_decomposable_instance(const EffectAlgebraContext& ctx, const EffectValue& a,
                                            const EffectValue& b, const EffectValue& c,
                                            const EffectValue& d, const CouplingOptions& opts = {});

// Exhaustive decomposability of a finite table algebra: every valid
// (a,b,c,d) instance admits a refinement matrix.
bool table_decomposable(const EffectAlgebraContext& ctx, const CouplingOptions& opts = {});

}  // namespace elts
