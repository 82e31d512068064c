#pragma once

#include "elts/distribution.hpp"
#include "elts/rng.hpp"

#include <vector>

namespace elts {
namespace gen {

// Random rational in [0,1] with a small denominator.
Rational rational(Rng& rng, long max_den = 24);

// k rationals with an exact total <= 1 (composition of a random denominator).
std::vector<Rational> sub_convex_weights(Rng& rng, int k, long max_den = 24);

// Haar-ish random unitary via QR of a Gaussian matrix.
Matrix unitary(Rng& rng, long dim);

// Random effect: G G^dagger scaled into [0,1] eigenvalue range.
Matrix effect(Rng& rng, long dim);

// Random full-rank density operator.
Matrix density_matrix(Rng& rng, long dim);
DensityOperator density(Rng& rng, const SystemCollection& systems, double tol = kDefaultTol);

// A projective measurement with `outcomes` effects summing to the identity
// (projectors onto groups of columns of a random unitary).
std::vector<Matrix> measurement(Rng& rng, long dim, int outcomes);

// Random value valid in ctx (dim used for quantum).
EffectValue value(Rng& rng, const EffectAlgebraContext& ctx, long dim = 1);

// Random sub-distribution over a pool of state ids.
EffectDistribution distribution(Rng& rng, const EffectAlgebraContext& ctx,
                                const SystemCollection& grade,
                                const std::vector<std::string>& states, int max_support = 3);

// Random sub-collection of the registry's systems.
SystemCollection subcollection(Rng& rng, const SystemRegistry& registry, int max_size);

}  // namespace gen
}  // namespace elts
