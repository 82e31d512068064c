#pragma once

#include "elts/matrix.hpp"
#include "elts/rational.hpp"
#include "elts/systems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace elts {

inline constexpr double kDefaultTol = 1e-9;

// Hermitian with eigenvalues in [-tol, 1+tol].
bool validate_effect(const Matrix& m, double tol = kDefaultTol);

// Hermitian, positive within tol, trace within tol of one.
bool validate_density(const Matrix& m, double tol = kDefaultTol);

// A trace-one positive matrix over the Hilbert space of a system collection.
struct DensityOperator {
  SystemCollection systems;
  Matrix matrix;

  DensityOperator() = default;
  DensityOperator(SystemCollection sys, Matrix m, double tol = kDefaultTol);
};

struct BornOptions {
  // 0 keeps the exact dyadic rational of the trace; a positive bound applies
  // continued-fraction rationalization with denominator <= max_denominator.
  std::uint64_t max_denominator = 0;
  double tol = kDefaultTol;
};

// tr(L rho) as an exact rational, clamped to [0,1] within tol. The trace is
// accumulated in exact rational arithmetic so that born(A,rho) + born(B,rho)
// equals born(A+B,rho) whenever the matrix sum is exact.
Rational born(const Matrix& effect, const DensityOperator& rho, const BornOptions& opts = {});
double born_real(const Matrix& effect, const DensityOperator& rho);

// Permutation matrix mapping the basis of H_C (x) H_D (C factors first, each
// side internally sorted) onto the basis of H_{C + D} with all factors in the
// global identifier order. Computed by mixed-radix digit rearrangement.
Matrix sort_permutation(const SystemCollection& c, const SystemCollection& d);

// perm[source_index] = target_index for the same rearrangement.
std::vector<long> sort_permutation_vector(const SystemCollection& c, const SystemCollection& d);

// Sort_{C,D}(A (x)_k B): the graded product of matrices over disjoint
// collections, commutative after sorting.
Matrix sorted_kron(const SystemCollection& c, const Matrix& a, const SystemCollection& d,
                   const Matrix& b);

// Partial trace over the systems in `over` (a subset of c); the result lives
// over c \ over.
Matrix partial_trace(const SystemCollection& c, const Matrix& m, const SystemCollection& over);

struct DistinguishOptions {
  std::uint64_t seed = 0;
  int max_attempts = 64;
  double sep_tol = 1e-8;
  double tol = kDefaultTol;
};

struct DistinguishResult {
  DensityOperator rho;
  std::uint64_t seed = 0;
  int attempts = 0;
  double min_gap = 0.0;
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> pair_gaps;
};

// A density operator giving pairwise-distinct Born values on a finite set of
// pairwise-distinct effects. Gaussian-sampled full-rank densities, retried up
// to max_attempts; the postcondition is re-checked before returning.
DistinguishResult distinguishing_density(const std::vector<Matrix>& effects,
                                         const SystemCollection& systems,
                                         const DistinguishOptions& opts = {});

// Named constructors accepted in files. maximally_mixed(d) takes any positive
// dimension; everything else is fixed-size.
std::optional<Matrix> named_matrix(const std::string& name);

}  // namespace elts
