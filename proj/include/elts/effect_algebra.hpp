#pragma once

#include "elts/finite_table.hpp"
#include "elts/matrix.hpp"
#include "elts/quantum.hpp"
#include "elts/rational.hpp"
#include "elts/systems.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace elts {

enum class Kind { probability, quantum, finite };

std::string kind_name(Kind k);

// The ambient effect algebra: exact rationals in [0,1], quantum effects over
// collections from a registry, or a finite table algebra. equality_tolerance
// is zero for the exact kinds and kDefaultTol for quantum.
struct EffectAlgebraContext {
  Kind kind = Kind::probability;
  SystemRegistry registry;                    // quantum
  std::shared_ptr<const FiniteTable> table;   // finite
  double tol = 0.0;

  static EffectAlgebraContext probability();
  static EffectAlgebraContext quantum(SystemRegistry reg, double tol = kDefaultTol);
  static EffectAlgebraContext finite(FiniteTable table);

  bool compatible(const EffectAlgebraContext& other) const;
};

// A weight: exact rational, Hermitian matrix effect, or named table element.
class EffectValue {
 public:
  static EffectValue rational(Rational r) {
    return EffectValue(std::in_place_index<0>, std::move(r));
  }
  static EffectValue matrix(Matrix m) { return EffectValue(std::in_place_index<1>, std::move(m)); }
  static EffectValue finite(std::string name) {
    return EffectValue(std::in_place_index<2>, std::move(name));
  }

  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  bool is_matrix() const { return std::holds_alternative<Matrix>(v_); }
  bool is_finite() const { return std::holds_alternative<std::string>(v_); }

  const Rational& rat() const { return std::get<Rational>(v_); }
  const Matrix& mat() const { return std::get<Matrix>(v_); }
  const std::string& name() const { return std::get<std::string>(v_); }

 private:
  template <std::size_t I, typename T>
  EffectValue(std::in_place_index_t<I> tag, T v) : v_(tag, std::move(v)) {}
  std::variant<Rational, Matrix, std::string> v_;
};

// Throws unless v is a valid element of ctx's algebra (rational in [0,1],
// matrix effect within tol, name in the table carrier). expected_dim, when
// positive, additionally pins the matrix dimension.
void check_value(const EffectAlgebraContext& ctx, const EffectValue& v, long expected_dim = 0);

EffectValue zero_value(const EffectAlgebraContext& ctx, long dim = 1);
EffectValue one_value(const EffectAlgebraContext& ctx, long dim = 1);

bool value_equal(const EffectAlgebraContext& ctx, const EffectValue& a, const EffectValue& b);
bool value_is_zero(const EffectAlgebraContext& ctx, const EffectValue& v);

// a + b when orthogonal, absent otherwise.
std::optional<EffectValue> pcm_sum(const EffectAlgebraContext& ctx, const EffectValue& a,
                                   const EffectValue& b);

// The unique a' with a + a' = 1.
EffectValue orthocomplement(const EffectAlgebraContext& ctx, const EffectValue& a);

// a <= b in the induced order (exists c with a + c = b); for quantum this is
// the Loewner order within tol.
bool leq(const EffectAlgebraContext& ctx, const EffectValue& a, const EffectValue& b);

// The unique c with a + c = b, absent when a is not below b.
std::optional<EffectValue> difference(const EffectAlgebraContext& ctx, const EffectValue& a,
                                      const EffectValue& b);

// Fold of pcm_sum; absent as soon as a partial sum is undefined. values may be
// empty, in which case the zero of the given dimension is returned.
std::optional<EffectValue> nary_sum(const EffectAlgebraContext& ctx,
                                    const std::vector<EffectValue>& values, long dim = 1);

// The graded product: rational multiplication for probability, the sorted
// Kronecker product for quantum (grades must be disjoint), and for finite
// tables only the unit/zero laws (the algebra carries no general product).
EffectValue boxtimes(const EffectAlgebraContext& ctx, const EffectValue& a,
                     const SystemCollection& ga, const EffectValue& b,
                     const SystemCollection& gb);

// Deterministic canonical key (quantized for matrices); ordering aid only.
std::string value_key(const EffectValue& v);

std::string value_to_string(const EffectValue& v);

}  // namespace elts
