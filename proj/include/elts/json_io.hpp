#pragma once

#include "elts/elts.hpp"

#include <json.hpp>

#include <string>

namespace elts {

using Json = nlohmann::json;

// ----- effect values ---------------------------------------------------
// {"rational":"1/2"} | {"matrix":[[[re,im],...],...]} | {"finite":"a"}
// In quantum contexts a bare string is resolved through named_matrix.
EffectValue effect_value_from_json(const Json& j, const EffectAlgebraContext& ctx,
                                   long expected_dim = 0);
Json effect_value_to_json(const EffectValue& v);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// ----- finite tables ----------------------------------------------------
// {"carrier":[...], "zero":"0", "one":"1", "sum":[["a","b","c"],...],
//  "complement":{"a":"a'"}}
FiniteTable finite_table_from_json(const Json& j);
Json finite_table_to_json(const FiniteTable& t);

// ----- algebra contexts -------------------------------------------------
// {"kind":"probability"} | {"kind":"quantum","registry":{"q1":2},"tolerance":1e-9}
// | {"kind":"finite","table":{...}}
EffectAlgebraContext context_from_json(const Json& j);
Json context_to_json(const EffectAlgebraContext& ctx);

// ----- densities ----------------------------------------------------------
// {"systems":["q1"], "matrix":[[[re,im],...],...]}; "matrix" may be a named
// constructor. The registry comes from the json ("registry") or the fallback.
DensityOperator density_from_json(const Json& j, const SystemRegistry& fallback_registry = {},
                                  double tol = kDefaultTol);
Json density_to_json(const DensityOperator& rho);

// ----- distributions -----------------------------------------------------
// {"grade":["q1"], "weights":{"x3":VALUE,...}} ("grade" optional inside
// system files, where it must match the system grade).
EffectDistribution distribution_from_json(const Json& j, const EffectAlgebraContext& ctx,
                                          const SystemCollection& grade);
Json distribution_to_json(const EffectDistribution& d, bool include_grade = false);

// ----- systems -------------------------------------------------------------
Elts elts_from_json(const Json& j);
Json elts_to_json(const Elts& sys);

// Reads, parses and validates; throws ParseError / ValidationError with
// line-anchored diagnostics.
Elts load_elts(const std::string& path);
void save_elts(const Elts& sys, const std::string& path);

// Lenient form used by the validate subcommand: structural errors and
// invariant violations are returned as data instead of thrown.
std::vector<Violation> validate_file(const std::string& path);

// ----- morphisms --------------------------------------------------------
// {"kind":"born","rho":{...}} | {"kind":"identity"} |
// {"kind":"partial_eval","rho":{...}} |
// {"kind":"finite_hom","target":{...context...},"map":{"a":VALUE,...}}
EffectMorphism morphism_from_json(const Json& j, const Elts& domain);

// ----- effect sets (distinguish) -----------------------------------------
// {"registry":{"q1":2}, "systems":["q1"], "effects":[VALUE,...]}
struct EffectSetFile {
  SystemCollection systems;
  std::vector<Matrix> effects;
};
EffectSetFile effect_set_from_json(const Json& j, double tol = kDefaultTol);

Json read_json_file(const std::string& path);
void write_json_file(const Json& j, const std::string& path);

}  // namespace elts
