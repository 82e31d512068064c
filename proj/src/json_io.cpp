#include "elts/json_io.hpp"

#include "elts/errors.hpp"

#include <fstream>
#include <sstream>

namespace elts {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw ParseError(what); }

const Json& need(const Json& j, const char* field) {
  if (!j.is_object() || !j.contains(field))
    parse_fail(std::string("missing field '") + field + "'");
  return j.at(field);
}

std::string need_string(const Json& j, const char* field) {
  const Json& v = need(j, field);
  if (!v.is_string()) parse_fail(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (j.is_string()) {
    auto named = named_matrix(j.get<std::string>());
    if (!named) parse_fail("unknown named matrix '" + j.get<std::string>() + "'");
    return *named;
  }
  if (!j.is_array() || j.empty()) parse_fail("matrix must be a non-empty array of rows");
  long n = static_cast<long>(j.size());
  Matrix m(n, n);
  for (long i = 0; i < n; ++i) {
    const Json& row = j.at(i);
    if (!row.is_array() || static_cast<long>(row.size()) != n)
      parse_fail("matrix row " + std::to_string(i) + " has wrong length (square, row-major)");
    for (long k = 0; k < n; ++k) {
      const Json& entry = row.at(k);
      if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_number() ||
          !entry.at(1).is_number())
        parse_fail("matrix entries are [re,im] pairs");
      m(i, k) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

EffectValue effect_value_from_json(const Json& j, const EffectAlgebraContext& ctx,
                                   long expected_dim) {
  EffectValue v = [&] {
    if (j.is_string()) {
      if (ctx.kind == Kind::finite) return EffectValue::finite(j.get<std::string>());
      if (ctx.kind == Kind::quantum) return EffectValue::matrix(matrix_from_json(j));
      return EffectValue::rational(parse_rational(j.get<std::string>()));
    }
    if (!j.is_object()) parse_fail("weight must be an object or a name");
    if (j.contains("rational")) {
      const Json& r = j.at("rational");
      if (!r.is_string()) parse_fail("'rational' holds a string like \"1/2\"");
      return EffectValue::rational(parse_rational(r.get<std::string>()));
    }
    if (j.contains("matrix")) return EffectValue::matrix(matrix_from_json(j.at("matrix")));
    if (j.contains("finite")) {
      const Json& f = j.at("finite");
      if (!f.is_string()) parse_fail("'finite' holds an element name");
      return EffectValue::finite(f.get<std::string>());
    }
    parse_fail("weight needs one of 'rational', 'matrix', 'finite'");
  }();
  check_value(ctx, v, expected_dim);
  return v;
}

Json effect_value_to_json(const EffectValue& v) {
  if (v.is_rational()) return Json{{"rational", format_rational(v.rat())}};
  if (v.is_finite()) return Json{{"finite", v.name()}};
  return Json{{"matrix", matrix_to_json(v.mat())}};
}

FiniteTable finite_table_from_json(const Json& j) {
  std::vector<std::string> carrier;
  for (const Json& e : need(j, "carrier")) {
    if (!e.is_string()) parse_fail("carrier holds element names");
    carrier.push_back(e.get<std::string>());
  }
  std::map<std::pair<std::string, std::string>, std::string> sums;
  for (const Json& triple : need(j, "sum")) {
    if (!triple.is_array() || triple.size() != 3) parse_fail("sum entries are [a,b,a+b] triples");
    sums[{triple.at(0).get<std::string>(), triple.at(1).get<std::string>()}] =
        triple.at(2).get<std::string>();
  }
  std::map<std::string, std::string> complement;
  for (const auto& [k, v] : need(j, "complement").items()) complement[k] = v.get<std::string>();
  return FiniteTable(std::move(carrier), need_string(j, "zero"), need_string(j, "one"),
                     std::move(sums), std::move(complement));
}

Json finite_table_to_json(const FiniteTable& t) {
  Json sums = Json::array();
  for (const auto& [pair, result] : t.sums()) sums.push_back({pair.first, pair.second, result});
  Json complement = Json::object();
  for (const auto& [k, v] : t.complements()) complement[k] = v;
  return Json{{"carrier", t.carrier()},
              {"zero", t.zero()},
              {"one", t.one()},
              {"sum", sums},
              {"complement", complement}};
}

EffectAlgebraContext context_from_json(const Json& j) {
  std::string kind = need_string(j, "kind");
  if (kind == "probability") return EffectAlgebraContext::probability();
  if (kind == "quantum") {
    SystemRegistry registry;
    for (const auto& [name, dim] : need(j, "registry").items()) {
      if (!dim.is_number_integer() || dim.get<long>() <= 0)
        parse_fail("registry dimensions are positive integers");
      registry[name] = dim.get<long>();
    }
    double tol = j.value("tolerance", kDefaultTol);
    return EffectAlgebraContext::quantum(std::move(registry), tol);
  }
  if (kind == "finite") return EffectAlgebraContext::finite(finite_table_from_json(need(j, "table")));
  parse_fail("unknown algebra kind '" + kind + "'");
}

Json context_to_json(const EffectAlgebraContext& ctx) {
  switch (ctx.kind) {
    case Kind::probability:
      return Json{{"kind", "probability"}};
    case Kind::quantum: {
      Json registry = Json::object();
      for (const auto& [name, dim] : ctx.registry) registry[name] = dim;
      return Json{{"kind", "quantum"}, {"registry", registry}, {"tolerance", ctx.tol}};
    }
    case Kind::finite:
      return Json{{"kind", "finite"}, {"table", finite_table_to_json(*ctx.table)}};
  }
  parse_fail("unreachable");
}

DensityOperator density_from_json(const Json& j, const SystemRegistry& fallback_registry,
                                  double tol) {
  SystemRegistry registry = fallback_registry;
  if (j.contains("registry")) {
    registry.clear();
    for (const auto& [name, dim] : j.at("registry").items()) registry[name] = dim.get<long>();
  }
  std::vector<std::string> names;
  for (const Json& n : need(j, "systems")) names.push_back(n.get<std::string>());
  SystemCollection systems(registry, names);
  Matrix m = matrix_from_json(need(j, "matrix"));
  return DensityOperator(std::move(systems), std::move(m), tol);
}

Json density_to_json(const DensityOperator& rho) {
  Json registry = Json::object();
  for (const auto& [name, dim] : rho.systems.registry()) registry[name] = dim;
  return Json{{"systems", rho.systems.names()},
              {"registry", registry},
              {"matrix", matrix_to_json(rho.matrix)}};
}

EffectDistribution distribution_from_json(const Json& j, const EffectAlgebraContext& ctx,
                                          const SystemCollection& grade) {
  if (j.contains("grade")) {
    std::vector<std::string> names;
    for (const Json& n : j.at("grade")) names.push_back(n.get<std::string>());
    SystemCollection declared(grade.registry(), names);
    if (declared != grade)
      parse_fail("distribution grade " + declared.to_string() + " differs from expected " +
                 grade.to_string());
  }
  long dim = ctx.kind == Kind::quantum ? grade.dimension() : 0;
  std::map<std::string, EffectValue> weights;
  for (const auto& [id, w] : need(j, "weights").items())
    weights.emplace(id, effect_value_from_json(w, ctx, dim));
  return EffectDistribution(ctx, grade, std::move(weights));
}

Json distribution_to_json(const EffectDistribution& d, bool include_grade) {
  Json weights = Json::object();
  for (const auto& [id, w] : d.weights()) weights[id] = effect_value_to_json(w);
  Json out{{"weights", weights}};
  if (include_grade) out["grade"] = d.grade().names();
  return out;
}

namespace {

Elts elts_from_json_impl(const Json& j, std::vector<Violation>* lenient) {
  std::vector<Violation> collected;
  auto note = [&](const std::string& where, const std::string& what) {
    collected.push_back({where, what});
  };

  EffectAlgebraContext ctx = context_from_json(need(j, "algebra"));
  std::vector<std::string> grade_names;
  if (j.contains("grade"))
    for (const Json& n : j.at("grade")) grade_names.push_back(n.get<std::string>());
  SystemRegistry registry = ctx.kind == Kind::quantum ? ctx.registry : SystemRegistry{};
  SystemCollection grade(registry, grade_names);

  std::vector<std::string> states;
  for (const Json& s : need(j, "states")) states.push_back(s.get<std::string>());

  LabelSet labels;
  if (j.contains("labels")) {
    const Json& lj = j.at("labels");
    labels.tau = lj.value("tau", "tau");
    if (lj.contains("visible"))
      for (const Json& l : lj.at("visible")) labels.visible.insert(l.get<std::string>());
    if (lj.contains("bar"))
      for (const auto& [k, v] : lj.at("bar").items()) labels.bar[k] = v.get<std::string>();
  }

  std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions;
  if (j.contains("transitions")) {
    std::size_t index = 0;
    for (const Json& t : j.at("transitions")) {
      std::string where = "transitions[" + std::to_string(index++) + "]";
      try {
        std::string from = need_string(t, "from");
        std::string label = need_string(t, "label");
        EffectDistribution d = distribution_from_json(need(t, "dist"), ctx, grade);
        transitions[{from, label}].push_back(std::move(d));
      } catch (const Error& e) {
        note(where, e.what());
      }
    }
  }

  Elts sys(std::move(ctx), std::move(grade), std::move(states), std::move(labels),
           std::move(transitions), j.value("markov_chain", false));
  for (const auto& v : validate(sys)) note(v.where, v.what);
  if (!collected.empty()) {
    if (!lenient) {
      std::string msg = "invalid system";
      for (const auto& v : collected) msg += "\n  " + v.where + ": " + v.what;
      throw ValidationError(msg, collected);
    }
    lenient->insert(lenient->end(), collected.begin(), collected.end());
  }
  return sys;
}

}  // namespace

Elts elts_from_json(const Json& j) { return elts_from_json_impl(j, nullptr); }

Json elts_to_json(const Elts& sys) {
  Json transitions = Json::array();
  for (const auto& [key, dists] : sys.transitions())
    for (const auto& d : dists)
      transitions.push_back(
          Json{{"from", key.first}, {"label", key.second}, {"dist", distribution_to_json(d)}});
  Json labels{{"tau", sys.labels().tau}};
  labels["visible"] = Json(sys.labels().visible);
  Json bar = Json::object();
  for (const auto& [k, v] : sys.labels().bar) bar[k] = v;
  labels["bar"] = bar;
  return Json{{"algebra", context_to_json(sys.ctx())},
              {"grade", sys.grade().names()},
              {"labels", labels},
              {"states", sys.states()},
              {"transitions", transitions},
              {"markov_chain", sys.markov_chain()}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

Elts load_elts(const std::string& path) {
  try {
    return elts_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what(), e.violations());
  }
}

void save_elts(const Elts& sys, const std::string& path) {
  write_json_file(elts_to_json(sys), path);
}

std::vector<Violation> validate_file(const std::string& path) {
  std::vector<Violation> out;
  try {
    Json j = read_json_file(path);
    elts_from_json_impl(j, &out);
  } catch (const ValidationError& e) {
    out.insert(out.end(), e.violations().begin(), e.violations().end());
  } catch (const Error& e) {
    out.push_back({path, e.what()});
  }
  return out;
}

EffectMorphism morphism_from_json(const Json& j, const Elts& domain) {
  std::string kind = need_string(j, "kind");
  if (kind == "identity") return identity_morphism(domain.ctx(), domain.grade());
  if (kind == "born") {
    DensityOperator rho =
        density_from_json(need(j, "rho"), domain.grade().registry(), domain.ctx().tol);
    return born_morphism(domain.ctx(), rho);
  }
  if (kind == "partial_eval") {
    DensityOperator rho =
        density_from_json(need(j, "rho"), domain.grade().registry(), domain.ctx().tol);
    return partial_eval_morphism(domain.ctx(), domain.grade(), rho);
  }
  if (kind == "finite_hom") {
    EffectAlgebraContext target = j.contains("target") ? context_from_json(j.at("target"))
                                                       : EffectAlgebraContext::probability();
    std::map<std::string, EffectValue> images;
    for (const auto& [name, v] : need(j, "map").items())
      images.emplace(name, effect_value_from_json(v, target));
    return finite_hom_morphism(domain.ctx(), target, images);
  }
  parse_fail("unknown morphism kind '" + kind + "'");
}

EffectSetFile effect_set_from_json(const Json& j, double tol) {
  SystemRegistry registry;
  for (const auto& [name, dim] : need(j, "registry").items()) registry[name] = dim.get<long>();
  std::vector<std::string> names;
  for (const Json& n : need(j, "systems")) names.push_back(n.get<std::string>());
  SystemCollection systems(registry, names);
  EffectAlgebraContext ctx = EffectAlgebraContext::quantum(registry, tol);
  std::vector<Matrix> effects;
  for (const Json& e : need(j, "effects"))
    effects.push_back(effect_value_from_json(e, ctx, systems.dimension()).mat());
  return {std::move(systems), std::move(effects)};
}

}  // namespace elts
