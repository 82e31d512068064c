#include "elts/bisim.hpp"
#include "elts/json_io.hpp"
#include "elts/laws.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace elts;

namespace {

Json verdict_json(const BisimVerdict& v) {
  Json out{{"kind", v.kind}};
  if (v.pair) out["pair"] = Json::array({v.pair->first, v.pair->second});
  if (v.related) out["related"] = *v.related;
  if (v.kind == "kernel") {
    Json blocks = Json::array();
    for (const auto& block : v.partition.blocks) blocks.push_back(block);
    out["partition"] = blocks;
  } else {
    Json rel = Json::array();
    for (const auto& [x, y] : v.relation) rel.push_back(Json::array({x, y}));
    out["relation"] = rel;
    out["numerical"] = v.numerical;
    if (v.refutation_certified) out["refutation_certified"] = *v.refutation_certified;
  }
  if (!v.diagnostics.empty()) out["diagnostics"] = v.diagnostics;
  return out;
}

DensityOperator rho_from_spec(const Elts& sys, const std::string& spec) {
  if (auto named = named_matrix(spec))
    return DensityOperator(sys.grade(), *named, sys.ctx().tol);
  return density_from_json(Json::parse(spec), sys.grade().registry(), sys.ctx().tol);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Effect-labelled transition systems: bisimilarity checking, Born-rule "
            "instantiation and compositional operators.";

  py::class_<Elts>(m, "System")
      .def_property_readonly("states", [](const Elts& s) { return s.states(); })
      .def_property_readonly("markov_chain", [](const Elts& s) { return s.markov_chain(); })
      .def_property_readonly("grade", [](const Elts& s) { return s.grade().names(); })
      .def("__repr__", [](const Elts& s) {
        return "<System: " + std::to_string(s.states().size()) + " states, " +
               std::to_string(s.transitions().size()) + " transition entries>";
      });

  m.def("load", [](const std::string& path) { return load_elts(path); }, py::arg("path"));
  m.def("loads", [](const std::string& text) { return elts_from_json(Json::parse(text)); },
        py::arg("text"));
  m.def("dumps", [](const Elts& sys) { return elts_to_json(sys).dump(2); }, py::arg("system"));
  m.def("validate",
        [](const std::string& path) {
          std::vector<std::pair<std::string, std::string>> out;
          for (const auto& v : validate_file(path)) out.emplace_back(v.where, v.what);
          return out;
        },
        py::arg("path"));

  m.def("kernel_check",
        [](const Elts& a, const Elts& b, const std::string& x, const std::string& y) {
          return verdict_json(kernel_bisim(a, b, std::make_pair(x, y))).dump();
        },
        py::arg("a"), py::arg("b"), py::arg("x"), py::arg("y"));
  m.def("am_check",
        [](const Elts& a, const Elts& b, const std::string& x, const std::string& y,
           double feas_tol, int max_iters) {
          CouplingOptions opts;
          opts.feas_tol = feas_tol;
          opts.max_iters = max_iters;
          return verdict_json(am_bisim(a, b, std::make_pair(x, y), opts)).dump();
        },
        py::arg("a"), py::arg("b"), py::arg("x"), py::arg("y"), py::arg("feas_tol") = 1e-6,
        py::arg("max_iters") = 20000);
  m.def("desiderata1",
        [](const Elts& a, const Elts& b, const std::string& x, const std::string& y, int n_random,
           std::uint64_t seed) {
          auto r = check_desiderata1(a, b, x, y, n_random, seed);
          int yes = 0;
          for (bool v : r.random_related) yes += v;
          return Json{{"kind", r.kind},
                      {"quantum_related", r.quantum_related},
                      {"rho_hat_related", r.rho_hat_related},
                      {"random_related", yes},
                      {"random_samples", r.random_related.size()},
                      {"agree", r.agree},
                      {"defect", r.defect}}
              .dump();
        },
        py::arg("a"), py::arg("b"), py::arg("x"), py::arg("y"), py::arg("n_random") = 10,
        py::arg("seed") = 0);

  m.def("instantiate",
        [](const Elts& sys, const std::string& rho) {
          return instantiate(sys, rho_from_spec(sys, rho));
        },
        py::arg("system"), py::arg("rho"),
        "rho: a named constructor (e.g. 'proj0') or a density JSON string");
  m.def("parallel", [](const Elts& a, const Elts& b) { return parallel(a, b); }, py::arg("a"),
        py::arg("b"));
  m.def("partial_eval",
        [](const Elts& sys, const std::string& rho) {
          return partial_eval(sys, rho_from_spec(sys, rho));
        },
        py::arg("system"), py::arg("rho"));
  m.def("remap",
        [](const Elts& sys, const std::string& morphism) {
          return remap_weights(sys, morphism_from_json(Json::parse(morphism), sys));
        },
        py::arg("system"), py::arg("morphism"));

  m.def("born",
        [](const std::string& effect, const std::string& rho) {
          auto matrix_spec = [](const std::string& spec) {
            if (auto named = named_matrix(spec)) return *named;
            return matrix_from_json(Json::parse(spec));
          };
          Matrix l = matrix_spec(effect);
          SystemRegistry fallback{{"q", l.rows()}};
          Json rj = named_matrix(rho) ? Json() : Json::parse(rho);
          DensityOperator d =
              rj.is_object() && rj.contains("matrix")
                  ? density_from_json(rj, fallback)
                  : DensityOperator(SystemCollection::full(fallback), matrix_spec(rho));
          return format_rational(born(l, d));
        },
        py::arg("effect"), py::arg("rho"),
        "Named constructors (e.g. 'proj0') or JSON matrix/density strings.");
  m.def("distinguishing_density",
        [](const std::string& effects, std::uint64_t seed, int max_attempts) {
          EffectSetFile file = effect_set_from_json(Json::parse(effects));
          DistinguishOptions opts;
          opts.seed = seed;
          opts.max_attempts = max_attempts;
          DistinguishResult r = distinguishing_density(file.effects, file.systems, opts);
          Json doc = density_to_json(r.rho);
          doc["seed"] = r.seed;
          doc["attempts"] = r.attempts;
          doc["min_gap"] = r.min_gap;
          return doc.dump();
        },
        py::arg("effects"), py::arg("seed") = 0, py::arg("max_attempts") = 64);

  m.def("run_laws",
        [](const std::string& scope, std::uint64_t seed, int samples) {
          LawConfig cfg;
          cfg.seed = seed;
          cfg.samples = samples;
          Json arr = Json::array();
          for (const auto& r : run_laws(scope, cfg))
            arr.push_back(Json{{"law", r.name},
                               {"samples", r.samples},
                               {"worst_deviation", r.worst},
                               {"pass", r.pass}});
          return arr.dump();
        },
        py::arg("scope") = "all", py::arg("seed") = 0, py::arg("samples") = 50);

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<GradeClashError>(m, "GradeClashError", PyExc_ValueError);
  py::register_exception<KindMismatchError>(m, "KindMismatchError", PyExc_TypeError);
}
