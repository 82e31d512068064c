#include "elts/bisim.hpp"
#include "elts/json_io.hpp"
#include "elts/laws.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace elts;

constexpr int kExitRelated = 0;
constexpr int kExitUnrelated = 1;
constexpr int kExitError = 2;

struct CliConfig {
  double tol = kDefaultTol;
  bool tol_given = false;
  double feas_tol = 1e-6;
  int max_iters = 20000;
  std::uint64_t seed = 0;
  int samples = 0;  // per-command default applied later
  std::uint64_t max_den = 0;
  std::string out;  // empty = stdout
  std::string format = "human";
};

void add_common(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--tol", cfg.tol,
                  "Quantum equality/positivity tolerance (overrides the file's)")
      ->each([&cfg](const std::string&) { cfg.tol_given = true; });
  cmd->add_option("--feas-tol", cfg.feas_tol, "Coupling feasibility residual threshold");
  cmd->add_option("--max-iters", cfg.max_iters, "Iteration cap for the feasibility solver");
  cmd->add_option("--seed", cfg.seed, "Seed for all randomized procedures");
  cmd->add_option("--samples", cfg.samples, "Sample count for randomized procedures");
  cmd->add_option("--max-den", cfg.max_den,
                  "Denominator bound for Born rationalization (0 = exact dyadic)");
  cmd->add_option("--out", cfg.out, "Output path (default: stdout)");
  cmd->add_option("--format", cfg.format, "Output format: json | human")
      ->check(CLI::IsMember({"json", "human"}));
}

void emit(const CliConfig& cfg, const Json& doc, const std::string& human) {
  std::string text = cfg.format == "json" ? doc.dump(2) + "\n" : human;
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw Error("cannot write '" + cfg.out + "'");
    f << text;
  }
}

Elts load_system(const std::string& path, const CliConfig& cfg) {
  Json j = read_json_file(path);
  if (cfg.tol_given && j.contains("algebra") && j["algebra"].is_object() &&
      j["algebra"].value("kind", "") == "quantum")
    j["algebra"]["tolerance"] = cfg.tol;
  try {
    return elts_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what(), e.violations());
  }
}

// --rho accepts a density file or a named constructor resolved at the
// system's grade.
DensityOperator resolve_rho(const std::string& spec, const Elts& sys, double tol,
                            bool full_grade_required) {
  if (auto named = named_matrix(spec)) {
    return DensityOperator(sys.grade(), *named, tol);
  }
  std::ifstream probe(spec);
  if (!probe) throw Error("--rho: '" + spec + "' is neither a file nor a named constructor");
  Json j = read_json_file(spec);
  DensityOperator rho = density_from_json(j, sys.grade().registry(), tol);
  if (full_grade_required && rho.systems != sys.grade())
    throw Error("--rho: density is over " + rho.systems.to_string() + ", the system over " +
                sys.grade().to_string());
  return rho;
}

Json partition_to_json(const Partition& p) {
  Json blocks = Json::array();
  for (const auto& block : p.blocks) blocks.push_back(block);
  return blocks;
}

Json verdict_to_json(const BisimVerdict& v) {
  Json out{{"kind", v.kind}, {"numerics", Json{{"tol", v.tol}}}};
  if (v.pair) out["pair"] = Json::array({v.pair->first, v.pair->second});
  if (v.related) out["related"] = *v.related;
  if (v.kind == "kernel") {
    out["partition"] = partition_to_json(v.partition);
  } else {
    Json rel = Json::array();
    for (const auto& [x, y] : v.relation) rel.push_back(Json::array({x, y}));
    out["relation"] = rel;
    out["numerical"] = v.numerical;
    out["numerics"]["feas_tol"] = v.feas_tol;
    out["numerics"]["max_residual"] = v.max_residual;
    if (v.refutation_certified) out["refutation_certified"] = *v.refutation_certified;
    Json couplings = Json::array();
    for (const auto& c : v.couplings) {
      Json cells = Json::array();
      for (const auto& row : c.cells) {
        Json r = Json::array();
        for (const auto& cell : row) r.push_back(effect_value_to_json(cell));
        cells.push_back(r);
      }
      couplings.push_back(Json{{"label", c.label},
                               {"left_index", c.left_index},
                               {"right_index", c.right_index},
                               {"rows", c.row_ids},
                               {"cols", c.col_ids},
                               {"matrix", cells}});
    }
    out["couplings"] = couplings;
  }
  if (!v.diagnostics.empty()) out["diagnostics"] = v.diagnostics;
  return out;
}

std::string verdict_to_human(const BisimVerdict& v) {
  std::string s = v.kind + ": ";
  if (v.pair)
    s += v.pair->first + (v.related && *v.related ? " ~ " : " !~ ") + v.pair->second + "\n";
  if (v.kind == "kernel") {
    s += "partition:";
    for (const auto& block : v.partition.blocks) {
      s += " {";
      for (std::size_t i = 0; i < block.size(); ++i) s += (i ? "," : "") + block[i];
      s += "}";
    }
    s += "\n";
  } else {
    s += "relation (" + std::to_string(v.relation.size()) + " pairs):";
    for (const auto& [x, y] : v.relation) s += " (" + x + "," + y + ")";
    s += "\n";
    if (v.numerical) {
      char line[64];
      std::snprintf(line, sizeof line, "numerical verdicts involved; max residual %.3e\n",
                    v.max_residual);
      s += line;
    }
    if (v.refutation_certified)
      s += std::string("refutation: ") + (*v.refutation_certified ? "exact" : "numerical") + "\n";
    for (const auto& c : v.couplings) {
      s += "coupling on '" + c.label + "' (" + std::to_string(c.left_index) + "," +
           std::to_string(c.right_index) + "): rows";
      for (const auto& id : c.row_ids) s += " " + id;
      s += " / cols";
      for (const auto& id : c.col_ids) s += " " + id;
      s += "\n";
    }
  }
  for (const auto& d : v.diagnostics) s += "  note: " + d + "\n";
  return s;
}

Json report_to_json(const DesideratumReport& r) {
  Json out{{"kind", r.kind},
           {"quantum_related", r.quantum_related},
           {"rho_hat", Json{{"seed", r.rho_hat_seed},
                            {"min_gap", r.rho_hat_min_gap},
                            {"related", r.rho_hat_related}}},
           {"agree", r.agree},
           {"defect", r.defect}};
  if (!r.random_related.empty()) {
    int yes = 0;
    for (bool b : r.random_related) yes += b ? 1 : 0;
    out["random"] = Json{{"samples", r.random_related.size()}, {"related", yes}};
  }
  return out;
}

std::string report_to_human(const DesideratumReport& r) {
  char hat[96];
  std::snprintf(hat, sizeof hat, "rho_hat (seed %llu, min gap %.3e)",
                static_cast<unsigned long long>(r.rho_hat_seed), r.rho_hat_min_gap);
  std::string s = r.kind + ": quantum-level " +
                  std::string(r.quantum_related ? "related" : "unrelated") + ", at " + hat + " " +
                  (r.rho_hat_related ? "related" : "unrelated");
  if (!r.random_related.empty()) {
    int yes = 0;
    for (bool b : r.random_related) yes += b ? 1 : 0;
    s += ", random densities " + std::to_string(yes) + "/" +
         std::to_string(r.random_related.size()) + " related";
  }
  s += r.agree ? "; levels agree\n" : "; DEFECT: levels disagree\n";
  return s;
}

int cmd_check(const std::string& kind, const std::string& file_a, const std::string& state_x,
              const std::string& file_b, const std::string& state_y, const CliConfig& cfg) {
  Elts a = load_system(file_a, cfg);
  Elts b = file_a == file_b ? a : load_system(file_b, cfg);
  if (!a.has_state(state_x)) throw Error("state '" + state_x + "' not in " + file_a);
  if (!b.has_state(state_y)) throw Error("state '" + state_y + "' not in " + file_b);

  if (kind == "kernel" || kind == "am") {
    BisimVerdict v;
    if (kind == "kernel") {
      v = kernel_bisim(a, b, std::make_pair(state_x, state_y));
    } else {
      CouplingOptions opts;
      opts.feas_tol = cfg.feas_tol;
      opts.max_iters = cfg.max_iters;
      v = am_bisim(a, b, std::make_pair(state_x, state_y), opts);
    }
    emit(cfg, verdict_to_json(v), verdict_to_human(v));
    return *v.related ? kExitRelated : kExitUnrelated;
  }
  DesideratumReport r;
  if (kind == "desiderata1") {
    int n = cfg.samples > 0 ? cfg.samples : 10;
    r = check_desiderata1(a, b, state_x, state_y, n, cfg.seed);
  } else {
    r = check_desiderata2(a, b, state_x, state_y, cfg.seed);
  }
  emit(cfg, report_to_json(r), report_to_human(r));
  return r.quantum_related ? kExitRelated : kExitUnrelated;
}

int cmd_transform(const std::string& op, const std::vector<std::string>& inputs,
                  const std::string& rho_spec, const std::string& morphism_path,
                  const std::string& separator, const CliConfig& cfg) {
  Elts sys = load_system(inputs.at(0), cfg);
  InstantiateOptions iopts;
  iopts.born.max_denominator = cfg.max_den;
  iopts.born.tol = cfg.tol;
  Elts result = [&] {
    if (op == "instantiate")
      return instantiate(sys, resolve_rho(rho_spec, sys, cfg.tol, true), iopts);
    if (op == "peval") return partial_eval(sys, resolve_rho(rho_spec, sys, cfg.tol, false), iopts);
    if (op == "compose") {
      ParallelOptions popts;
      if (!separator.empty()) popts.separator = separator;
      return parallel(sys, load_system(inputs.at(1), cfg), popts);
    }
    if (op == "remap") return remap_weights(sys, morphism_from_json(read_json_file(morphism_path), sys));
    throw Error("unknown transform '" + op + "'");
  }();
  Json doc = elts_to_json(result);
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_json_file(doc, cfg.out);
  }
  return 0;
}

int cmd_laws(const std::string& scope, bool corrupt_sort, const CliConfig& cfg) {
  LawConfig lc;
  lc.seed = cfg.seed;
  lc.samples = cfg.samples > 0 ? cfg.samples : 100;
  lc.tol = 1e-8;
  lc.corrupt_sort = corrupt_sort;
  auto results = run_laws(scope, lc);
  Json arr = Json::array();
  std::string human;
  bool all_pass = true;
  for (const auto& r : results) {
    arr.push_back(Json{{"law", r.name},
                       {"samples", r.samples},
                       {"worst_deviation", r.worst},
                       {"pass", r.pass},
                       {"note", r.note}});
    char line[256];
    std::snprintf(line, sizeof line, "%-42s %5d samples  worst %.3e  %s%s%s\n", r.name.c_str(),
                  r.samples, r.worst, r.pass ? "pass" : "FAIL", r.note.empty() ? "" : "  ",
                  r.note.c_str());
    human += line;
    all_pass = all_pass && r.pass;
  }
  emit(cfg, Json{{"laws", arr}, {"all_pass", all_pass}}, human);
  return all_pass ? 0 : 1;
}

int cmd_distinguish(const std::string& effects_path, const CliConfig& cfg) {
  EffectSetFile file = effect_set_from_json(read_json_file(effects_path), cfg.tol);
  DistinguishOptions opts;
  opts.seed = cfg.seed;
  opts.tol = cfg.tol;
  DistinguishResult r = distinguishing_density(file.effects, file.systems, opts);
  Json gaps = Json::array();
  for (const auto& [pair, gap] : r.pair_gaps)
    gaps.push_back(Json{{"i", pair.first}, {"j", pair.second}, {"gap", gap}});
  Json doc = density_to_json(r.rho);
  doc["seed"] = r.seed;
  doc["attempts"] = r.attempts;
  doc["min_gap"] = r.min_gap;
  doc["pairwise_gaps"] = gaps;
  char line[160];
  std::snprintf(line, sizeof line,
                "distinguishing density found (seed %llu, attempt %d, min gap %.3e)\n",
                static_cast<unsigned long long>(r.seed), r.attempts, r.min_gap);
  emit(cfg, doc, std::string(line) + doc.dump(2) + "\n");
  return 0;
}

int cmd_validate(const std::string& path, const CliConfig& cfg) {
  auto violations = validate_file(path);
  if (violations.empty()) {
    emit(cfg, Json{{"valid", true}}, path + ": valid\n");
    return 0;
  }
  Json arr = Json::array();
  std::string human;
  for (const auto& v : violations) {
    arr.push_back(Json{{"where", v.where}, {"what", v.what}});
    human += path + ": " + v.where + ": " + v.what + "\n";
  }
  emit(cfg, Json{{"valid", false}, {"violations", arr}}, human);
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "elts - model and verify effect-labelled transition systems\n"
      "Exit codes for `check`: 0 related / desideratum holds at the quantum level,\n"
      "1 unrelated, 2 usage or validation error."};
  app.require_subcommand(1);
  CliConfig cfg;

  // check
  auto* check = app.add_subcommand("check", "Kernel/AM bisimilarity and the desiderata checks");
  std::string check_kind, file_a, state_x, file_b, state_y;
  check->add_option("kind", check_kind, "kernel | am | desiderata1 | desiderata2")
      ->required()
      ->check(CLI::IsMember({"kernel", "am", "desiderata1", "desiderata2"}));
  check->add_option("fileA", file_a)->required();
  check->add_option("stateX", state_x)->required();
  check->add_option("fileB", file_b)->required();
  check->add_option("stateY", state_y)->required();
  add_common(check, cfg);

  // transform
  auto* transform = app.add_subcommand("transform", "Apply an operator and emit the result");
  std::string transform_op, rho_spec, morphism_path;
  std::vector<std::string> transform_inputs;
  transform->add_option("op", transform_op, "instantiate | peval | compose | remap")
      ->required()
      ->check(CLI::IsMember({"instantiate", "peval", "compose", "remap"}));
  transform->add_option("inputs", transform_inputs, "Input system file(s)")->required();
  transform->add_option("--rho", rho_spec, "Density file or named constructor (e.g. proj0)");
  transform->add_option("--morphism", morphism_path, "Morphism description file");
  std::string separator;
  transform->add_option("--separator", separator, "Pair-state separator for compose (default |)");
  add_common(transform, cfg);

  // laws
  auto* laws = app.add_subcommand("laws", "Run the randomized law suites");
  std::string laws_scope;
  bool corrupt_sort = false;
  laws->add_option("scope", laws_scope, "algebra | monad | quantum | all")
      ->required()
      ->check(CLI::IsMember({"algebra", "monad", "quantum", "all"}));
  laws->add_flag("--corrupt-sort", corrupt_sort)->group("");  // test hook, hidden
  add_common(laws, cfg);

  // distinguish
  auto* distinguish = app.add_subcommand("distinguish", "Find a distinguishing density");
  std::string effects_path;
  distinguish->add_option("effects", effects_path, "Effect set file")->required();
  add_common(distinguish, cfg);

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a system file");
  std::string validate_path;
  validate_cmd->add_option("file", validate_path)->required();
  add_common(validate_cmd, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(check_kind, file_a, state_x, file_b, state_y, cfg);
    if (transform->parsed()) {
      if ((transform_op == "instantiate" || transform_op == "peval") && rho_spec.empty())
        throw Error(transform_op + " needs --rho");
      if (transform_op == "remap" && morphism_path.empty()) throw Error("remap needs --morphism");
      if (transform_op == "compose" && transform_inputs.size() != 2)
        throw Error("compose takes exactly two input files");
      return cmd_transform(transform_op, transform_inputs, rho_spec, morphism_path,
                           separator, cfg);
    }
    if (laws->parsed()) return cmd_laws(laws_scope, corrupt_sort, cfg);
    if (distinguish->parsed()) return cmd_distinguish(effects_path, cfg);
    if (validate_cmd->parsed()) return cmd_validate(validate_path, cfg);
  } catch (const elts::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
