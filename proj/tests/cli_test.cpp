#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef ELTS_CLI_PATH
#define ELTS_CLI_PATH "elts"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string out_file = "/tmp/elts_cli_out.txt";
  std::string cmd = std::string(ELTS_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string data(const std::string& rel) { return testsupport::data_path(rel); }

}  // namespace

TEST_CASE("check: exit codes follow the verdict") {
  auto two_bases = data("systems/two_bases.json");
  CHECK(run("check kernel " + two_bases + " x1 " + two_bases + " x2").exit_code == 0);
  CHECK(run("check am " + two_bases + " x1 " + two_bases + " x2").exit_code == 1);
  CHECK(run("check kernel " + two_bases + " x1 " + two_bases + " nosuch").exit_code == 2);
  CHECK(run("check kernel /tmp/does_not_exist.json x1 " + two_bases + " x2").exit_code == 2);
}

TEST_CASE("check: malformed files exit 2 with diagnostics") {
  std::ofstream bad("/tmp/elts_bad.json");
  bad << "{\"algebra\": {\"kind\": \"quantum\"}\n";  // truncated json
  bad.close();
  auto r = run("check kernel /tmp/elts_bad.json x1 /tmp/elts_bad.json x2");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("check: json format carries the witness partition") {
  auto two_bases = data("systems/two_bases.json");
  auto r = run("check kernel " + two_bases + " x1 " + two_bases + " x2 --format json");
  CHECK(r.exit_code == 0);
  elts::Json doc = elts::Json::parse(r.output);
  CHECK(doc.at("related").get<bool>());
  CHECK(doc.at("kind") == "kernel");
  CHECK(doc.contains("partition"));
}

TEST_CASE("check desiderata on the example") {
  auto two_bases = data("systems/two_bases.json");
  auto r1 = run("check desiderata1 " + two_bases + " x1 " + two_bases +
                " x2 --samples 4 --seed 5 --format json");
  CHECK(r1.exit_code == 0);
  elts::Json doc = elts::Json::parse(r1.output);
  CHECK(doc.at("agree").get<bool>());
  CHECK(!doc.at("defect").get<bool>());
  auto r2 = run("check desiderata2 " + two_bases + " x1 " + two_bases + " x2 --format json");
  CHECK(r2.exit_code == 0);
}

TEST_CASE("transform instantiate produces the golden probabilistic system") {
  auto two_bases = data("systems/two_bases.json");
  auto r = run("transform instantiate " + two_bases + " --rho proj0 --out /tmp/elts_inst.json");
  REQUIRE(r.exit_code == 0);
  elts::Elts inst = elts::load_elts("/tmp/elts_inst.json");  // round-trips through parse
  CHECK(inst.ctx().kind == elts::Kind::probability);
  CHECK(inst.dists("x1", "tau").at(0).weight("x3")->rat() == elts::Rational(1));
  CHECK(inst.dists("x2", "tau").at(0).weight("x4")->rat() == elts::Rational(1, 2));
}

TEST_CASE("transform compose: grade clash exits 2") {
  auto two_bases = data("systems/two_bases.json");
  auto r = run("transform compose " + two_bases + " " + two_bases);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("no-cloning") != std::string::npos);
}

TEST_CASE("transform compose: CCS handshake") {
  auto r = run("transform compose " + data("systems/handshake_a.json") + " " +
               data("systems/handshake_b.json") + " --out /tmp/elts_par.json");
  REQUIRE(r.exit_code == 0);
  elts::Elts p = elts::load_elts("/tmp/elts_par.json");
  CHECK(p.states().size() == 4);
  CHECK(p.dists("s0|t0", "tau").size() == 1);
}

TEST_CASE("transform peval with the full grade equals instantiate") {
  auto two_bases = data("systems/two_bases.json");
  REQUIRE(run("transform instantiate " + two_bases + " --rho proj+ --out /tmp/elts_i.json")
              .exit_code == 0);
  REQUIRE(run("transform peval " + two_bases + " --rho proj+ --out /tmp/elts_p.json").exit_code ==
          0);
  CHECK(elts::elts_equal(elts::load_elts("/tmp/elts_i.json"), elts::load_elts("/tmp/elts_p.json")));
}

TEST_CASE("transform remap with a morphism file") {
  auto r = run("transform remap " + data("systems/two_bases.json") + " --morphism " +
               data("morphisms/born_proj0.json") + " --out /tmp/elts_remap.json");
  REQUIRE(r.exit_code == 0);
  elts::Elts mapped = elts::load_elts("/tmp/elts_remap.json");
  CHECK(mapped.ctx().kind == elts::Kind::probability);
}

TEST_CASE("laws: exit 0 on pass, 1 with the corrupted sort hook") {
  CHECK(run("laws monad --samples 30 --seed 2").exit_code == 0);
  auto r = run("laws quantum --samples 10 --seed 2 --corrupt-sort --format json");
  CHECK(r.exit_code == 1);
  elts::Json doc = elts::Json::parse(r.output);
  bool found = false;
  for (const auto& law : doc.at("laws"))
    if (law.at("law") == "quantum/boxtimes-commutes" && !law.at("pass").get<bool>()) found = true;
  CHECK(found);
}

TEST_CASE("laws algebra rejects a broken table at load") {
  std::ofstream bad("/tmp/elts_bad_table.json");
  bad << R"({
    "algebra": {"kind": "finite", "table": {
      "carrier": ["0", "a", "1"], "zero": "0", "one": "1",
      "sum": [["0","1","1"], ["a","a","1"], ["a","1","1"]],
      "complement": {"0": "1", "a": "a", "1": "0"}
    }},
    "grade": [], "states": ["s"], "transitions": [], "markov_chain": false
  })";
  bad.close();
  auto r = run("validate /tmp/elts_bad_table.json");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("zero-one") != std::string::npos);
}

TEST_CASE("distinguish emits a verified density with recorded gaps") {
  auto r = run("distinguish " + data("effects/projectors_01pm.json") +
               " --seed 11 --format json --out /tmp/elts_dist.json");
  REQUIRE(r.exit_code == 0);
  elts::Json doc = elts::read_json_file("/tmp/elts_dist.json");
  CHECK(doc.at("seed") == 11);
  CHECK(doc.at("min_gap").get<double>() > 1e-8);
  CHECK(doc.at("pairwise_gaps").size() == 6);  // 4 choose 2
  // re-verify the traces on the emitted density
  elts::DensityOperator rho = elts::density_from_json(doc);
  for (const auto& gap : doc.at("pairwise_gaps")) CHECK(gap.at("gap").get<double>() > 1e-8);
  CHECK(elts::validate_density(rho.matrix));

  SUBCASE("duplicate effects exit 2") {
    std::ofstream dup("/tmp/elts_dup.json");
    dup << R"({"registry": {"q1": 2}, "systems": ["q1"],
               "effects": ["proj0", "proj0"]})";
    dup.close();
    CHECK(run("distinguish /tmp/elts_dup.json").exit_code == 2);
  }
}

TEST_CASE("validate: diagnostics for invariant violations") {
  CHECK(run("validate " + data("systems/two_bases.json")).exit_code == 0);
  std::ofstream bad("/tmp/elts_bad_sys.json");
  bad << R"({
    "algebra": {"kind": "quantum", "registry": {"q1": 2}},
    "grade": ["q1"], "states": ["s"],
    "labels": {"tau": "tau", "visible": [], "bar": {}},
    "transitions": [
      {"from": "s", "label": "tau", "dist": {"weights": {"ghost": "proj0"}}}
    ],
    "markov_chain": false
  })";
  bad.close();
  auto r = run("validate /tmp/elts_bad_sys.json --format json");
  CHECK(r.exit_code == 2);
  elts::Json doc = elts::Json::parse(r.output);
  CHECK(!doc.at("valid").get<bool>());
  CHECK(doc.at("violations").size() >= 1);
}
