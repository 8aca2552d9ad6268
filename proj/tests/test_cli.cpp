#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"

#ifndef QSTAB_CLI_PATH
#error "QSTAB_CLI_PATH must point at the built command-line binary"
#endif

namespace {

using namespace qstab;

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr merged

  bool contains(const std::string& needle) const {
    return output.find(needle) != std::string::npos;
  }
};

CliResult run_cli(const std::string& args) {
  std::string command = std::string(QSTAB_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string write_fixture(const std::string& name, const std::string& content) {
  auto p = temp_path(name);
  std::ofstream out(p);
  out << content;
  return p.string();
}

std::string m1_path() { return write_fixture("qstab-cli-m1.json", save_market(make_m1())); }

std::string pair_or_nothing_path() {
  return write_fixture("qstab-cli-pon.json", save_market(make_pair_or_nothing()));
}

}  // namespace

TEST_CASE("cli: verify-prefs") {
  CliResult pass = run_cli("verify-prefs -m " + m1_path());
  CHECK(pass.exit_code == 0);
  CHECK(pass.contains("w1 substitutability PASS"));
  CHECK(pass.contains("f2 law-of-aggregate-demand PASS"));

  CliResult fail = run_cli("verify-prefs -m " + pair_or_nothing_path());
  CHECK(fail.exit_code == 1);
  CHECK(fail.contains("g substitutability FAIL"));
  CHECK(fail.contains("Y="));  // witness is printed
  CHECK(fail.contains("g law-of-aggregate-demand PASS"));

  CliResult one = run_cli("verify-prefs -m " + pair_or_nothing_path() + " --agent u");
  CHECK(one.exit_code == 0);

  CliResult js = run_cli("verify-prefs -m " + m1_path() + " --json");
  CHECK(js.exit_code == 0);
  CHECK(json::parse(js.output).size() == 16);  // 4 agents x 4 properties
}

TEST_CASE("cli: check classifies allocations") {
  CliResult stable = run_cli("check -m " + m1_path() + " -a a,d");
  CHECK(stable.exit_code == 0);
  CHECK(stable.contains("allocation: {a,d}"));
  CHECK(stable.contains("individually rational: yes"));
  CHECK(stable.contains("blocking contracts: (none)"));
  CHECK(stable.contains("stable: yes"));

  CliResult blocked = run_cli("check -m " + m1_path() + " -a a");
  CHECK(blocked.exit_code == 0);
  CHECK(blocked.contains("blocking contracts: c,d"));
  CHECK(blocked.contains("quasi-stable: no"));
  CHECK(blocked.contains("stable: no"));

  CliResult sub = run_cli("check -m " + m1_path() + " -a c --firms f1");
  CHECK(sub.exit_code == 0);
  CHECK(sub.contains("stable: yes"));

  CliResult unknown = run_cli("check -m " + m1_path() + " -a nope");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.contains("input error"));
}

TEST_CASE("cli: enumerate") {
  CliResult text = run_cli("enumerate -m " + m1_path());
  CHECK(text.exit_code == 0);
  CHECK(text.contains("allocations: 16"));
  CHECK(text.contains("individually rational: 7"));
  CHECK(text.contains("quasi-stable: 5"));
  CHECK(text.contains("stable: 2"));
  CHECK(text.contains("{a,d}"));
  CHECK(text.contains("{b,c}"));

  CliResult js = run_cli("enumerate -m " + m1_path() + " --json");
  CHECK(js.exit_code == 0);
  json j = json::parse(js.output);
  CHECK(j["counts"]["stable"] == 2);

  CliResult view = run_cli("enumerate -m " + m1_path() + " --firms f1");
  CHECK(view.contains("allocations: 4"));
  CHECK(view.contains("stable: 1"));
}

TEST_CASE("cli: certify") {
  CliResult good = run_cli("certify -m " + m1_path());
  CHECK(good.exit_code == 0);
  CHECK(good.contains("predicate-agreement PASS"));
  CHECK(good.contains("certification PASSED"));

  CliResult bad = run_cli("certify -m " + pair_or_nothing_path());
  CHECK(bad.exit_code == 1);
  CHECK(bad.contains("pairwise-setwise FAIL"));
  CHECK(bad.contains("certification FAILED"));
  CHECK(bad.contains("agents failing substitutability: g"));

  CliResult js = run_cli("certify -m " + m1_path() + " --json");
  CHECK(json::parse(js.output)["passed"] == true);
}

TEST_CASE("cli: lattice operations") {
  CliResult cmp = run_cli("lattice -m " + m1_path() + " --op compare -a a,d -b b,c");
  CHECK(cmp.exit_code == 0);
  CHECK(cmp.contains("{a,d} >=W {b,c}: yes"));
  CHECK(cmp.contains("{b,c} >=W {a,d}: no"));
  CHECK(cmp.contains("{b,c} >=F {a,d}: yes"));

  CliResult join = run_cli("lattice -m " + m1_path() + " --op join -a c -b b");
  CHECK(join.exit_code == 0);
  CHECK(join.contains("join: {b,c}"));

  CliResult meet = run_cli("lattice -m " + m1_path() + " --op meet -a a,d -b b,c");
  CHECK(meet.exit_code == 0);
  CHECK(meet.contains("meet: {b,c}"));

  CliResult badop = run_cli("lattice -m " + m1_path() + " --op cross -a a -b b");
  CHECK(badop.exit_code == 2);

  CliResult notqs = run_cli("lattice -m " + m1_path() + " --op join -a a -b b");
  CHECK(notqs.exit_code == 2);
  CHECK(notqs.contains("not firm-quasi-stable"));
}

TEST_CASE("cli: re-equilibration operator") {
  CliResult one = run_cli("tarski -m " + m1_path() + " -a c");
  CHECK(one.exit_code == 0);
  CHECK(one.contains("{b,c}"));

  CliResult it = run_cli("tarski -m " + m1_path() + " -a \"\" --iterate");
  CHECK(it.exit_code == 0);
  CHECK(it.contains("0: {}"));
  CHECK(it.contains("1: {b,c}"));
  CHECK(it.contains("fixed point: {b,c}"));

  CliResult bad = run_cli("tarski -m " + m1_path() + " -a a");
  CHECK(bad.exit_code == 2);
  CHECK(bad.contains("not firm-quasi-stable"));
}

TEST_CASE("cli: deferred acceptance") {
  CliResult full = run_cli("da -m " + m1_path());
  CHECK(full.exit_code == 0);
  CHECK(full.contains("strategy: full"));
  CHECK(full.contains("t=1 offers={b,c} satisfied={b,c} held={b,c}"));
  CHECK(full.contains("outcome: {b,c}"));
  CHECK(full.contains("trace verified"));

  CliResult lex = run_cli("da -m " + m1_path() + " --strategy single-lex");
  CHECK(lex.contains("t=1 offers={b} satisfied={b} held={b}"));
  CHECK(lex.contains("outcome: {b,c}"));

  CliResult rnd = run_cli("da -m " + m1_path() + " --strategy random --seed 9");
  CHECK(rnd.exit_code == 0);
  CHECK(rnd.contains("strategy: random:9"));
  CHECK(rnd.contains("outcome: {b,c}"));

  CliResult pess = run_cli("da -m " + m1_path() + " --start worker-pessimal");
  CHECK(pess.exit_code == 0);
  CHECK(pess.contains("start: {b,c}"));
  CHECK(pess.contains("outcome: {b,c}"));

  CliResult js = run_cli("da -m " + m1_path() + " --start c --json");
  CHECK(js.exit_code == 0);
  json j = json::parse(js.output);
  CHECK(j["outcome"] == json::array({"b", "c"}));

  CliResult bad = run_cli("da -m " + m1_path() + " --start a");
  CHECK(bad.exit_code == 2);
  CHECK(bad.contains("not firm-quasi-stable"));
}

TEST_CASE("cli: scenario") {
  m1_path();  // ensure the market fixture exists next to the scenario file
  std::string scen = write_fixture("qstab-cli-scen.json", R"({
    "market": "qstab-cli-m1.json",
    "event": {"kind": "add-firms", "firms": ["f2"]},
    "start": ["c"]
  })");
  CliResult r = run_cli("scenario -s " + scen);
  CHECK(r.exit_code == 0);
  CHECK(r.contains("entrant firms: f2"));
  CHECK(r.contains("restart: {c}"));
  CHECK(r.contains("outcome: {b,c}"));
  CHECK(r.contains("surviving workers weakly gain: yes"));
  CHECK(r.contains("incumbent firms weakly lose: yes"));
  CHECK(r.contains("entrant f2: receives {b}, worker-pessimal slice {b}"));

  CliResult mid = run_cli("scenario -s " + scen + " --interrupt-at 1");
  CHECK(mid.exit_code == 0);

  CliResult js = run_cli("scenario -s " + scen + " --json");
  CHECK(js.exit_code == 0);
  json j = json::parse(js.output);
  CHECK(j["outcome"] == json::array({"b", "c"}));
  CHECK(j["entrant_slices"]["f2"]["worker_pessimal"] == json::array({"b"}));

  std::string rem = write_fixture("qstab-cli-scen-rem.json", R"({
    "market": "qstab-cli-m1.json",
    "event": {"kind": "remove-workers", "workers": ["w2"]},
    "start": "worker-pessimal",
    "strategy": "single-lex"
  })");
  CliResult r2 = run_cli("scenario -s " + rem);
  CHECK(r2.exit_code == 0);
  CHECK(r2.contains("leaving workers: w2"));
  CHECK(r2.contains("start: {b,c}"));
  CHECK(r2.contains("restart: {b}"));
  CHECK(r2.contains("outcome: {a}"));
}

TEST_CASE("cli: gen and dual") {
  auto out = temp_path("qstab-cli-gen.json").string();
  CliResult gen = run_cli("gen --workers 3 --firms 2 --seed 4 --quota-max 2 -o " + out);
  CHECK(gen.exit_code == 0);
  CliResult verify = run_cli("verify-prefs -m " + out);
  CHECK(verify.exit_code == 0);

  // byte determinism across runs
  CliResult g1 = run_cli("gen --workers 2 --firms 2 --seed 3");
  CliResult g2 = run_cli("gen --workers 2 --firms 2 --seed 3");
  CHECK(g1.output == g2.output);

  CliResult bad = run_cli("gen --family organic");
  CHECK(bad.exit_code == 2);

  auto dual = temp_path("qstab-cli-dual.json").string();
  CliResult d = run_cli("dual -m " + m1_path() + " -o " + dual);
  CHECK(d.exit_code == 0);
  Market dm = load_market(dual);
  CHECK(dm.workers() == std::vector<AgentId>{"f1", "f2"});
  // the dual swaps the sides, so its worker-side Blair order is the firms'
  CliResult cmp = run_cli("lattice -m " + dual + " --op compare -a b,c -b a,d");
  CHECK(cmp.contains("{b,c} >=W {a,d}: yes"));
}

TEST_CASE("cli: input failures exit with code 2") {
  CliResult missing = run_cli("enumerate -m /nonexistent/market.json");
  CHECK(missing.exit_code == 2);
  CHECK(missing.contains("input error"));
  CHECK(missing.contains("cannot open"));

  CliResult nocmd = run_cli("frobnicate");
  CHECK(nocmd.exit_code == 2);

  CliResult noargs = run_cli("check -m " + m1_path());
  CHECK(noargs.exit_code == 2);  // missing required allocation

  std::string bad = write_fixture("qstab-cli-bad.json", "{broken");
  CliResult parse = run_cli("enumerate -m " + bad);
  CHECK(parse.exit_code == 2);
  CHECK(parse.contains("input error"));
}
