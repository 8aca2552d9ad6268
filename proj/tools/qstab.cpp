// Command-line front end: classify allocations, enumerate and certify small
// markets, run lattice ops, the re-equilibration operator, deferred
// acceptance, disruption scenarios, and the seeded generator.
//
// Exit codes: 0 success/pass, 1 property violation or failed check (witness
// on stderr or in the report), 2 malformed input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qstab/qstab.hpp"

namespace {

using namespace qstab;

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct ViewFlags {
  std::string workers, firms;

  SubmarketView make(const Market& m) const {
    return SubmarketView(m, workers.empty() ? m.workers() : split_ids(workers),
                         firms.empty() ? m.firms() : split_ids(firms));
  }
};

void add_view_flags(CLI::App* cmd, ViewFlags& v) {
  cmd->add_option("--workers", v.workers, "restrict the view to these workers (comma list)");
  cmd->add_option("--firms", v.firms, "restrict the view to these firms (comma list)");
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot write");
  out << content;
}

ProposalStrategy make_strategy(const std::string& name, std::uint64_t seed) {
  if (name == "full") return FullProposal{};
  if (name == "single-lex") return SingleLexProposal{};
  if (name == "random") return RandomSubsetProposal{seed};
  throw InputError("strategy: expected \"full\", \"single-lex\" or \"random\", got \"" +
                   name + "\"");
}

void print_trace(const DATrace& t) {
  std::cout << "strategy: " << t.strategy << "\n";
  std::cout << "start: " << to_string(t.start) << "\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i)
    std::cout << "t=" << i + 1 << " offers=" << to_string(t.steps[i].offers)
              << " satisfied=" << to_string(t.steps[i].satisfied)
              << " held=" << to_string(t.steps[i].held) << "\n";
  std::cout << "outcome: " << to_string(t.outcome) << "\n";
}

void print_scenario_report(const DisruptionEvent& e, const ScenarioReport& r) {
  std::cout << "entrant firms: "
            << (e.added_firms.empty() ? "(none)" : join_ids(e.added_firms)) << "\n";
  std::cout << "leaving workers: "
            << (e.removed_workers.empty() ? "(none)" : join_ids(e.removed_workers)) << "\n";
  std::cout << "start: " << to_string(r.start) << "\n";
  std::cout << "restart: " << to_string(r.restart) << "\n";
  print_trace(r.trace);
  std::cout << "surviving workers weakly gain: " << (r.workers_weakly_gain ? "yes" : "no")
            << "\n";
  std::cout << "incumbent firms weakly lose: " << (r.firms_weakly_lose ? "yes" : "no") << "\n";
  for (const auto& [firm, slices] : r.entrant_slices)
    std::cout << "entrant " << firm << ": receives " << to_string(slices.first)
              << ", worker-pessimal slice " << to_string(slices.second) << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"many-to-many matching with contracts under substitutable preferences"};
  app.require_subcommand(1);

  std::string market_path, out_path, scenario_path;
  std::string alloc_a, alloc_b, start = "", op, strategy = "full", agent;
  ViewFlags view;
  bool want_json = false, iterate = false;
  std::uint64_t seed = 0;
  std::size_t interrupt_at = 0;
  GenParams gp;
  std::string family = "greedy";

  auto* verify_cmd = app.add_subcommand("verify-prefs", "check the four choice-function "
                                                        "properties for every agent");
  verify_cmd->add_option("-m,--market", market_path, "market file")->required();
  verify_cmd->add_option("--agent", agent, "only this agent");
  verify_cmd->add_flag("--json", want_json, "machine-readable output");

  auto* check_cmd = app.add_subcommand("check", "classify an allocation");
  check_cmd->add_option("-m,--market", market_path, "market file")->required();
  check_cmd->add_option("-a,--allocation", alloc_a, "contract ids, comma list")->required();
  add_view_flags(check_cmd, view);

  auto* enum_cmd = app.add_subcommand("enumerate", "classify every allocation of the view "
                                                   "by direct definition");
  enum_cmd->add_option("-m,--market", market_path, "market file")->required();
  add_view_flags(enum_cmd, view);
  enum_cmd->add_flag("--json", want_json, "machine-readable output");

  auto* certify_cmd = app.add_subcommand("certify", "cross-check the fast predicates and "
                                                    "lattice laws against enumeration");
  certify_cmd->add_option("-m,--market", market_path, "market file")->required();
  add_view_flags(certify_cmd, view);
  certify_cmd->add_flag("--json", want_json, "machine-readable output");

  auto* lattice_cmd = app.add_subcommand("lattice", "Blair comparisons, join and meet");
  lattice_cmd->add_option("-m,--market", market_path, "market file")->required();
  lattice_cmd->add_option("--op", op, "compare | join | meet")->required();
  lattice_cmd->add_option("-a,--first", alloc_a, "first allocation")->required();
  lattice_cmd->add_option("-b,--second", alloc_b, "second allocation")->required();
  add_view_flags(lattice_cmd, view);

  auto* tarski_cmd = app.add_subcommand("tarski", "apply the re-equilibration operator");
  tarski_cmd->add_option("-m,--market", market_path, "market file")->required();
  tarski_cmd->add_option("-a,--allocation", alloc_a, "firm-quasi-stable allocation")
      ->required();
  tarski_cmd->add_flag("--iterate", iterate, "iterate to the fixed point");
  add_view_flags(tarski_cmd, view);

  auto* da_cmd = app.add_subcommand("da", "firm-proposing deferred acceptance from a "
                                          "firm-quasi-stable start");
  da_cmd->add_option("-m,--market", market_path, "market file")->required();
  da_cmd->add_option("--start", start,
                     "start allocation (comma list, \"worker-pessimal\", default empty)");
  da_cmd->add_option("--strategy", strategy, "full | single-lex | random");
  da_cmd->add_option("--seed", seed, "seed for the random strategy");
  da_cmd->add_flag("--json", want_json, "machine-readable output");
  add_view_flags(da_cmd, view);

  auto* scenario_cmd = app.add_subcommand("scenario", "disrupt a stable allocation and "
                                                      "re-equilibrate");
  scenario_cmd->add_option("-s,--scenario", scenario_path, "scenario file")->required();
  scenario_cmd->add_option("--interrupt-at", interrupt_at,
                           "also check mid-run disruption after this many rounds");
  scenario_cmd->add_flag("--json", want_json, "machine-readable output");

  auto* gen_cmd = app.add_subcommand("gen", "generate a seeded market");
  gen_cmd->add_option("--workers", gp.n_workers, "worker count");
  gen_cmd->add_option("--firms", gp.n_firms, "firm count");
  gen_cmd->add_option("--max-per-pair", gp.max_contracts_per_pair,
                      "max contracts per worker-firm pair");
  gen_cmd->add_option("--density", gp.density, "chance each potential contract exists");
  gen_cmd->add_option("--quota-min", gp.quota_min, "least quota");
  gen_cmd->add_option("--quota-max", gp.quota_max, "greatest quota");
  gen_cmd->add_option("--acceptability", gp.acceptability_rate,
                      "chance a contract is acceptable");
  gen_cmd->add_option("--family", family, "greedy | mixed");
  gen_cmd->add_option("--seed", gp.seed, "seed");
  gen_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

  auto* dual_cmd = app.add_subcommand("dual", "swap the two sides of a market");
  dual_cmd->add_option("-m,--market", market_path, "market file")->required();
  dual_cmd->add_option("-o,--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (verify_cmd->parsed()) {
    Market m = load_market(market_path);
    std::vector<VerificationReport> reports =
        agent.empty() ? verify_market(m) : verify_agent(m, agent);
    if (want_json) {
      std::cout << verification_to_json(reports).dump(2) << "\n";
    } else {
      for (const auto& r : reports) {
        std::cout << r.agent << " " << r.property << (r.passed ? " PASS" : " FAIL");
        if (!r.passed)
          std::cout << " Y=" << to_string(Allocation(r.witness_y))
                    << " Z=" << to_string(Allocation(r.witness_z));
        std::cout << "\n";
      }
    }
    for (const auto& r : reports)
      if (!r.passed) return 1;
    return 0;
  }

  if (check_cmd->parsed()) {
    Market m = load_market(market_path);
    SubmarketView v = view.make(m);
    BlockReport r = check_allocation(v, Allocation(split_ids(alloc_a)));
    std::cout << "allocation: " << to_string(r.allocation) << "\n";
    std::cout << "individually rational: " << (r.individually_rational ? "yes" : "no") << "\n";
    std::cout << "blocking contracts: "
              << (r.blocking.empty() ? "(none)" : join_ids(r.blocking)) << "\n";
    std::cout << "quasi-stable: " << (r.quasi_stable ? "yes" : "no") << "\n";
    std::cout << "stable: " << (r.stable ? "yes" : "no") << "\n";
    return 0;
  }

  if (enum_cmd->parsed()) {
    Market m = load_market(market_path);
    EnumerationResult r = enumerate_allocations(view.make(m));
    if (want_json) {
      std::cout << enumeration_to_json(r).dump(2) << "\n";
      return 0;
    }
    std::cout << "allocations: " << r.allocations.size() << "\n";
    std::cout << "individually rational: " << r.individually_rational.size() << "\n";
    std::cout << "quasi-stable: " << r.quasi_stable.size() << "\n";
    for (const auto& a : r.quasi_stable) std::cout << "  " << to_string(a) << "\n";
    std::cout << "stable: " << r.stable.size() << "\n";
    for (const auto& a : r.stable) std::cout << "  " << to_string(a) << "\n";
    return 0;
  }

  if (certify_cmd->parsed()) {
    Market m = load_market(market_path);
    CertificationReport r = certify(view.make(m));
    if (want_json) {
      std::cout << certification_to_json(r).dump(2) << "\n";
    } else {
      for (const auto& c : r.checks) {
        std::cout << c.name << (c.passed ? " PASS" : " FAIL");
        if (!c.passed) std::cout << " " << c.witness;
        std::cout << "\n";
      }
      std::cout << (r.passed ? "certification PASSED" : "certification FAILED") << "\n";
      if (!r.suspect_agents.empty())
        std::cout << "agents failing substitutability: " << join_ids(r.suspect_agents)
                  << "\n";
    }
    return r.passed ? 0 : 1;
  }

  if (lattice_cmd->parsed()) {
    Market m = load_market(market_path);
    SubmarketView v = view.make(m);
    Allocation a(split_ids(alloc_a)), b(split_ids(alloc_b));
    if (op == "compare") {
      std::cout << to_string(a) << " >=W " << to_string(b) << ": "
                << (blair_dominates(v, a, b, Side::workers) ? "yes" : "no") << "\n";
      std::cout << to_string(b) << " >=W " << to_string(a) << ": "
                << (blair_dominates(v, b, a, Side::workers) ? "yes" : "no") << "\n";
      std::cout << to_string(a) << " >=F " << to_string(b) << ": "
                << (blair_dominates(v, a, b, Side::firms) ? "yes" : "no") << "\n";
      std::cout << to_string(b) << " >=F " << to_string(a) << ": "
                << (blair_dominates(v, b, a, Side::firms) ? "yes" : "no") << "\n";
    } else if (op == "join") {
      std::cout << "join: " << to_string(join_w(v, a, b)) << "\n";
    } else if (op == "meet") {
      EnumerationResult r = enumerate_allocations(v);
      std::cout << "meet: " << to_string(meet_w(v, a, b, r.quasi_stable)) << "\n";
    } else {
      throw InputError("lattice: unknown op \"" + op + "\"");
    }
    return 0;
  }

  if (tarski_cmd->parsed()) {
    Market m = load_market(market_path);
    SubmarketView v = view.make(m);
    Allocation a(split_ids(alloc_a));
    if (iterate) {
      TarskiTrace t = tarski_iterate(v, a);
      for (std::size_t i = 0; i < t.iterates.size(); ++i)
        std::cout << i << ": " << to_string(t.iterates[i]) << "\n";
      std::cout << "fixed point: " << to_string(t.fixed_point) << "\n";
    } else {
      std::cout << to_string(tarski(v, a)) << "\n";
    }
    return 0;
  }

  if (da_cmd->parsed()) {
    Market m = load_market(market_path);
    SubmarketView v = view.make(m);
    Allocation y0 =
        start == "worker-pessimal" ? worker_pessimal(v) : Allocation(split_ids(start));
    DATrace t = da_run(v, y0, make_strategy(strategy, seed));
    TraceCheck c = verify_trace(v, t);
    if (!c.passed) throw PropertyViolation("da: trace verification failed: " + c.diagnostic);
    if (want_json) {
      std::cout << trace_to_json(t).dump(2) << "\n";
    } else {
      print_trace(t);
      std::cout << "trace verified\n";
    }
    return 0;
  }

  if (scenario_cmd->parsed()) {
    ScenarioSpec spec = load_scenario(scenario_path);
    std::filesystem::path mp(spec.market_path);
    if (mp.is_relative())
      mp = std::filesystem::path(scenario_path).parent_path() / mp;
    Market m = load_market(mp.string());
    DisruptionEvent e = make_disruption(m, spec.added_firms, spec.removed_workers);
    Allocation y0 = spec.start_worker_pessimal ? worker_pessimal(e.before) : spec.start;
    bool lad = spec.kind == DisruptionKind::add_firms;
    for (std::uint32_t a = 0; lad && a < m.agent_count(); ++a) {
      try {
        lad = verify_lad(m, m.agent_id(a)).passed;
      } catch (const InputError&) {
        lad = false;  // agent too large to verify; take the general path
      }
    }
    ScenarioReport r = lad ? new_entrant_report(e, y0, spec.strategy)
                           : reequilibrate(e, y0, spec.strategy);
    if (scenario_cmd->count("--interrupt-at")) mid_run_disruption(e, y0, interrupt_at);
    if (want_json) {
      std::cout << scenario_report_to_json(r).dump(2) << "\n";
    } else {
      print_scenario_report(e, r);
    }
    return 0;
  }

  if (gen_cmd->parsed()) {
    if (family == "greedy")
      gp.family = GenFamily::greedy_only;
    else if (family == "mixed")
      gp.family = GenFamily::mixed;
    else
      throw InputError("gen: unknown family \"" + family + "\"");
    write_output(out_path, save_market(gen_market(gp).market));
    return 0;
  }

  if (dual_cmd->parsed()) {
    write_output(out_path, save_market(dualize(load_market(market_path))));
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qstab::PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return 1;
  } catch (const qstab::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
