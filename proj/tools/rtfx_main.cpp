#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtfx/corpus.hpp"
#include "rtfx/eval.hpp"
#include "rtfx/parser.hpp"
#include "rtfx/pretty.hpp"
#include "rtfx/soundness.hpp"
#include "rtfx/typecheck.hpp"

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json diagnostic_json(const rtfx::Diagnostic& d) {
  nlohmann::json witness = nlohmann::json::array();
  for (const auto& a : d.witness) witness.push_back(a.to_string());
  return nlohmann::json{{"code", rtfx::code_name(d.code)},
                        {"line", d.span.line},
                        {"col", d.span.col},
                        {"message", d.message},
                        {"witness", witness}};
}

int emit_parse_error(const rtfx::ParseError& e, bool json) {
  if (json) {
    std::cout << nlohmann::json{{"code", "E-PARSE"},
                                {"line", e.line},
                                {"col", e.col},
                                {"message", e.message},
                                {"witness", nlohmann::json::array()}}
              << "\n";
  } else {
    std::cout << "PARSE " << e.line << ":" << e.col << " " << e.message
              << "\n";
  }
  return kExitUsage;
}

int cmd_check(const std::string& path, bool json) {
  rtfx::TermPtr term;
  try {
    term = rtfx::parse(read_file(path), path).term;
  } catch (const rtfx::ParseError& e) {
    return emit_parse_error(e, json);
  }
  rtfx::Verdict v = rtfx::check_program(term);
  if (v.ok()) {
    if (json) {
      const auto& r = v.result();
      std::cout << nlohmann::json{
                       {"ok", true},
                       {"type", rtfx::print_type(r.type.type)},
                       {"qual", rtfx::print_qualifier(r.type.qual)},
                       {"use", rtfx::print_atom_set(r.effect.use)},
                       {"kill", rtfx::print_atom_set(r.effect.kill)}}
                << "\n";
    } else {
      std::cout << rtfx::render_accept(v.result()) << "\n";
    }
    return kExitAccept;
  }
  if (json)
    std::cout << diagnostic_json(v.diagnostic()) << "\n";
  else
    std::cout << v.diagnostic().render() << "\n";
  return kExitReject;
}

int cmd_run(const std::string& path, long fuel, bool with_trace) {
  rtfx::TermPtr term;
  try {
    term = rtfx::parse(read_file(path), path).term;
  } catch (const rtfx::ParseError& e) {
    return emit_parse_error(e, false);
  }
  rtfx::Store store;
  rtfx::RunOutcome out = rtfx::run(store, term, fuel);
  if (with_trace)
    for (const auto& e : out.trace) std::cout << rtfx::trace_line(e) << "\n";
  switch (out.kind) {
    case rtfx::RunOutcome::Kind::Done:
      std::cout << rtfx::print_value(out.value) << "\n";
      return kExitAccept;
    case rtfx::RunOutcome::Kind::Stuck:
      std::cout << "STUCK " << rtfx::stuck_reason_name(out.reason) << "\n";
      return kExitReject;
    case rtfx::RunOutcome::Kind::OutOfFuel:
      std::cout << "OUT-OF-FUEL after " << out.steps << " steps\n";
      return kExitReject;
  }
  return kExitUsage;
}

int cmd_soundness(int seeds, int budget, long fuel, bool stepcheck) {
  int accepted = 0;
  int done = 0;
  int out_of_fuel = 0;
  int stuck = 0;
  int monotonicity_violations = 0;
  int tombstone_violations = 0;
  int stepcheck_failures = 0;
  rtfx::NodeCounts coverage;

  for (int seed = 0; seed < seeds; ++seed) {
    rtfx::TermPtr t = rtfx::generate_well_typed(seed, budget);
    rtfx::Verdict v = rtfx::check_program(t);
    if (!v.ok()) {
      std::cerr << "seed " << seed
                << ": generated program rejected: " << v.diagnostic().render()
                << "\n";
      continue;
    }
    ++accepted;
    coverage += rtfx::count_nodes(t);

    rtfx::Store store;
    rtfx::TermPtr cur = t;
    std::uint32_t prev_dom = 0;
    rtfx::AtomSet prev_tombs;
    bool finished = false;
    for (long i = 0; i < fuel && !finished; ++i) {
      rtfx::StepResult r = rtfx::step(store, cur);
      if (std::holds_alternative<rtfx::StepDone>(r)) {
        finished = true;
        ++done;
        break;
      }
      if (const auto* s = std::get_if<rtfx::StepStuck>(&r)) {
        ++stuck;
        std::cerr << "seed " << seed << ": stuck "
                  << rtfx::stuck_reason_name(s->reason) << "\n";
        finished = true;
        break;
      }
      const auto& ok = std::get<rtfx::StepOk>(r);
      if (store.size() < prev_dom) ++monotonicity_violations;
      rtfx::AtomSet tombs = store.tombstones();
      if (!prev_tombs.subset_of(tombs)) ++tombstone_violations;
      prev_dom = store.size();
      prev_tombs = tombs;
      cur = ok.term;
    }
    if (!finished) ++out_of_fuel;

    if (stepcheck) {
      rtfx::StepCheckResult sc = rtfx::run_with_stepcheck(t, fuel);
      if (!sc.ok()) {
        ++stepcheck_failures;
        for (const auto& viol : sc.violations)
          std::cerr << "seed " << seed << ": " << viol << "\n";
      }
    }
  }

  std::cout << "seeds:                 " << seeds << "\n";
  std::cout << "generated-accepted:    " << accepted << "\n";
  std::cout << "runs-done:             " << done << "\n";
  std::cout << "runs-out-of-fuel:      " << out_of_fuel << "\n";
  std::cout << "stuck:                 " << stuck << "\n";
  std::cout << "monotonic-violations:  " << monotonicity_violations << "\n";
  std::cout << "tombstone-violations:  " << tombstone_violations << "\n";
  if (stepcheck)
    std::cout << "stepcheck-failures:    " << stepcheck_failures << "\n";
  std::cout << "node-coverage:         beta=" << coverage.apps
            << " ref=" << coverage.refs << " deref=" << coverage.derefs
            << " assign=" << coverage.assigns << " free=" << coverage.frees
            << " move=" << coverage.moves << "\n";

  bool ok = accepted == seeds && stuck == 0 && monotonicity_violations == 0 &&
            tombstone_violations == 0 && stepcheck_failures == 0;
  return ok ? kExitAccept : kExitReject;
}

int cmd_corpus(const std::string& dir) {
  auto outcomes = rtfx::run_corpus_dir(dir);
  int passed = 0;
  for (const auto& o : outcomes) {
    if (o.passed) {
      ++passed;
      std::cout << "PASS " << o.file << "\n";
    } else {
      std::cout << "FAIL " << o.file << ": " << o.detail << "\n";
    }
  }
  std::cout << "passed " << passed << "/" << outcomes.size() << "\n";
  return passed == static_cast<int>(outcomes.size()) && !outcomes.empty()
             ? kExitAccept
             : kExitReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reachability-typed effects: checker and interpreter"};
  app.require_subcommand(1);

  std::string file;
  bool json = false;
  long fuel = 10000;
  int seeds = 100;
  int budget = 20;
  bool stepcheck = false;
  std::string dir;

  auto* check = app.add_subcommand("check", "typecheck a program");
  check->add_option("file", file)->required();
  check->add_flag("--json", json, "emit diagnostics as JSON");

  auto* runcmd = app.add_subcommand("run", "evaluate a program");
  runcmd->add_option("file", file)->required();
  runcmd->add_option("--fuel", fuel, "step budget");

  auto* trace = app.add_subcommand("trace", "evaluate and print the event log");
  trace->add_option("file", file)->required();
  trace->add_option("--fuel", fuel, "step budget");

  auto* soundness =
      app.add_subcommand("soundness", "generator-driven safety properties");
  soundness->add_option("--seeds", seeds, "number of generator seeds");
  soundness->add_option("--budget", budget, "generator size budget");
  soundness->add_option("--fuel", fuel, "step budget per run");
  soundness->add_flag("--stepcheck", stepcheck,
                      "re-check the configuration after every step");

  auto* corpus = app.add_subcommand("corpus", "run a directory of .rt files "
                                              "against their EXPECT headers");
  corpus->add_option("dir", dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(file, json);
    if (runcmd->parsed()) return cmd_run(file, fuel, false);
    if (trace->parsed()) return cmd_run(file, fuel, true);
    if (soundness->parsed())
      return cmd_soundness(seeds, budget, fuel, stepcheck);
    if (corpus->parsed()) return cmd_corpus(dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
