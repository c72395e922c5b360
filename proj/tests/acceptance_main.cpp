// Acceptance suite: runs every top-level requirement and prints one
// pass/fail line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <random>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rtfx/corpus.hpp"
#include "rtfx/eval.hpp"
#include "rtfx/parser.hpp"
#include "rtfx/pretty.hpp"
#include "rtfx/soundness.hpp"
#include "rtfx/typecheck.hpp"
#include "test_helpers.hpp"

#ifndef RTFX_CORPUS_DIR
#define RTFX_CORPUS_DIR "corpus"
#endif

using namespace rtfx;
using namespace rtfx::testing;

namespace {

struct Criterion {
  bool passed;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

long ms_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --------------------------------------------------------------------------
// corpus fidelity: every file produces exactly its expected verdict, error
// code, and line; the whole corpus runs in under a second
// --------------------------------------------------------------------------
Criterion corpus_fidelity() {
  auto start = Clock::now();
  auto outcomes = run_corpus_dir(RTFX_CORPUS_DIR);
  long elapsed = ms_since(start);
  if (outcomes.size() < 14)
    return {false, "only " + std::to_string(outcomes.size()) + " files"};
  for (const auto& o : outcomes)
    if (!o.passed) return {false, o.file + ": " + o.detail};
  if (elapsed >= 1000)
    return {false, "took " + std::to_string(elapsed) + " ms"};
  return {true, std::to_string(outcomes.size()) + " files, " +
                    std::to_string(elapsed) + " ms"};
}

// --------------------------------------------------------------------------
// no-use-after-kill statics: exact verdicts, zero tolerance
// --------------------------------------------------------------------------
Criterion use_after_kill_statics() {
  struct Case {
    const char* src;
    bool accept;
  };
  const std::vector<Case> cases = {
      {"val c = ref 0; free c; !c", false},
      {"val c = ref 0; free c; c := 1", false},
      {"val r = ref 0; val s = move r; r := 1", false},
      {"val r = ref 0; val s = move r; move r", false},
      {"val c = ref 0; free c; free c", true},
  };
  for (const auto& c : cases) {
    Verdict v = check_program(parse(c.src).term);
    if (c.accept != v.ok())
      return {false, std::string("wrong verdict for: ") + c.src};
    if (!c.accept && v.diagnostic().code != Code::UseAfterKill)
      return {false, std::string("wrong code for: ") + c.src + " (" +
                         code_name(v.diagnostic().code) + ")"};
  }
  return {true, "5 programs, exact verdicts"};
}

// --------------------------------------------------------------------------
// alias-sensitive kill: the kill of c reaches uses of its alias c2
// --------------------------------------------------------------------------
Criterion alias_sensitive_kill() {
  Verdict v =
      check_program(parse("val c = ref 0; val c2 = c; free c; !c2").term);
  if (v.ok()) return {false, "alias use after kill was accepted"};
  if (v.diagnostic().code != Code::UseAfterKill)
    return {false, "wrong code: " + code_name(v.diagnostic().code)};
  return {true, v.diagnostic().render()};
}

// --------------------------------------------------------------------------
// dynamic safety: 500 seeds, budget 20, fuel 10^4; no stuck states, store
// domains monotone, tombstones permanent
// --------------------------------------------------------------------------
Criterion dynamic_safety() {
  auto start = Clock::now();
  const int seeds = 500;
  const int budget = 20;
  const long fuel = 10000;
  NodeCounts coverage;
  for (int seed = 0; seed < seeds; ++seed) {
    TermPtr t = generate_well_typed(seed, budget);
    Verdict v = check_program(t);
    if (!v.ok())
      return {false, "seed " + std::to_string(seed) + " rejected: " +
                         v.diagnostic().render()};
    coverage += count_nodes(t);
    Store store;
    TermPtr cur = t;
    std::uint32_t prev_size = 0;
    AtomSet prev_tombs;
    bool done = false;
    for (long i = 0; i < fuel && !done; ++i) {
      StepResult r = step(store, cur);
      if (std::holds_alternative<StepDone>(r)) {
        done = true;
        break;
      }
      if (const auto* s = std::get_if<StepStuck>(&r))
        return {false, "seed " + std::to_string(seed) + " stuck: " +
                           stuck_reason_name(s->reason)};
      if (store.size() < prev_size)
        return {false, "store domain shrank at seed " + std::to_string(seed)};
      AtomSet tombs = store.tombstones();
      if (!prev_tombs.subset_of(tombs))
        return {false, "tombstone resurrected at seed " + std::to_string(seed)};
      prev_size = store.size();
      prev_tombs = tombs;
      cur = std::get<StepOk>(r).term;
    }
    if (!done)
      return {false, "seed " + std::to_string(seed) + " ran out of fuel"};
  }
  long elapsed = ms_since(start);
  if (elapsed >= 30000)
    return {false, "took " + std::to_string(elapsed) + " ms"};
  if (!coverage.covers_all()) return {false, "reduction rules not covered"};
  return {true, std::to_string(seeds) + " seeds, 0 stuck, " +
                    std::to_string(elapsed) + " ms"};
}

// --------------------------------------------------------------------------
// desk-scale preservation: per-step configuration re-checking on every
// accepted corpus program, including the kill-extension bound and the
// fresh-return discipline
// --------------------------------------------------------------------------
Criterion desk_scale_preservation() {
  auto start = Clock::now();
  std::size_t steps = 0;
  int programs = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(RTFX_CORPUS_DIR)) {
    if (entry.path().extension() != ".rt") continue;
    TermPtr t = parse(read_file(entry.path())).term;
    if (!check_program(t).ok()) continue;
    ++programs;
    StepCheckResult r = run_with_stepcheck(t, 10000);
    if (!r.ok()) {
      std::string detail = entry.path().filename().string();
      for (const auto& viol : r.violations) detail += "; " + viol;
      return {false, detail};
    }
    if (!r.completed)
      return {false, entry.path().filename().string() + " did not finish"};
    steps += r.steps_checked;
  }
  long elapsed = ms_since(start);
  if (elapsed >= 5000)
    return {false, "took " + std::to_string(elapsed) + " ms"};
  if (programs < 7) return {false, "too few accepted programs"};
  return {true, std::to_string(programs) + " programs, " +
                    std::to_string(steps) + " steps, " +
                    std::to_string(elapsed) + " ms"};
}

// --------------------------------------------------------------------------
// algebra oracles: exhaustive composition agreement on small universes,
// saturation fixpoint within env-size rounds on random environments
// --------------------------------------------------------------------------
Criterion algebra_oracles() {
  std::vector<std::string> names = {"a", "b", "c"};
  std::vector<std::pair<int, int>> all_edges;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (x != y) all_edges.emplace_back(x, y);
  std::vector<std::vector<std::pair<int, int>>> graphs;
  graphs.push_back({});
  for (std::size_t i = 0; i < all_edges.size(); ++i) {
    graphs.push_back({all_edges[i]});
    for (std::size_t j = i + 1; j < all_edges.size(); ++j)
      graphs.push_back({all_edges[i], all_edges[j]});
  }

  std::size_t compared = 0;
  for (const auto& edges : graphs) {
    MaskEnv menv;
    menv.atom_count = 3;
    for (int a = 0; a < 3; ++a) {
      unsigned q = 0;
      for (const auto& [x, y] : edges)
        if (x == a) q |= 1u << y;
      menv.entries.push_back({a, q});
    }
    TypeEnv env = to_type_env(menv, names);
    ReachGraph g(&env);
    for (unsigned u1 = 0; u1 < 8; ++u1)
      for (unsigned k1 = 0; k1 < 8; ++k1)
        for (unsigned u2 = 0; u2 < 8; ++u2)
          for (unsigned k2 = 0; k2 < 8; ++k2) {
            Effect e1{from_mask(menv, u1, names).atoms,
                      from_mask(menv, k1, names).atoms};
            Effect e2{from_mask(menv, u2, names).atoms,
                      from_mask(menv, k2, names).atoms};
            bool oracle =
                (naive_saturate(menv, k1) & naive_saturate(menv, u2)) == 0;
            ComposeResult r = seq_compose(g, e1, e2);
            if (compose_ok(r) != oracle)
              return {false, "composition definedness disagrees"};
            if (oracle) {
              Effect expect{from_mask(menv, u1 | u2, names).atoms,
                            from_mask(menv, k1 | k2, names).atoms};
              if (!(std::get<Effect>(r) == expect))
                return {false, "composition result disagrees"};
            }
            ++compared;
          }
  }

  // saturation: idempotent, fixpoint within |env| rounds
  std::mt19937_64 rng(99);
  std::vector<std::string> wide = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng() % 6);
    MaskEnv menv;
    menv.atom_count = n;
    for (int a = 0; a < n; ++a) {
      unsigned q = static_cast<unsigned>(rng()) & ((1u << n) - 1);
      q &= ~(1u << a);
      menv.entries.push_back({a, q});
    }
    unsigned start = static_cast<unsigned>(rng()) & ((1u << n) - 1);
    unsigned bounded = start;
    for (int round = 0; round < n; ++round)
      bounded = one_step_round(menv, bounded);
    if (bounded != naive_saturate(menv, start))
      return {false, "fixpoint not reached within env-size rounds"};
    TypeEnv env = to_type_env(menv, wide);
    ReachGraph g(&env);
    Qualifier sat = saturate(g, from_mask(menv, start, wide));
    if (!(sat == from_mask(menv, naive_saturate(menv, start), wide)))
      return {false, "saturation disagrees with the oracle"};
    if (!(saturate(g, sat) == sat)) return {false, "saturation not idempotent"};
  }
  return {true, std::to_string(compared) + " compositions, 1000 environments"};
}

// --------------------------------------------------------------------------
// evaluator semantics: golden traces, idempotent free, move-of-dead stuck
// --------------------------------------------------------------------------
Criterion evaluator_semantics() {
  auto trace_of = [](const std::string& file, RunOutcome& out) {
    Store store;
    TermPtr t = parse(read_file(std::filesystem::path(RTFX_CORPUS_DIR) / file))
                    .term;
    out = run(store, t, 10000);
    std::string s;
    for (const auto& e : out.trace) s += trace_line(e) + "\n";
    return s;
  };

  RunOutcome out;
  std::string t1 = trace_of("move_then_use_dest.rt", out);
  if (out.kind != RunOutcome::Kind::Done || print_value(out.value) != "unit")
    return {false, "ownership transfer did not finish"};
  if (t1 !=
      "ALLOC ℓ0\nMOVE ℓ0 -> ℓ1\nUSE ℓ1\nKILL ℓ1\n")
    return {false, "unexpected move trace:\n" + t1};

  std::string t2 = trace_of("double_free.rt", out);
  if (out.kind != RunOutcome::Kind::Done)
    return {false, "double free did not finish"};
  if (t2 != "ALLOC ℓ0\nKILL ℓ0\nKILL ℓ0\n")
    return {false, "unexpected double-free trace:\n" + t2};

  std::string t3 = trace_of("move_of_dead.rt", out);
  if (out.kind != RunOutcome::Kind::Stuck ||
      out.reason != StuckReason::MoveOfDead)
    return {false, "move of a dead cell was not stuck"};
  if (t3 != "ALLOC ℓ0\nKILL ℓ0\n")
    return {false, "unexpected move-of-dead trace:\n" + t3};

  std::string t4 = trace_of("precise_tracking.rt", out);
  if (out.kind != RunOutcome::Kind::Done)
    return {false, "precise tracking did not finish"};
  if (t4 != "ALLOC ℓ0\nALLOC ℓ1\nKILL ℓ1\nUSE ℓ0\n")
    return {false, "unexpected precise-tracking trace:\n" + t4};

  // free on a tombstone succeeds and leaves the store unchanged
  Store store;
  store.allocate(make_int(1));
  store.kill(0);
  StepResult r = step(store, make_free(make_loc(0)));
  if (!std::holds_alternative<StepOk>(r))
    return {false, "free of a tombstone did not step"};
  if (store.size() != 1 || store.live(0))
    return {false, "free of a tombstone changed the store"};

  // move on a tombstone is stuck with the dedicated reason
  StepResult m = step(store, make_move(make_loc(0)));
  const auto* stuck = std::get_if<StepStuck>(&m);
  if (!stuck || stuck->reason != StuckReason::MoveOfDead)
    return {false, "move of a tombstone was not MoveOfDead"};

  return {true, "golden traces match"};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*run)();
  };
  const std::vector<Entry> criteria = {
      {"corpus-fidelity", corpus_fidelity},
      {"no-use-after-kill-statics", use_after_kill_statics},
      {"alias-sensitive-kill", alias_sensitive_kill},
      {"dynamic-safety", dynamic_safety},
      {"desk-scale-preservation", desk_scale_preservation},
      {"algebra-oracles", algebra_oracles},
      {"evaluator-semantics", evaluator_semantics},
  };

  bool all_passed = true;
  for (const auto& entry : criteria) {
    Criterion c;
    try {
      c = entry.run();
    } catch (const std::exception& e) {
      c = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << entry.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    all_passed = all_passed && c.passed;
  }
  return all_passed ? 0 : 1;
}
