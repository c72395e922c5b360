#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtfx/corpus.hpp"
#include "rtfx/parser.hpp"
#include "rtfx/soundness.hpp"
#include "test_helpers.hpp"

using namespace rtfx;
using namespace rtfx::testing;

#ifndef RTFX_CORPUS_DIR
#define RTFX_CORPUS_DIR "corpus"
#endif

TEST_CASE("a live store agrees with its typing") {
  StoreTyping sigma;
  sigma.extend(0, make_int_type(), Qualifier{});
  Store store;
  store.allocate(make_int(3));
  CHECK(check_store(sigma, store, {}));
}

TEST_CASE("killed cells are exempt from value typing") {
  StoreTyping sigma;
  sigma.extend(0, make_int_type(), Qualifier{});
  Store store;
  store.allocate(make_int(3));
  store.kill(0);
  CHECK(check_store(sigma, store, AtomSet{l(0)}));
}

TEST_CASE("an unexempted tombstone fails the store check") {
  StoreTyping sigma;
  sigma.extend(0, make_int_type(), Qualifier{});
  Store store;
  store.allocate(make_int(3));
  store.kill(0);
  CHECK(!check_store(sigma, store, {}));
}

TEST_CASE("store typing well-formedness is telescoped") {
  StoreTyping good;
  good.extend(0, make_int_type(), Qualifier{});
  good.extend(1, make_ref_type(QualifiedType{make_int_type(), Qualifier{}}),
              qual({l(0)}));
  CHECK(store_typing_well_formed(good));

  StoreTyping forward;
  forward.extend(0, make_int_type(), qual({l(1)}));
  CHECK(!store_typing_well_formed(forward));

  StoreTyping open_type;
  open_type.extend(0, make_type_var("X"), Qualifier{});
  CHECK(!store_typing_well_formed(open_type));
}

TEST_CASE("an empty configuration with a value is trivially fine") {
  StoreTyping sigma;
  Store store;
  ConfigReport r = check_config(sigma, {}, store, make_unit());
  CHECK(r.ok());
  CHECK(r.residual_effect.is_pure());
}

TEST_CASE("a residual use of a killed location fails the composition") {
  StoreTyping sigma;
  sigma.extend(0, make_int_type(), Qualifier{});
  Store store;
  store.allocate(make_int(3));
  store.kill(0);
  ConfigReport r =
      check_config(sigma, AtomSet{l(0)}, store, make_deref(make_loc(0)));
  CHECK(!r.ok());
  CHECK(r.store_well_typed);
  CHECK(r.term_well_typed);
  CHECK(!r.kill_composition_defined);
}

TEST_CASE("mentioning a killed location stays observable and composable") {
  StoreTyping sigma;
  sigma.extend(0, make_int_type(), Qualifier{});
  Store store;
  store.allocate(make_int(3));
  store.kill(0);
  // a pure value mentioning nothing; the kill set alone must not break it
  ConfigReport r = check_config(sigma, AtomSet{l(0)}, store, make_int(5));
  CHECK(r.ok());
}

TEST_CASE("every accepted corpus program passes per-step re-checking") {
  int accepted = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(RTFX_CORPUS_DIR)) {
    if (entry.path().extension() != ".rt") continue;
    std::ifstream in(entry.path());
    std::stringstream buf;
    buf << in.rdbuf();
    TermPtr t = parse(buf.str()).term;
    if (!check_program(t).ok()) continue;
    ++accepted;
    StepCheckResult r = run_with_stepcheck(t, 10000);
    CAPTURE(entry.path().string());
    for (const auto& viol : r.violations) CAPTURE(viol);
    CHECK(r.ok());
    CHECK(r.completed);
  }
  CHECK(accepted >= 7);
}

TEST_CASE("the smallest budget yields the unit program") {
  TermPtr t = generate_well_typed(0, 1);
  CHECK(term_as<UnitLit>(t) != nullptr);
  CHECK_THROWS_AS(generate_well_typed(0, 0), GenerationExhausted);
}

TEST_CASE("generation is deterministic per seed") {
  for (std::uint64_t seed : {1ull, 17ull, 255ull}) {
    TermPtr a = generate_well_typed(seed, 20);
    TermPtr b = generate_well_typed(seed, 20);
    CHECK(term_equal(a, b));
  }
}

TEST_CASE("generated programs are accepted by the checker") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    TermPtr t = generate_well_typed(seed, 20);
    Verdict v = check_program(t);
    CAPTURE(seed);
    if (!v.ok()) CAPTURE(v.diagnostic().render());
    CHECK(v.ok());
  }
}

TEST_CASE("budget-20 generation covers every reduction rule") {
  NodeCounts total;
  for (std::uint64_t seed = 0; seed < 500; ++seed)
    total += count_nodes(generate_well_typed(seed, 20));
  CHECK(total.covers_all());
}

TEST_CASE("generated programs run clean under per-step re-checking") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    TermPtr t = generate_well_typed(seed, 12);
    StepCheckResult r = run_with_stepcheck(t, 10000);
    CAPTURE(seed);
    for (const auto& viol : r.violations) CAPTURE(viol);
    CHECK(r.ok());
  }
}
