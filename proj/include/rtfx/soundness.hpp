#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtfx/eval.hpp"
#include "rtfx/typecheck.hpp"

namespace rtfx {

/// Telescoping well-formedness: every entry is closed and its referent
/// qualifier mentions only earlier locations.
bool store_typing_well_formed(const StoreTyping& sigma);

using KillSet = AtomSet;  // tombstoned locations, ⊆ dom(Σ)

/// Store agreement: dom(σ) ⊆ dom(Σ); every location outside the kill set is
/// live and its value types at the recorded entry; every kill-set member is a
/// tombstone.
bool check_store(const StoreTyping& sigma, const Store& store,
                 const KillSet& kills);

struct ConfigReport {
  bool store_well_typed = false;
  bool term_well_typed = false;
  bool kill_composition_defined = false;
  QualifiedType residual_type;
  Effect residual_effect;
  std::vector<Diagnostic> failures;

  bool ok() const {
    return store_well_typed && term_well_typed && kill_composition_defined;
  }
};

/// Re-checks a runtime configuration: the residual term under the full store
/// typing, the kill-set composition K(k) ▷ ε, and store agreement. Failures
/// are collected, never thrown.
ConfigReport check_config(const StoreTyping& sigma, const KillSet& kills,
                          const Store& store, const TermPtr& term);

struct StepCheckResult {
  std::size_t steps_checked = 0;
  bool completed = false;  // ran to a value within fuel
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Runs a closed program under per-step validation: each reduction must keep
/// the configuration well typed, grow the store monotonically, extend the
/// kill set exactly by the locations tombstoned in that step, keep that
/// extension within the prior static kill component, and never kill a freshly
/// returned location.
StepCheckResult run_with_stepcheck(const TermPtr& term, long fuel);

struct GenerationExhausted : std::runtime_error {
  explicit GenerationExhausted(const std::string& what)
      : std::runtime_error(what) {}
};

struct GeneratorOptions {
  // Statement mix; the remainder goes to plain leaves.
  double ref_op_weight = 0.4;
  double application_weight = 0.3;
};

/// Deterministically generates a closed term accepted by the checker.
/// Reference operations (alloc, deref, assign, free, move) and applications
/// appear with the configured frequencies.
TermPtr generate_well_typed(std::uint64_t seed, int size_budget,
                            const GeneratorOptions& options = {});

/// Syntactic occurrence counts, used to report reduction-rule coverage of
/// generated programs.
struct NodeCounts {
  std::size_t apps = 0;  // term and let redexes (beta)
  std::size_t refs = 0;
  std::size_t derefs = 0;
  std::size_t assigns = 0;
  std::size_t frees = 0;
  std::size_t moves = 0;

  NodeCounts& operator+=(const NodeCounts& o);
  bool covers_all() const {
    return apps && refs && derefs && assigns && frees && moves;
  }
};

NodeCounts count_nodes(const TermPtr& t);

}  // namespace rtfx
