#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtfx/syntax.hpp"

namespace rtfx {

/// Store cells hold a value or a tombstone; the domain never shrinks and a
/// tombstoned cell never returns to live.
class Store {
 public:
  std::uint32_t allocate(TermPtr value);
  bool contains(std::uint32_t loc) const { return loc < cells_.size(); }
  bool live(std::uint32_t loc) const;
  const TermPtr& value(std::uint32_t loc) const;
  void assign(std::uint32_t loc, TermPtr value);
  void kill(std::uint32_t loc);  // idempotent

  std::uint32_t size() const { return static_cast<std::uint32_t>(cells_.size()); }
  AtomSet dom() const;
  AtomSet tombstones() const;

 private:
  std::vector<std::optional<TermPtr>> cells_;  // nullopt = tombstone
};

enum class StuckReason {
  UseAfterFree,
  MoveOfDead,
  NotAFunction,
  NotALocation,
  UnboundLocation,
  FreeVariable,
};

std::string stuck_reason_name(StuckReason r);

struct AllocEvent {
  std::uint32_t loc;
};
struct UseEvent {
  std::uint32_t loc;
};
struct KillEvent {
  std::uint32_t loc;
};
struct MoveEvent {
  std::uint32_t from;
  std::uint32_t to;
};

using TraceEvent = std::variant<AllocEvent, UseEvent, KillEvent, MoveEvent>;

/// Stable one-line serialization: "ALLOC ℓ0", "USE ℓ0", "KILL ℓ0",
/// "MOVE ℓ0 -> ℓ1".
std::string trace_line(const TraceEvent& e);

bool is_value(const TermPtr& t);

struct StepOk {
  TermPtr term;
  std::vector<TraceEvent> events;
  // Referent annotation of the allocating redex, when the step was an
  // annotated allocation; consumed by the configuration re-checker.
  std::optional<Qualifier> alloc_referent;
};
struct StepDone {
  TermPtr value;
};
struct StepStuck {
  StuckReason reason;
};

using StepResult = std::variant<StepOk, StepDone, StepStuck>;

/// One leftmost-innermost reduction; deterministic.
StepResult step(Store& store, const TermPtr& t);

struct RunOutcome {
  enum class Kind { Done, Stuck, OutOfFuel } kind;
  TermPtr value;                    // Done
  StuckReason reason;               // Stuck
  TermPtr residual;                 // Stuck / OutOfFuel
  std::vector<TraceEvent> trace;
  std::size_t steps = 0;
};

RunOutcome run(Store& store, TermPtr t, long fuel);

/// Rendering of final values for the command line.
std::string print_value(const TermPtr& v);

}  // namespace rtfx
