#pragma once

#include <variant>

#include "rtfx/qualifiers.hpp"
#include "rtfx/syntax.hpp"

namespace rtfx {

/// Witness for an undefined sequential composition: the saturated
/// intersection of the first effect's kill with the second's use.
struct ComposeFailure {
  AtomSet conflicting;
};

/// Builders strip the freshness marker: effect qualifiers are fresh-free.
Effect make_use(const Qualifier& q);
Effect make_kill(const Qualifier& q);
/// A move both uses and kills its operand in one record, so later uses and
/// moves of the same resource fail composition.
Effect make_move_effect(const Qualifier& q);

using ComposeResult = std::variant<Effect, ComposeFailure>;

/// ε1 ▷ ε2: defined iff no resource in ε2's use is reachable from ε1's kill
/// (saturated intersection empty); the result is the componentwise union.
ComposeResult seq_compose(const ReachGraph& g, const Effect& e1,
                          const Effect& e2);

inline bool compose_ok(const ComposeResult& r) {
  return std::holds_alternative<Effect>(r);
}

/// Componentwise effect subtyping: both the use and kill components must be
/// sub-qualifiers.
bool effect_sub(const ReachGraph& g, const Effect& e1, const Effect& e2);

}  // namespace rtfx
