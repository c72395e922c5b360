#pragma once

#include <stdexcept>

#include "rtfx/syntax.hpp"

namespace rtfx {

struct UnboundAtomError : std::runtime_error {
  explicit UnboundAtomError(const Atom& a)
      : std::runtime_error("unbound atom: " + a.to_string()), atom(a) {}
  Atom atom;
};

/// One-step reachability view over a typing environment and a store typing.
/// Term variables expand to their binding qualifier, locations to their
/// referent qualifier, qualifier variables of type bindings to their bound's
/// qualifier.
class ReachGraph {
 public:
  ReachGraph() = default;
  explicit ReachGraph(const TypeEnv* env, const StoreTyping* store = nullptr)
      : env_(env), store_(store) {}

  bool bound(const Atom& a) const;

  /// One-step expansion; throws UnboundAtomError for atoms outside the view.
  Qualifier one_step(const Atom& a) const;

 private:
  const TypeEnv* env_ = nullptr;
  const StoreTyping* store_ = nullptr;
};

/// Full transitive lookup q*: the |Γ|-fold iteration of the one-step
/// expansion. The freshness marker is carried through unchanged.
Qualifier saturate(const ReachGraph& g, const Qualifier& q);

bool is_saturated(const ReachGraph& g, const Qualifier& q);

/// p ⊓ q: the fresh-marked intersection of the saturations.
Qualifier overlap(const ReachGraph& g, const Qualifier& p, const Qualifier& q);

/// Algorithmic sub-qualifier check. Sound with respect to the declarative
/// rules (inclusion, congruence, self-collapse, variable upcast, bound
/// lifting, transitivity); not complete.
bool sub_qualifier(const ReachGraph& g, const Qualifier& p, const Qualifier& q);

}  // namespace rtfx
