#include "rtfx/effects.hpp"

namespace rtfx {

Effect make_use(const Qualifier& q) { return Effect{q.atoms, {}}; }

Effect make_kill(const Qualifier& q) { return Effect{{}, q.atoms}; }

Effect make_move_effect(const Qualifier& q) { return Effect{q.atoms, q.atoms}; }

ComposeResult seq_compose(const ReachGraph& g, const Effect& e1,
                          const Effect& e2) {
  // The overlap operator always carries the freshness marker; effect
  // qualifiers are fresh-free, so definedness tests the atom part only.
  AtomSet conflict = saturate(g, Qualifier{e1.kill, false})
                         .atoms.intersected(
                             saturate(g, Qualifier{e2.use, false}).atoms);
  if (!conflict.empty()) return ComposeFailure{std::move(conflict)};
  return Effect{e1.use.unioned(e2.use), e1.kill.unioned(e2.kill)};
}

bool effect_sub(const ReachGraph& g, const Effect& e1, const Effect& e2) {
  return sub_qualifier(g, Qualifier{e1.use, false}, Qualifier{e2.use, false}) &&
         sub_qualifier(g, Qualifier{e1.kill, false},
                       Qualifier{e2.kill, false});
}

}  // namespace rtfx
