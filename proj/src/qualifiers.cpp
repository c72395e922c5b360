#include "rtfx/qualifiers.hpp"

#include <functional>
#include <map>

namespace rtfx {

bool ReachGraph::bound(const Atom& a) const {
  if (a.is_loc()) return store_ && store_->contains(a.index());
  if (!env_) return false;
  return env_->binds_term(a.name()) || env_->binds_qual_var(a.name());
}

Qualifier ReachGraph::one_step(const Atom& a) const {
  if (a.is_loc()) {
    // Locations are terminal: a location names exactly one cell, and runtime
    // aliasing collapses to location equality. Its referent qualifier
    // describes the cell's content, which is reachable only through a
    // dereference, not through the location itself.
    if (store_ && store_->contains(a.index())) return Qualifier{};
    throw UnboundAtomError(a);
  }
  if (env_) {
    if (const auto* tb = env_->lookup_term(a.name())) return tb->type.qual;
    if (const auto* ty = env_->lookup_qual_var(a.name()))
      return ty->bound.qual;
  }
  throw UnboundAtomError(a);
}

Qualifier saturate(const ReachGraph& g, const Qualifier& q) {
  AtomSet acc = q.atoms;
  // The fixpoint is reached within |Γ| one-step rounds; each round can only
  // add atoms already bound in the view.
  for (;;) {
    AtomSet next = acc;
    for (const auto& a : acc) next.insert_all(g.one_step(a).atoms);
    if (next == acc) break;
    acc = std::move(next);
  }
  return Qualifier{std::move(acc), q.fresh};
}

bool is_saturated(const ReachGraph& g, const Qualifier& q) {
  return saturate(g, q) == q;
}

Qualifier overlap(const ReachGraph& g, const Qualifier& p,
                  const Qualifier& q) {
  return Qualifier{saturate(g, p).atoms.intersected(saturate(g, q).atoms),
                   true};
}

namespace {

// grow(q): least superset of q closed under absorbing the one-step sets of
// its members (the self-collapse and bound-lifting directions), gated on the
// member's expansion being fresh-free.
AtomSet grow(const ReachGraph& g, const AtomSet& q) {
  AtomSet acc = q;
  bool changed = true;
  while (changed) {
    changed = false;
    AtomSet next = acc;
    for (const auto& a : acc) {
      Qualifier os = g.one_step(a);
      if (os.fresh) continue;
      for (const auto& b : os.atoms) {
        if (!next.contains(b)) {
          next.insert(b);
          changed = true;
        }
      }
    }
    acc = std::move(next);
  }
  return acc;
}

bool reaches_into(const ReachGraph& g, const Atom& a, const AtomSet& target,
                  AtomSet& visiting) {
  if (target.contains(a)) return true;
  // Only variables can be upcast along their binding qualifier; a location
  // is a resource of its own.
  if (a.is_loc()) return false;
  if (visiting.contains(a)) return false;  // cycle: no productive derivation
  Qualifier os = g.one_step(a);
  if (os.fresh) return false;
  visiting.insert(a);
  bool ok = true;
  for (const auto& b : os.atoms) {
    if (!reaches_into(g, b, target, visiting)) {
      ok = false;
      break;
    }
  }
  visiting.erase(a);
  return ok;
}

}  // namespace

bool sub_qualifier(const ReachGraph& g, const Qualifier& p,
                   const Qualifier& q) {
  if (p.fresh && !q.fresh) return false;
  for (const auto& a : p.atoms)
    if (!g.bound(a)) throw UnboundAtomError(a);
  for (const auto& a : q.atoms)
    if (!g.bound(a)) throw UnboundAtomError(a);
  AtomSet target = grow(g, q.atoms);
  for (const auto& a : p.atoms) {
    AtomSet visiting;
    if (!reaches_into(g, a, target, visiting)) return false;
  }
  return true;
}

}  // namespace rtfx
