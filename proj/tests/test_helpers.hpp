#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rtfx/parser.hpp"
#include "rtfx/qualifiers.hpp"
#include "rtfx/syntax.hpp"

namespace rtfx::testing {

inline Atom v(const std::string& name) { return Atom::var(name); }
inline Atom l(std::uint32_t i) { return Atom::loc(i); }

inline Qualifier qual(std::initializer_list<Atom> atoms, bool fresh = false) {
  return Qualifier{AtomSet(atoms), fresh};
}

inline QualifiedType qt(const std::string& text) {
  return parse_qualified_type(text);
}

/// Environment from (name, type-string) pairs, bound left to right.
inline TypeEnv env_of(
    std::initializer_list<std::pair<std::string, std::string>> bindings) {
  TypeEnv env;
  for (const auto& [name, type] : bindings) env = env.with_term(name, qt(type));
  return env;
}

inline Observation obs_of(std::initializer_list<std::string> names) {
  Observation out;
  for (const auto& n : names) out.insert(Atom::var(n));
  return out;
}

// ---------------------------------------------------------------------------
// Independent oracles over a bitmask qualifier representation.
//
// Atoms are numbered 0..n-1; bit n is the freshness marker. These oracles are
// deliberately separate from the library's ReachGraph machinery.
// ---------------------------------------------------------------------------

struct MaskEnv {
  // binding order matters only for display; lookup is by index
  struct Entry {
    int atom;       // which atom this binds
    unsigned qual;  // its one-step qualifier as a bitmask (may include fresh)
    bool is_type_binding = false;
  };
  int atom_count;
  std::vector<Entry> entries;

  unsigned fresh_bit() const { return 1u << atom_count; }
  unsigned dom_mask() const {
    unsigned m = 0;
    for (const auto& e : entries) m |= 1u << e.atom;
    return m;
  }
  const Entry* lookup(int atom) const {
    for (const auto& e : entries)
      if (e.atom == atom) return &e;
    return nullptr;
  }
};

/// Naive transitive lookup: repeat the one-step expansion until stable.
inline unsigned naive_saturate(const MaskEnv& env, unsigned q) {
  unsigned acc = q;
  for (;;) {
    unsigned next = acc;
    for (int a = 0; a < env.atom_count; ++a)
      if (acc & (1u << a))
        if (const auto* e = env.lookup(a))
          next |= e->qual & ~env.fresh_bit();
    if (next == acc) return acc;
    acc = next;
  }
}

/// One round of the inductive transitive-lookup case.
inline unsigned one_step_round(const MaskEnv& env, unsigned q) {
  unsigned next = q;
  for (int a = 0; a < env.atom_count; ++a)
    if (q & (1u << a))
      if (const auto* e = env.lookup(a)) next |= e->qual & ~env.fresh_bit();
  return next;
}

/// Declarative sub-qualifier closure: all derivable pairs within `rounds`
/// rule applications, over qualifiers drawn from subsets of the universe
/// (at most 3 atoms plus the freshness marker).
inline std::set<std::pair<unsigned, unsigned>> declarative_closure(
    const MaskEnv& env, int rounds) {
  const unsigned fresh = env.fresh_bit();
  const unsigned universe = (1u << (env.atom_count + 1)) - 1;
  const unsigned dom = env.dom_mask();
  bool rel[16][16] = {};

  // base rules
  for (unsigned p = 0; p <= universe; ++p)
    for (unsigned q = 0; q <= universe; ++q)
      if ((q & ~(dom | fresh)) == 0 && (p & ~q) == 0)
        rel[p][q] = true;  // inclusion
  for (const auto& e : env.entries) {
    if (e.qual & fresh) continue;
    unsigned x = 1u << e.atom;
    if (!e.is_type_binding) {
      rel[x][e.qual] = true;       // variable upcast
      rel[e.qual | x][x] = true;   // self collapse
    } else {
      for (unsigned p0 = 0; p0 <= universe; ++p0)
        rel[p0 | x][p0 | e.qual] = true;  // bound lifting
    }
  }

  for (int i = 0; i < rounds; ++i) {
    bool changed = false;
    // congruence
    for (unsigned q1 = 0; q1 <= universe; ++q1)
      for (unsigned q2 = 0; q2 <= universe; ++q2)
        if (rel[q1][q2])
          for (unsigned p0 = 0; p0 <= universe; ++p0)
            if (!rel[p0 | q1][p0 | q2]) {
              rel[p0 | q1][p0 | q2] = true;
              changed = true;
            }
    // transitivity
    for (unsigned p = 0; p <= universe; ++p)
      for (unsigned q = 0; q <= universe; ++q)
        if (rel[p][q])
          for (unsigned r = 0; r <= universe; ++r)
            if (rel[q][r] && !rel[p][r]) {
              rel[p][r] = true;
              changed = true;
            }
    if (!changed) break;
  }

  std::set<std::pair<unsigned, unsigned>> out;
  for (unsigned p = 0; p <= universe; ++p)
    for (unsigned q = 0; q <= universe; ++q)
      if (rel[p][q]) out.insert({p, q});
  return out;
}

inline Qualifier from_mask(const MaskEnv& env, unsigned m,
                           const std::vector<std::string>& names) {
  Qualifier q;
  for (int a = 0; a < env.atom_count; ++a)
    if (m & (1u << a)) q.atoms.insert(Atom::var(names[a]));
  q.fresh = (m & env.fresh_bit()) != 0;
  return q;
}

/// Converts a mask environment into the library's typing environment (term
/// bindings at a tracked carrier, type bindings as bounds).
inline TypeEnv to_type_env(const MaskEnv& env,
                           const std::vector<std::string>& names) {
  TypePtr carrier = make_ref_type(QualifiedType{make_int_type(), Qualifier{}});
  TypeEnv out;
  for (const auto& e : env.entries) {
    Qualifier q = from_mask(env, e.qual, names);
    if (e.is_type_binding)
      out = out.with_type("T" + names[e.atom], names[e.atom],
                          QualifiedType{carrier, q});
    else
      out = out.with_term(names[e.atom], QualifiedType{carrier, q});
  }
  return out;
}

}  // namespace rtfx::testing
