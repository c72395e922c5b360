#pragma once

#include "rtfx/effects.hpp"
#include "rtfx/qualifiers.hpp"
#include "rtfx/syntax.hpp"

namespace rtfx {

struct IllFormedTypeError : std::runtime_error {
  explicit IllFormedTypeError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Syntax-directed carrier subtyping. References are invariant in their
/// payload with equal referent qualifiers; functions are contravariant in the
/// domain and covariant in codomain and latent effect under the extended
/// environment; type variables resolve through their bounds.
bool sub_type(const TypeEnv& env, const StoreTyping* store, const TypePtr& s,
              const TypePtr& t);

/// Qualified-type subtyping: carrier and qualifier componentwise.
bool sub_qualified(const TypeEnv& env, const StoreTyping* store,
                   const QualifiedType& p, const QualifiedType& q);

/// Qualified types with effects: all three components advance in their own
/// relation.
bool sub_qualified_eff(const TypeEnv& env, const StoreTyping* store,
                       const QualifiedType& p, const Effect& e1,
                       const QualifiedType& q, const Effect& e2);

}  // namespace rtfx
