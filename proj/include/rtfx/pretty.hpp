#pragma once

#include <string>

#include "rtfx/syntax.hpp"

namespace rtfx {

/// `{a,b,*}`; the freshness marker prints last, the empty qualifier as `{}`.
std::string print_qualifier(const Qualifier& q);
std::string print_atom_set(const AtomSet& s);

/// Annotation form `<u:{...},k:{...}>` with empty components omitted; the
/// pure effect prints as `<>`.
std::string print_effect(const Effect& e);

std::string print_type(const TypePtr& t);
std::string print_qualified_type(const QualifiedType& q);

/// Source form of a term; parses back to an equal term.
std::string print_term(const TermPtr& t);

}  // namespace rtfx
