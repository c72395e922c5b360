#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rtfx {

/// An atom is a name that can appear in a reachability qualifier: either a
/// term variable or a store location.
class Atom {
 public:
  static Atom var(std::string name);
  static Atom loc(std::uint32_t index);

  bool is_var() const { return std::holds_alternative<std::string>(repr_); }
  bool is_loc() const { return !is_var(); }
  const std::string& name() const { return std::get<std::string>(repr_); }
  std::uint32_t index() const { return std::get<std::uint32_t>(repr_); }

  std::string to_string() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);

 private:
  // variables sort before locations; see operator<=>
  std::variant<std::string, std::uint32_t> repr_;
};

/// A finite set of atoms with value semantics. Also serves as the effect
/// qualifier carrier (effect qualifiers never include the freshness marker,
/// which lives on Qualifier instead).
class AtomSet {
 public:
  AtomSet() = default;
  AtomSet(std::initializer_list<Atom> atoms);
  static AtomSet single(Atom a);

  bool contains(const Atom& a) const;
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  void insert(const Atom& a);
  void insert_all(const AtomSet& other);
  void erase(const Atom& a);

  AtomSet unioned(const AtomSet& other) const;
  AtomSet intersected(const AtomSet& other) const;
  AtomSet minus(const AtomSet& other) const;
  bool subset_of(const AtomSet& other) const;

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::string to_string() const;

  friend bool operator==(const AtomSet&, const AtomSet&) = default;

 private:
  std::vector<Atom> items_;  // sorted, unique
};

using EffectQualifier = AtomSet;
using Observation = AtomSet;

/// Reachability qualifier: a finite set of atoms plus the optional freshness
/// marker (written `*` in source, ◇ in output-independent contexts).
struct Qualifier {
  AtomSet atoms;
  bool fresh = false;

  static Qualifier of(std::initializer_list<Atom> a, bool fresh = false);
  static Qualifier fresh_only() { return Qualifier{{}, true}; }
  static Qualifier var(const std::string& name);

  bool empty() const { return atoms.empty() && !fresh; }
  Qualifier without_fresh() const { return Qualifier{atoms, false}; }
  Qualifier unioned(const Qualifier& other) const;

  friend bool operator==(const Qualifier&, const Qualifier&) = default;
};

/// Flow-sensitive effect: which resources a computation uses (reads/writes)
/// and which it kills (frees or moves away). Both components are fresh-free.
struct Effect {
  EffectQualifier use;
  EffectQualifier kill;

  static Effect pure() { return {}; }
  bool is_pure() const { return use.empty() && kill.empty(); }

  friend bool operator==(const Effect&, const Effect&) = default;
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct QualifiedType {
  TypePtr type;
  Qualifier qual;

  friend bool operator==(const QualifiedType&, const QualifiedType&);
};

struct UnitType {};
struct IntType {};
struct TopType {};

struct TypeVarType {
  std::string name;
};

/// Mutable reference; the referent qualifier never contains the freshness
/// marker (enforced where references are introduced).
struct RefType {
  QualifiedType referent;
};

/// Dependent function type f(x: domain) ->{latent} codomain. Codomain and
/// latent effect may mention both the parameter and the self name.
struct FunType {
  std::string self;
  std::string param;
  QualifiedType domain;
  Effect latent;
  QualifiedType codomain;
};

/// Bounded universal type: forall f[X^x <: bound] ->{latent} body.
struct AllType {
  std::string self;
  std::string type_var;
  std::string qual_var;
  QualifiedType bound;
  Effect latent;
  QualifiedType body;
};

struct Type {
  std::variant<UnitType, IntType, TopType, TypeVarType, RefType, FunType,
               AllType>
      node;
};

TypePtr make_unit_type();
TypePtr make_int_type();
TypePtr make_top_type();
TypePtr make_type_var(std::string name);
TypePtr make_ref_type(QualifiedType referent);
TypePtr make_fun_type(std::string self, std::string param, QualifiedType domain,
                      Effect latent, QualifiedType codomain);
TypePtr make_all_type(std::string self, std::string type_var,
                      std::string qual_var, QualifiedType bound, Effect latent,
                      QualifiedType body);

bool type_equal(const TypePtr& a, const TypePtr& b);

template <typename T>
const T* type_as(const TypePtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Span {
  int line = 0;
  int col = 0;
};

struct UnitLit {};
struct IntLit {
  long value = 0;
};
struct Var {
  std::string name;
};
struct Abs {
  std::string self;
  std::string param;
  QualifiedType domain;
  std::optional<Qualifier> capture;  // declared capture set, if annotated
  std::optional<Effect> latent;      // declared latent effect, if annotated
  TermPtr body;
};
struct App {
  TermPtr fn;
  TermPtr arg;
};
struct RefNew {
  TermPtr init;
  // Declared referent qualifier; inference widens the operand to it.
  std::optional<Qualifier> referent;
};
struct Deref {
  TermPtr ref;
};
struct Assign {
  TermPtr target;
  TermPtr value;
};
struct TAbs {
  std::string self;
  std::string type_var;
  std::string qual_var;
  QualifiedType bound;
  std::optional<Qualifier> capture;
  std::optional<Effect> latent;
  TermPtr body;
};
struct TApp {
  TermPtr fn;
  QualifiedType arg;
};
struct Free {
  TermPtr ref;
};
struct Move {
  TermPtr ref;
};
struct Loc {
  std::uint32_t index = 0;
};
/// Surface sugar; checker and evaluator treat it as the immediate application
/// of a one-argument continuation.
struct Let {
  std::string name;
  TermPtr bound;
  TermPtr body;
};

struct Term {
  std::variant<UnitLit, IntLit, Var, Abs, App, RefNew, Deref, Assign, TAbs,
               TApp, Free, Move, Loc, Let>
      node;
  Span span;
};

TermPtr make_unit(Span s = {});
TermPtr make_int(long value, Span s = {});
TermPtr make_var(std::string name, Span s = {});
TermPtr make_abs(std::string self, std::string param, QualifiedType domain,
                 std::optional<Qualifier> capture, std::optional<Effect> latent,
                 TermPtr body, Span s = {});
TermPtr make_app(TermPtr fn, TermPtr arg, Span s = {});
TermPtr make_ref(TermPtr init, Span s = {});
TermPtr make_ref_at(TermPtr init, Qualifier referent, Span s = {});
TermPtr make_deref(TermPtr ref, Span s = {});
TermPtr make_assign(TermPtr target, TermPtr value, Span s = {});
TermPtr make_tabs(std::string self, std::string type_var, std::string qual_var,
                  QualifiedType bound, std::optional<Qualifier> capture,
                  std::optional<Effect> latent, TermPtr body, Span s = {});
TermPtr make_tapp(TermPtr fn, QualifiedType arg, Span s = {});
TermPtr make_free(TermPtr ref, Span s = {});
TermPtr make_move(TermPtr ref, Span s = {});
TermPtr make_loc(std::uint32_t index, Span s = {});
TermPtr make_let(std::string name, TermPtr bound, TermPtr body, Span s = {});

template <typename T>
const T* term_as(const TermPtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

/// Structural equality, ignoring source spans.
bool term_equal(const TermPtr& a, const TermPtr& b);

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

struct TermBinding {
  std::string name;
  QualifiedType type;
  std::string display;  // source name when the binder was freshened
};

struct TypeBinding {
  std::string type_var;
  std::string qual_var;
  QualifiedType bound;
};

/// Ordered typing environment. Extension freshens shadowed names instead of
/// shadowing; callers rename the affected term accordingly.
class TypeEnv {
 public:
  using Entry = std::variant<TermBinding, TypeBinding>;

  bool binds_term(const std::string& name) const;
  bool binds_type_var(const std::string& name) const;
  bool binds_qual_var(const std::string& name) const;
  bool binds_any(const std::string& name) const;

  const TermBinding* lookup_term(const std::string& name) const;
  const TypeBinding* lookup_type_var(const std::string& name) const;
  const TypeBinding* lookup_qual_var(const std::string& name) const;

  /// Smallest variant of `base` (base, base_1, base_2, ...) not bound here
  /// and not in `avoid`.
  std::string fresh_name(const std::string& base, const AtomSet& avoid) const;

  TypeEnv with_term(std::string name, QualifiedType type,
                    std::string display = "") const;
  TypeEnv with_type(std::string type_var, std::string qual_var,
                    QualifiedType bound) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  AtomSet dom() const;

  std::string display_name(const std::string& name) const;

 private:
  std::vector<Entry> entries_;
};

/// Location typing: referent type and qualifier per allocated location,
/// telescoped (each entry mentions only earlier locations).
class StoreTyping {
 public:
  struct Entry {
    std::uint32_t loc;
    TypePtr type;
    Qualifier qual;
  };

  bool contains(std::uint32_t loc) const;
  const Entry* lookup(std::uint32_t loc) const;
  void extend(std::uint32_t loc, TypePtr type, Qualifier qual);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  AtomSet dom() const;

 private:
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Substitution and free names
// ---------------------------------------------------------------------------

/// q[p/x]: if x is in q, replace it by p's atoms and join freshness;
/// otherwise q is returned unchanged.
Qualifier subst_qualifier(const Qualifier& q, const std::string& x,
                          const Qualifier& p);

/// Pointwise substitution on both components; p's freshness is dropped since
/// effect qualifiers are fresh-free.
Effect subst_effect(const Effect& e, const std::string& x, const Qualifier& p);

/// Substitutes a term variable in qualifier positions throughout a type,
/// capture-avoiding with respect to Fun/All binders.
QualifiedType subst_qual_in_type(const QualifiedType& q, const std::string& x,
                                 const Qualifier& p);
TypePtr subst_qual_in_type(const TypePtr& t, const std::string& x,
                           const Qualifier& p);

/// Q[T^p/X^x]: instantiates the type variable X with arg's carrier and the
/// qualifier variable x with arg's qualifier, capture-avoiding.
QualifiedType subst_type(const QualifiedType& q, const std::string& type_var,
                         const std::string& qual_var, const QualifiedType& arg);

/// t[v/x] with value qualifier vq substituted for x in annotation qualifier
/// positions. Capture-avoiding.
TermPtr subst_term(const TermPtr& t, const std::string& x, const TermPtr& v,
                   const Qualifier& vq);

/// Instantiates a type argument in a term's annotations (type application).
TermPtr subst_type_in_term(const TermPtr& t, const std::string& type_var,
                           const std::string& qual_var,
                           const QualifiedType& arg);

/// Free term-level atoms of a term (variables and locations), including
/// qualifier positions of embedded annotations.
AtomSet free_atoms(const TermPtr& t);

/// Free atoms of a type's qualifier positions.
AtomSet free_atoms_of_type(const TypePtr& t);
AtomSet free_atoms_of_type(const QualifiedType& q);

/// Free type variables.
AtomSet free_type_vars(const TypePtr& t);
AtomSet free_type_vars(const QualifiedType& q);

/// Locations occurring anywhere in a term (used for runtime value
/// qualifiers).
AtomSet free_locations(const TermPtr& t);

}  // namespace rtfx
