#include "rtfx/syntax.hpp"

#include <algorithm>

namespace rtfx {

// ---------------------------------------------------------------------------
// Atom / AtomSet
// ---------------------------------------------------------------------------

Atom Atom::var(std::string name) {
  Atom a;
  a.repr_ = std::move(name);
  return a;
}

Atom Atom::loc(std::uint32_t index) {
  Atom a;
  a.repr_ = index;
  return a;
}

std::string Atom::to_string() const {
  if (is_var()) return name();
  return "ℓ" + std::to_string(index());
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (a.repr_.index() != b.repr_.index())
    return a.repr_.index() <=> b.repr_.index();
  if (a.is_var()) return a.name() <=> b.name();
  return a.index() <=> b.index();
}

AtomSet::AtomSet(std::initializer_list<Atom> atoms) {
  for (const auto& a : atoms) insert(a);
}

AtomSet AtomSet::single(Atom a) {
  AtomSet s;
  s.insert(a);
  return s;
}

bool AtomSet::contains(const Atom& a) const {
  return std::binary_search(items_.begin(), items_.end(), a);
}

void AtomSet::insert(const Atom& a) {
  auto it = std::lower_bound(items_.begin(), items_.end(), a);
  if (it == items_.end() || *it != a) items_.insert(it, a);
}

void AtomSet::insert_all(const AtomSet& other) {
  for (const auto& a : other) insert(a);
}

void AtomSet::erase(const Atom& a) {
  auto it = std::lower_bound(items_.begin(), items_.end(), a);
  if (it != items_.end() && *it == a) items_.erase(it);
}

AtomSet AtomSet::unioned(const AtomSet& other) const {
  AtomSet out;
  std::set_union(items_.begin(), items_.end(), other.items_.begin(),
                 other.items_.end(), std::back_inserter(out.items_));
  return out;
}

AtomSet AtomSet::intersected(const AtomSet& other) const {
  AtomSet out;
  std::set_intersection(items_.begin(), items_.end(), other.items_.begin(),
                        other.items_.end(), std::back_inserter(out.items_));
  return out;
}

AtomSet AtomSet::minus(const AtomSet& other) const {
  AtomSet out;
  std::set_difference(items_.begin(), items_.end(), other.items_.begin(),
                      other.items_.end(), std::back_inserter(out.items_));
  return out;
}

bool AtomSet::subset_of(const AtomSet& other) const {
  return std::includes(other.items_.begin(), other.items_.end(),
                       items_.begin(), items_.end());
}

std::string AtomSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& a : items_) {
    if (!first) out += ",";
    out += a.to_string();
    first = false;
  }
  return out + "}";
}

Qualifier Qualifier::of(std::initializer_list<Atom> a, bool fresh) {
  return Qualifier{AtomSet(a), fresh};
}

Qualifier Qualifier::var(const std::string& name) {
  return Qualifier{AtomSet::single(Atom::var(name)), false};
}

Qualifier Qualifier::unioned(const Qualifier& other) const {
  return Qualifier{atoms.unioned(other.atoms), fresh || other.fresh};
}

// ---------------------------------------------------------------------------
// Type construction
// ---------------------------------------------------------------------------

namespace {
template <typename Node>
TypePtr mk_type(Node&& n) {
  return std::make_shared<Type>(Type{std::forward<Node>(n)});
}
}  // namespace

TypePtr make_unit_type() {
  static const TypePtr t = mk_type(UnitType{});
  return t;
}
TypePtr make_int_type() {
  static const TypePtr t = mk_type(IntType{});
  return t;
}
TypePtr make_top_type() {
  static const TypePtr t = mk_type(TopType{});
  return t;
}
TypePtr make_type_var(std::string name) {
  return mk_type(TypeVarType{std::move(name)});
}
TypePtr make_ref_type(QualifiedType referent) {
  return mk_type(RefType{std::move(referent)});
}
TypePtr make_fun_type(std::string self, std::string param,
                      QualifiedType domain, Effect latent,
                      QualifiedType codomain) {
  return mk_type(FunType{std::move(self), std::move(param), std::move(domain),
                         std::move(latent), std::move(codomain)});
}
TypePtr make_all_type(std::string self, std::string type_var,
                      std::string qual_var, QualifiedType bound, Effect latent,
                      QualifiedType body) {
  return mk_type(AllType{std::move(self), std::move(type_var),
                         std::move(qual_var), std::move(bound),
                         std::move(latent), std::move(body)});
}

bool operator==(const QualifiedType& a, const QualifiedType& b) {
  return a.qual == b.qual && type_equal(a.type, b.type);
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<UnitType>(a->node) ||
      std::holds_alternative<IntType>(a->node) ||
      std::holds_alternative<TopType>(a->node))
    return true;
  if (const auto* va = std::get_if<TypeVarType>(&a->node))
    return va->name == std::get<TypeVarType>(b->node).name;
  if (const auto* ra = std::get_if<RefType>(&a->node))
    return ra->referent == std::get<RefType>(b->node).referent;
  if (const auto* fa = std::get_if<FunType>(&a->node)) {
    const auto& fb = std::get<FunType>(b->node);
    return fa->self == fb.self && fa->param == fb.param &&
           fa->domain == fb.domain && fa->latent == fb.latent &&
           fa->codomain == fb.codomain;
  }
  const auto& aa = std::get<AllType>(a->node);
  const auto& ab = std::get<AllType>(b->node);
  return aa.self == ab.self && aa.type_var == ab.type_var &&
         aa.qual_var == ab.qual_var && aa.bound == ab.bound &&
         aa.latent == ab.latent && aa.body == ab.body;
}

// ---------------------------------------------------------------------------
// Term construction
// ---------------------------------------------------------------------------

namespace {
template <typename Node>
TermPtr mk_term(Node&& n, Span s) {
  return std::make_shared<Term>(Term{std::forward<Node>(n), s});
}
}  // namespace

TermPtr make_unit(Span s) { return mk_term(UnitLit{}, s); }
TermPtr make_int(long value, Span s) { return mk_term(IntLit{value}, s); }
TermPtr make_var(std::string name, Span s) {
  return mk_term(Var{std::move(name)}, s);
}
TermPtr make_abs(std::string self, std::string param, QualifiedType domain,
                 std::optional<Qualifier> capture, std::optional<Effect> latent,
                 TermPtr body, Span s) {
  return mk_term(Abs{std::move(self), std::move(param), std::move(domain),
                     std::move(capture), std::move(latent), std::move(body)},
                 s);
}
TermPtr make_app(TermPtr fn, TermPtr arg, Span s) {
  return mk_term(App{std::move(fn), std::move(arg)}, s);
}
TermPtr make_ref(TermPtr init, Span s) {
  return mk_term(RefNew{std::move(init), std::nullopt}, s);
}
TermPtr make_ref_at(TermPtr init, Qualifier referent, Span s) {
  return mk_term(RefNew{std::move(init), std::move(referent)}, s);
}
TermPtr make_deref(TermPtr ref, Span s) {
  return mk_term(Deref{std::move(ref)}, s);
}
TermPtr make_assign(TermPtr target, TermPtr value, Span s) {
  return mk_term(Assign{std::move(target), std::move(value)}, s);
}
TermPtr make_tabs(std::string self, std::string type_var, std::string qual_var,
                  QualifiedType bound, std::optional<Qualifier> capture,
                  std::optional<Effect> latent, TermPtr body, Span s) {
  return mk_term(TAbs{std::move(self), std::move(type_var),
                      std::move(qual_var), std::move(bound),
                      std::move(capture), std::move(latent), std::move(body)},
                 s);
}
TermPtr make_tapp(TermPtr fn, QualifiedType arg, Span s) {
  return mk_term(TApp{std::move(fn), std::move(arg)}, s);
}
TermPtr make_free(TermPtr ref, Span s) {
  return mk_term(Free{std::move(ref)}, s);
}
TermPtr make_move(TermPtr ref, Span s) {
  return mk_term(Move{std::move(ref)}, s);
}
TermPtr make_loc(std::uint32_t index, Span s) {
  return mk_term(Loc{index}, s);
}
TermPtr make_let(std::string name, TermPtr bound, TermPtr body, Span s) {
  return mk_term(Let{std::move(name), std::move(bound), std::move(body)}, s);
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, UnitLit>) {
          return true;
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<T, Var>) {
          return na.name == nb.name;
        } else if constexpr (std::is_same_v<T, Abs>) {
          return na.self == nb.self && na.param == nb.param &&
                 na.domain == nb.domain && na.capture == nb.capture &&
                 na.latent == nb.latent && term_equal(na.body, nb.body);
        } else if constexpr (std::is_same_v<T, App>) {
          return term_equal(na.fn, nb.fn) && term_equal(na.arg, nb.arg);
        } else if constexpr (std::is_same_v<T, RefNew>) {
          return na.referent == nb.referent && term_equal(na.init, nb.init);
        } else if constexpr (std::is_same_v<T, Deref>) {
          return term_equal(na.ref, nb.ref);
        } else if constexpr (std::is_same_v<T, Assign>) {
          return term_equal(na.target, nb.target) &&
                 term_equal(na.value, nb.value);
        } else if constexpr (std::is_same_v<T, TAbs>) {
          return na.self == nb.self && na.type_var == nb.type_var &&
                 na.qual_var == nb.qual_var && na.bound == nb.bound &&
                 na.capture == nb.capture && na.latent == nb.latent &&
                 term_equal(na.body, nb.body);
        } else if constexpr (std::is_same_v<T, TApp>) {
          return term_equal(na.fn, nb.fn) && na.arg == nb.arg;
        } else if constexpr (std::is_same_v<T, Free>) {
          return term_equal(na.ref, nb.ref);
        } else if constexpr (std::is_same_v<T, Move>) {
          return term_equal(na.ref, nb.ref);
        } else if constexpr (std::is_same_v<T, Loc>) {
          return na.index == nb.index;
        } else {
          static_assert(std::is_same_v<T, Let>);
          return na.name == nb.name && term_equal(na.bound, nb.bound) &&
                 term_equal(na.body, nb.body);
        }
      },
      a->node);
}

// ---------------------------------------------------------------------------
// TypeEnv
// ---------------------------------------------------------------------------

bool TypeEnv::binds_term(const std::string& name) const {
  return lookup_term(name) != nullptr;
}
bool TypeEnv::binds_type_var(const std::string& name) const {
  return lookup_type_var(name) != nullptr;
}
bool TypeEnv::binds_qual_var(const std::string& name) const {
  return lookup_qual_var(name) != nullptr;
}
bool TypeEnv::binds_any(const std::string& name) const {
  return binds_term(name) || binds_type_var(name) || binds_qual_var(name);
}

const TermBinding* TypeEnv::lookup_term(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (const auto* tb = std::get_if<TermBinding>(&*it))
      if (tb->name == name) return tb;
  return nullptr;
}

const TypeBinding* TypeEnv::lookup_type_var(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (const auto* tb = std::get_if<TypeBinding>(&*it))
      if (tb->type_var == name) return tb;
  return nullptr;
}

const TypeBinding* TypeEnv::lookup_qual_var(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (const auto* tb = std::get_if<TypeBinding>(&*it))
      if (tb->qual_var == name) return tb;
  return nullptr;
}

std::string TypeEnv::fresh_name(const std::string& base,
                                const AtomSet& avoid) const {
  auto taken = [&](const std::string& n) {
    return binds_any(n) || avoid.contains(Atom::var(n));
  };
  if (!taken(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken(candidate)) return candidate;
  }
}

TypeEnv TypeEnv::with_term(std::string name, QualifiedType type,
                           std::string display) const {
  TypeEnv out = *this;
  if (display.empty()) display = name;
  out.entries_.push_back(
      TermBinding{std::move(name), std::move(type), std::move(display)});
  return out;
}

TypeEnv TypeEnv::with_type(std::string type_var, std::string qual_var,
                           QualifiedType bound) const {
  TypeEnv out = *this;
  out.entries_.push_back(
      TypeBinding{std::move(type_var), std::move(qual_var), std::move(bound)});
  return out;
}

AtomSet TypeEnv::dom() const {
  AtomSet out;
  for (const auto& e : entries_) {
    if (const auto* tb = std::get_if<TermBinding>(&e)) {
      out.insert(Atom::var(tb->name));
    } else {
      const auto& ty = std::get<TypeBinding>(e);
      out.insert(Atom::var(ty.qual_var));
    }
  }
  return out;
}

std::string TypeEnv::display_name(const std::string& name) const {
  if (const auto* tb = lookup_term(name))
    if (!tb->display.empty()) return tb->display;
  return name;
}

// ---------------------------------------------------------------------------
// StoreTyping
// ---------------------------------------------------------------------------

bool StoreTyping::contains(std::uint32_t loc) const {
  return lookup(loc) != nullptr;
}

const StoreTyping::Entry* StoreTyping::lookup(std::uint32_t loc) const {
  for (const auto& e : entries_)
    if (e.loc == loc) return &e;
  return nullptr;
}

void StoreTyping::extend(std::uint32_t loc, TypePtr type, Qualifier qual) {
  entries_.push_back(Entry{loc, std::move(type), std::move(qual)});
}

AtomSet StoreTyping::dom() const {
  AtomSet out;
  for (const auto& e : entries_) out.insert(Atom::loc(e.loc));
  return out;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

Qualifier subst_qualifier(const Qualifier& q, const std::string& x,
                          const Qualifier& p) {
  Atom target = Atom::var(x);
  if (!q.atoms.contains(target)) return q;
  Qualifier out;
  out.atoms = q.atoms;
  out.atoms.erase(target);
  out.atoms.insert_all(p.atoms);
  out.fresh = q.fresh || p.fresh;
  return out;
}

Effect subst_effect(const Effect& e, const std::string& x, const Qualifier& p) {
  auto component = [&](const EffectQualifier& c) {
    Atom target = Atom::var(x);
    if (!c.contains(target)) return c;
    EffectQualifier out = c;
    out.erase(target);
    out.insert_all(p.atoms);
    return out;
  };
  return Effect{component(e.use), component(e.kill)};
}

TypePtr subst_qual_in_type(const TypePtr& t, const std::string& x,
                           const Qualifier& p) {
  if (!t) return t;
  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnitType> ||
                      std::is_same_v<T, IntType> ||
                      std::is_same_v<T, TopType> ||
                      std::is_same_v<T, TypeVarType>) {
          return t;
        } else if constexpr (std::is_same_v<T, RefType>) {
          return make_ref_type(subst_qual_in_type(n.referent, x, p));
        } else if constexpr (std::is_same_v<T, FunType>) {
          FunType out = n;
          out.domain = subst_qual_in_type(n.domain, x, p);
          if (n.self == x || n.param == x) return mk_type(std::move(out));
          // Avoid capturing the substituted atoms in the binders.
          if (p.atoms.contains(Atom::var(out.self))) {
            std::string ns = out.self + "'";
            while (p.atoms.contains(Atom::var(ns)) || ns == out.param)
              ns += "'";
            out.codomain = subst_qual_in_type(out.codomain, out.self,
                                              Qualifier::var(ns));
            out.latent = subst_effect(out.latent, out.self, Qualifier::var(ns));
            out.self = ns;
          }
          if (p.atoms.contains(Atom::var(out.param))) {
            std::string np = out.param + "'";
            while (p.atoms.contains(Atom::var(np)) || np == out.self)
              np += "'";
            out.codomain = subst_qual_in_type(out.codomain, out.param,
                                              Qualifier::var(np));
            out.latent =
                subst_effect(out.latent, out.param, Qualifier::var(np));
            out.param = np;
          }
          out.codomain = subst_qual_in_type(out.codomain, x, p);
          out.latent = subst_effect(out.latent, x, p);
          return mk_type(std::move(out));
        } else {
          static_assert(std::is_same_v<T, AllType>);
          AllType out = n;
          out.bound = subst_qual_in_type(n.bound, x, p);
          if (n.self == x || n.qual_var == x) return mk_type(std::move(out));
          if (p.atoms.contains(Atom::var(out.self))) {
            std::string ns = out.self + "'";
            while (p.atoms.contains(Atom::var(ns)) || ns == out.qual_var)
              ns += "'";
            out.body =
                subst_qual_in_type(out.body, out.self, Qualifier::var(ns));
            out.latent = subst_effect(out.latent, out.self, Qualifier::var(ns));
            out.self = ns;
          }
          if (p.atoms.contains(Atom::var(out.qual_var))) {
            std::string nq = out.qual_var + "'";
            while (p.atoms.contains(Atom::var(nq)) || nq == out.self) nq += "'";
            out.body =
                subst_qual_in_type(out.body, out.qual_var, Qualifier::var(nq));
            out.latent =
                subst_effect(out.latent, out.qual_var, Qualifier::var(nq));
            out.qual_var = nq;
          }
          out.body = subst_qual_in_type(out.body, x, p);
          out.latent = subst_effect(out.latent, x, p);
          return mk_type(std::move(out));
        }
      },
      t->node);
}

QualifiedType subst_qual_in_type(const QualifiedType& q, const std::string& x,
                                 const Qualifier& p) {
  return QualifiedType{subst_qual_in_type(q.type, x, p),
                       subst_qualifier(q.qual, x, p)};
}

namespace {

TypePtr subst_type_rec(const TypePtr& t, const std::string& type_var,
                       const std::string& qual_var, const QualifiedType& arg) {
  if (!t) return t;
  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnitType> ||
                      std::is_same_v<T, IntType> ||
                      std::is_same_v<T, TopType>) {
          return t;
        } else if constexpr (std::is_same_v<T, TypeVarType>) {
          return n.name == type_var ? arg.type : t;
        } else if constexpr (std::is_same_v<T, RefType>) {
          QualifiedType ref = n.referent;
          ref.type = subst_type_rec(ref.type, type_var, qual_var, arg);
          ref.qual = subst_qualifier(ref.qual, qual_var, arg.qual);
          return make_ref_type(std::move(ref));
        } else if constexpr (std::is_same_v<T, FunType>) {
          FunType out = n;
          out.domain.type =
              subst_type_rec(out.domain.type, type_var, qual_var, arg);
          out.domain.qual = subst_qualifier(out.domain.qual, qual_var, arg.qual);
          if (out.self != qual_var && out.param != qual_var) {
            out.codomain.type =
                subst_type_rec(out.codomain.type, type_var, qual_var, arg);
            out.codomain.qual =
                subst_qualifier(out.codomain.qual, qual_var, arg.qual);
            out.latent = subst_effect(out.latent, qual_var, arg.qual);
          } else {
            out.codomain.type =
                subst_type_rec(out.codomain.type, type_var, qual_var, arg);
          }
          return mk_type(std::move(out));
        } else {
          static_assert(std::is_same_v<T, AllType>);
          AllType out = n;
          out.bound.type =
              subst_type_rec(out.bound.type, type_var, qual_var, arg);
          out.bound.qual = subst_qualifier(out.bound.qual, qual_var, arg.qual);
          bool shadow_type = out.type_var == type_var;
          bool shadow_qual =
              out.qual_var == qual_var || out.self == qual_var;
          if (!shadow_type) {
            out.body.type =
                subst_type_rec(out.body.type, type_var, qual_var, arg);
          }
          if (!shadow_qual) {
            out.body.qual = subst_qualifier(out.body.qual, qual_var, arg.qual);
            out.latent = subst_effect(out.latent, qual_var, arg.qual);
          }
          return mk_type(std::move(out));
        }
      },
      t->node);
}

}  // namespace

QualifiedType subst_type(const QualifiedType& q, const std::string& type_var,
                         const std::string& qual_var,
                         const QualifiedType& arg) {
  // When the carrier is exactly the instantiated variable, the argument's
  // qualifier flows into the occurrence's qualifier through qual_var.
  QualifiedType out;
  out.type = subst_type_rec(q.type, type_var, qual_var, arg);
  out.qual = subst_qualifier(q.qual, qual_var, arg.qual);
  return out;
}

// ---------------------------------------------------------------------------
// Term substitution
// ---------------------------------------------------------------------------

namespace {

TermPtr rename_term_var(const TermPtr& t, const std::string& from,
                        const std::string& to) {
  return subst_term(t, from, make_var(to), Qualifier::var(to));
}

}  // namespace

TermPtr subst_term(const TermPtr& t, const std::string& x, const TermPtr& v,
                   const Qualifier& vq) {
  if (!t) return t;
  const Span s = t->span;
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnitLit> || std::is_same_v<T, IntLit> ||
                      std::is_same_v<T, Loc>) {
          return t;
        } else if constexpr (std::is_same_v<T, Var>) {
          return n.name == x ? v : t;
        } else if constexpr (std::is_same_v<T, Abs>) {
          Abs out = n;
          out.domain = subst_qual_in_type(out.domain, x, vq);
          if (out.self == x || out.param == x) return mk_term(std::move(out), s);
          AtomSet fv = free_atoms(v);
          fv.insert_all(vq.atoms);
          if (fv.contains(Atom::var(out.self))) {
            std::string ns = out.self + "'";
            while (fv.contains(Atom::var(ns)) || ns == out.param || ns == x)
              ns += "'";
            out.body = rename_term_var(out.body, out.self, ns);
            if (out.latent) *out.latent =
                subst_effect(*out.latent, out.self, Qualifier::var(ns));
            out.self = ns;
          }
          if (fv.contains(Atom::var(out.param))) {
            std::string np = out.param + "'";
            while (fv.contains(Atom::var(np)) || np == out.self || np == x)
              np += "'";
            out.body = rename_term_var(out.body, out.param, np);
            if (out.latent) *out.latent =
                subst_effect(*out.latent, out.param, Qualifier::var(np));
            out.param = np;
          }
          if (out.capture) *out.capture = subst_qualifier(*out.capture, x, vq);
          if (out.latent) *out.latent = subst_effect(*out.latent, x, vq);
          out.body = subst_term(out.body, x, v, vq);
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, App>) {
          return make_app(subst_term(n.fn, x, v, vq),
                          subst_term(n.arg, x, v, vq), s);
        } else if constexpr (std::is_same_v<T, RefNew>) {
          RefNew out = n;
          out.init = subst_term(n.init, x, v, vq);
          if (out.referent)
            *out.referent = subst_qualifier(*out.referent, x, vq);
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, Deref>) {
          return make_deref(subst_term(n.ref, x, v, vq), s);
        } else if constexpr (std::is_same_v<T, Assign>) {
          return make_assign(subst_term(n.target, x, v, vq),
                             subst_term(n.value, x, v, vq), s);
        } else if constexpr (std::is_same_v<T, TAbs>) {
          TAbs out = n;
          out.bound = subst_qual_in_type(out.bound, x, vq);
          if (out.self == x || out.qual_var == x)
            return mk_term(std::move(out), s);
          AtomSet fv = free_atoms(v);
          fv.insert_all(vq.atoms);
          if (fv.contains(Atom::var(out.self))) {
            std::string ns = out.self + "'";
            while (fv.contains(Atom::var(ns)) || ns == out.qual_var || ns == x)
              ns += "'";
            out.body = rename_term_var(out.body, out.self, ns);
            out.self = ns;
          }
          if (out.capture) *out.capture = subst_qualifier(*out.capture, x, vq);
          if (out.latent) *out.latent = subst_effect(*out.latent, x, vq);
          out.body = subst_term(out.body, x, v, vq);
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, TApp>) {
          TApp out = n;
          out.fn = subst_term(n.fn, x, v, vq);
          out.arg = subst_qual_in_type(n.arg, x, vq);
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, Free>) {
          return make_free(subst_term(n.ref, x, v, vq), s);
        } else if constexpr (std::is_same_v<T, Move>) {
          return make_move(subst_term(n.ref, x, v, vq), s);
        } else {
          static_assert(std::is_same_v<T, Let>);
          Let out = n;
          out.bound = subst_term(n.bound, x, v, vq);
          if (out.name == x) return mk_term(std::move(out), s);
          AtomSet fv = free_atoms(v);
          fv.insert_all(vq.atoms);
          if (fv.contains(Atom::var(out.name))) {
            std::string nn = out.name + "'";
            while (fv.contains(Atom::var(nn)) || nn == x) nn += "'";
            out.body = rename_term_var(out.body, out.name, nn);
            out.name = nn;
          }
          out.body = subst_term(out.body, x, v, vq);
          return mk_term(std::move(out), s);
        }
      },
      t->node);
}

TermPtr subst_type_in_term(const TermPtr& t, const std::string& type_var,
                           const std::string& qual_var,
                           const QualifiedType& arg) {
  if (!t) return t;
  const Span s = t->span;
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnitLit> || std::is_same_v<T, IntLit> ||
                      std::is_same_v<T, Var> || std::is_same_v<T, Loc>) {
          return t;
        } else if constexpr (std::is_same_v<T, Abs>) {
          Abs out = n;
          out.domain = subst_type(out.domain, type_var, qual_var, arg);
          if (out.self != qual_var && out.param != qual_var) {
            if (out.capture)
              *out.capture = subst_qualifier(*out.capture, qual_var, arg.qual);
            if (out.latent)
              *out.latent = subst_effect(*out.latent, qual_var, arg.qual);
            out.body = subst_type_in_term(out.body, type_var, qual_var, arg);
          }
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, App>) {
          return make_app(subst_type_in_term(n.fn, type_var, qual_var, arg),
                          subst_type_in_term(n.arg, type_var, qual_var, arg),
                          s);
        } else if constexpr (std::is_same_v<T, RefNew>) {
          RefNew out = n;
          out.init = subst_type_in_term(n.init, type_var, qual_var, arg);
          if (out.referent)
            *out.referent = subst_qualifier(*out.referent, qual_var, arg.qual);
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, Deref>) {
          return make_deref(subst_type_in_term(n.ref, type_var, qual_var, arg),
                            s);
        } else if constexpr (std::is_same_v<T, Assign>) {
          return make_assign(
              subst_type_in_term(n.target, type_var, qual_var, arg),
              subst_type_in_term(n.value, type_var, qual_var, arg), s);
        } else if constexpr (std::is_same_v<T, TAbs>) {
          TAbs out = n;
          out.bound = subst_type(out.bound, type_var, qual_var, arg);
          if (out.type_var != type_var && out.qual_var != qual_var &&
              out.self != qual_var) {
            if (out.capture)
              *out.capture = subst_qualifier(*out.capture, qual_var, arg.qual);
            if (out.latent)
              *out.latent = subst_effect(*out.latent, qual_var, arg.qual);
            out.body = subst_type_in_term(out.body, type_var, qual_var, arg);
          }
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, TApp>) {
          TApp out = n;
          out.fn = subst_type_in_term(n.fn, type_var, qual_var, arg);
          out.arg = subst_type(n.arg, type_var, qual_var, arg);
          return mk_term(std::move(out), s);
        } else if constexpr (std::is_same_v<T, Free>) {
          return make_free(subst_type_in_term(n.ref, type_var, qual_var, arg),
                           s);
        } else if constexpr (std::is_same_v<T, Move>) {
          return make_move(subst_type_in_term(n.ref, type_var, qual_var, arg),
                           s);
        } else {
          static_assert(std::is_same_v<T, Let>);
          return make_let(n.name,
                          subst_type_in_term(n.bound, type_var, qual_var, arg),
                          subst_type_in_term(n.body, type_var, qual_var, arg),
                          s);
        }
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Free names
// ---------------------------------------------------------------------------

namespace {

void collect_type_atoms(const TypePtr& t, AtomSet& out,
                        std::vector<std::string>& bound);

void collect_qual_atoms(const Qualifier& q, AtomSet& out,
                        const std::vector<std::string>& bound) {
  for (const auto& a : q.atoms) {
    if (a.is_var() &&
        std::find(bound.begin(), bound.end(), a.name()) != bound.end())
      continue;
    out.insert(a);
  }
}

void collect_effect_atoms(const Effect& e, AtomSet& out,
                          const std::vector<std::string>& bound) {
  collect_qual_atoms(Qualifier{e.use, false}, out, bound);
  collect_qual_atoms(Qualifier{e.kill, false}, out, bound);
}

void collect_type_atoms(const QualifiedType& q, AtomSet& out,
                        std::vector<std::string>& bound) {
  collect_type_atoms(q.type, out, bound);
  collect_qual_atoms(q.qual, out, bound);
}

void collect_type_atoms(const TypePtr& t, AtomSet& out,
                        std::vector<std::string>& bound) {
  if (!t) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, RefType>) {
          collect_type_atoms(n.referent, out, bound);
        } else if constexpr (std::is_same_v<T, FunType>) {
          collect_type_atoms(n.domain, out, bound);
          bound.push_back(n.self);
          bound.push_back(n.param);
          collect_type_atoms(n.codomain, out, bound);
          collect_effect_atoms(n.latent, out, bound);
          bound.pop_back();
          bound.pop_back();
        } else if constexpr (std::is_same_v<T, AllType>) {
          collect_type_atoms(n.bound, out, bound);
          bound.push_back(n.self);
          bound.push_back(n.qual_var);
          collect_type_atoms(n.body, out, bound);
          collect_effect_atoms(n.latent, out, bound);
          bound.pop_back();
          bound.pop_back();
        }
      },
      t->node);
}

void collect_term_atoms(const TermPtr& t, AtomSet& out,
                        std::vector<std::string>& bound) {
  if (!t) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          if (std::find(bound.begin(), bound.end(), n.name) == bound.end())
            out.insert(Atom::var(n.name));
        } else if constexpr (std::is_same_v<T, Loc>) {
          out.insert(Atom::loc(n.index));
        } else if constexpr (std::is_same_v<T, Abs>) {
          collect_type_atoms(n.domain, out, bound);
          if (n.capture) collect_qual_atoms(*n.capture, out, bound);
          bound.push_back(n.self);
          bound.push_back(n.param);
          if (n.latent) collect_effect_atoms(*n.latent, out, bound);
          collect_term_atoms(n.body, out, bound);
          bound.pop_back();
          bound.pop_back();
        } else if constexpr (std::is_same_v<T, App>) {
          collect_term_atoms(n.fn, out, bound);
          collect_term_atoms(n.arg, out, bound);
        } else if constexpr (std::is_same_v<T, RefNew>) {
          collect_term_atoms(n.init, out, bound);
          if (n.referent) collect_qual_atoms(*n.referent, out, bound);
        } else if constexpr (std::is_same_v<T, Deref>) {
          collect_term_atoms(n.ref, out, bound);
        } else if constexpr (std::is_same_v<T, Assign>) {
          collect_term_atoms(n.target, out, bound);
          collect_term_atoms(n.value, out, bound);
        } else if constexpr (std::is_same_v<T, TAbs>) {
          collect_type_atoms(n.bound, out, bound);
          if (n.capture) collect_qual_atoms(*n.capture, out, bound);
          bound.push_back(n.self);
          bound.push_back(n.qual_var);
          if (n.latent) collect_effect_atoms(*n.latent, out, bound);
          collect_term_atoms(n.body, out, bound);
          bound.pop_back();
          bound.pop_back();
        } else if constexpr (std::is_same_v<T, TApp>) {
          collect_term_atoms(n.fn, out, bound);
          auto arg = n.arg;
          collect_type_atoms(arg, out, bound);
        } else if constexpr (std::is_same_v<T, Free>) {
          collect_term_atoms(n.ref, out, bound);
        } else if constexpr (std::is_same_v<T, Move>) {
          collect_term_atoms(n.ref, out, bound);
        } else if constexpr (std::is_same_v<T, Let>) {
          collect_term_atoms(n.bound, out, bound);
          bound.push_back(n.name);
          collect_term_atoms(n.body, out, bound);
          bound.pop_back();
        }
      },
      t->node);
}

void collect_type_vars(const TypePtr& t, AtomSet& out,
                       std::vector<std::string>& bound) {
  if (!t) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TypeVarType>) {
          if (std::find(bound.begin(), bound.end(), n.name) == bound.end())
            out.insert(Atom::var(n.name));
        } else if constexpr (std::is_same_v<T, RefType>) {
          collect_type_vars(n.referent.type, out, bound);
        } else if constexpr (std::is_same_v<T, FunType>) {
          collect_type_vars(n.domain.type, out, bound);
          collect_type_vars(n.codomain.type, out, bound);
        } else if constexpr (std::is_same_v<T, AllType>) {
          collect_type_vars(n.bound.type, out, bound);
          bound.push_back(n.type_var);
          collect_type_vars(n.body.type, out, bound);
          bound.pop_back();
        }
      },
      t->node);
}

}  // namespace

AtomSet free_atoms(const TermPtr& t) {
  AtomSet out;
  std::vector<std::string> bound;
  collect_term_atoms(t, out, bound);
  return out;
}

AtomSet free_atoms_of_type(const TypePtr& t) {
  AtomSet out;
  std::vector<std::string> bound;
  collect_type_atoms(t, out, bound);
  return out;
}

AtomSet free_atoms_of_type(const QualifiedType& q) {
  AtomSet out;
  std::vector<std::string> bound;
  collect_type_atoms(q, out, bound);
  return out;
}

AtomSet free_type_vars(const TypePtr& t) {
  AtomSet out;
  std::vector<std::string> bound;
  collect_type_vars(t, out, bound);
  return out;
}

AtomSet free_type_vars(const QualifiedType& q) {
  return free_type_vars(q.type);
}

AtomSet free_locations(const TermPtr& t) {
  AtomSet all = free_atoms(t);
  AtomSet out;
  for (const auto& a : all)
    if (a.is_loc()) out.insert(a);
  return out;
}

}  // namespace rtfx
