#include "rtfx/subtyping.hpp"

namespace rtfx {

namespace {

// Renames a function's binders so both sides of a comparison use the same
// names before the bodies are related.
FunType align_fun(const FunType& f, const std::string& self,
                  const std::string& param) {
  FunType out = f;
  if (f.self != self) {
    out.codomain = subst_qual_in_type(out.codomain, f.self,
                                      Qualifier::var(self));
    out.latent = subst_effect(out.latent, f.self, Qualifier::var(self));
    out.self = self;
  }
  if (f.param != param) {
    out.codomain = subst_qual_in_type(out.codomain, f.param,
                                      Qualifier::var(param));
    out.latent = subst_effect(out.latent, f.param, Qualifier::var(param));
    out.param = param;
  }
  return out;
}

AllType align_all(const AllType& a, const std::string& self,
                  const std::string& type_var, const std::string& qual_var) {
  AllType out = a;
  if (a.self != self) {
    out.body = subst_qual_in_type(out.body, a.self, Qualifier::var(self));
    out.latent = subst_effect(out.latent, a.self, Qualifier::var(self));
    out.self = self;
  }
  if (a.qual_var != qual_var) {
    out.body = subst_qual_in_type(out.body, a.qual_var,
                                  Qualifier::var(qual_var));
    out.latent = subst_effect(out.latent, a.qual_var, Qualifier::var(qual_var));
    out.qual_var = qual_var;
  }
  if (a.type_var != type_var) {
    // Only the carrier mentions the type variable; the bound is outside the
    // binder's scope.
    QualifiedType replacement{make_type_var(type_var), Qualifier{}};
    out.body.type = subst_type(out.body, a.type_var, "", replacement).type;
    out.type_var = type_var;
  }
  return out;
}

}  // namespace

bool sub_type(const TypeEnv& env, const StoreTyping* store, const TypePtr& s,
              const TypePtr& t) {
  if (!s || !t) return false;
  if (std::holds_alternative<TopType>(t->node)) return true;

  if (const auto* sv = std::get_if<TypeVarType>(&s->node)) {
    if (const auto* tv = std::get_if<TypeVarType>(&t->node))
      if (sv->name == tv->name) return true;
    const TypeBinding* tb = env.lookup_type_var(sv->name);
    if (!tb) throw IllFormedTypeError("unbound type variable: " + sv->name);
    return sub_type(env, store, tb->bound.type, t);
  }
  if (std::holds_alternative<TypeVarType>(t->node)) return false;

  if (std::holds_alternative<UnitType>(s->node))
    return std::holds_alternative<UnitType>(t->node);
  if (std::holds_alternative<IntType>(s->node))
    return std::holds_alternative<IntType>(t->node);
  if (std::holds_alternative<TopType>(s->node)) return false;

  if (const auto* rs = std::get_if<RefType>(&s->node)) {
    const auto* rt = std::get_if<RefType>(&t->node);
    if (!rt) return false;
    // Invariant payload, one referent qualifier for both sides.
    if (!(rs->referent.qual == rt->referent.qual)) return false;
    ReachGraph g(&env, store);
    for (const auto& a : rs->referent.qual.atoms)
      if (!g.bound(a)) return false;
    return sub_type(env, store, rs->referent.type, rt->referent.type) &&
           sub_type(env, store, rt->referent.type, rs->referent.type);
  }

  if (const auto* fs = std::get_if<FunType>(&s->node)) {
    const auto* ft = std::get_if<FunType>(&t->node);
    if (!ft) return false;
    AtomSet avoid = free_atoms_of_type(s).unioned(free_atoms_of_type(t));
    std::string self = env.fresh_name(fs->self, avoid);
    avoid.insert(Atom::var(self));
    std::string param = env.fresh_name(fs->param, avoid);
    FunType lhs = align_fun(*fs, self, param);
    FunType rhs = align_fun(*ft, self, param);
    if (!sub_qualified(env, store, rhs.domain, lhs.domain)) return false;
    TypeEnv inner =
        env.with_term(self, QualifiedType{s, Qualifier{{}, true}})
            .with_term(param, rhs.domain);
    return sub_qualified_eff(inner, store, lhs.codomain, lhs.latent,
                             rhs.codomain, rhs.latent);
  }

  if (const auto* as = std::get_if<AllType>(&s->node)) {
    const auto* at = std::get_if<AllType>(&t->node);
    if (!at) return false;
    AtomSet avoid = free_atoms_of_type(s).unioned(free_atoms_of_type(t));
    std::string self = env.fresh_name(as->self, avoid);
    avoid.insert(Atom::var(self));
    std::string qvar = env.fresh_name(as->qual_var, avoid);
    std::string tvar = as->type_var;
    AllType lhs = align_all(*as, self, tvar, qvar);
    AllType rhs = align_all(*at, self, tvar, qvar);
    if (!sub_qualified(env, store, rhs.bound, lhs.bound)) return false;
    TypeEnv inner = env.with_term(self, QualifiedType{s, Qualifier{{}, true}})
                        .with_type(tvar, qvar, rhs.bound);
    return sub_qualified_eff(inner, store, lhs.body, lhs.latent, rhs.body,
                             rhs.latent);
  }

  return false;
}

bool sub_qualified(const TypeEnv& env, const StoreTyping* store,
                   const QualifiedType& p, const QualifiedType& q) {
  if (!sub_type(env, store, p.type, q.type)) return false;
  ReachGraph g(&env, store);
  return sub_qualifier(g, p.qual, q.qual);
}

bool sub_qualified_eff(const TypeEnv& env, const StoreTyping* store,
                       const QualifiedType& p, const Effect& e1,
                       const QualifiedType& q, const Effect& e2) {
  if (!sub_qualified(env, store, p, q)) return false;
  ReachGraph g(&env, store);
  return effect_sub(g, e1, e2);
}

}  // namespace rtfx
