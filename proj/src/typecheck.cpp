#include "rtfx/typecheck.hpp"

#include "rtfx/pretty.hpp"

namespace rtfx {

std::string code_name(Code c) {
  switch (c) {
    case Code::Unbound: return "E-UNBOUND";
    case Code::Obs: return "E-OBS";
    case Code::QualMismatch: return "E-QUAL-MISMATCH";
    case Code::QualSub: return "E-QUAL-SUB";
    case Code::Separation: return "E-SEPARATION";
    case Code::UseAfterKill: return "E-USE-AFTER-KILL";
    case Code::FreshEscapeKill: return "E-FRESH-ESCAPE-KILL";
    case Code::RefFresh: return "E-REF-FRESH";
    case Code::TypeMismatch: return "E-TYPE-MISMATCH";
  }
  return "E-UNKNOWN";
}

std::optional<Code> code_from_name(const std::string& name) {
  for (Code c : {Code::Unbound, Code::Obs, Code::QualMismatch, Code::QualSub,
                 Code::Separation, Code::UseAfterKill, Code::FreshEscapeKill,
                 Code::RefFresh, Code::TypeMismatch})
    if (code_name(c) == name) return c;
  return std::nullopt;
}

std::string Diagnostic::render() const {
  return code_name(code) + " " + std::to_string(span.line) + ":" +
         std::to_string(span.col) + " " + message;
}

namespace {

struct DiagError {
  Diagnostic diagnostic;
};

[[noreturn]] void fail(Code code, Span span, std::string message,
                       AtomSet witness = {}) {
  throw DiagError{
      Diagnostic{code, span, std::move(message), std::move(witness)}};
}

class Infer {
 public:
  explicit Infer(const StoreTyping* store) : store_(store) {}

  InferResult go(const TypeEnv& env, const Observation& obs,
                 const TermPtr& t) {
    return std::visit(
        [&](const auto& n) -> InferResult {
          return this->rule(env, obs, t->span, n);
        },
        t->node);
  }

 private:
  const StoreTyping* store_;

  ReachGraph graph(const TypeEnv& env) const {
    return ReachGraph(&env, store_);
  }

  Effect compose(const TypeEnv& env, const Effect& e1, const Effect& e2,
                 Span blame) const {
    ComposeResult r = seq_compose(graph(env), e1, e2);
    if (const auto* f = std::get_if<ComposeFailure>(&r))
      fail(Code::UseAfterKill, blame,
           "use of killed resource " + print_atom_set(f->conflicting),
           f->conflicting);
    return std::get<Effect>(r);
  }

  // Resolves a carrier to a reference/function/universal shape, reading
  // type-variable bounds from the environment.
  template <typename Shape>
  const Shape* resolve(const TypeEnv& env, TypePtr t) const {
    for (int depth = 0; t && depth < 64; ++depth) {
      if (const auto* s = std::get_if<Shape>(&t->node)) return s;
      const auto* tv = std::get_if<TypeVarType>(&t->node);
      if (!tv) return nullptr;
      const TypeBinding* tb = env.lookup_type_var(tv->name);
      if (!tb) return nullptr;
      t = tb->bound.type;
    }
    return nullptr;
  }

  bool tracked_in(const TypeEnv& env, const Atom& a) const {
    TypePtr carrier;
    if (a.is_loc()) {
      if (!store_ || !store_->contains(a.index())) return false;
      return true;
    }
    if (const auto* tb = env.lookup_term(a.name())) {
      carrier = tb->type.type;
    } else if (const auto* ty = env.lookup_qual_var(a.name())) {
      carrier = ty->bound.type;
    } else {
      return false;
    }
    return !(type_as<UnitType>(carrier) || type_as<IntType>(carrier));
  }

  // Free atoms of `body` that denote tracked resources, minus the binders.
  Qualifier inferred_capture(const TypeEnv& env, const TermPtr& body,
                             std::initializer_list<std::string> binders) const {
    AtomSet fa = free_atoms(body);
    for (const auto& b : binders) fa.erase(Atom::var(b));
    AtomSet out;
    for (const auto& a : fa)
      if (tracked_in(env, a)) out.insert(a);
    return Qualifier{std::move(out), false};
  }

  // -------------------------------------------------------------------------
  // Per-construct rules
  // -------------------------------------------------------------------------

  InferResult rule(const TypeEnv&, const Observation&, Span, const UnitLit&) {
    return {QualifiedType{make_unit_type(), Qualifier{}}, Effect::pure()};
  }

  InferResult rule(const TypeEnv&, const Observation&, Span, const IntLit&) {
    return {QualifiedType{make_int_type(), Qualifier{}}, Effect::pure()};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const Var& n) {
    const TermBinding* tb = env.lookup_term(n.name);
    if (!tb)
      fail(Code::Unbound, span, "unbound variable '" + n.name + "'");
    Atom a = Atom::var(n.name);
    if (!obs.contains(a))
      fail(Code::Obs, span,
           "variable '" + env.display_name(n.name) + "' is not observable",
           AtomSet{a});
    return {QualifiedType{tb->type.type, Qualifier{AtomSet{a}, false}},
            Effect::pure()};
  }

  InferResult rule(const TypeEnv&, const Observation& obs, Span span,
                   const Loc& n) {
    const StoreTyping::Entry* e =
        store_ ? store_->lookup(n.index) : nullptr;
    if (!e)
      fail(Code::Unbound, span,
           "unbound location " + Atom::loc(n.index).to_string());
    Atom a = Atom::loc(n.index);
    if (!obs.contains(a))
      fail(Code::Obs, span, "location " + a.to_string() + " is not observable",
           AtomSet{a});
    return {QualifiedType{make_ref_type(QualifiedType{e->type, e->qual}),
                          Qualifier{AtomSet{a}, false}},
            Effect::pure()};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const RefNew& n) {
    InferResult r = go(env, obs, n.init);
    QualifiedType referent = r.type;
    if (n.referent) {
      if (n.referent->fresh)
        fail(Code::RefFresh, span, "referent annotation must not be fresh");
      AtomSet hidden = n.referent->atoms.minus(obs);
      if (!hidden.empty())
        fail(Code::Obs, span,
             "referent annotation " + print_qualifier(*n.referent) +
                 " is not observable",
             hidden);
      if (!sub_qualifier(graph(env), r.type.qual, *n.referent))
        fail(Code::QualSub, span,
             "initial value qualifier " + print_qualifier(r.type.qual) +
                 " does not fit the referent annotation " +
                 print_qualifier(*n.referent),
             r.type.qual.atoms);
      referent.qual = *n.referent;
    }
    if (referent.qual.fresh)
      fail(Code::RefFresh, span,
           "referent qualifier must not be fresh; bind the value first");
    return {QualifiedType{make_ref_type(referent), Qualifier{{}, true}},
            r.effect};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const Deref& n) {
    InferResult r = go(env, obs, n.ref);
    const RefType* ref = resolve<RefType>(env, r.type.type);
    if (!ref)
      fail(Code::TypeMismatch, n.ref->span,
           "expected a reference, found " + print_type(r.type.type));
    AtomSet hidden = ref->referent.qual.atoms.minus(obs);
    if (!hidden.empty())
      fail(Code::Obs, span,
           "referent qualifier " + print_qualifier(ref->referent.qual) +
               " is not observable",
           hidden);
    Effect eff =
        compose(env, r.effect, make_use(r.type.qual), span);
    return {ref->referent, eff};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const Assign& n) {
    InferResult lhs = go(env, obs, n.target);
    const RefType* ref = resolve<RefType>(env, lhs.type.type);
    if (!ref)
      fail(Code::TypeMismatch, n.target->span,
           "assignment target is not a reference: " +
               print_type(lhs.type.type));
    InferResult rhs = go(env, obs, n.value);
    if (!sub_type(env, store_, rhs.type.type, ref->referent.type))
      fail(Code::TypeMismatch, n.value->span,
           "assigned value type " + print_type(rhs.type.type) +
               " does not match referent type " +
               print_type(ref->referent.type));
    if (!sub_qualifier(graph(env), rhs.type.qual, ref->referent.qual))
      fail(Code::QualMismatch, span,
           "referent qualifier mismatch: " + print_qualifier(rhs.type.qual) +
               " does not fit " + print_qualifier(ref->referent.qual),
           rhs.type.qual.atoms);
    Effect eff = compose(env, lhs.effect, rhs.effect, n.value->span);
    eff = compose(env, eff, make_use(lhs.type.qual), span);
    return {QualifiedType{make_unit_type(), Qualifier{}}, eff};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const Free& n) {
    InferResult r = go(env, obs, n.ref);
    if (!resolve<RefType>(env, r.type.type))
      fail(Code::TypeMismatch, n.ref->span,
           "free expects a reference, found " + print_type(r.type.type));
    Effect eff = compose(env, r.effect, make_kill(r.type.qual), span);
    return {QualifiedType{make_unit_type(), Qualifier{}}, eff};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const Move& n) {
    InferResult r = go(env, obs, n.ref);
    const RefType* ref = resolve<RefType>(env, r.type.type);
    if (!ref)
      fail(Code::TypeMismatch, n.ref->span,
           "move expects a reference, found " + print_type(r.type.type));
    Effect eff = compose(env, r.effect, make_move_effect(r.type.qual), span);
    QualifiedType referent = ref->referent;
    referent.qual.fresh = false;
    return {QualifiedType{make_ref_type(referent), Qualifier{{}, true}}, eff};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const Abs& n) {
    Qualifier capture = inferred_capture(env, n.body, {n.self, n.param});
    if (n.capture) {
      if (n.capture->fresh)
        fail(Code::Obs, span, "capture annotation may not be fresh");
      if (!capture.atoms.subset_of(n.capture->atoms))
        fail(Code::QualSub, span,
             "capture annotation " + print_qualifier(*n.capture) +
                 " does not cover captured resources " +
                 print_qualifier(capture),
             capture.atoms.minus(n.capture->atoms));
      capture = *n.capture;
    }
    AtomSet escaped = capture.atoms.minus(obs);
    if (!escaped.empty())
      fail(Code::Obs, span,
           "captured resources " + print_atom_set(escaped) +
               " are not observable",
           escaped);

    // Freshen binders against the ambient environment. The binders' own
    // occurrences are renamed along, so they are not capturable.
    AtomSet avoid = free_atoms(n.body);
    avoid.erase(Atom::var(n.self));
    avoid.erase(Atom::var(n.param));
    std::string self = env.fresh_name(n.self, avoid);
    TermPtr body = n.body;
    if (self != n.self) {
      body = subst_term(body, n.self, make_var(self), Qualifier::var(self));
    }
    avoid.insert(Atom::var(self));
    std::string param = env.fresh_name(n.param, avoid);
    if (param != n.param) {
      body = subst_term(body, n.param, make_var(param), Qualifier::var(param));
    }

    Observation inner_obs = capture.atoms;
    inner_obs.insert(Atom::var(self));
    inner_obs.insert(Atom::var(param));

    bool self_used = free_atoms(body).contains(Atom::var(self));
    Effect latent = n.latent ? *n.latent : Effect::pure();
    QualifiedType codomain{make_unit_type(), Qualifier{}};
    constexpr int kMaxIters = 4;
    for (int i = 0;; ++i) {
      TypePtr fn_ty =
          make_fun_type(self, param, n.domain, latent, codomain);
      TypeEnv inner = env.with_term(self, QualifiedType{fn_ty, capture},
                                    n.self)
                          .with_term(param, n.domain, n.param);
      InferResult body_r = go(inner, inner_obs, body);
      if (n.latent && !effect_sub(ReachGraph(&inner, store_), body_r.effect,
                                  *n.latent))
        fail(Code::QualSub, span,
             "latent effect annotation " + print_effect(*n.latent) +
                 " does not cover the body's effect " +
                 print_effect(body_r.effect));
      Effect next_latent = n.latent ? *n.latent : body_r.effect;
      if (!self_used || (next_latent == latent && body_r.type == codomain)) {
        latent = next_latent;
        codomain = body_r.type;
        break;
      }
      if (i + 1 >= kMaxIters)
        fail(Code::TypeMismatch, span,
             "recursive function signature did not stabilize");
      latent = next_latent;
      codomain = body_r.type;
    }

    TypePtr fn_ty = make_fun_type(self, param, n.domain, latent, codomain);
    return {QualifiedType{fn_ty, capture}, Effect::pure()};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const TAbs& n) {
    Qualifier capture = inferred_capture(env, n.body, {n.self, n.qual_var});
    if (n.capture) {
      if (n.capture->fresh)
        fail(Code::Obs, span, "capture annotation may not be fresh");
      if (!capture.atoms.subset_of(n.capture->atoms))
        fail(Code::QualSub, span,
             "capture annotation does not cover captured resources",
             capture.atoms.minus(n.capture->atoms));
      capture = *n.capture;
    }
    AtomSet escaped = capture.atoms.minus(obs);
    if (!escaped.empty())
      fail(Code::Obs, span,
           "captured resources " + print_atom_set(escaped) +
               " are not observable",
           escaped);

    AtomSet avoid = free_atoms(n.body);
    avoid.erase(Atom::var(n.self));
    avoid.erase(Atom::var(n.qual_var));
    std::string self = env.fresh_name(n.self, avoid);
    TermPtr body = n.body;
    if (self != n.self)
      body = subst_term(body, n.self, make_var(self), Qualifier::var(self));
    avoid.insert(Atom::var(self));
    std::string qvar = env.fresh_name(n.qual_var, avoid);
    if (qvar != n.qual_var)
      body = subst_term(body, n.qual_var, make_var(qvar),
                        Qualifier::var(qvar));

    Observation inner_obs = capture.atoms;
    inner_obs.insert(Atom::var(self));
    inner_obs.insert(Atom::var(qvar));

    bool self_used = free_atoms(body).contains(Atom::var(self));
    Effect latent = n.latent ? *n.latent : Effect::pure();
    QualifiedType body_ty{make_unit_type(), Qualifier{}};
    constexpr int kMaxIters = 4;
    for (int i = 0;; ++i) {
      TypePtr all_ty = make_all_type(self, n.type_var, qvar, n.bound, latent,
                                     body_ty);
      TypeEnv inner = env.with_term(self, QualifiedType{all_ty, capture},
                                    n.self)
                          .with_type(n.type_var, qvar, n.bound);
      InferResult body_r = go(inner, inner_obs, body);
      if (n.latent && !effect_sub(ReachGraph(&inner, store_), body_r.effect,
                                  *n.latent))
        fail(Code::QualSub, span,
             "latent effect annotation does not cover the body's effect");
      Effect next_latent = n.latent ? *n.latent : body_r.effect;
      if (!self_used || (next_latent == latent && body_r.type == body_ty)) {
        latent = next_latent;
        body_ty = body_r.type;
        break;
      }
      if (i + 1 >= kMaxIters)
        fail(Code::TypeMismatch, span,
             "recursive type abstraction signature did not stabilize");
      latent = next_latent;
      body_ty = body_r.type;
    }

    TypePtr all_ty =
        make_all_type(self, n.type_var, qvar, n.bound, latent, body_ty);
    return {QualifiedType{all_ty, capture}, Effect::pure()};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const App& n) {
    InferResult fn_r = go(env, obs, n.fn);
    const FunType* fn = resolve<FunType>(env, fn_r.type.type);
    if (!fn)
      fail(Code::TypeMismatch, n.fn->span,
           "callee is not a function: " + print_type(fn_r.type.type));
    InferResult arg_r = go(env, obs, n.arg);

    if (auto d = check_app(env, store_, obs, *fn, fn_r.type.qual, arg_r.type,
                           span))
      throw DiagError{*d};

    const Qualifier& p = arg_r.type.qual;
    const Qualifier& q = fn_r.type.qual;
    bool dom_fresh = fn->domain.qual.fresh;
    AtomSet fv_codomain = free_atoms_of_type(fn->codomain.type);
    AtomSet kill_cap_ret =
        fn->latent.kill.intersected(fn->codomain.qual.atoms);

    // A fresh argument or a fresh function must not be both returned and
    // killed by the abstraction.
    if (dom_fresh && p.fresh) {
      Atom x = Atom::var(fn->param);
      if (fv_codomain.contains(x) || kill_cap_ret.contains(x))
        fail(Code::FreshEscapeKill, span,
             "fresh argument '" + fn->param +
                 "' must not be both returned and killed",
             AtomSet{x});
    }
    if (q.fresh) {
      Atom f = Atom::var(fn->self);
      bool bad = kill_cap_ret.contains(f) ||
                 (dom_fresh && fv_codomain.contains(f));
      if (bad)
        fail(Code::FreshEscapeKill, span,
             "fresh function '" + fn->self +
                 "' must not be both returned and killed",
             AtomSet{f});
    }

    // r ⊆ fresh, filter, parameter, self
    AtomSet allowed = obs;
    allowed.insert(Atom::var(fn->param));
    allowed.insert(Atom::var(fn->self));
    AtomSet stray = fn->codomain.qual.atoms.minus(allowed);
    if (!stray.empty())
      fail(Code::Obs, span,
           "result qualifier mentions unobservable resources " +
               print_atom_set(stray),
           stray);

    Qualifier x_qual = dom_fresh ? p : fn->domain.qual;
    QualifiedType result = subst_qual_in_type(fn->codomain, fn->param, x_qual);
    result = subst_qual_in_type(result, fn->self, q);
    Effect latent = subst_effect(fn->latent, fn->param, x_qual);
    latent = subst_effect(latent, fn->self, q);

    Effect eff = compose(env, fn_r.effect, arg_r.effect, n.arg->span);
    eff = compose(env, eff, latent, span);
    return {result, eff};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const TApp& n) {
    InferResult fn_r = go(env, obs, n.fn);
    const AllType* fn = resolve<AllType>(env, fn_r.type.type);
    if (!fn)
      fail(Code::TypeMismatch, n.fn->span,
           "callee is not a type abstraction: " + print_type(fn_r.type.type));

    // Type argument well-formedness in the ambient environment.
    ReachGraph g = graph(env);
    for (const auto& a : free_atoms_of_type(n.arg))
      if (!g.bound(a))
        fail(Code::Unbound, span,
             "type argument mentions unbound name " + a.to_string(),
             AtomSet{a});
    for (const auto& tv : free_type_vars(n.arg))
      if (!env.binds_type_var(tv.name()))
        fail(Code::Unbound, span,
             "type argument mentions unbound type variable " + tv.name());

    AtomSet hidden = n.arg.qual.atoms.minus(obs);
    if (!hidden.empty())
      fail(Code::Obs, span,
           "type argument qualifier " + print_qualifier(n.arg.qual) +
               " is not observable",
           hidden);

    const QualifiedType& bound = fn->bound;
    AtomSet fv_body = free_atoms_of_type(fn->body.type);
    if (bound.qual.fresh) {
      if (!sub_type(env, store_, n.arg.type, bound.type))
        fail(Code::TypeMismatch, span,
             "type argument " + print_type(n.arg.type) +
                 " does not match the bound " + print_type(bound.type));
      Qualifier ov = overlap(g, n.arg.qual, fn_r.type.qual);
      if (!sub_qualifier(g, Qualifier{ov.atoms, false}, bound.qual))
        fail(Code::Separation, span,
             "type argument overlaps with the abstraction's reachable set " +
                 print_atom_set(ov.atoms),
             ov.atoms);
      if (n.arg.qual.fresh && fv_body.contains(Atom::var(fn->qual_var)))
        fail(Code::FreshEscapeKill, span,
             "fresh type argument qualifier escapes in the result");
    } else {
      if (n.arg.qual.fresh)
        fail(Code::QualSub, span,
             "fresh type argument passed to a non-fresh bound");
      if (!sub_type(env, store_, n.arg.type, bound.type))
        fail(Code::TypeMismatch, span,
             "type argument " + print_type(n.arg.type) +
                 " does not match the bound " + print_type(bound.type));
      if (!sub_qualifier(g, n.arg.qual, bound.qual))
        fail(Code::QualSub, span,
             "type argument qualifier " + print_qualifier(n.arg.qual) +
                 " does not fit the bound " + print_qualifier(bound.qual),
             n.arg.qual.atoms);
    }
    if (fv_body.contains(Atom::var(fn->self)))
      fail(Code::FreshEscapeKill, span,
           "abstraction self name escapes in the result carrier");

    AtomSet allowed = obs;
    allowed.insert(Atom::var(fn->qual_var));
    allowed.insert(Atom::var(fn->self));
    AtomSet stray = fn->body.qual.atoms.minus(allowed);
    if (!stray.empty())
      fail(Code::Obs, span,
           "result qualifier mentions unobservable resources " +
               print_atom_set(stray),
           stray);

    Qualifier x_qual = bound.qual.fresh ? n.arg.qual : bound.qual;
    QualifiedType result =
        subst_type(fn->body, fn->type_var, fn->qual_var,
                   QualifiedType{n.arg.type, x_qual});
    result = subst_qual_in_type(result, fn->self, fn_r.type.qual);
    Effect latent = subst_effect(fn->latent, fn->qual_var, x_qual);
    latent = subst_effect(latent, fn->self, fn_r.type.qual);

    Effect eff = compose(env, fn_r.effect, latent, span);
    return {result, eff};
  }

  InferResult rule(const TypeEnv& env, const Observation& obs, Span span,
                   const Let& n) {
    (void)span;
    InferResult bound_r = go(env, obs, n.bound);

    AtomSet avoid = free_atoms(n.body);
    avoid.erase(Atom::var(n.name));
    std::string name = env.fresh_name(n.name, avoid);
    TermPtr body = n.body;
    if (name != n.name)
      body = subst_term(body, n.name, make_var(name), Qualifier::var(name));

    TypeEnv inner = env.with_term(name, bound_r.type, n.name);
    Observation inner_obs = obs;
    inner_obs.insert(Atom::var(name));
    InferResult body_r = go(inner, inner_obs, body);

    if (bound_r.type.qual.fresh) {
      Atom x = Atom::var(name);
      AtomSet fv = free_atoms_of_type(body_r.type.type);
      AtomSet kill_cap_ret =
          body_r.effect.kill.intersected(body_r.type.qual.atoms);
      if (fv.contains(x) || kill_cap_ret.contains(x))
        fail(Code::FreshEscapeKill, n.body->span,
             "fresh binding '" + n.name +
                 "' must not be both returned and killed",
             AtomSet{x});
    }

    QualifiedType result =
        subst_qual_in_type(body_r.type, name, bound_r.type.qual);
    Effect body_eff = subst_effect(body_r.effect, name, bound_r.type.qual);
    Effect eff = compose(env, bound_r.effect, body_eff, n.body->span);
    return {result, eff};
  }
};

}  // namespace

std::optional<Diagnostic> check_app(const TypeEnv& env,
                                    const StoreTyping* store,
                                    const Observation& obs, const FunType& fn,
                                    const Qualifier& fn_qual,
                                    const QualifiedType& arg, Span site) {
  ReachGraph g(&env, store);
  const QualifiedType& domain = fn.domain;
  try {
    AtomSet hidden = domain.qual.atoms.minus(obs);
    if (!hidden.empty())
      return Diagnostic{Code::Obs, site,
                        "parameter qualifier " + print_qualifier(domain.qual) +
                            " is not observable",
                        hidden};
    if (!sub_type(env, store, arg.type, domain.type))
      return Diagnostic{Code::TypeMismatch, site,
                        "argument type " + print_type(arg.type) +
                            " does not match parameter type " +
                            print_type(domain.type),
                        {}};
    if (domain.qual.fresh) {
      // Overlap path: the observable sharing between argument and function
      // must be within the declared parameter qualifier.
      Qualifier ov = overlap(g, arg.qual, fn_qual);
      if (!sub_qualifier(g, Qualifier{ov.atoms, false}, domain.qual))
        return Diagnostic{Code::Separation, site,
                          "argument overlaps with the function's reachable "
                          "set: " +
                              print_atom_set(ov.atoms),
                          ov.atoms};
    } else {
      if (arg.qual.fresh)
        return Diagnostic{Code::QualSub, site,
                          "fresh argument passed to a non-fresh parameter",
                          arg.qual.atoms};
      if (!sub_qualifier(g, arg.qual, domain.qual))
        return Diagnostic{Code::QualSub, site,
                          "argument qualifier " + print_qualifier(arg.qual) +
                              " does not fit parameter qualifier " +
                              print_qualifier(domain.qual),
                          arg.qual.atoms};
    }
  } catch (const UnboundAtomError& e) {
    return Diagnostic{Code::Unbound, site, e.what(), AtomSet{e.atom}};
  }
  return std::nullopt;
}

Verdict infer(const TypeEnv& env, const Observation& obs, const TermPtr& term,
              const StoreTyping* store) {
  try {
    Infer checker(store);
    return Verdict::success(checker.go(env, obs, term));
  } catch (const DiagError& e) {
    return Verdict::failure(e.diagnostic);
  } catch (const UnboundAtomError& e) {
    return Verdict::failure(Diagnostic{Code::Unbound, term->span, e.what(),
                                       AtomSet{e.atom}});
  } catch (const IllFormedTypeError& e) {
    return Verdict::failure(
        Diagnostic{Code::TypeMismatch, term->span, e.what(), {}});
  }
}

Verdict check_program(const TermPtr& term) {
  return infer(TypeEnv{}, Observation{}, term, nullptr);
}

}  // namespace rtfx
