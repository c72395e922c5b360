#include "rtfx/soundness.hpp"

#include <random>

#include "rtfx/pretty.hpp"
#include "rtfx/subtyping.hpp"

namespace rtfx {

bool store_typing_well_formed(const StoreTyping& sigma) {
  AtomSet earlier;
  for (const auto& e : sigma.entries()) {
    if (earlier.contains(Atom::loc(e.loc))) return false;
    if (e.qual.fresh) return false;
    if (!e.qual.atoms.subset_of(earlier)) return false;
    AtomSet fv = free_atoms_of_type(e.type);
    for (const auto& a : fv) {
      if (a.is_var()) return false;
      if (!earlier.contains(a)) return false;
    }
    if (!free_type_vars(e.type).empty()) return false;
    earlier.insert(Atom::loc(e.loc));
  }
  return true;
}

bool check_store(const StoreTyping& sigma, const Store& store,
                 const KillSet& kills) {
  if (!store.dom().subset_of(sigma.dom())) return false;
  if (!kills.subset_of(sigma.dom())) return false;
  TypeEnv empty;
  Observation obs = sigma.dom();
  for (const auto& e : sigma.entries()) {
    Atom a = Atom::loc(e.loc);
    if (kills.contains(a)) {
      if (!store.contains(e.loc) || store.live(e.loc)) return false;
      continue;
    }
    if (!store.live(e.loc)) return false;
    Verdict v = infer(empty, obs, store.value(e.loc), &sigma);
    if (!v.ok()) return false;
    if (!sub_qualified(empty, &sigma, v.result().type,
                       QualifiedType{e.type, e.qual}))
      return false;
  }
  return true;
}

ConfigReport check_config(const StoreTyping& sigma, const KillSet& kills,
                          const Store& store, const TermPtr& term) {
  ConfigReport report;
  report.store_well_typed = store_typing_well_formed(sigma) &&
                            check_store(sigma, store, kills);
  if (!report.store_well_typed)
    report.failures.push_back(Diagnostic{
        Code::TypeMismatch, term ? term->span : Span{},
        "store does not agree with its typing", {}});

  TypeEnv empty;
  Observation obs = sigma.dom();
  Verdict v = infer(empty, obs, term, &sigma);
  report.term_well_typed = v.ok();
  if (!v.ok()) {
    report.failures.push_back(v.diagnostic());
    report.kill_composition_defined = false;
    return report;
  }
  report.residual_type = v.result().type;
  report.residual_effect = v.result().effect;

  ReachGraph g(&empty, &sigma);
  ComposeResult c =
      seq_compose(g, make_kill(Qualifier{kills, false}), v.result().effect);
  report.kill_composition_defined = compose_ok(c);
  if (!report.kill_composition_defined) {
    const auto& f = std::get<ComposeFailure>(c);
    report.failures.push_back(Diagnostic{
        Code::UseAfterKill, term->span,
        "residual effect uses killed locations " +
            print_atom_set(f.conflicting),
        f.conflicting});
  }
  return report;
}

namespace {

// Reads the locations killed by a step off its trace events.
AtomSet killed_by(const std::vector<TraceEvent>& events) {
  AtomSet out;
  for (const auto& e : events) {
    if (const auto* k = std::get_if<KillEvent>(&e)) out.insert(Atom::loc(k->loc));
    if (const auto* m = std::get_if<MoveEvent>(&e)) out.insert(Atom::loc(m->from));
  }
  return out;
}

AtomSet allocated_by(const std::vector<TraceEvent>& events) {
  AtomSet out;
  for (const auto& e : events) {
    if (const auto* a = std::get_if<AllocEvent>(&e)) out.insert(Atom::loc(a->loc));
    if (const auto* m = std::get_if<MoveEvent>(&e)) out.insert(Atom::loc(m->to));
  }
  return out;
}

}  // namespace

StepCheckResult run_with_stepcheck(const TermPtr& term, long fuel) {
  StepCheckResult result;
  Store store;
  StoreTyping sigma;
  KillSet kills;
  TermPtr t = term;

  ConfigReport initial = check_config(sigma, kills, store, t);
  if (!initial.ok()) {
    result.violations.push_back("initial configuration is not well typed");
    for (const auto& d : initial.failures)
      result.violations.push_back("  " + d.render());
    return result;
  }
  Effect static_effect = initial.residual_effect;
  Qualifier static_qual = initial.residual_type.qual;

  for (long i = 0; i < fuel; ++i) {
    StepResult r = step(store, t);
    if (std::holds_alternative<StepDone>(r)) {
      result.completed = true;
      return result;
    }
    if (const auto* stuck = std::get_if<StepStuck>(&r)) {
      result.violations.push_back("stuck: " +
                                  stuck_reason_name(stuck->reason));
      return result;
    }
    auto& ok = std::get<StepOk>(r);
    std::uint32_t old_dom = static_cast<std::uint32_t>(sigma.size());

    // The store typing is read off the evaluator's allocations: a plain
    // allocation enters at its value's type, widened to the allocation's
    // referent annotation when one was written; a move carries the source
    // cell's entry to the destination.
    for (const auto& event : ok.events) {
      if (const auto* a = std::get_if<AllocEvent>(&event)) {
        TypeEnv empty;
        if (!store.live(a->loc)) {
          result.violations.push_back("allocation " +
                                      Atom::loc(a->loc).to_string() +
                                      " is not live");
          return result;
        }
        Verdict v = infer(empty, sigma.dom(), store.value(a->loc), &sigma);
        if (!v.ok()) {
          result.violations.push_back("cannot type stored value at " +
                                      Atom::loc(a->loc).to_string() + ": " +
                                      v.diagnostic().render());
          return result;
        }
        Qualifier entry_qual =
            ok.alloc_referent ? *ok.alloc_referent : v.result().type.qual;
        sigma.extend(a->loc, v.result().type.type, entry_qual);
      } else if (const auto* m = std::get_if<MoveEvent>(&event)) {
        const StoreTyping::Entry* src = sigma.lookup(m->from);
        if (!src) {
          result.violations.push_back("move from an untyped location");
          return result;
        }
        sigma.extend(m->to, src->type, src->qual);
      }
    }

    AtomSet step_kills = killed_by(ok.events);
    AtomSet step_allocs = allocated_by(ok.events);
    AtomSet new_kills = kills.unioned(step_kills);

    auto complain = [&](const std::string& what) {
      result.violations.push_back("step " + std::to_string(i) + ": " + what);
    };

    if (store.tombstones() != new_kills)
      complain("kill set does not match the store's tombstones");

    // Kill extension must stay within the prior static kill budget.
    TypeEnv empty;
    ReachGraph g(&empty, &sigma);
    AtomSet kill_budget =
        saturate(g, Qualifier{static_effect.kill, false}).atoms;
    AtomSet excess = step_kills.minus(kill_budget);
    if (!excess.empty())
      complain("killed " + print_atom_set(excess) +
               " outside the static kill component " +
               print_atom_set(static_effect.kill));

    // A freshly returned location is never killed by the same step.
    if (!step_allocs.intersected(step_kills).empty())
      complain("step kills a location it allocated");

    ConfigReport report = check_config(sigma, new_kills, store, ok.term);
    if (!report.ok()) {
      complain("configuration re-check failed");
      for (const auto& d : report.failures)
        result.violations.push_back("  " + d.render());
      return result;
    }

    // Effects may shrink as they are realized and may add payload only over
    // newly allocated locations.
    AtomSet old_locs;
    for (std::uint32_t l = 0; l < old_dom; ++l) old_locs.insert(Atom::loc(l));
    AtomSet use_growth =
        report.residual_effect.use.minus(static_effect.use).minus(step_allocs);
    AtomSet kill_growth = report.residual_effect.kill.minus(static_effect.kill)
                              .minus(step_allocs);
    if (!use_growth.empty() || !kill_growth.empty())
      complain("residual effect grew outside newly allocated locations");
    AtomSet qual_growth =
        report.residual_type.qual.atoms.minus(static_qual.atoms)
            .minus(step_allocs);
    if (!qual_growth.empty())
      complain("residual qualifier grew outside newly allocated locations");

    static_effect = report.residual_effect;
    static_qual = report.residual_type.qual;
    kills = new_kills;
    t = ok.term;
    result.steps_checked++;
    if (!result.violations.empty()) return result;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Well-typed program generator
// ---------------------------------------------------------------------------

namespace {

struct GenVar {
  std::string name;
  enum class Kind { IntRef, Fun } kind;
};

class Generator {
 public:
  Generator(std::uint64_t seed, const GeneratorOptions& options)
      : rng_(seed), options_(options) {}

  TermPtr program(int budget) {
    if (budget < 1)
      throw GenerationExhausted("size budget must be at least 1");
    return chain(budget);
  }

 private:
  std::mt19937_64 rng_;
  GeneratorOptions options_;
  int fresh_ = 0;

  // Flow state of the straight-line program under construction.
  std::vector<GenVar> vars_;
  std::vector<std::string> killed_;                 // accumulated kill effect
  std::vector<std::pair<std::string, std::string>> edges_;  // alias one-step

  double roll() { return std::uniform_real_distribution<>(0.0, 1.0)(rng_); }
  int pick(int n) { return std::uniform_int_distribution<>(0, n - 1)(rng_); }
  long literal() { return std::uniform_int_distribution<long>(0, 99)(rng_); }
  std::string fresh_name() { return "x" + std::to_string(fresh_++); }

  AtomSet saturated(const std::string& v) const {
    AtomSet acc{Atom::var(v)};
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [from, to] : edges_) {
        if (acc.contains(Atom::var(from)) && !acc.contains(Atom::var(to))) {
          acc.insert(Atom::var(to));
          changed = true;
        }
      }
    }
    return acc;
  }

  // A use of `v` composes with the accumulated kills only when their
  // saturations stay apart.
  bool usable(const std::string& v) const {
    AtomSet reach = saturated(v);
    for (const auto& k : killed_)
      if (!saturated(k).intersected(reach).empty()) return false;
    return true;
  }

  std::vector<int> usable_refs() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(vars_.size()); ++i)
      if (vars_[i].kind == GenVar::Kind::IntRef && usable(vars_[i].name))
        out.push_back(i);
    return out;
  }

  QualifiedType int_qt() const {
    return QualifiedType{make_int_type(), Qualifier{}};
  }
  QualifiedType intref_qt(Qualifier q) const {
    return QualifiedType{make_ref_type(int_qt()), std::move(q)};
  }

  // val <name> = <stmt>; <rest>
  TermPtr chain(int budget) {
    if (budget <= 1) return leaf();
    double r = roll();
    if (r < options_.ref_op_weight) return ref_op(budget);
    if (r < options_.ref_op_weight + options_.application_weight)
      return application(budget);
    return leaf_let(budget);
  }

  TermPtr leaf() {
    switch (pick(3)) {
      case 0: return make_unit();
      case 1: return make_int(literal());
      default: {
        auto refs = usable_refs();
        if (refs.empty()) return make_unit();
        // Returning a live reference keeps its kill budget honest.
        return make_var(vars_[refs[pick(static_cast<int>(refs.size()))]].name);
      }
    }
  }

  TermPtr leaf_let(int budget) {
    std::string name = fresh_name();
    TermPtr bound = pick(2) == 0 ? make_unit() : make_int(literal());
    TermPtr rest = chain(budget - 1);
    return make_let(name, bound, rest);
  }

  TermPtr ref_op(int budget) {
    auto refs = usable_refs();
    int choice = pick(5);
    if (refs.empty()) choice = 0;
    std::string name = fresh_name();
    switch (choice) {
      case 0: {  // alloc
        TermPtr bound = make_ref(make_int(literal()));
        vars_.push_back({name, GenVar::Kind::IntRef});
        TermPtr rest = chain(budget - 1);
        return make_let(name, bound, rest);
      }
      case 1: {  // deref
        const auto& v = vars_[refs[pick(static_cast<int>(refs.size()))]];
        TermPtr bound = make_deref(make_var(v.name));
        TermPtr rest = chain(budget - 1);
        return make_let(name, bound, rest);
      }
      case 2: {  // assign
        const auto& v = vars_[refs[pick(static_cast<int>(refs.size()))]];
        TermPtr bound = make_assign(make_var(v.name), make_int(literal()));
        TermPtr rest = chain(budget - 1);
        return make_let(name, bound, rest);
      }
      case 3: {  // free
        std::string target =
            vars_[refs[pick(static_cast<int>(refs.size()))]].name;
        killed_.push_back(target);
        TermPtr bound = make_free(make_var(target));
        TermPtr rest = chain(budget - 1);
        return make_let(name, bound, rest);
      }
      default: {  // move
        std::string target =
            vars_[refs[pick(static_cast<int>(refs.size()))]].name;
        killed_.push_back(target);
        TermPtr bound = make_move(make_var(target));
        vars_.push_back({name, GenVar::Kind::IntRef});
        TermPtr rest = chain(budget - 1);
        return make_let(name, bound, rest);
      }
    }
  }

  TermPtr application(int budget) {
    std::string name = fresh_name();
    auto refs = usable_refs();
    int choice = pick(refs.empty() ? 2 : 4);
    TermPtr bound;
    switch (choice) {
      case 0: {
        // (fun g(y: Int^{}) { y }) <int>
        std::string y = fresh_name();
        bound = make_app(
            make_abs("g" + std::to_string(fresh_++), y, int_qt(), std::nullopt,
                     std::nullopt, make_var(y)),
            make_int(literal()));
        break;
      }
      case 1: {
        // capture-free consumer of a fresh allocation, body reads or frees
        std::string y = fresh_name();
        TermPtr body = pick(2) == 0
                           ? make_deref(make_var(y))
                           : make_let("_", make_free(make_var(y)),
                                      make_int(literal()));
        bound = make_app(
            make_abs("g" + std::to_string(fresh_++), y,
                     intref_qt(Qualifier{{}, true}), std::nullopt,
                     std::nullopt, body),
            make_ref(make_int(literal())));
        break;
      }
      case 2: {
        // apply a separated reader to a live reference
        const auto& v = vars_[refs[pick(static_cast<int>(refs.size()))]];
        std::string y = fresh_name();
        bound = make_app(
            make_abs("g" + std::to_string(fresh_++), y,
                     intref_qt(Qualifier{{}, true}), std::nullopt,
                     std::nullopt, make_deref(make_var(y))),
            make_var(v.name));
        break;
      }
      default: {
        // alias binding through the identity
        std::string target =
            vars_[refs[pick(static_cast<int>(refs.size()))]].name;
        std::string y = fresh_name();
        bound = make_app(
            make_abs("g" + std::to_string(fresh_++), y,
                     intref_qt(Qualifier{{}, true}), std::nullopt,
                     std::nullopt, make_var(y)),
            make_var(target));
        // The result reaches the argument.
        vars_.push_back({name, GenVar::Kind::IntRef});
        edges_.emplace_back(name, target);
        break;
      }
    }
    TermPtr rest = chain(budget - 1);
    return make_let(name, bound, rest);
  }
};

}  // namespace

TermPtr generate_well_typed(std::uint64_t seed, int size_budget,
                            const GeneratorOptions& options) {
  Generator gen(seed, options);
  return gen.program(size_budget);
}

NodeCounts& NodeCounts::operator+=(const NodeCounts& o) {
  apps += o.apps;
  refs += o.refs;
  derefs += o.derefs;
  assigns += o.assigns;
  frees += o.frees;
  moves += o.moves;
  return *this;
}

NodeCounts count_nodes(const TermPtr& t) {
  NodeCounts out;
  if (!t) return out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, App>) {
          out.apps++;
          out += count_nodes(n.fn);
          out += count_nodes(n.arg);
        } else if constexpr (std::is_same_v<T, Let>) {
          out.apps++;
          out += count_nodes(n.bound);
          out += count_nodes(n.body);
        } else if constexpr (std::is_same_v<T, RefNew>) {
          out.refs++;
          out += count_nodes(n.init);
        } else if constexpr (std::is_same_v<T, Deref>) {
          out.derefs++;
          out += count_nodes(n.ref);
        } else if constexpr (std::is_same_v<T, Assign>) {
          out.assigns++;
          out += count_nodes(n.target);
          out += count_nodes(n.value);
        } else if constexpr (std::is_same_v<T, Free>) {
          out.frees++;
          out += count_nodes(n.ref);
        } else if constexpr (std::is_same_v<T, Move>) {
          out.moves++;
          out += count_nodes(n.ref);
        } else if constexpr (std::is_same_v<T, Abs>) {
          out += count_nodes(n.body);
        } else if constexpr (std::is_same_v<T, TAbs>) {
          out += count_nodes(n.body);
        } else if constexpr (std::is_same_v<T, TApp>) {
          out += count_nodes(n.fn);
        }
      },
      t->node);
  return out;
}

}  // namespace rtfx
