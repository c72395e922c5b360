#include "rtfx/eval.hpp"

#include <cassert>

#include "rtfx/pretty.hpp"

namespace rtfx {

std::uint32_t Store::allocate(TermPtr value) {
  cells_.push_back(std::move(value));
  return static_cast<std::uint32_t>(cells_.size() - 1);
}

bool Store::live(std::uint32_t loc) const {
  return contains(loc) && cells_[loc].has_value();
}

const TermPtr& Store::value(std::uint32_t loc) const {
  return *cells_[loc];
}

void Store::assign(std::uint32_t loc, TermPtr value) {
  assert(live(loc));
  cells_[loc] = std::move(value);
}

void Store::kill(std::uint32_t loc) {
  assert(contains(loc));
  cells_[loc] = std::nullopt;
}

AtomSet Store::dom() const {
  AtomSet out;
  for (std::uint32_t i = 0; i < cells_.size(); ++i) out.insert(Atom::loc(i));
  return out;
}

AtomSet Store::tombstones() const {
  AtomSet out;
  for (std::uint32_t i = 0; i < cells_.size(); ++i)
    if (!cells_[i].has_value()) out.insert(Atom::loc(i));
  return out;
}

std::string stuck_reason_name(StuckReason r) {
  switch (r) {
    case StuckReason::UseAfterFree: return "UseAfterFree";
    case StuckReason::MoveOfDead: return "MoveOfDead";
    case StuckReason::NotAFunction: return "NotAFunction";
    case StuckReason::NotALocation: return "NotALocation";
    case StuckReason::UnboundLocation: return "UnboundLocation";
    case StuckReason::FreeVariable: return "FreeVariable";
  }
  return "Unknown";
}

std::string trace_line(const TraceEvent& e) {
  auto loc = [](std::uint32_t i) { return Atom::loc(i).to_string(); };
  if (const auto* a = std::get_if<AllocEvent>(&e)) return "ALLOC " + loc(a->loc);
  if (const auto* u = std::get_if<UseEvent>(&e)) return "USE " + loc(u->loc);
  if (const auto* k = std::get_if<KillEvent>(&e)) return "KILL " + loc(k->loc);
  const auto& m = std::get<MoveEvent>(e);
  return "MOVE " + loc(m.from) + " -> " + loc(m.to);
}

bool is_value(const TermPtr& t) {
  return t && (std::holds_alternative<UnitLit>(t->node) ||
               std::holds_alternative<IntLit>(t->node) ||
               std::holds_alternative<Abs>(t->node) ||
               std::holds_alternative<TAbs>(t->node) ||
               std::holds_alternative<Loc>(t->node));
}

namespace {

// Reachability of a runtime value: the locations it mentions.
Qualifier value_qualifier(const TermPtr& v) {
  return Qualifier{free_locations(v), false};
}

struct Reduced {
  TermPtr term;
  std::vector<TraceEvent> events;
  std::optional<Qualifier> alloc_referent = std::nullopt;
};

using Attempt = std::variant<Reduced, StepStuck, std::monostate>;
// monostate: the term is already a value (no redex).

Attempt reduce_here(Store& store, const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> Attempt {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnitLit> || std::is_same_v<T, IntLit> ||
                      std::is_same_v<T, Abs> || std::is_same_v<T, TAbs> ||
                      std::is_same_v<T, Loc>) {
          return std::monostate{};
        } else if constexpr (std::is_same_v<T, Var>) {
          return StepStuck{StuckReason::FreeVariable};
        } else if constexpr (std::is_same_v<T, App>) {
          if (!is_value(n.fn)) {
            Attempt a = reduce_here(store, n.fn);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_app(r->term, n.arg, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          if (!is_value(n.arg)) {
            Attempt a = reduce_here(store, n.arg);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_app(n.fn, r->term, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          const Abs* abs = term_as<Abs>(n.fn);
          if (!abs) return StepStuck{StuckReason::NotAFunction};
          TermPtr body = subst_term(abs->body, abs->param, n.arg,
                                    value_qualifier(n.arg));
          body = subst_term(body, abs->self, n.fn, value_qualifier(n.fn));
          return Reduced{body, {}};
        } else if constexpr (std::is_same_v<T, TApp>) {
          if (!is_value(n.fn)) {
            Attempt a = reduce_here(store, n.fn);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_tapp(r->term, n.arg, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          const TAbs* tabs = term_as<TAbs>(n.fn);
          if (!tabs) return StepStuck{StuckReason::NotAFunction};
          TermPtr body =
              subst_type_in_term(tabs->body, tabs->type_var, tabs->qual_var,
                                 n.arg);
          body = subst_term(body, tabs->self, n.fn, value_qualifier(n.fn));
          return Reduced{body, {}};
        } else if constexpr (std::is_same_v<T, RefNew>) {
          if (!is_value(n.init)) {
            Attempt a = reduce_here(store, n.init);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_ref(r->term, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          std::uint32_t loc = store.allocate(n.init);
          return Reduced{make_loc(loc, t->span), {AllocEvent{loc}},
                         n.referent};
        } else if constexpr (std::is_same_v<T, Deref>) {
          if (!is_value(n.ref)) {
            Attempt a = reduce_here(store, n.ref);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_deref(r->term, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          const Loc* l = term_as<Loc>(n.ref);
          if (!l) return StepStuck{StuckReason::NotALocation};
          if (!store.contains(l->index))
            return StepStuck{StuckReason::UnboundLocation};
          if (!store.live(l->index))
            return StepStuck{StuckReason::UseAfterFree};
          return Reduced{store.value(l->index), {UseEvent{l->index}}};
        } else if constexpr (std::is_same_v<T, Assign>) {
          if (!is_value(n.target)) {
            Attempt a = reduce_here(store, n.target);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_assign(r->term, n.value, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          if (!is_value(n.value)) {
            Attempt a = reduce_here(store, n.value);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_assign(n.target, r->term, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          const Loc* l = term_as<Loc>(n.target);
          if (!l) return StepStuck{StuckReason::NotALocation};
          if (!store.contains(l->index))
            return StepStuck{StuckReason::UnboundLocation};
          if (!store.live(l->index))
            return StepStuck{StuckReason::UseAfterFree};
          store.assign(l->index, n.value);
          return Reduced{make_unit(t->span), {UseEvent{l->index}}};
        } else if constexpr (std::is_same_v<T, Free>) {
          if (!is_value(n.ref)) {
            Attempt a = reduce_here(store, n.ref);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_free(r->term, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          const Loc* l = term_as<Loc>(n.ref);
          if (!l) return StepStuck{StuckReason::NotALocation};
          if (!store.contains(l->index))
            return StepStuck{StuckReason::UnboundLocation};
          // Deallocation is idempotent: tombstoning a tombstone is a no-op.
          store.kill(l->index);
          return Reduced{make_unit(t->span), {KillEvent{l->index}}};
        } else if constexpr (std::is_same_v<T, Move>) {
          if (!is_value(n.ref)) {
            Attempt a = reduce_here(store, n.ref);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_move(r->term, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          const Loc* l = term_as<Loc>(n.ref);
          if (!l) return StepStuck{StuckReason::NotALocation};
          if (!store.contains(l->index))
            return StepStuck{StuckReason::UnboundLocation};
          if (!store.live(l->index))
            return StepStuck{StuckReason::MoveOfDead};
          TermPtr payload = store.value(l->index);
          std::uint32_t dest = store.allocate(payload);
          store.kill(l->index);
          return Reduced{make_loc(dest, t->span),
                         {MoveEvent{l->index, dest}}};
        } else {
          static_assert(std::is_same_v<T, Let>);
          if (!is_value(n.bound)) {
            Attempt a = reduce_here(store, n.bound);
            if (auto* r = std::get_if<Reduced>(&a))
              return Reduced{make_let(n.name, r->term, n.body, t->span), std::move(r->events),
                             r->alloc_referent};
            return a;
          }
          TermPtr body = subst_term(n.body, n.name, n.bound,
                                    value_qualifier(n.bound));
          return Reduced{body, {}};
        }
      },
      t->node);
}

}  // namespace

StepResult step(Store& store, const TermPtr& t) {
  if (is_value(t)) return StepDone{t};
  Attempt a = reduce_here(store, t);
  if (auto* r = std::get_if<Reduced>(&a))
    return StepOk{r->term, std::move(r->events), r->alloc_referent};
  if (auto* s = std::get_if<StepStuck>(&a)) return *s;
  return StepDone{t};
}

RunOutcome run(Store& store, TermPtr t, long fuel) {
  RunOutcome out{RunOutcome::Kind::OutOfFuel, nullptr,
                 StuckReason::FreeVariable, t, {}, 0};
  for (long i = 0; i < fuel; ++i) {
    StepResult r = step(store, t);
    if (const auto* done = std::get_if<StepDone>(&r)) {
      out.kind = RunOutcome::Kind::Done;
      out.value = done->value;
      out.residual = done->value;
      return out;
    }
    if (const auto* stuck = std::get_if<StepStuck>(&r)) {
      out.kind = RunOutcome::Kind::Stuck;
      out.reason = stuck->reason;
      out.residual = t;
      return out;
    }
    auto& ok = std::get<StepOk>(r);
    t = ok.term;
    out.trace.insert(out.trace.end(), ok.events.begin(), ok.events.end());
    out.steps++;
  }
  if (is_value(t)) {
    out.kind = RunOutcome::Kind::Done;
    out.value = t;
  }
  out.residual = t;
  return out;
}

std::string print_value(const TermPtr& v) {
  if (!v) return "?";
  if (term_as<UnitLit>(v)) return "unit";
  if (const auto* i = term_as<IntLit>(v)) return std::to_string(i->value);
  if (const auto* l = term_as<Loc>(v)) return Atom::loc(l->index).to_string();
  if (const auto* a = term_as<Abs>(v)) return "<fun " + a->self + ">";
  if (const auto* ta = term_as<TAbs>(v)) return "<tfun " + ta->self + ">";
  return print_term(v);
}

}  // namespace rtfx
