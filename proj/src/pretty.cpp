#include "rtfx/pretty.hpp"

namespace rtfx {

std::string print_atom_set(const AtomSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : s) {
    if (!first) out += ",";
    out += a.to_string();
    first = false;
  }
  return out + "}";
}

std::string print_qualifier(const Qualifier& q) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : q.atoms) {
    if (!first) out += ",";
    out += a.to_string();
    first = false;
  }
  if (q.fresh) {
    if (!first) out += ",";
    out += "*";
  }
  return out + "}";
}

std::string print_effect(const Effect& e) {
  std::string out = "<";
  if (!e.use.empty()) out += "u:" + print_atom_set(e.use);
  if (!e.kill.empty()) {
    if (!e.use.empty()) out += ",";
    out += "k:" + print_atom_set(e.kill);
  }
  return out + ">";
}

std::string print_type(const TypePtr& t) {
  if (!t) return "?";
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnitType>) {
          return "Unit";
        } else if constexpr (std::is_same_v<T, IntType>) {
          return "Int";
        } else if constexpr (std::is_same_v<T, TopType>) {
          return "Top";
        } else if constexpr (std::is_same_v<T, TypeVarType>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, RefType>) {
          return "Ref[" + print_qualified_type(n.referent) + "]";
        } else if constexpr (std::is_same_v<T, FunType>) {
          std::string out = n.self + "(" + n.param + ": " +
                            print_qualified_type(n.domain) + ") -> ";
          if (!n.latent.is_pure()) out += print_effect(n.latent) + " ";
          return out + print_qualified_type(n.codomain);
        } else {
          static_assert(std::is_same_v<T, AllType>);
          std::string out = "forall " + n.self + "[" + n.type_var + "^" +
                            n.qual_var + " <: " +
                            print_qualified_type(n.bound) + "] -> ";
          if (!n.latent.is_pure()) out += print_effect(n.latent) + " ";
          return out + print_qualified_type(n.body);
        }
      },
      t->node);
}

std::string print_qualified_type(const QualifiedType& q) {
  std::string carrier = print_type(q.type);
  if (type_as<FunType>(q.type) || type_as<AllType>(q.type))
    carrier = "(" + carrier + ")";
  return carrier + "^" + print_qualifier(q.qual);
}

namespace {

// Precedence levels, loosest to tightest.
enum Prec { kTerm = 0, kAssign = 1, kApp = 2, kPrefix = 3, kAtomic = 4 };

std::string print_at(const TermPtr& t, int prec);

std::string paren_if(bool cond, std::string s) {
  return cond ? "(" + std::move(s) + ")" : std::move(s);
}

std::string print_at(const TermPtr& t, int prec) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UnitLit>) {
          return "unit";
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, Loc>) {
          return "ℓ" + std::to_string(n.index);
        } else if constexpr (std::is_same_v<T, Abs>) {
          std::string out = "fun " + n.self + "(" + n.param + ": " +
                            print_qualified_type(n.domain) + ")";
          if (n.capture) out += " ^" + print_qualifier(*n.capture);
          if (n.latent) out += " " + print_effect(*n.latent);
          out += " { " + print_at(n.body, kTerm) + " }";
          return out;
        } else if constexpr (std::is_same_v<T, TAbs>) {
          std::string out = "tfun " + n.self + "[" + n.type_var + "^" +
                            n.qual_var + " <: " +
                            print_qualified_type(n.bound) + "]";
          if (n.capture) out += " ^" + print_qualifier(*n.capture);
          if (n.latent) out += " " + print_effect(*n.latent);
          out += " { " + print_at(n.body, kTerm) + " }";
          return out;
        } else if constexpr (std::is_same_v<T, App>) {
          std::string out =
              print_at(n.fn, kApp) + " " + print_at(n.arg, kPrefix);
          return paren_if(prec > kApp, std::move(out));
        } else if constexpr (std::is_same_v<T, TApp>) {
          std::string out =
              print_at(n.fn, kApp) + " [" + print_qualified_type(n.arg) + "]";
          return paren_if(prec > kApp, std::move(out));
        } else if constexpr (std::is_same_v<T, RefNew>) {
          std::string head =
              n.referent ? "ref^" + print_qualifier(*n.referent) + " "
                         : "ref ";
          return paren_if(prec > kPrefix, head + print_at(n.init, kPrefix));
        } else if constexpr (std::is_same_v<T, Deref>) {
          return paren_if(prec > kPrefix, "! " + print_at(n.ref, kPrefix));
        } else if constexpr (std::is_same_v<T, Free>) {
          return paren_if(prec > kPrefix, "free " + print_at(n.ref, kPrefix));
        } else if constexpr (std::is_same_v<T, Move>) {
          return paren_if(prec > kPrefix, "move " + print_at(n.ref, kPrefix));
        } else if constexpr (std::is_same_v<T, Assign>) {
          std::string out = print_at(n.target, kApp) + " := " +
                            print_at(n.value, kApp);
          return paren_if(prec > kAssign, std::move(out));
        } else {
          static_assert(std::is_same_v<T, Let>);
          std::string out = "val " + n.name + " = " +
                            print_at(n.bound, kAssign) + "; " +
                            print_at(n.body, kTerm);
          return paren_if(prec > kTerm, std::move(out));
        }
      },
      t->node);
}

}  // namespace

std::string print_term(const TermPtr& t) {
  if (!t) return "?";
  return print_at(t, kTerm);
}

}  // namespace rtfx
