#pragma once

#include <optional>
#include <string>
#include <variant>

#include "rtfx/effects.hpp"
#include "rtfx/qualifiers.hpp"
#include "rtfx/subtyping.hpp"
#include "rtfx/syntax.hpp"

namespace rtfx {

enum class Code {
  Unbound,
  Obs,
  QualMismatch,
  QualSub,
  Separation,
  UseAfterKill,
  FreshEscapeKill,
  RefFresh,
  TypeMismatch,
};

/// Stable wire name of a diagnostic code ("E-USE-AFTER-KILL" etc.). Golden
/// tests and corpus expectations key on these.
std::string code_name(Code c);
std::optional<Code> code_from_name(const std::string& name);

struct Diagnostic {
  Code code;
  Span span;
  std::string message;
  AtomSet witness;

  std::string render() const;  // "<code> <line>:<col> <message>"
};

struct InferResult {
  QualifiedType type;
  Effect effect;
};

class Verdict {
 public:
  static Verdict success(InferResult r) { return Verdict(std::move(r)); }
  static Verdict failure(Diagnostic d) { return Verdict(std::move(d)); }

  bool ok() const { return std::holds_alternative<InferResult>(v_); }
  const InferResult& result() const { return std::get<InferResult>(v_); }
  const Diagnostic& diagnostic() const { return std::get<Diagnostic>(v_); }

 private:
  explicit Verdict(InferResult r) : v_(std::move(r)) {}
  explicit Verdict(Diagnostic d) : v_(std::move(d)) {}
  std::variant<InferResult, Diagnostic> v_;
};

/// Syntax-directed inference of a qualified type and effect under an
/// observation filter. Deterministic; subsumption is applied only at
/// application and assignment interfaces and at explicit annotations.
Verdict infer(const TypeEnv& env, const Observation& obs, const TermPtr& term,
              const StoreTyping* store = nullptr);

/// Checks a term of a closed source program: empty environment and filter.
Verdict check_program(const TermPtr& term);

/// Argument-against-domain check at an application site. Selects the
/// overlap-domain path when the declared domain carries the freshness marker,
/// the plain subsumption path otherwise.
std::optional<Diagnostic> check_app(const TypeEnv& env,
                                    const StoreTyping* store,
                                    const Observation& obs, const FunType& fn,
                                    const Qualifier& fn_qual,
                                    const QualifiedType& arg, Span site);

}  // namespace rtfx
