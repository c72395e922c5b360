#include <doctest.h>

#include <random>

#include "rtfx/corpus.hpp"
#include "rtfx/parser.hpp"
#include "rtfx/pretty.hpp"
#include "rtfx/typecheck.hpp"
#include "test_helpers.hpp"

using namespace rtfx;
using namespace rtfx::testing;

namespace {

Verdict check_src(const std::string& src) {
  return check_program(parse(src).term);
}

void expect_reject(const std::string& src, Code code) {
  Verdict v = check_src(src);
  REQUIRE(!v.ok());
  CHECK(code_name(v.diagnostic().code) == code_name(code));
}

std::string accept_line(const std::string& src) {
  Verdict v = check_src(src);
  REQUIRE(v.ok());
  return render_accept(v.result());
}

}  // namespace

TEST_CASE("constants are untracked and pure") {
  CHECK(accept_line("unit") == "TYPE Unit QUAL {} EFF {};{}");
  CHECK(accept_line("42") == "TYPE Int QUAL {} EFF {};{}");
}

TEST_CASE("allocation is fresh and pure") {
  CHECK(accept_line("ref 0") == "TYPE Ref[Int^{}] QUAL {*} EFF {};{}");
}

TEST_CASE("a variable occurrence names exactly itself") {
  TypeEnv env = env_of({{"y", "Ref[Int^{}]^{*}"},
                        {"z", "Ref[Int^{}]^{y}"}});
  Verdict verdict = infer(env, obs_of({"y", "z"}), make_var("z"));
  REQUIRE(verdict.ok());
  CHECK(verdict.result().type.qual == qual({v("z")}));
  CHECK(verdict.result().effect.is_pure());
}

TEST_CASE("variables outside the observation filter are rejected") {
  TypeEnv env = env_of({{"y", "Int^{}"}});
  Verdict v = infer(env, Observation{}, make_var("y"));
  REQUIRE(!v.ok());
  CHECK(v.diagnostic().code == Code::Obs);
  expect_reject("y", Code::Unbound);
}

TEST_CASE("allocating an unbound fresh value is rejected") {
  expect_reject("ref ref 0", Code::RefFresh);
}

TEST_CASE("dereference uses the reference and reveals the referent") {
  TypeEnv env = env_of({{"y", "Ref[Int^{}]^{*}"}});
  Verdict verdict = infer(env, obs_of({"y"}), parse("!y").term);
  REQUIRE(verdict.ok());
  CHECK(type_equal(verdict.result().type.type, make_int_type()));
  CHECK(verdict.result().effect == Effect{{v("y")}, {}});
}

TEST_CASE("use after free is rejected") {
  expect_reject("val cell = ref 0; free cell; !cell", Code::UseAfterKill);
  expect_reject("val cell = ref 0; free cell; cell := 1", Code::UseAfterKill);
}

TEST_CASE("double free is allowed") {
  CHECK(accept_line("val cell = ref 0; free cell; free cell") ==
        "TYPE Unit QUAL {} EFF {};{}");
}

TEST_CASE("move invalidates the source and frees the destination") {
  expect_reject("val r = ref 0; val s = move r; r := 5", Code::UseAfterKill);
  expect_reject("val r = ref 0; val s = move r; move r", Code::UseAfterKill);
  CHECK(check_src("val r = ref 0; val s = move r; s := 41; free s").ok());
}

TEST_CASE("mention of a killed resource stays pure") {
  Verdict v = check_src(
      "val cell = ref 0;"
      "val size = fun size(c: Ref[Int^{}]^{*}) { 0 };"
      "free cell;"
      "size cell");
  REQUIRE(v.ok());
  CHECK(v.result().effect.is_pure());
  CHECK(type_equal(v.result().type.type, make_int_type()));
}

TEST_CASE("aliased kills are seen through saturation") {
  expect_reject("val c = ref 0; val c2 = c; free c; !c2", Code::UseAfterKill);
  // and the reverse direction: freeing the alias blocks the original
  expect_reject("val c = ref 0; val c2 = c; free c2; !c", Code::UseAfterKill);
}

TEST_CASE("assignment needs the exact referent qualifier") {
  CHECK(check_src("val a = ref 0; val cell = ref a; cell := a").ok());
  expect_reject("val a = ref 0; val b = ref 0; val cell = ref a; cell := b",
                Code::QualMismatch);
}

TEST_CASE("a widened referent accepts both sources") {
  CHECK(check_src("val a = ref 0; val b = ref 0;"
                  "val cell = (fun mk(x: Ref[Int^{}]^{a,b}) { ref x }) a;"
                  "cell := a; cell := b")
            .ok());
}

TEST_CASE("dereference needs an observable referent qualifier") {
  // revealing a referent that the body's filter cannot see is rejected
  Verdict v = check_src(
      "val elm = ref 0; val cell = ref elm;"
      "val f = fun f(x: Int^{}) { !cell }; unit");
  REQUIRE(!v.ok());
  CHECK(v.diagnostic().code == Code::Obs);
}

TEST_CASE("type abstractions are pure") {
  TypeEnv env = env_of({{"c", "Ref[Int^{}]^{*}"}});
  Verdict verdict =
      infer(env, obs_of({"c"}),
            parse("tfun f[X^x <: Top^{*}] { free c }").term);
  REQUIRE(verdict.ok());
  CHECK(verdict.result().effect.is_pure());
  const AllType* all = type_as<AllType>(verdict.result().type.type);
  REQUIRE(all != nullptr);
  CHECK(all->latent == Effect{{}, {v("c")}});
}

TEST_CASE("allocations may widen to an annotated referent") {
  CHECK(check_src("val a = ref 0; val b = ref 0;"
                  "val cell = ref^{a,b} a; cell := a; cell := b")
            .ok());
  expect_reject("val a = ref 0; val b = ref 0; val cell = ref^{b} a; unit",
                Code::QualSub);
  expect_reject("val a = ref 0; val cell = ref^{*} a; unit", Code::RefFresh);
}

TEST_CASE("abstractions are pure regardless of their body") {
  TypeEnv env = env_of({{"c", "Ref[Int^{}]^{*}"}});
  Verdict verdict = infer(env, obs_of({"c"}),
                          parse("fun f(x: Int^{}) { free c }").term);
  REQUIRE(verdict.ok());
  CHECK(verdict.result().effect.is_pure());
  const FunType* fn = type_as<FunType>(verdict.result().type.type);
  REQUIRE(fn != nullptr);
  CHECK(fn->latent == Effect{{}, {v("c")}});
  CHECK(verdict.result().type.qual == qual({v("c")}));
}

TEST_CASE("capture annotations are checked for inclusion") {
  TypeEnv env = env_of({{"c", "Ref[Int^{}]^{*}"}});
  Verdict ok = infer(env, obs_of({"c"}),
                     parse("fun f(x: Int^{}) ^{c} { !c }").term);
  CHECK(ok.ok());
  Verdict bad = infer(env, obs_of({"c"}),
                      parse("fun f(x: Int^{}) ^{} { !c }").term);
  REQUIRE(!bad.ok());
  CHECK(bad.diagnostic().code == Code::QualSub);
}

TEST_CASE("latent annotations must cover the body effect") {
  TypeEnv env = env_of({{"c", "Ref[Int^{}]^{*}"}});
  Verdict ok = infer(env, obs_of({"c"}),
                     parse("fun f(x: Int^{}) <u:{c}> { !c }").term);
  CHECK(ok.ok());
  Verdict bad = infer(env, obs_of({"c"}),
                      parse("fun f(x: Int^{}) <> { !c }").term);
  REQUIRE(!bad.ok());
  CHECK(bad.diagnostic().code == Code::QualSub);
}

TEST_CASE("separation rejects overlapping arguments") {
  expect_reject(
      "val counter = ref 0;"
      "val update = fun update(x: Ref[Int^{}]^{*}) { counter := !x };"
      "update counter",
      Code::Separation);
}

TEST_CASE("separation admits capture-free functions on fresh arguments") {
  Verdict v = check_src("val id = fun id(x: Ref[Int^{}]^{*}) { x };"
                        "id (ref 0)");
  REQUIRE(v.ok());
  CHECK(v.result().type.qual == Qualifier{{}, true});
}

TEST_CASE("check_app covers the declared-overlap path") {
  TypeEnv env = env_of({{"a", "Ref[Int^{}]^{*}"}});
  QualifiedType fn_qt = qt("f(x: Ref[Int^{}]^{a,*}) -> Int^{}^{}");
  const FunType* fn = type_as<FunType>(fn_qt.type);
  REQUIRE(fn != nullptr);
  // argument {a} with function qualifier {a}: overlap atoms {a} fit the
  // declared domain
  auto d = check_app(env, nullptr, obs_of({"a"}), *fn, qual({v("a")}),
                     qt("Ref[Int^{}]^{a}"), Span{1, 1});
  CHECK(!d.has_value());
}

TEST_CASE("check_app rejects a fresh argument on a non-fresh parameter") {
  TypeEnv env = env_of({{"a", "Ref[Int^{}]^{*}"}});
  QualifiedType fn_qt = qt("f(x: Ref[Int^{}]^{a}) -> Int^{}^{}");
  const FunType* fn = type_as<FunType>(fn_qt.type);
  REQUIRE(fn != nullptr);
  auto d = check_app(env, nullptr, obs_of({"a"}), *fn, Qualifier{},
                     QualifiedType{qt("Ref[Int^{}]^{}").type,
                                   Qualifier{{}, true}},
                     Span{1, 1});
  REQUIRE(d.has_value());
  CHECK(d->code == Code::QualSub);
}

TEST_CASE("a freed local leaves no trace in the binder's scope") {
  Verdict v = check_src("val c = ref 0; free c");
  REQUIRE(v.ok());
  CHECK(v.result().effect.is_pure());
}

TEST_CASE("a fresh binding must not escape killed") {
  expect_reject("val c = ref 0; free c; c", Code::FreshEscapeKill);
}

TEST_CASE("rejections carry the position of the offending use") {
  Verdict v = check_src("val cell = ref 0;\nfree cell;\n!cell");
  REQUIRE(!v.ok());
  CHECK(v.diagnostic().span.line == 3);
  CHECK(v.diagnostic().span.col == 1);
}

TEST_CASE("inference is deterministic") {
  const std::string src =
      "val a = ref 0; val b = ref a;"
      "val f = fun f(x: Ref[Int^{}]^{*}) { !x };"
      "f (ref 1); free b; a := 2";
  Verdict v1 = check_src(src);
  Verdict v2 = check_src(src);
  REQUIRE(v1.ok() == v2.ok());
  REQUIRE(v1.ok());
  CHECK(render_accept(v1.result()) == render_accept(v2.result()));
  CHECK(v1.result().type == v2.result().type);
}

TEST_CASE("accepted programs compose with an empty kill prefix") {
  for (const std::string src :
       {"val c = ref 0; free c; free c",
        "val r = ref 0; val s = move r; s := 41; free s", "unit"}) {
    Verdict v = check_src(src);
    REQUIRE(v.ok());
    TypeEnv env;
    ReachGraph g(&env);
    CHECK(compose_ok(seq_compose(g, make_kill(Qualifier{}),
                                 v.result().effect)));
  }
}

TEST_CASE("enlarging the observation filter preserves acceptance") {
  TypeEnv env = env_of({{"a", "Ref[Int^{}]^{*}"},
                        {"b", "Ref[Int^{}]^{a}"},
                        {"u", "Int^{}"}});
  std::vector<std::string> sources = {
      "!a",
      "a := 1",
      "free b",
      "val t = !b; a := t",
      "fun f(x: Int^{}) { a := x }",
      "(fun f(x: Ref[Int^{}]^{*}) { !x }) (ref 0)",
      "move a",
  };
  std::vector<Observation> filters = {
      obs_of({}),           obs_of({"a"}),      obs_of({"b"}),
      obs_of({"a", "b"}),   obs_of({"a", "u"}), obs_of({"a", "b", "u"}),
  };
  for (const auto& src : sources) {
    TermPtr t = parse(src).term;
    for (const auto& small : filters)
      for (const auto& big : filters) {
        if (!small.subset_of(big)) continue;
        Verdict vs = infer(env, small, t);
        if (!vs.ok()) continue;
        Verdict vb = infer(env, big, t);
        REQUIRE(vb.ok());
        CHECK(vb.result().type == vs.result().type);
        CHECK(vb.result().effect == vs.result().effect);
      }
  }
}

TEST_CASE("recursive self-application converges to a stable signature") {
  Verdict v = check_src("(fun f(x: Unit^{}) { f x }) unit");
  REQUIRE(v.ok());
  CHECK(type_equal(v.result().type.type, make_unit_type()));
}

TEST_CASE("type abstraction and application instantiate qualifiers") {
  Verdict v = check_src(
      "val id = tfun id[X^x <: Top^{*}] { fun g(y: X^{x,*}) { y } };"
      "val r = ref 0;"
      "unit");
  CHECK(v.ok());

  Verdict inst = check_src(
      "val mk = tfun mk[X^x <: Top^{*}] { fun g(y: X^{x,*}) { ref y } };"
      "val r = (mk [Int^{}]) 5;"
      "!r");
  REQUIRE(inst.ok());
  CHECK(type_equal(inst.result().type.type, make_int_type()));
}

TEST_CASE("type application enforces the declared bound") {
  expect_reject("val f = tfun f[X^x <: Int^{}] { unit }; f [Unit^{}]",
                Code::TypeMismatch);
}

TEST_CASE("type application enforces separation from captures") {
  expect_reject(
      "val c = ref 0;"
      "val t = tfun t[X^x <: Top^{*}] ^{c} { !c };"
      "t [Int^{c}]",
      Code::Separation);
  CHECK(check_src("val c = ref 0;"
                  "val t = tfun t[X^x <: Top^{*}] { 0 };"
                  "t [Int^{c}]")
            .ok());
}
