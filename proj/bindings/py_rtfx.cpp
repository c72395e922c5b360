#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rtfx/corpus.hpp"
#include "rtfx/eval.hpp"
#include "rtfx/parser.hpp"
#include "rtfx/pretty.hpp"
#include "rtfx/soundness.hpp"
#include "rtfx/typecheck.hpp"

namespace py = pybind11;

namespace {

rtfx::TermPtr parse_or_raise(const std::string& source) {
  try {
    return rtfx::parse(source).term;
  } catch (const rtfx::ParseError& e) {
    throw py::value_error(std::string("parse error: ") + e.what());
  }
}

py::dict check(const std::string& source) {
  rtfx::Verdict v = rtfx::check_program(parse_or_raise(source));
  py::dict out;
  out["ok"] = v.ok();
  if (v.ok()) {
    const auto& r = v.result();
    out["type"] = rtfx::print_type(r.type.type);
    out["qual"] = rtfx::print_qualifier(r.type.qual);
    out["use"] = rtfx::print_atom_set(r.effect.use);
    out["kill"] = rtfx::print_atom_set(r.effect.kill);
    out["rendered"] = rtfx::render_accept(r);
  } else {
    const auto& d = v.diagnostic();
    out["code"] = rtfx::code_name(d.code);
    out["line"] = d.span.line;
    out["col"] = d.span.col;
    out["message"] = d.message;
    py::list witness;
    for (const auto& a : d.witness) witness.append(a.to_string());
    out["witness"] = witness;
  }
  return out;
}

py::dict run(const std::string& source, long fuel) {
  rtfx::Store store;
  rtfx::RunOutcome o = rtfx::run(store, parse_or_raise(source), fuel);
  py::dict out;
  py::list trace;
  for (const auto& e : o.trace) trace.append(rtfx::trace_line(e));
  out["trace"] = trace;
  out["steps"] = o.steps;
  switch (o.kind) {
    case rtfx::RunOutcome::Kind::Done:
      out["status"] = "done";
      out["value"] = rtfx::print_value(o.value);
      break;
    case rtfx::RunOutcome::Kind::Stuck:
      out["status"] = "stuck";
      out["reason"] = rtfx::stuck_reason_name(o.reason);
      break;
    case rtfx::RunOutcome::Kind::OutOfFuel:
      out["status"] = "out-of-fuel";
      break;
  }
  return out;
}

py::dict soundness(int seeds, int budget, long fuel, bool stepcheck) {
  int accepted = 0, done = 0, stuck = 0, stepcheck_failures = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    rtfx::TermPtr t = rtfx::generate_well_typed(seed, budget);
    if (!rtfx::check_program(t).ok()) continue;
    ++accepted;
    rtfx::Store store;
    rtfx::RunOutcome o = rtfx::run(store, t, fuel);
    if (o.kind == rtfx::RunOutcome::Kind::Done) ++done;
    if (o.kind == rtfx::RunOutcome::Kind::Stuck) ++stuck;
    if (stepcheck && !rtfx::run_with_stepcheck(t, fuel).ok())
      ++stepcheck_failures;
  }
  py::dict out;
  out["seeds"] = seeds;
  out["accepted"] = accepted;
  out["done"] = done;
  out["stuck"] = stuck;
  if (stepcheck) out["stepcheck_failures"] = stepcheck_failures;
  return out;
}

std::string pretty(const std::string& source) {
  return rtfx::print_term(parse_or_raise(source));
}

}  // namespace

PYBIND11_MODULE(_rtfx, m) {
  m.doc() = "reachability-typed effects: checker and interpreter";
  m.def("check", &check, py::arg("source"),
        "Typecheck a program; returns the verdict as a dict.");
  m.def("run", &run, py::arg("source"), py::arg("fuel") = 10000,
        "Evaluate a program and return status, value, and trace.");
  m.def("soundness", &soundness, py::arg("seeds") = 100,
        py::arg("budget") = 20, py::arg("fuel") = 10000,
        py::arg("stepcheck") = false,
        "Generator-driven safety run; returns summary counts.");
  m.def("pretty", &pretty, py::arg("source"),
        "Parse and print back a program.");
}
