#include "rtfx/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtfx/parser.hpp"
#include "rtfx/pretty.hpp"

namespace rtfx {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<Expectation> parse_expectation(const std::string& file_text) {
  std::istringstream in(file_text);
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const std::string prefix = "// EXPECT:";
  line = trim(line);
  if (line.rfind(prefix, 0) != 0) return std::nullopt;
  std::string rest = trim(line.substr(prefix.size()));
  if (rest.rfind("ACCEPT", 0) == 0) {
    Expectation e;
    e.kind = Expectation::Kind::Accept;
    e.accept_line = trim(rest.substr(6));
    return e;
  }
  if (rest.rfind("REJECT", 0) == 0) {
    std::istringstream fields(trim(rest.substr(6)));
    std::string code_name_str, at, line_str;
    if (!(fields >> code_name_str >> at >> line_str) || at != "@")
      return std::nullopt;
    auto code = code_from_name(code_name_str);
    if (!code) return std::nullopt;
    Expectation e;
    e.kind = Expectation::Kind::Reject;
    e.code = *code;
    e.line = std::stoi(line_str);
    return e;
  }
  return std::nullopt;
}

std::string render_accept(const InferResult& r) {
  return "TYPE " + print_type(r.type.type) + " QUAL " +
         print_qualifier(r.type.qual) + " EFF " +
         print_atom_set(r.effect.use) + ";" + print_atom_set(r.effect.kill);
}

CorpusOutcome run_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    return CorpusOutcome{path, false, "cannot open file"};
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  auto expectation = parse_expectation(text);
  if (!expectation)
    return CorpusOutcome{path, false, "missing or malformed EXPECT header"};

  TermPtr term;
  try {
    term = parse(text, path).term;
  } catch (const ParseError& e) {
    return CorpusOutcome{path, false, std::string("parse error: ") + e.what()};
  }

  Verdict v = check_program(term);
  if (expectation->kind == Expectation::Kind::Accept) {
    if (!v.ok())
      return CorpusOutcome{path, false,
                           "expected ACCEPT, got " + v.diagnostic().render()};
    std::string actual = render_accept(v.result());
    if (actual != expectation->accept_line)
      return CorpusOutcome{path, false,
                           "expected '" + expectation->accept_line +
                               "', got '" + actual + "'"};
    return CorpusOutcome{path, true, actual};
  }
  if (v.ok())
    return CorpusOutcome{path, false,
                         "expected REJECT " + code_name(expectation->code) +
                             ", got ACCEPT " + render_accept(v.result())};
  const Diagnostic& d = v.diagnostic();
  if (d.code != expectation->code)
    return CorpusOutcome{path, false,
                         "expected " + code_name(expectation->code) +
                             ", got " + d.render()};
  if (d.span.line != expectation->line)
    return CorpusOutcome{path, false,
                         "expected rejection at line " +
                             std::to_string(expectation->line) + ", got " +
                             d.render()};
  return CorpusOutcome{path, true, d.render()};
}

std::vector<CorpusOutcome> run_corpus_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".rt")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  std::vector<CorpusOutcome> out;
  for (const auto& f : files) out.push_back(run_corpus_file(f));
  return out;
}

std::vector<RequiredCorpusEntry> required_corpus_files() {
  using K = Expectation::Kind;
  return {
      {"counter_alias.rt", K::Accept},
      {"inc_capture.rt", K::Accept},
      {"id_separation.rt", K::Accept},
      {"update_counter.rt", K::Reject},
      {"referent_exact_accept.rt", K::Accept},
      {"referent_exact_reject.rt", K::Reject},
      {"referent_widened.rt", K::Accept},
      {"free_then_deref.rt", K::Reject},
      {"mention_after_kill.rt", K::Accept},
      {"double_free.rt", K::Accept},
      {"precise_tracking.rt", K::Accept},
      {"move_then_assign.rt", K::Reject},
      {"move_then_use_dest.rt", K::Accept},
      {"move_then_move.rt", K::Reject},
      {"move_of_dead.rt", K::Reject},
      {"fresh_escape_kill.rt", K::Reject},
      {"empty.rt", K::Accept},
  };
}

}  // namespace rtfx
