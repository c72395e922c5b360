#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtfx/typecheck.hpp"

namespace rtfx {

/// Per-file verdict expectation, encoded in the file's first comment line:
///   // EXPECT: ACCEPT TYPE <ty> QUAL <q> EFF <use>;<kill>
///   // EXPECT: REJECT <code> @ <line>
struct Expectation {
  enum class Kind { Accept, Reject } kind;
  std::string accept_line;  // the full expected "TYPE ... QUAL ... EFF ..."
  Code code = Code::TypeMismatch;
  int line = 0;
};

std::optional<Expectation> parse_expectation(const std::string& file_text);

struct CorpusOutcome {
  std::string file;
  bool passed;
  std::string detail;  // expected vs. actual on failure
};

/// Checks one corpus file against its expectation header.
CorpusOutcome run_corpus_file(const std::string& path);

/// Runs every .rt file in a directory.
std::vector<CorpusOutcome> run_corpus_dir(const std::string& dir);

/// Renders an accepted program's verdict line: "TYPE <ty> QUAL <q> EFF
/// <use>;<kill>".
std::string render_accept(const InferResult& r);

/// The file names the regression corpus must provide, with the verdict kind
/// each must carry.
struct RequiredCorpusEntry {
  std::string file;
  Expectation::Kind kind;
};
std::vector<RequiredCorpusEntry> required_corpus_files();

}  // namespace rtfx
