#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtfx/corpus.hpp"

using namespace rtfx;

#ifndef RTFX_CORPUS_DIR
#define RTFX_CORPUS_DIR "corpus"
#endif

TEST_CASE("the corpus provides every required file with the right verdict") {
  auto required = required_corpus_files();
  CHECK(required.size() >= 14);
  for (const auto& entry : required) {
    std::filesystem::path path =
        std::filesystem::path(RTFX_CORPUS_DIR) / entry.file;
    CAPTURE(entry.file);
    REQUIRE(std::filesystem::exists(path));
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto expectation = parse_expectation(buf.str());
    REQUIRE(expectation.has_value());
    CHECK(expectation->kind == entry.kind);
  }
}

TEST_CASE("every corpus file matches its expectation") {
  auto outcomes = run_corpus_dir(RTFX_CORPUS_DIR);
  CHECK(outcomes.size() >= 14);
  for (const auto& o : outcomes) {
    CAPTURE(o.file);
    CAPTURE(o.detail);
    CHECK(o.passed);
  }
}

TEST_CASE("expectation headers parse both forms") {
  auto a = parse_expectation("// EXPECT: ACCEPT TYPE Unit QUAL {} EFF {};{}\n");
  REQUIRE(a.has_value());
  CHECK(a->kind == Expectation::Kind::Accept);
  CHECK(a->accept_line == "TYPE Unit QUAL {} EFF {};{}");

  auto r = parse_expectation("// EXPECT: REJECT E-USE-AFTER-KILL @ 4\n");
  REQUIRE(r.has_value());
  CHECK(r->kind == Expectation::Kind::Reject);
  CHECK(code_name(r->code) == "E-USE-AFTER-KILL");
  CHECK(r->line == 4);

  CHECK(!parse_expectation("val x = 3; x").has_value());
  CHECK(!parse_expectation("// EXPECT: MAYBE\n").has_value());
}
