#pragma once

#include <stdexcept>
#include <string>

#include "rtfx/syntax.hpp"

namespace rtfx {

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                           " " + message),
        line(line),
        col(col),
        message(message) {}
  int line;
  int col;
  std::string message;
};

struct SourceProgram {
  std::string path;
  std::string text;
  TermPtr term;
};

/// Parses a whole program. Throws ParseError with position and the expected
/// token set on malformed input.
SourceProgram parse(const std::string& text, const std::string& path = "");

/// Parses a type annotation in isolation (used by tests).
QualifiedType parse_qualified_type(const std::string& text);

}  // namespace rtfx
