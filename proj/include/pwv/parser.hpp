#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwv/ast.hpp"

namespace pwv {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

struct ParseResult {
  ProgramPtr program;
  DomainDecl domain;
  // Present iff the source had a `vars x, y, ...;` header.
  std::optional<std::vector<std::string>> declared_vars;
};

// Parses a full source file: optional `domain { ... }` block, optional
// `vars` header, then a statement sequence.
ParseResult parse_program_full(const std::string& text);

// Convenience wrapper returning just the program.
ProgramPtr parse_program(const std::string& text);

// Parses an expectation expression. `domain` (if given) makes its function
// symbols available inside terms.
ExprPtr parse_expectation(const std::string& text, const DomainDecl* domain = nullptr);

// Parses a term (used for CLI state literals and tests).
TermPtr parse_term_text(const std::string& text, const DomainDecl* domain = nullptr);

}  // namespace pwv
