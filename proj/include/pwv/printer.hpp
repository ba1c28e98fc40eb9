#pragma once

#include <string>

#include "pwv/ast.hpp"

namespace pwv {

// Deterministic pretty-printers. Output re-parses to a structurally equal
// AST (for parser-producible ASTs; internally generated fresh names
// containing '#' are printable but deliberately rejected by the parser).
std::string pretty(const TermPtr& t);
std::string pretty(const GuardPtr& g);
std::string pretty(const ExprPtr& e);
std::string pretty(const ProgramPtr& p);
std::string pretty(const DomainDecl& d);

}  // namespace pwv
