#pragma once

// Concrete semantics of terms, guards and expectations; capture-avoiding
// substitution; prenex normal form; structural classification.

#include <map>
#include <string>

#include "pwv/ast.hpp"

namespace pwv {

// Program state: variable valuation over nonnegative exact rationals.
using State = std::map<std::string, Rational>;

struct Enclosure {
  Rational lo, hi;
  bool exact = false;  // exact => lo == hi == the true value
};

Rational eval_term(const TermPtr& t, const State& s);
bool eval_guard(const GuardPtr& g, const State& s);

// Quantifier-free f: exact value. Quantified f: sampled estimate taken at
// grid+1 equally spaced points per binder interval (both endpoints
// included); the sample under-approximates sup and over-approximates inf,
// and is exact whenever all extrema lie on sample points.
Enclosure eval_expr(const ExprPtr& f, const State& s, unsigned grid = 1);

// f[x/t], capture-avoiding: binders are renamed with a reserved "#k"
// suffix when t mentions a variable bound in f.
ExprPtr substitute(const ExprPtr& f, const std::string& x, const TermPtr& t);

// Picks "base#k" with the smallest k >= 1 not contained in `avoid`, and
// inserts the result into `avoid`.
std::string fresh_name(const std::string& base, std::set<std::string>& avoid);

// Prenex normal form: all sup/inf binders hoisted outermost. Preserves
// free variables, semantics, and the sup-free / inf-free flags.
ExprPtr to_pnf(const ExprPtr& f);

enum class Classification { QuantifierFree, SupFree, InfFree, Mixed };
Classification classify(const ExprPtr& f);

// Semantics-preserving simplification by interval analysis: free variables
// range over [0, oo), binders over their declared cells. Iverson brackets
// whose guard is decided by the intervals are folded, zero summands and
// binder-free quantifiers are dropped, and degenerate terms become
// constants. Shrinks solver queries; never changes the denoted function.
ExprPtr interval_simplify(const ExprPtr& f);

}  // namespace pwv
