#pragma once

// Translation of expectation expressions into first-order real arithmetic
// and construction of quantitative-entailment queries.

#include "pwv/ast.hpp"
#include "pwv/fo.hpp"
#include "pwv/semantics.hpp"

namespace pwv {

// Value of a quantifier-free expectation as a single FO term; monus and
// Iverson brackets become conditional-value (ite) terms.
FOTermPtr encode_term(const TermPtr& t);
FOFormulaPtr encode_guard(const GuardPtr& g);
FOTermPtr encode_qf_expr(const ExprPtr& f);

// phi_f(vars, result_var): models are exactly the pairs (state, value of
// f). Quantifier-free f yields the (quantifier-free, hence trivially
// existential-prenex) equation result_var = value-term. A single-polarity
// PNF input is pinned with the upper-bound + least-upper-bound clauses
// (dually for inf prefixes). Mixed prefixes are rejected.
FOFormulaPtr encode_expr(const ExprPtr& f, const std::string& result_var);

// Universal closure whose validity is equivalent to f <= g pointwise over
// nonnegative states. Preconditions: f is inf-free and in PNF (sup prefix
// + quantifier-free matrix); g is sup-free and in PNF. Throws
// std::invalid_argument on a polarity violation.
FOFormulaPtr entailment_formula(const ExprPtr& f, const ExprPtr& g);

// Satisfiability query refuting "claimed <= riemann" (direction == Upper:
// exists a nonnegative state with claimed + delta <= riemann everywhere in
// the cells, delta > 0; direction == Lower: dual). `riemann` must be in
// PNF with an inf-only prefix (Upper) or sup-only prefix (Lower);
// `claimed` must be in PNF with the opposite polarity.
enum class RefuteDirection { Upper, Lower };
FOFormulaPtr refutation_query(const ExprPtr& claimed, const ExprPtr& riemann,
                              RefuteDirection direction);

// Universal closure for "f <= 1 over nonnegative states". Exact for
// quantifier-free and sup-prefix PNF inputs; conservative (sound, possibly
// incomplete) for inf prefixes, whose binders are also universally
// quantified.
FOFormulaPtr one_bounded_formula(const ExprPtr& f);

// Closure for "f and g denote the same function over nonnegative states";
// both must be single-polarity PNF. Used to validate to_pnf.
FOFormulaPtr equivalence_formula(const ExprPtr& f, const ExprPtr& g);

}  // namespace pwv
