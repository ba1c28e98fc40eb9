#pragma once

// AST for pWhile programs and expectation expressions. All nodes are
// immutable values after construction and may be shared freely.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pwv/fo.hpp"
#include "pwv/rational.hpp"

namespace pwv {

// ---------------------------------------------------------------- Terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Const, Var, Plus, Monus, Times, App };
  Kind kind;
  Rational value;               // Const (nonnegative)
  std::string name;             // Var, App (App only with a DomainDecl in scope)
  std::vector<TermPtr> args;    // binary ops: 2; App: n
};

TermPtr t_const(Rational q);
TermPtr t_var(std::string name);
TermPtr t_plus(TermPtr a, TermPtr b);
TermPtr t_monus(TermPtr a, TermPtr b);
TermPtr t_times(TermPtr a, TermPtr b);
TermPtr t_app(std::string name, std::vector<TermPtr> args);

bool term_equal(const TermPtr& a, const TermPtr& b);
void term_vars(const TermPtr& t, std::set<std::string>& out);

// ---------------------------------------------------------------- Guards

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

struct Guard {
  // Core: Lt, Not, And. The rest is sugar normalizable to the core.
  enum class Kind { Lt, Le, Eq, Neq, Gt, Ge, Not, And, Or, Implies };
  Kind kind;
  TermPtr lhs, rhs;             // comparisons
  GuardPtr a, b;                // Not: a; binary connectives: a, b
};

GuardPtr g_cmp(Guard::Kind k, TermPtr lhs, TermPtr rhs);
GuardPtr g_not(GuardPtr g);
GuardPtr g_and(GuardPtr a, GuardPtr b);
GuardPtr g_or(GuardPtr a, GuardPtr b);
GuardPtr g_implies(GuardPtr a, GuardPtr b);

// Rewrites sugar into the {<, not, and} core, semantics-preserving.
GuardPtr normalize_guard(const GuardPtr& g);

bool guard_equal(const GuardPtr& a, const GuardPtr& b);
void guard_vars(const GuardPtr& g, std::set<std::string>& out);

// ------------------------------------------------------------ Expectations

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Term, Iverson, Scale, Sum, Sup, Inf };
  Kind kind;
  TermPtr term;                 // Term
  GuardPtr guard;               // Iverson
  Rational q;                   // Scale (nonnegative)
  std::string var;              // Sup/Inf binder
  Rational lo, hi;              // Sup/Inf interval, 0 <= lo <= hi
  ExprPtr a, b;                 // Iverson/Scale/Sup/Inf: a; Sum: a, b
};

// Smart constructors. They perform the (only) normalizations the printer
// relies on for round-tripping: sums and scalings of plain terms are folded
// into the term language, nested scalings are collapsed, and scaling by 1
// is dropped.
ExprPtr e_term(TermPtr t);
ExprPtr e_const(Rational q);
ExprPtr e_iverson(GuardPtr g, ExprPtr e);
ExprPtr e_scale(Rational q, ExprPtr e);
ExprPtr e_sum(ExprPtr a, ExprPtr b);
ExprPtr e_sup(std::string var, Rational lo, Rational hi, ExprPtr body);
ExprPtr e_inf(std::string var, Rational lo, Rational hi, ExprPtr body);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

std::set<std::string> free_vars(const ExprPtr& f);
void free_vars(const ExprPtr& f, std::set<std::string>& out);

// All variable names occurring anywhere (free, bound, or as binders).
void all_names(const ExprPtr& f, std::set<std::string>& out);

// Number of distinct nodes (DAG size; shared subtrees counted once).
std::size_t expr_size(const ExprPtr& f);

// -------------------------------------------------------------- Programs

struct Program;
using ProgramPtr = std::shared_ptr<const Program>;

struct Program {
  enum class Kind { Skip, Diverge, Assign, Unif, Observe, Ite, PChoice, Seq, While };
  Kind kind;
  std::string var;              // Assign, Unif
  TermPtr term;                 // Assign rhs
  int unif_n = 0;               // Unif: per-statement N override (0 = task default)
  GuardPtr guard;               // Observe, Ite, While
  Rational p;                   // PChoice, 0 <= p <= 1
  ExprPtr invariant;            // While: optional @invariant annotation
  ProgramPtr a, b;              // children
};

ProgramPtr p_skip();
ProgramPtr p_diverge();
ProgramPtr p_assign(std::string var, TermPtr rhs);
ProgramPtr p_unif(std::string var, int n_override = 0);
ProgramPtr p_observe(GuardPtr g);
ProgramPtr p_ite(GuardPtr g, ProgramPtr then_p, ProgramPtr else_p);
ProgramPtr p_pchoice(ProgramPtr a, Rational p, ProgramPtr b);
ProgramPtr p_seq(ProgramPtr a, ProgramPtr b);
ProgramPtr p_while(GuardPtr g, ProgramPtr body, ExprPtr invariant = nullptr);

bool program_equal(const ProgramPtr& a, const ProgramPtr& b);
void program_vars(const ProgramPtr& p, std::set<std::string>& out);
bool has_while(const ProgramPtr& p);

// --------------------------------------------------------- Domain decls

struct DomainFunc {
  std::string name;
  int arity = 1;
};

struct DomainAxiom {
  std::string name;                 // label, e.g. "exp_step"
  std::vector<std::string> binders; // leading universals
  FOFormulaPtr body;                // quantifier-free over binders + symbols
};

struct DomainDecl {
  std::vector<DomainFunc> funcs;
  std::vector<DomainAxiom> axioms;
  bool empty() const { return funcs.empty() && axioms.empty(); }
  const DomainFunc* find(const std::string& name) const;
};

}  // namespace pwv
