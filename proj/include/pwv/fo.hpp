#pragma once

// First-order real-arithmetic formulas: polynomial atoms with true
// subtraction, boolean connectives, quantifiers, and applications of
// user-declared uninterpreted function symbols. Conditional-value (ite)
// terms are part of the term language; they are how monus and Iverson
// guards are encoded without auxiliary existentials.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pwv/rational.hpp"

namespace pwv {

struct FOTerm;
struct FOFormula;
using FOTermPtr = std::shared_ptr<const FOTerm>;
using FOFormulaPtr = std::shared_ptr<const FOFormula>;

struct FOTerm {
  enum class Kind { Const, Var, Add, Sub, Mul, Ite, App };
  Kind kind;
  Rational value;               // Const
  std::string name;             // Var, App
  std::vector<FOTermPtr> args;  // Add/Sub/Mul: 2; Ite: then/else; App: n
  FOFormulaPtr cond;            // Ite
};

struct FOFormula {
  enum class Kind { Cmp, Not, And, Or, Implies, Forall, Exists, BoolConst };
  enum class CmpOp { Lt, Le, Eq };
  Kind kind;
  CmpOp op = CmpOp::Lt;          // Cmp
  FOTermPtr lhs, rhs;            // Cmp
  std::vector<FOFormulaPtr> kids;  // Not: 1; And/Or: n >= 1; Implies: 2
  std::string var;               // Forall/Exists binder
  FOFormulaPtr body;             // Forall/Exists
  bool bval = false;             // BoolConst
};

FOTermPtr fo_const(Rational q);
FOTermPtr fo_var(std::string name);
FOTermPtr fo_add(FOTermPtr a, FOTermPtr b);
FOTermPtr fo_sub(FOTermPtr a, FOTermPtr b);
FOTermPtr fo_mul(FOTermPtr a, FOTermPtr b);
FOTermPtr fo_ite(FOFormulaPtr cond, FOTermPtr then_t, FOTermPtr else_t);
FOTermPtr fo_app(std::string name, std::vector<FOTermPtr> args);

FOFormulaPtr fo_cmp(FOFormula::CmpOp op, FOTermPtr lhs, FOTermPtr rhs);
FOFormulaPtr fo_not(FOFormulaPtr a);
FOFormulaPtr fo_and(std::vector<FOFormulaPtr> kids);  // empty -> true
FOFormulaPtr fo_or(std::vector<FOFormulaPtr> kids);   // empty -> false
FOFormulaPtr fo_implies(FOFormulaPtr a, FOFormulaPtr b);
FOFormulaPtr fo_forall(std::string var, FOFormulaPtr body);
FOFormulaPtr fo_exists(std::string var, FOFormulaPtr body);
FOFormulaPtr fo_bool(bool value);

void fo_free_vars(const FOTermPtr& t, std::set<std::string>& out);
void fo_free_vars(const FOFormulaPtr& f, std::set<std::string>& out);

// Collects the names of all applied uninterpreted function symbols.
void fo_app_symbols(const FOTermPtr& t, std::set<std::string>& out);
void fo_app_symbols(const FOFormulaPtr& f, std::set<std::string>& out);

bool fo_has_quantifier(const FOFormulaPtr& f);

// Evaluation over exact rationals; throws std::runtime_error on
// quantifiers or uninterpreted applications (used for model re-validation
// of quantifier-free matrices only).
Rational fo_eval(const FOTermPtr& t, const std::map<std::string, Rational>& env);
bool fo_eval(const FOFormulaPtr& f, const std::map<std::string, Rational>& env);

}  // namespace pwv
