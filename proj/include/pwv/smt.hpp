#pragma once

// SMT-LIB 2 emission and external-solver orchestration. Queries are
// written to a script, handed to a solver process, and the answer (plus
// any model) is parsed back; models for quantifier-free queries are
// re-validated by exact evaluation before they are trusted.

#include <map>
#include <optional>
#include <string>

#include "pwv/ast.hpp"
#include "pwv/encode.hpp"
#include "pwv/fo.hpp"

namespace pwv {

struct SolverConfig {
  // Command prefix invoked as "timeout <sec> <cmd> <script-file>". Empty
  // falls back to the PWV_SOLVER environment variable, then the built-in
  // default.
  std::string solver_cmd;
  unsigned timeout_sec = 180;
  std::optional<unsigned> random_seed;
  // When nonempty, every emitted script is also written here (numbered).
  std::string debug_dir;
};

// Resolved command prefix (flag > environment > built-in default).
std::string resolve_solver_cmd(const SolverConfig& cfg);

enum class SolverStatus { Valid, Invalid, Unknown };

struct SolverVerdict {
  SolverStatus status = SolverStatus::Unknown;
  // Invalid / satisfiable: parsed assignment of the script's constants.
  std::map<std::string, Rational> model;
  bool model_exact = true;  // false when the solver reported algebraic values
  std::string reason;       // Unknown: why
  long long solver_time_ms = 0;
};

// Serializes a closed query. For a validity check the caller passes the
// negated, skolemized form: the leading universal prefix of `phi` is
// stripped into free constants and the body is asserted negated
// (H and not C for an implication body). For a satisfiability check the
// formula is asserted as is with its free variables as constants.
// Domain functions get Real^k -> Real declarations, an automatic
// nonnegative-codomain axiom, and their user axioms. Repeated compound
// ground subterms are shared via define-fun. Logic is QF_NRA when the
// asserted script is quantifier-free and domain-free, else ALL.
// Deterministic: equal inputs yield byte-identical scripts.
std::string emit_smtlib(const FOFormulaPtr& phi, const DomainDecl& domain,
                        bool negate_universal,
                        const std::optional<unsigned>& random_seed = {});

// Validity of `phi` (a universal closure). unsat -> Valid; sat -> Invalid
// with the model as a counterexample (re-validated against the
// quantifier-free asserted part when possible); everything else ->
// Unknown, never a definite answer.
SolverVerdict check_validity(const FOFormulaPtr& phi, const DomainDecl& domain,
                             const SolverConfig& cfg);

// Satisfiability of `phi`: sat -> Invalid-style verdict carrying the model
// (the caller reads it as "witness found"), unsat -> Valid read as "no
// witness", unknown -> Unknown.
SolverVerdict check_satisfiable(const FOFormulaPtr& phi, const DomainDecl& domain,
                                const SolverConfig& cfg);

// Validity of "f <= 1 over nonnegative states" via one_bounded_formula.
// Exact for quantifier-free and sup-prefix inputs; conservative for inf
// prefixes.
SolverVerdict check_one_bounded(const ExprPtr& f, const DomainDecl& domain,
                                const SolverConfig& cfg);

// Runs the raw script through the solver (used by tests and debugging).
struct RawAnswer {
  enum class Kind { Sat, Unsat, Unknown } kind = Kind::Unknown;
  std::map<std::string, Rational> model;
  bool model_exact = true;
  std::string reason;
  long long time_ms = 0;
};
RawAnswer run_solver(const std::string& script, const SolverConfig& cfg);

}  // namespace pwv
