#pragma once

// End-to-end verification workflows: loop-free bounds, superinvariant /
// subinvariant checking, conditional-expectation bounds, and the
// unrolling-based refutation procedure.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwv/ast.hpp"
#include "pwv/semantics.hpp"
#include "pwv/smt.hpp"
#include "pwv/transform.hpp"

namespace pwv {

// Raised on misuse (polarity violations, missing invariants, inputs that
// are provably out of a rule's scope). Distinct from Verdict::Unknown,
// which covers solver incompleteness and exhausted budgets.
struct VerifyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Status { Verified, Refuted, Unknown };

struct Provenance {
  std::string kind;  // which workflow produced the verdict
  int n = 0;         // partition size (refutation: the final unrolling depth)
  std::size_t query_nodes = 0;
  long long solver_time_ms = 0;
  std::vector<std::string> assumptions;
  bool witness_exact = true;
};

struct Verdict {
  Status status = Status::Unknown;
  State witness;       // Refuted: a state violating the claimed inequality
  std::string reason;  // Unknown
  Provenance prov;
};

enum class Direction { Upper, Lower };

struct VerifyOptions {
  SolverConfig solver;
  std::size_t max_nodes = 1000000;
  // Accept 1-boundedness side conditions without a solver check (recorded
  // as an explicit assumption). Mandatory when uninterpreted domain
  // symbols occur in a wlp input.
  bool assume_bounded = false;
  // Refutation budget: largest simultaneous unrolling/partition parameter
  // and an optional overall wall-clock cap (0 = none).
  unsigned max_n = 64;
  unsigned max_seconds = 0;
};

// Loop-free C. Upper direction with an upper kind checks T_N(C)(f) <= g;
// lower direction with a lower kind checks g <= T_N(C)(f). Verified
// implies the corresponding bound on the exact semantics. wlp kinds
// require f and g to be 1-bounded.
Verdict check_bound_loopfree(Direction dir, const TransformerKind& kind,
                             const ProgramPtr& C, const ExprPtr& f,
                             const ExprPtr& g, const DomainDecl& domain,
                             const VerifyOptions& opts);

// Is I a uwp_N-superinvariant of the (non-nested) loop w.r.t. post?
// Verified implies wp[loop](post) <= I. I must be quantifier-free; post
// must be inf-free.
Verdict check_superinvariant(int N, const ProgramPtr& loop, const ExprPtr& post,
                             const ExprPtr& I, const DomainDecl& domain,
                             const VerifyOptions& opts);

// Is J an lwlp_N-subinvariant of the loop w.r.t. post? Verified implies
// J <= wlp[loop](post). J and post must be 1-bounded (solver-checked, or
// assumed and flagged when domain symbols make the check undecidable).
Verdict check_subinvariant_wlp(int N, const ProgramPtr& loop, const ExprPtr& post,
                               const ExprPtr& J, const DomainDecl& domain,
                               const VerifyOptions& opts);

struct CwpBoundReport {
  ExprPtr numerator;    // I: wp[loop](f) <= I
  ExprPtr denominator;  // J: J <= wlp[loop](1)
  int n = 0, n_prime = 0;
  std::string side_condition;  // "J(s) > 0"
  std::string ratio;           // textual I/J description; no Expr division
};

struct CwpResult {
  // Report present iff verdict.status == Verified.
  std::optional<CwpBoundReport> report;
  Verdict verdict;
};

// cwp[loop](f) <= I/J wherever J(s) > 0, via a superinvariant check of I
// (partition N) and a wlp-subinvariant check of J w.r.t. 1 (partition N').
CwpResult cwp_upper_bound(const ProgramPtr& loop, const ExprPtr& f,
                          const ExprPtr& I, int N, const ExprPtr& J, int N_prime,
                          const DomainDecl& domain, const VerifyOptions& opts);

// Semi-decision procedure refuting wp[C](f) <= g: for n = 1, 2, 4, ...
// ask whether some nonnegative state satisfies g < lwp_n[unfold(C, n)](f).
// A sat answer yields Refuted with a certified witness; exhausting the
// budget yields Unknown("budget..."). Never wrong: Refuted soundly
// contradicts the exact semantics.
Verdict refute_upper_bound(const ProgramPtr& C, const ExprPtr& f, const ExprPtr& g,
                           const DomainDecl& domain, const VerifyOptions& opts);

// Dual procedure refuting g <= wlp[C](f), via uwlp_n[unfold(C, n)](f) < g.
// f and g must be 1-bounded.
Verdict refute_lower_bound_wlp(const ProgramPtr& C, const ExprPtr& f,
                               const ExprPtr& g, const DomainDecl& domain,
                               const VerifyOptions& opts);

// Whole-program bound check: loop-free segments are transformed directly;
// each (non-nested) while must carry an @invariant annotation, which is
// checked with the matching rule and threaded backwards through the
// sequence as the next post-expectation. Upper direction uses uwp with
// superinvariants; lower direction uses lwlp with subinvariants.
Verdict check_bound_program(Direction dir, const TransformerKind& kind,
                            const ProgramPtr& C, const ExprPtr& f,
                            const ExprPtr& g, const DomainDecl& domain,
                            const VerifyOptions& opts);

}  // namespace pwv
