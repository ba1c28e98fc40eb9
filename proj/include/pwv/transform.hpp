#pragma once

// Riemann weakest (liberal) pre-expectation transformers for loop-free
// programs, characteristic functions, loop unrolling, and the discrete
// nondeterministic encoding.

#include <stdexcept>
#include <string>

#include "pwv/ast.hpp"
#include "pwv/semantics.hpp"

namespace pwv {

struct TransformerKind {
  enum class Op { Lwp, Uwp, Lwlp, Uwlp };
  Op op;
  int n;  // partition size, >= 1

  bool is_lower() const { return op == Op::Lwp || op == Op::Lwlp; }
  bool is_wlp() const { return op == Op::Lwlp || op == Op::Uwlp; }
  const char* name() const {
    switch (op) {
      case Op::Lwp: return "lwp";
      case Op::Uwp: return "uwp";
      case Op::Lwlp: return "lwlp";
      case Op::Uwlp: return "uwlp";
    }
    return "?";
  }
};

struct TransformError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransformOptions {
  // Hard cap on the distinct-node count of intermediate/final expressions.
  std::size_t max_nodes = 1000000;
  // wlp kinds require a 1-bounded post-expectation; the caller certifies
  // this (via check_one_bounded or an explicit assumption) and sets the flag.
  bool input_one_bounded = false;
};

// Structural recursion over a loop-free program per the transformer rules;
// x := unif becomes (1/N) * sum of per-cell sup (upper kinds) or inf
// (lower kinds) quantifiers, where N is the statement's override or
// kind.n. Throws TransformError on loops, on an uncertified wlp input, or
// when the node cap is exceeded.
ExprPtr transform(const TransformerKind& kind, const ProgramPtr& C,
                  const ExprPtr& f, const TransformOptions& opts = {});

// [phi] * T(body)(candidate) + [!phi] * post for a non-nested loop.
ExprPtr char_fn_apply(const TransformerKind& kind, const ProgramPtr& loop,
                      const ExprPtr& post, const ExprPtr& candidate,
                      const TransformOptions& opts = {});

// d-fold unrolling: unfold(while,0) = diverge;
// unfold(while,d+1) = ite(phi, seq(unfold(B,d), unfold(while,d)), skip);
// homomorphic on every other constructor.
ProgramPtr unfold(const ProgramPtr& C, unsigned n);

// Emits the discrete nondeterministic encoding: every x := unif becomes a
// discrete uniform choice of a cell index followed by a havoc-within-cell
// of the given polarity. Deterministic text, documented in
// docs/encode-format.md.
enum class Polarity { Angelic, Demonic };
std::string encode_nondet(const ProgramPtr& C, int N, Polarity polarity);

}  // namespace pwv
