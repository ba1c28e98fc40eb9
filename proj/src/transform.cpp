#include "pwv/transform.hpp"

#include <sstream>

#include "pwv/printer.hpp"

namespace pwv {

namespace {

void check_cap(const ExprPtr& e, const TransformOptions& opts) {
  std::size_t n = expr_size(e);
  if (n > opts.max_nodes)
    throw TransformError("expression size " + std::to_string(n) +
                         " exceeds the node cap of " +
                         std::to_string(opts.max_nodes));
}

ExprPtr transform_rec(const TransformerKind& kind, const ProgramPtr& C,
                      const ExprPtr& f, const TransformOptions& opts) {
  switch (C->kind) {
    case Program::Kind::Skip:
      return f;
    case Program::Kind::Diverge:
      return kind.is_wlp() ? e_const(1) : e_const(0);
    case Program::Kind::Assign:
      return substitute(f, C->var, C->term);
    case Program::Kind::Unif: {
      int n = C->unif_n > 0 ? C->unif_n : kind.n;
      ExprPtr acc;
      for (int i = 0; i < n; ++i) {
        Rational lo(i, n), hi(i + 1, n);
        ExprPtr cell = kind.is_lower() ? e_inf(C->var, lo, hi, f)
                                       : e_sup(C->var, lo, hi, f);
        acc = acc ? e_sum(acc, cell) : cell;
      }
      return e_scale(Rational(1, n), acc);
    }
    case Program::Kind::Observe:
      return e_iverson(C->guard, f);
    case Program::Kind::Ite: {
      ExprPtr a = transform_rec(kind, C->a, f, opts);
      ExprPtr b = transform_rec(kind, C->b, f, opts);
      return e_sum(e_iverson(C->guard, a), e_iverson(g_not(C->guard), b));
    }
    case Program::Kind::PChoice: {
      ExprPtr a = transform_rec(kind, C->a, f, opts);
      ExprPtr b = transform_rec(kind, C->b, f, opts);
      return e_sum(e_scale(C->p, a), e_scale(Rational(1) - C->p, b));
    }
    case Program::Kind::Seq: {
      ExprPtr g = transform_rec(kind, C->b, f, opts);
      check_cap(g, opts);
      return transform_rec(kind, C->a, g, opts);
    }
    case Program::Kind::While:
      throw TransformError("loop encountered: transform applies to loop-free programs only");
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ExprPtr transform(const TransformerKind& kind, const ProgramPtr& C,
                  const ExprPtr& f, const TransformOptions& opts) {
  if (kind.n < 1) throw TransformError("partition size must be >= 1");
  if (kind.is_wlp() && !opts.input_one_bounded)
    throw TransformError(
        "wlp transformer requires a 1-bounded post-expectation "
        "(certify via check_one_bounded and set input_one_bounded)");
  ExprPtr result = transform_rec(kind, C, f, opts);
  check_cap(result, opts);
  return result;
}

ExprPtr char_fn_apply(const TransformerKind& kind, const ProgramPtr& loop,
                      const ExprPtr& post, const ExprPtr& candidate,
                      const TransformOptions& opts) {
  if (loop->kind != Program::Kind::While)
    throw TransformError("char_fn_apply expects a while loop");
  if (has_while(loop->a))
    throw TransformError("non-nested loops only");
  ExprPtr body_t = transform(kind, loop->a, candidate, opts);
  return e_sum(e_iverson(loop->guard, body_t),
               e_iverson(g_not(loop->guard), post));
}

ProgramPtr unfold(const ProgramPtr& C, unsigned n) {
  switch (C->kind) {
    case Program::Kind::Skip:
    case Program::Kind::Diverge:
    case Program::Kind::Assign:
    case Program::Kind::Unif:
    case Program::Kind::Observe:
      return C;
    case Program::Kind::Ite:
      return p_ite(C->guard, unfold(C->a, n), unfold(C->b, n));
    case Program::Kind::PChoice:
      return p_pchoice(unfold(C->a, n), C->p, unfold(C->b, n));
    case Program::Kind::Seq:
      return p_seq(unfold(C->a, n), unfold(C->b, n));
    case Program::Kind::While: {
      if (n == 0) return p_diverge();
      return p_ite(C->guard, p_seq(unfold(C->a, n - 1), unfold(C, n - 1)),
                   p_skip());
    }
  }
  throw std::logic_error("unreachable");
}

// ------------------------------------------------- Nondeterministic encoding

namespace {

struct NondetEmitter {
  std::ostringstream os;
  int indent = 1;
  int unif_count = 0;
  int choice_count = 0;
  int task_n;
  Polarity polarity;

  void line(const std::string& s) {
    for (int i = 0; i < indent; ++i) os << "    ";
    os << s << "\n";
  }

  void emit(const ProgramPtr& p) {
    switch (p->kind) {
      case Program::Kind::Skip:
        line("skip");
        return;
      case Program::Kind::Diverge:
        line("// --- diverge");
        line("assert 1");
        line("assume ?(false)");
        line("// ---");
        return;
      case Program::Kind::Assign:
        line(p->var + " = " + pretty(p->term));
        return;
      case Program::Kind::Unif: {
        int n = p->unif_n > 0 ? p->unif_n : task_n;
        std::string j = "j" + std::to_string(++unif_count);
        bool angelic = polarity == Polarity::Angelic;
        if (n == 1) {
          line(std::string(angelic ? "cohavoc " : "havoc ") + p->var);
          line(std::string(angelic ? "coassume ?!(" : "assume ?(") + "0 <= " +
               p->var + " && " + p->var + " <= 1)");
          return;
        }
        line("var " + j + " : UInt = unif(0, " + std::to_string(n - 1) +
             ") // discrete_uniform(" + std::to_string(n) + ")");
        line(std::string(angelic ? "cohavoc " : "havoc ") + p->var);
        line(std::string(angelic ? "coassume ?!(" : "assume ?(") + j + " / " +
             std::to_string(n) + " <= " + p->var + " && " + p->var + " <= (" +
             j + " + 1) / " + std::to_string(n) + ")");
        return;
      }
      case Program::Kind::Observe:
        line("assert ?(" + pretty(p->guard) + ") // observe");
        return;
      case Program::Kind::Ite:
        line("if " + pretty(p->guard) + " {");
        ++indent;
        emit(p->a);
        --indent;
        line("} else {");
        ++indent;
        emit(p->b);
        --indent;
        line("}");
        return;
      case Program::Kind::PChoice: {
        std::string c = "choice" + std::to_string(++choice_count);
        line("var " + c + " : Bool = flip(" + rational_to_string(p->p) + ")");
        line("if " + c + " {");
        ++indent;
        emit(p->a);
        --indent;
        line("} else {");
        ++indent;
        emit(p->b);
        --indent;
        line("}");
        return;
      }
      case Program::Kind::Seq:
        emit(p->a);
        emit(p->b);
        return;
      case Program::Kind::While:
        if (p->invariant) line("@invariant(" + pretty(p->invariant) + ")");
        line("while " + pretty(p->guard) + " {");
        ++indent;
        emit(p->a);
        --indent;
        line("}");
        return;
    }
  }
};

}  // namespace

std::string encode_nondet(const ProgramPtr& C, int N, Polarity polarity) {
  if (N < 1) throw TransformError("partition size must be >= 1");
  NondetEmitter em;
  em.task_n = N;
  em.polarity = polarity;
  em.os << (polarity == Polarity::Angelic ? "coproc" : "proc") << " main() {\n";
  em.emit(C);
  em.os << "}\n";
  return em.os.str();
}

}  // namespace pwv
