#include "pwv/printer.hpp"

#include <sstream>

namespace pwv {

namespace {

// ------------------------------------------------------------------ Terms

// Precedence: 0 = additive (+, -), 1 = multiplicative (*), 2 = atom.
void print_term(std::ostream& os, const TermPtr& t, int min_prec) {
  switch (t->kind) {
    case Term::Kind::Const:
      os << rational_to_string(t->value);
      return;
    case Term::Kind::Var:
      os << t->name;
      return;
    case Term::Kind::App: {
      os << t->name << "(";
      for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) os << ", ";
        print_term(os, t->args[i], 0);
      }
      os << ")";
      return;
    }
    case Term::Kind::Plus:
    case Term::Kind::Monus: {
      bool paren = min_prec > 0;
      if (paren) os << "(";
      print_term(os, t->args[0], 0);
      os << (t->kind == Term::Kind::Plus ? " + " : " - ");
      print_term(os, t->args[1], 1);
      if (paren) os << ")";
      return;
    }
    case Term::Kind::Times: {
      bool paren = min_prec > 1;
      if (paren) os << "(";
      print_term(os, t->args[0], 1);
      os << " * ";
      print_term(os, t->args[1], 2);
      if (paren) os << ")";
      return;
    }
  }
}

// ----------------------------------------------------------------- Guards

// Precedence: 0 = ->, 1 = ||, 2 = &&, 3 = !, 4 = comparison.
int guard_prec(const GuardPtr& g) {
  switch (g->kind) {
    case Guard::Kind::Implies: return 0;
    case Guard::Kind::Or: return 1;
    case Guard::Kind::And: return 2;
    case Guard::Kind::Not: return 3;
    default: return 4;
  }
}

const char* cmp_op(Guard::Kind k) {
  switch (k) {
    case Guard::Kind::Lt: return " < ";
    case Guard::Kind::Le: return " <= ";
    case Guard::Kind::Eq: return " == ";
    case Guard::Kind::Neq: return " != ";
    case Guard::Kind::Gt: return " > ";
    case Guard::Kind::Ge: return " >= ";
    default: return "?";
  }
}

void print_guard(std::ostream& os, const GuardPtr& g, int min_prec) {
  int prec = guard_prec(g);
  bool paren = prec < min_prec;
  if (paren) os << "(";
  switch (g->kind) {
    case Guard::Kind::Implies:
      print_guard(os, g->a, 1);
      os << " -> ";
      print_guard(os, g->b, 0);
      break;
    case Guard::Kind::Or:
      print_guard(os, g->a, 1);
      os << " || ";
      print_guard(os, g->b, 2);
      break;
    case Guard::Kind::And:
      print_guard(os, g->a, 2);
      os << " && ";
      print_guard(os, g->b, 3);
      break;
    case Guard::Kind::Not:
      os << "!";
      print_guard(os, g->a, 3);
      break;
    default:
      print_term(os, g->lhs, 0);
      os << cmp_op(g->kind);
      print_term(os, g->rhs, 0);
      break;
  }
  if (paren) os << ")";
}

// ------------------------------------------------------------ Expectations

bool contains_quant(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Sup:
    case Expr::Kind::Inf:
      return true;
    case Expr::Kind::Term:
      return false;
    case Expr::Kind::Sum:
      return contains_quant(e->a) || contains_quant(e->b);
    default:
      return contains_quant(e->a);
  }
}

bool term_additive_top(const ExprPtr& e) {
  return e->kind == Expr::Kind::Term &&
         (e->term->kind == Term::Kind::Plus || e->term->kind == Term::Kind::Monus);
}

// Context of an expectation being printed:
//   Flat     - top level, or left operand of a sum
//   SumRight - right operand of a sum
//   Operand  - operand of an Iverson bracket or a scaling
enum class Ctx { Flat, SumRight, Operand };

void print_expr(std::ostream& os, const ExprPtr& e, Ctx ctx) {
  switch (e->kind) {
    case Expr::Kind::Term: {
      bool paren = ctx != Ctx::Flat && term_additive_top(e);
      if (paren) os << "(";
      print_term(os, e->term, 0);
      if (paren) os << ")";
      return;
    }
    case Expr::Kind::Sum: {
      bool paren = ctx != Ctx::Flat;
      if (paren) os << "(";
      // A left operand with a trailing quantifier would swallow " + b" on
      // re-parse; parenthesize it.
      if (contains_quant(e->a)) {
        os << "(";
        print_expr(os, e->a, Ctx::Flat);
        os << ")";
      } else {
        print_expr(os, e->a, Ctx::Flat);
      }
      os << " + ";
      print_expr(os, e->b, Ctx::SumRight);
      if (paren) os << ")";
      return;
    }
    case Expr::Kind::Iverson:
      os << "[";
      print_guard(os, e->guard, 0);
      os << "] * ";
      print_expr(os, e->a, Ctx::Operand);
      return;
    case Expr::Kind::Scale:
      os << rational_to_string(e->q) << " * ";
      print_expr(os, e->a, Ctx::Operand);
      return;
    case Expr::Kind::Sup:
    case Expr::Kind::Inf: {
      // A quantifier that is an operand extends to the end of the
      // expression on re-parse, so it never needs its own parentheses;
      // enclosing contexts that must cut it short add them (see Sum).
      os << (e->kind == Expr::Kind::Sup ? "sup " : "inf ") << e->var << " in ["
         << rational_to_string(e->lo) << ", " << rational_to_string(e->hi)
         << "]: ";
      print_expr(os, e->a, Ctx::Flat);
      return;
    }
  }
}

// -------------------------------------------------------------- Programs

void print_program(std::ostream& os, const ProgramPtr& p) {
  switch (p->kind) {
    case Program::Kind::Skip:
      os << "skip";
      return;
    case Program::Kind::Diverge:
      os << "diverge";
      return;
    case Program::Kind::Assign:
      os << p->var << " := ";
      print_term(os, p->term, 0);
      return;
    case Program::Kind::Unif:
      os << p->var << " := unif";
      if (p->unif_n > 0) os << "@" << p->unif_n;
      return;
    case Program::Kind::Observe:
      os << "observe(";
      print_guard(os, p->guard, 0);
      os << ")";
      return;
    case Program::Kind::Ite:
      os << "if (";
      print_guard(os, p->guard, 0);
      os << ") { ";
      print_program(os, p->a);
      os << " } else { ";
      print_program(os, p->b);
      os << " }";
      return;
    case Program::Kind::PChoice:
      os << "{ ";
      print_program(os, p->a);
      os << " } [" << rational_to_string(p->p) << "] { ";
      print_program(os, p->b);
      os << " }";
      return;
    case Program::Kind::Seq:
      print_program(os, p->a);
      os << "; ";
      print_program(os, p->b);
      return;
    case Program::Kind::While:
      os << "while (";
      print_guard(os, p->guard, 0);
      os << ") ";
      if (p->invariant) {
        os << "@invariant(";
        print_expr(os, p->invariant, Ctx::Flat);
        os << ") ";
      }
      os << "{ ";
      print_program(os, p->a);
      os << " }";
      return;
  }
}

void print_fo_term(std::ostream& os, const FOTermPtr& t, int min_prec);

void print_fo_formula(std::ostream& os, const FOFormulaPtr& f, int min_prec) {
  auto prec = [](const FOFormulaPtr& g) {
    switch (g->kind) {
      case FOFormula::Kind::Implies: return 0;
      case FOFormula::Kind::Or: return 1;
      case FOFormula::Kind::And: return 2;
      case FOFormula::Kind::Not: return 3;
      default: return 4;
    }
  };
  int p = prec(f);
  bool paren = p < min_prec;
  if (paren) os << "(";
  switch (f->kind) {
    case FOFormula::Kind::Cmp:
      print_fo_term(os, f->lhs, 0);
      os << (f->op == FOFormula::CmpOp::Lt ? " < "
             : f->op == FOFormula::CmpOp::Le ? " <= " : " == ");
      print_fo_term(os, f->rhs, 0);
      break;
    case FOFormula::Kind::Not:
      os << "!";
      print_fo_formula(os, f->kids[0], 3);
      break;
    case FOFormula::Kind::And:
      for (std::size_t i = 0; i < f->kids.size(); ++i) {
        if (i) os << " && ";
        print_fo_formula(os, f->kids[i], 3);
      }
      break;
    case FOFormula::Kind::Or:
      for (std::size_t i = 0; i < f->kids.size(); ++i) {
        if (i) os << " || ";
        print_fo_formula(os, f->kids[i], 2);
      }
      break;
    case FOFormula::Kind::Implies:
      print_fo_formula(os, f->kids[0], 1);
      os << " -> ";
      print_fo_formula(os, f->kids[1], 0);
      break;
    case FOFormula::Kind::Forall:
      os << "forall " << f->var << ". ";
      print_fo_formula(os, f->body, 0);
      break;
    case FOFormula::Kind::Exists:
      os << "exists " << f->var << ". ";
      print_fo_formula(os, f->body, 0);
      break;
    case FOFormula::Kind::BoolConst:
      os << (f->bval ? "true" : "false");
      break;
  }
  if (paren) os << ")";
}

void print_fo_term(std::ostream& os, const FOTermPtr& t, int min_prec) {
  switch (t->kind) {
    case FOTerm::Kind::Const: {
      bool neg = t->value < 0;
      bool paren = neg && min_prec > 0;
      if (paren) os << "(";
      os << rational_to_string(t->value);
      if (paren) os << ")";
      return;
    }
    case FOTerm::Kind::Var:
      os << t->name;
      return;
    case FOTerm::Kind::Add:
    case FOTerm::Kind::Sub: {
      bool paren = min_prec > 0;
      if (paren) os << "(";
      print_fo_term(os, t->args[0], 0);
      os << (t->kind == FOTerm::Kind::Add ? " + " : " - ");
      print_fo_term(os, t->args[1], 1);
      if (paren) os << ")";
      return;
    }
    case FOTerm::Kind::Mul: {
      bool paren = min_prec > 1;
      if (paren) os << "(";
      print_fo_term(os, t->args[0], 1);
      os << " * ";
      print_fo_term(os, t->args[1], 2);
      if (paren) os << ")";
      return;
    }
    case FOTerm::Kind::Ite:
      os << "ite(";
      print_fo_formula(os, t->cond, 0);
      os << ", ";
      print_fo_term(os, t->args[0], 0);
      os << ", ";
      print_fo_term(os, t->args[1], 0);
      os << ")";
      return;
    case FOTerm::Kind::App:
      os << t->name << "(";
      for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) os << ", ";
        print_fo_term(os, t->args[i], 0);
      }
      os << ")";
      return;
  }
}

}  // namespace

std::string pretty(const TermPtr& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

std::string pretty(const GuardPtr& g) {
  std::ostringstream os;
  print_guard(os, g, 0);
  return os.str();
}

std::string pretty(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, Ctx::Flat);
  return os.str();
}

std::string pretty(const ProgramPtr& p) {
  std::ostringstream os;
  print_program(os, p);
  return os.str();
}

std::string pretty(const DomainDecl& d) {
  std::ostringstream os;
  os << "domain {";
  for (const auto& f : d.funcs)
    os << " func " << f.name << "(" << f.arity << ");";
  for (const auto& ax : d.axioms) {
    os << " axiom " << ax.name << ": ";
    for (const auto& b : ax.binders) os << "forall " << b << ". ";
    print_fo_formula(os, ax.body, 0);
    os << ";";
  }
  os << " }";
  return os.str();
}

}  // namespace pwv
