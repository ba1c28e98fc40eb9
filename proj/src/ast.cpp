#include "pwv/ast.hpp"

#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace pwv {

// ---------------------------------------------------------------- Terms

namespace {
std::shared_ptr<Term> mk_term(Term::Kind k) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  return t;
}
}  // namespace

TermPtr t_const(Rational q) {
  if (q < 0) throw std::invalid_argument("negative term constant");
  auto t = mk_term(Term::Kind::Const);
  t->value = std::move(q);
  return t;
}

TermPtr t_var(std::string name) {
  auto t = mk_term(Term::Kind::Var);
  t->name = std::move(name);
  return t;
}

static TermPtr t_binop(Term::Kind k, TermPtr a, TermPtr b) {
  auto t = mk_term(k);
  t->args = {std::move(a), std::move(b)};
  return t;
}

TermPtr t_plus(TermPtr a, TermPtr b) { return t_binop(Term::Kind::Plus, std::move(a), std::move(b)); }
TermPtr t_monus(TermPtr a, TermPtr b) { return t_binop(Term::Kind::Monus, std::move(a), std::move(b)); }
TermPtr t_times(TermPtr a, TermPtr b) { return t_binop(Term::Kind::Times, std::move(a), std::move(b)); }

TermPtr t_app(std::string name, std::vector<TermPtr> args) {
  auto t = mk_term(Term::Kind::App);
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Const:
      return a->value == b->value;
    case Term::Kind::Var:
      return a->name == b->name;
    case Term::Kind::App:
      if (a->name != b->name) return false;
      [[fallthrough]];
    default:
      if (a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!term_equal(a->args[i], b->args[i])) return false;
      return true;
  }
}

void term_vars(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == Term::Kind::Var) out.insert(t->name);
  for (const auto& a : t->args) term_vars(a, out);
}

// ---------------------------------------------------------------- Guards

namespace {
std::shared_ptr<Guard> mk_guard(Guard::Kind k) {
  auto g = std::make_shared<Guard>();
  g->kind = k;
  return g;
}

bool is_cmp(Guard::Kind k) {
  switch (k) {
    case Guard::Kind::Lt:
    case Guard::Kind::Le:
    case Guard::Kind::Eq:
    case Guard::Kind::Neq:
    case Guard::Kind::Gt:
    case Guard::Kind::Ge:
      return true;
    default:
      return false;
  }
}
}  // namespace

GuardPtr g_cmp(Guard::Kind k, TermPtr lhs, TermPtr rhs) {
  if (!is_cmp(k)) throw std::invalid_argument("g_cmp: not a comparison kind");
  auto g = mk_guard(k);
  g->lhs = std::move(lhs);
  g->rhs = std::move(rhs);
  return g;
}

GuardPtr g_not(GuardPtr x) {
  auto g = mk_guard(Guard::Kind::Not);
  g->a = std::move(x);
  return g;
}

static GuardPtr g_conn(Guard::Kind k, GuardPtr a, GuardPtr b) {
  auto g = mk_guard(k);
  g->a = std::move(a);
  g->b = std::move(b);
  return g;
}

GuardPtr g_and(GuardPtr a, GuardPtr b) { return g_conn(Guard::Kind::And, std::move(a), std::move(b)); }
GuardPtr g_or(GuardPtr a, GuardPtr b) { return g_conn(Guard::Kind::Or, std::move(a), std::move(b)); }
GuardPtr g_implies(GuardPtr a, GuardPtr b) { return g_conn(Guard::Kind::Implies, std::move(a), std::move(b)); }

GuardPtr normalize_guard(const GuardPtr& g) {
  switch (g->kind) {
    case Guard::Kind::Lt:
      return g;
    case Guard::Kind::Le:  // a <= b  ==  not (b < a)
      return g_not(g_cmp(Guard::Kind::Lt, g->rhs, g->lhs));
    case Guard::Kind::Eq:  // a == b  ==  not (a < b) and not (b < a)
      return g_and(g_not(g_cmp(Guard::Kind::Lt, g->lhs, g->rhs)),
                   g_not(g_cmp(Guard::Kind::Lt, g->rhs, g->lhs)));
    case Guard::Kind::Neq:
      return g_not(normalize_guard(g_cmp(Guard::Kind::Eq, g->lhs, g->rhs)));
    case Guard::Kind::Gt:
      return g_cmp(Guard::Kind::Lt, g->rhs, g->lhs);
    case Guard::Kind::Ge:
      return g_not(g_cmp(Guard::Kind::Lt, g->lhs, g->rhs));
    case Guard::Kind::Not:
      return g_not(normalize_guard(g->a));
    case Guard::Kind::And:
      return g_and(normalize_guard(g->a), normalize_guard(g->b));
    case Guard::Kind::Or:  // a or b  ==  not (not a and not b)
      return g_not(g_and(g_not(normalize_guard(g->a)), g_not(normalize_guard(g->b))));
    case Guard::Kind::Implies:  // a -> b  ==  not (a and not b)
      return g_not(g_and(normalize_guard(g->a), g_not(normalize_guard(g->b))));
  }
  throw std::logic_error("unreachable");
}

bool guard_equal(const GuardPtr& a, const GuardPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (is_cmp(a->kind))
    return term_equal(a->lhs, b->lhs) && term_equal(a->rhs, b->rhs);
  if (a->kind == Guard::Kind::Not) return guard_equal(a->a, b->a);
  return guard_equal(a->a, b->a) && guard_equal(a->b, b->b);
}

void guard_vars(const GuardPtr& g, std::set<std::string>& out) {
  if (is_cmp(g->kind)) {
    term_vars(g->lhs, out);
    term_vars(g->rhs, out);
    return;
  }
  if (g->a) guard_vars(g->a, out);
  if (g->b) guard_vars(g->b, out);
}

// ------------------------------------------------------------ Expectations

namespace {
std::shared_ptr<Expr> mk_expr(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}
}  // namespace

ExprPtr e_term(TermPtr t) {
  auto e = mk_expr(Expr::Kind::Term);
  e->term = std::move(t);
  return e;
}

ExprPtr e_const(Rational q) { return e_term(t_const(std::move(q))); }

ExprPtr e_iverson(GuardPtr g, ExprPtr x) {
  auto e = mk_expr(Expr::Kind::Iverson);
  e->guard = std::move(g);
  e->a = std::move(x);
  return e;
}

ExprPtr e_scale(Rational q, ExprPtr x) {
  if (q < 0) throw std::invalid_argument("negative scaling factor");
  if (q == 1) return x;
  if (x->kind == Expr::Kind::Term)
    return e_term(t_times(t_const(std::move(q)), x->term));
  if (x->kind == Expr::Kind::Scale)
    return e_scale(q * x->q, x->a);
  auto e = mk_expr(Expr::Kind::Scale);
  e->q = std::move(q);
  e->a = std::move(x);
  return e;
}

ExprPtr e_sum(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::Term && b->kind == Expr::Kind::Term)
    return e_term(t_plus(a->term, b->term));
  auto e = mk_expr(Expr::Kind::Sum);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

static ExprPtr e_quant(Expr::Kind k, std::string var, Rational lo, Rational hi,
                       ExprPtr body) {
  if (lo < 0 || lo > hi)
    throw std::invalid_argument("quantifier interval must satisfy 0 <= lo <= hi");
  auto e = mk_expr(k);
  e->var = std::move(var);
  e->lo = std::move(lo);
  e->hi = std::move(hi);
  e->a = std::move(body);
  return e;
}

ExprPtr e_sup(std::string var, Rational lo, Rational hi, ExprPtr body) {
  return e_quant(Expr::Kind::Sup, std::move(var), std::move(lo), std::move(hi), std::move(body));
}

ExprPtr e_inf(std::string var, Rational lo, Rational hi, ExprPtr body) {
  return e_quant(Expr::Kind::Inf, std::move(var), std::move(lo), std::move(hi), std::move(body));
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Term:
      return term_equal(a->term, b->term);
    case Expr::Kind::Iverson:
      return guard_equal(a->guard, b->guard) && expr_equal(a->a, b->a);
    case Expr::Kind::Scale:
      return a->q == b->q && expr_equal(a->a, b->a);
    case Expr::Kind::Sum:
      return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    case Expr::Kind::Sup:
    case Expr::Kind::Inf:
      return a->var == b->var && a->lo == b->lo && a->hi == b->hi &&
             expr_equal(a->a, b->a);
  }
  throw std::logic_error("unreachable");
}

void free_vars(const ExprPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Expr::Kind::Term:
      term_vars(f->term, out);
      return;
    case Expr::Kind::Iverson:
      guard_vars(f->guard, out);
      free_vars(f->a, out);
      return;
    case Expr::Kind::Scale:
      free_vars(f->a, out);
      return;
    case Expr::Kind::Sum:
      free_vars(f->a, out);
      free_vars(f->b, out);
      return;
    case Expr::Kind::Sup:
    case Expr::Kind::Inf: {
      std::set<std::string> inner;
      free_vars(f->a, inner);
      inner.erase(f->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

std::set<std::string> free_vars(const ExprPtr& f) {
  std::set<std::string> out;
  free_vars(f, out);
  return out;
}

static void all_names_term(const TermPtr& t, std::set<std::string>& out) {
  term_vars(t, out);
}

void all_names(const ExprPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Expr::Kind::Term:
      all_names_term(f->term, out);
      return;
    case Expr::Kind::Iverson:
      guard_vars(f->guard, out);
      all_names(f->a, out);
      return;
    case Expr::Kind::Scale:
      all_names(f->a, out);
      return;
    case Expr::Kind::Sum:
      all_names(f->a, out);
      all_names(f->b, out);
      return;
    case Expr::Kind::Sup:
    case Expr::Kind::Inf:
      out.insert(f->var);
      all_names(f->a, out);
      return;
  }
}

namespace {
void count_term(const Term* t, std::unordered_set<const void*>& seen, std::size_t& n) {
  if (!t || !seen.insert(t).second) return;
  ++n;
  for (const auto& a : t->args) count_term(a.get(), seen, n);
}
void count_guard(const Guard* g, std::unordered_set<const void*>& seen, std::size_t& n) {
  if (!g || !seen.insert(g).second) return;
  ++n;
  count_term(g->lhs.get(), seen, n);
  count_term(g->rhs.get(), seen, n);
  count_guard(g->a.get(), seen, n);
  count_guard(g->b.get(), seen, n);
}
void count_expr(const Expr* e, std::unordered_set<const void*>& seen, std::size_t& n) {
  if (!e || !seen.insert(e).second) return;
  ++n;
  count_term(e->term.get(), seen, n);
  count_guard(e->guard.get(), seen, n);
  count_expr(e->a.get(), seen, n);
  count_expr(e->b.get(), seen, n);
}
}  // namespace

std::size_t expr_size(const ExprPtr& f) {
  std::unordered_set<const void*> seen;
  std::size_t n = 0;
  count_expr(f.get(), seen, n);
  return n;
}

// -------------------------------------------------------------- Programs

namespace {
std::shared_ptr<Program> mk_prog(Program::Kind k) {
  auto p = std::make_shared<Program>();
  p->kind = k;
  return p;
}
}  // namespace

ProgramPtr p_skip() { return mk_prog(Program::Kind::Skip); }
ProgramPtr p_diverge() { return mk_prog(Program::Kind::Diverge); }

ProgramPtr p_assign(std::string var, TermPtr rhs) {
  auto p = mk_prog(Program::Kind::Assign);
  p->var = std::move(var);
  p->term = std::move(rhs);
  return p;
}

ProgramPtr p_unif(std::string var, int n_override) {
  if (n_override < 0) throw std::invalid_argument("unif partition override must be positive");
  auto p = mk_prog(Program::Kind::Unif);
  p->var = std::move(var);
  p->unif_n = n_override;
  return p;
}

ProgramPtr p_observe(GuardPtr g) {
  auto p = mk_prog(Program::Kind::Observe);
  p->guard = std::move(g);
  return p;
}

ProgramPtr p_ite(GuardPtr g, ProgramPtr then_p, ProgramPtr else_p) {
  auto p = mk_prog(Program::Kind::Ite);
  p->guard = std::move(g);
  p->a = std::move(then_p);
  p->b = std::move(else_p);
  return p;
}

ProgramPtr p_pchoice(ProgramPtr a, Rational prob, ProgramPtr b) {
  if (prob < 0 || prob > 1)
    throw std::invalid_argument("choice probability must lie in [0,1]");
  auto p = mk_prog(Program::Kind::PChoice);
  p->p = std::move(prob);
  p->a = std::move(a);
  p->b = std::move(b);
  return p;
}

ProgramPtr p_seq(ProgramPtr a, ProgramPtr b) {
  auto p = mk_prog(Program::Kind::Seq);
  p->a = std::move(a);
  p->b = std::move(b);
  return p;
}

ProgramPtr p_while(GuardPtr g, ProgramPtr body, ExprPtr invariant) {
  auto p = mk_prog(Program::Kind::While);
  p->guard = std::move(g);
  p->a = std::move(body);
  p->invariant = std::move(invariant);
  return p;
}

bool program_equal(const ProgramPtr& a, const ProgramPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Program::Kind::Skip:
    case Program::Kind::Diverge:
      return true;
    case Program::Kind::Assign:
      return a->var == b->var && term_equal(a->term, b->term);
    case Program::Kind::Unif:
      return a->var == b->var && a->unif_n == b->unif_n;
    case Program::Kind::Observe:
      return guard_equal(a->guard, b->guard);
    case Program::Kind::Ite:
      return guard_equal(a->guard, b->guard) && program_equal(a->a, b->a) &&
             program_equal(a->b, b->b);
    case Program::Kind::PChoice:
      return a->p == b->p && program_equal(a->a, b->a) && program_equal(a->b, b->b);
    case Program::Kind::Seq:
      return program_equal(a->a, b->a) && program_equal(a->b, b->b);
    case Program::Kind::While: {
      bool inv_eq = (!a->invariant && !b->invariant) ||
                    (a->invariant && b->invariant && expr_equal(a->invariant, b->invariant));
      return inv_eq && guard_equal(a->guard, b->guard) && program_equal(a->a, b->a);
    }
  }
  throw std::logic_error("unreachable");
}

void program_vars(const ProgramPtr& p, std::set<std::string>& out) {
  switch (p->kind) {
    case Program::Kind::Skip:
    case Program::Kind::Diverge:
      return;
    case Program::Kind::Assign:
      out.insert(p->var);
      term_vars(p->term, out);
      return;
    case Program::Kind::Unif:
      out.insert(p->var);
      return;
    case Program::Kind::Observe:
      guard_vars(p->guard, out);
      return;
    case Program::Kind::Ite:
      guard_vars(p->guard, out);
      program_vars(p->a, out);
      program_vars(p->b, out);
      return;
    case Program::Kind::PChoice:
    case Program::Kind::Seq:
      program_vars(p->a, out);
      program_vars(p->b, out);
      return;
    case Program::Kind::While:
      guard_vars(p->guard, out);
      if (p->invariant) free_vars(p->invariant, out);
      program_vars(p->a, out);
      return;
  }
}

bool has_while(const ProgramPtr& p) {
  if (p->kind == Program::Kind::While) return true;
  if (p->a && has_while(p->a)) return true;
  if (p->b && has_while(p->b)) return true;
  return false;
}

const DomainFunc* DomainDecl::find(const std::string& name) const {
  for (const auto& f : funcs)
    if (f.name == name) return &f;
  return nullptr;
}

}  // namespace pwv
