#include "pwv/semantics.hpp"

#include <stdexcept>
#include <vector>

namespace pwv {

// ------------------------------------------------------------- Evaluation

Rational eval_term(const TermPtr& t, const State& s) {
  switch (t->kind) {
    case Term::Kind::Const:
      return t->value;
    case Term::Kind::Var: {
      auto it = s.find(t->name);
      if (it == s.end())
        throw std::runtime_error("missing variable '" + t->name + "'");
      return it->second;
    }
    case Term::Kind::Plus:
      return eval_term(t->args[0], s) + eval_term(t->args[1], s);
    case Term::Kind::Monus:
      return monus(eval_term(t->args[0], s), eval_term(t->args[1], s));
    case Term::Kind::Times:
      return eval_term(t->args[0], s) * eval_term(t->args[1], s);
    case Term::Kind::App:
      throw std::runtime_error(
          "cannot evaluate uninterpreted function application '" + t->name +
          "'");
  }
  throw std::logic_error("unreachable");
}

bool eval_guard(const GuardPtr& g, const State& s) {
  switch (g->kind) {
    case Guard::Kind::Lt: return eval_term(g->lhs, s) < eval_term(g->rhs, s);
    case Guard::Kind::Le: return eval_term(g->lhs, s) <= eval_term(g->rhs, s);
    case Guard::Kind::Eq: return eval_term(g->lhs, s) == eval_term(g->rhs, s);
    case Guard::Kind::Neq: return eval_term(g->lhs, s) != eval_term(g->rhs, s);
    case Guard::Kind::Gt: return eval_term(g->lhs, s) > eval_term(g->rhs, s);
    case Guard::Kind::Ge: return eval_term(g->lhs, s) >= eval_term(g->rhs, s);
    case Guard::Kind::Not: return !eval_guard(g->a, s);
    case Guard::Kind::And: return eval_guard(g->a, s) && eval_guard(g->b, s);
    case Guard::Kind::Or: return eval_guard(g->a, s) || eval_guard(g->b, s);
    case Guard::Kind::Implies: return !eval_guard(g->a, s) || eval_guard(g->b, s);
  }
  throw std::logic_error("unreachable");
}

namespace {

struct EvalRes {
  Rational v;
  bool exact;
};

EvalRes eval_rec(const ExprPtr& f, const State& s, unsigned grid) {
  switch (f->kind) {
    case Expr::Kind::Term:
      return {eval_term(f->term, s), true};
    case Expr::Kind::Iverson:
      if (!eval_guard(f->guard, s)) return {Rational(0), true};
      return eval_rec(f->a, s, grid);
    case Expr::Kind::Scale: {
      EvalRes r = eval_rec(f->a, s, grid);
      return {f->q * r.v, r.exact};
    }
    case Expr::Kind::Sum: {
      EvalRes a = eval_rec(f->a, s, grid);
      EvalRes b = eval_rec(f->b, s, grid);
      return {a.v + b.v, a.exact && b.exact};
    }
    case Expr::Kind::Sup:
    case Expr::Kind::Inf: {
      bool is_sup = f->kind == Expr::Kind::Sup;
      unsigned steps = (f->lo == f->hi) ? 0 : grid;
      Rational best;
      bool first = true;
      State s2 = s;
      for (unsigned k = 0; k <= steps; ++k) {
        Rational point =
            steps == 0 ? f->lo
                       : Rational(f->lo + (f->hi - f->lo) * Rational(k, steps));
        s2[f->var] = point;
        EvalRes r = eval_rec(f->a, s2, grid);
        if (first || (is_sup ? r.v > best : r.v < best)) best = r.v;
        first = false;
      }
      return {best, false};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Enclosure eval_expr(const ExprPtr& f, const State& s, unsigned grid) {
  if (grid < 1) throw std::invalid_argument("grid must be positive");
  EvalRes r = eval_rec(f, s, grid);
  return Enclosure{r.v, r.v, r.exact};
}

// ------------------------------------------------------------ Substitution

std::string fresh_name(const std::string& base, std::set<std::string>& avoid) {
  std::string stem = base.substr(0, base.find('#'));
  for (int k = 1;; ++k) {
    std::string cand = stem + "#" + std::to_string(k);
    if (avoid.insert(cand).second) return cand;
  }
}

namespace {

TermPtr subst_term(const TermPtr& t, const std::string& x, const TermPtr& r) {
  switch (t->kind) {
    case Term::Kind::Const:
      return t;
    case Term::Kind::Var:
      return t->name == x ? r : t;
    case Term::Kind::App: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(subst_term(a, x, r));
      return t_app(t->name, std::move(args));
    }
    default:
      return t->kind == Term::Kind::Plus
                 ? t_plus(subst_term(t->args[0], x, r), subst_term(t->args[1], x, r))
             : t->kind == Term::Kind::Monus
                 ? t_monus(subst_term(t->args[0], x, r), subst_term(t->args[1], x, r))
                 : t_times(subst_term(t->args[0], x, r), subst_term(t->args[1], x, r));
  }
}

GuardPtr subst_guard(const GuardPtr& g, const std::string& x, const TermPtr& r) {
  switch (g->kind) {
    case Guard::Kind::Not:
      return g_not(subst_guard(g->a, x, r));
    case Guard::Kind::And:
      return g_and(subst_guard(g->a, x, r), subst_guard(g->b, x, r));
    case Guard::Kind::Or:
      return g_or(subst_guard(g->a, x, r), subst_guard(g->b, x, r));
    case Guard::Kind::Implies:
      return g_implies(subst_guard(g->a, x, r), subst_guard(g->b, x, r));
    default:
      return g_cmp(g->kind, subst_term(g->lhs, x, r), subst_term(g->rhs, x, r));
  }
}

ExprPtr subst_rec(const ExprPtr& f, const std::string& x, const TermPtr& t,
                  const std::set<std::string>& tvars,
                  std::set<std::string>& avoid) {
  switch (f->kind) {
    case Expr::Kind::Term:
      return e_term(subst_term(f->term, x, t));
    case Expr::Kind::Iverson:
      return e_iverson(subst_guard(f->guard, x, t), subst_rec(f->a, x, t, tvars, avoid));
    case Expr::Kind::Scale:
      return e_scale(f->q, subst_rec(f->a, x, t, tvars, avoid));
    case Expr::Kind::Sum:
      return e_sum(subst_rec(f->a, x, t, tvars, avoid),
                   subst_rec(f->b, x, t, tvars, avoid));
    case Expr::Kind::Sup:
    case Expr::Kind::Inf: {
      auto quant = [&](const std::string& v, const ExprPtr& body) {
        return f->kind == Expr::Kind::Sup ? e_sup(v, f->lo, f->hi, body)
                                          : e_inf(v, f->lo, f->hi, body);
      };
      if (f->var == x) return f;  // binder shadows x
      if (tvars.count(f->var) && free_vars(f->a).count(x)) {
        // Capture: rename the binder before substituting.
        std::string v2 = fresh_name(f->var, avoid);
        TermPtr v2t = t_var(v2);
        std::set<std::string> v2s{v2};
        ExprPtr renamed = subst_rec(f->a, f->var, v2t, v2s, avoid);
        return quant(v2, subst_rec(renamed, x, t, tvars, avoid));
      }
      return quant(f->var, subst_rec(f->a, x, t, tvars, avoid));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ExprPtr substitute(const ExprPtr& f, const std::string& x, const TermPtr& t) {
  std::set<std::string> avoid;
  all_names(f, avoid);
  std::set<std::string> tvars;
  term_vars(t, tvars);
  avoid.insert(tvars.begin(), tvars.end());
  avoid.insert(x);
  return subst_rec(f, x, t, tvars, avoid);
}

// ---------------------------------------------------------------- PNF

namespace {

struct QEntry {
  bool is_sup;
  std::string var;
  Rational lo, hi;
};

// Splits a PNF expression into its quantifier prefix and matrix.
void split_quant(const ExprPtr& e, std::vector<QEntry>& prefix, ExprPtr& matrix) {
  if (e->kind == Expr::Kind::Sup || e->kind == Expr::Kind::Inf) {
    prefix.push_back({e->kind == Expr::Kind::Sup, e->var, e->lo, e->hi});
    split_quant(e->a, prefix, matrix);
    return;
  }
  matrix = e;
}

ExprPtr rebuild_quant(const std::vector<QEntry>& prefix, ExprPtr matrix) {
  for (std::size_t i = prefix.size(); i-- > 0;) {
    const QEntry& q = prefix[i];
    matrix = q.is_sup ? e_sup(q.var, q.lo, q.hi, matrix)
                      : e_inf(q.var, q.lo, q.hi, matrix);
  }
  return matrix;
}

// Renames the leading binders of a PNF expression that clash with `clash`.
ExprPtr rename_clashing_binders(const ExprPtr& e, const std::set<std::string>& clash,
                                std::set<std::string>& avoid) {
  if (e->kind != Expr::Kind::Sup && e->kind != Expr::Kind::Inf) return e;
  auto quant = [&](const std::string& v, const ExprPtr& body) {
    return e->kind == Expr::Kind::Sup ? e_sup(v, e->lo, e->hi, body)
                                      : e_inf(v, e->lo, e->hi, body);
  };
  if (clash.count(e->var)) {
    std::string v2 = fresh_name(e->var, avoid);
    ExprPtr body = substitute(e->a, e->var, t_var(v2));
    return quant(v2, rename_clashing_binders(body, clash, avoid));
  }
  return quant(e->var, rename_clashing_binders(e->a, clash, avoid));
}

ExprPtr pnf_rec(const ExprPtr& f, std::set<std::string>& avoid) {
  switch (f->kind) {
    case Expr::Kind::Term:
      return f;
    case Expr::Kind::Scale: {
      ExprPtr a = pnf_rec(f->a, avoid);
      std::vector<QEntry> prefix;
      ExprPtr matrix;
      split_quant(a, prefix, matrix);
      return rebuild_quant(prefix, e_scale(f->q, matrix));
    }
    case Expr::Kind::Iverson: {
      ExprPtr a = pnf_rec(f->a, avoid);
      std::set<std::string> gv;
      guard_vars(f->guard, gv);
      a = rename_clashing_binders(a, gv, avoid);
      std::vector<QEntry> prefix;
      ExprPtr matrix;
      split_quant(a, prefix, matrix);
      return rebuild_quant(prefix, e_iverson(f->guard, matrix));
    }
    case Expr::Kind::Sum: {
      ExprPtr a = pnf_rec(f->a, avoid);
      ExprPtr b = pnf_rec(f->b, avoid);
      // Hoist a's binders over all of b, then b's binders over a's matrix.
      a = rename_clashing_binders(a, free_vars(b), avoid);
      std::vector<QEntry> pa;
      ExprPtr ma;
      split_quant(a, pa, ma);
      b = rename_clashing_binders(b, free_vars(ma), avoid);
      std::vector<QEntry> pb;
      ExprPtr mb;
      split_quant(b, pb, mb);
      pa.insert(pa.end(), pb.begin(), pb.end());
      return rebuild_quant(pa, e_sum(ma, mb));
    }
    case Expr::Kind::Sup:
    case Expr::Kind::Inf: {
      ExprPtr body = pnf_rec(f->a, avoid);
      return f->kind == Expr::Kind::Sup ? e_sup(f->var, f->lo, f->hi, body)
                                        : e_inf(f->var, f->lo, f->hi, body);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ExprPtr to_pnf(const ExprPtr& f) {
  std::set<std::string> avoid;
  all_names(f, avoid);
  return pnf_rec(f, avoid);
}

Classification classify(const ExprPtr& f) {
  bool has_sup = false, has_inf = false;
  std::vector<const Expr*> stack{f.get()};
  while (!stack.empty()) {
    const Expr* e = stack.back();
    stack.pop_back();
    if (e->kind == Expr::Kind::Sup) has_sup = true;
    if (e->kind == Expr::Kind::Inf) has_inf = true;
    if (e->a) stack.push_back(e->a.get());
    if (e->b) stack.push_back(e->b.get());
  }
  if (!has_sup && !has_inf) return Classification::QuantifierFree;
  if (has_sup && has_inf) return Classification::Mixed;
  return has_sup ? Classification::InfFree : Classification::SupFree;
}

// ------------------------------------------------ Interval simplification

namespace {

// [lo, hi]; absent hi means unbounded above. All quantities nonnegative.
struct IV {
  Rational lo;
  std::optional<Rational> hi;
};

using IVEnv = std::map<std::string, IV>;

IV iv_term(const TermPtr& t, const IVEnv& env) {
  switch (t->kind) {
    case Term::Kind::Const:
      return {t->value, t->value};
    case Term::Kind::Var: {
      auto it = env.find(t->name);
      return it == env.end() ? IV{Rational(0), std::nullopt} : it->second;
    }
    case Term::Kind::Plus: {
      IV a = iv_term(t->args[0], env), b = iv_term(t->args[1], env);
      IV r{a.lo + b.lo, std::nullopt};
      if (a.hi && b.hi) r.hi = *a.hi + *b.hi;
      return r;
    }
    case Term::Kind::Monus: {
      IV a = iv_term(t->args[0], env), b = iv_term(t->args[1], env);
      IV r;
      r.lo = b.hi ? monus(a.lo, *b.hi) : Rational(0);
      if (a.hi) r.hi = monus(*a.hi, b.lo);
      return r;
    }
    case Term::Kind::Times: {
      IV a = iv_term(t->args[0], env), b = iv_term(t->args[1], env);
      if ((a.hi && *a.hi == 0) || (b.hi && *b.hi == 0))
        return {Rational(0), Rational(0)};
      IV r{a.lo * b.lo, std::nullopt};
      if (a.hi && b.hi) r.hi = *a.hi * *b.hi;
      return r;
    }
    case Term::Kind::App:
      return {Rational(0), std::nullopt};
  }
  throw std::logic_error("unreachable");
}

std::optional<bool> decide_guard(const GuardPtr& g, const IVEnv& env) {
  auto cmp = [&](const TermPtr& lt, const TermPtr& rt,
                 bool strict) -> std::optional<bool> {
    // strict: l < r, else l <= r.
    IV a = iv_term(lt, env), b = iv_term(rt, env);
    if (a.hi && (strict ? *a.hi < b.lo : *a.hi <= b.lo)) return true;
    if (b.hi && (strict ? a.lo >= *b.hi : a.lo > *b.hi)) return false;
    return std::nullopt;
  };
  switch (g->kind) {
    case Guard::Kind::Lt:
      return cmp(g->lhs, g->rhs, true);
    case Guard::Kind::Le:
      return cmp(g->lhs, g->rhs, false);
    case Guard::Kind::Gt:
      return cmp(g->rhs, g->lhs, true);
    case Guard::Kind::Ge:
      return cmp(g->rhs, g->lhs, false);
    case Guard::Kind::Eq: {
      IV a = iv_term(g->lhs, env), b = iv_term(g->rhs, env);
      if (a.hi && b.hi && a.lo == *a.hi && b.lo == *b.hi) return a.lo == b.lo;
      if ((a.hi && *a.hi < b.lo) || (b.hi && *b.hi < a.lo)) return false;
      return std::nullopt;
    }
    case Guard::Kind::Neq: {
      auto d = decide_guard(g_cmp(Guard::Kind::Eq, g->lhs, g->rhs), env);
      if (d) return !*d;
      return std::nullopt;
    }
    case Guard::Kind::Not: {
      auto d = decide_guard(g->a, env);
      if (d) return !*d;
      return std::nullopt;
    }
    case Guard::Kind::And: {
      auto da = decide_guard(g->a, env), db = decide_guard(g->b, env);
      if ((da && !*da) || (db && !*db)) return false;
      if (da && *da && db && *db) return true;
      return std::nullopt;
    }
    case Guard::Kind::Or: {
      auto da = decide_guard(g->a, env), db = decide_guard(g->b, env);
      if ((da && *da) || (db && *db)) return true;
      if (da && !*da && db && !*db) return false;
      return std::nullopt;
    }
    case Guard::Kind::Implies: {
      auto da = decide_guard(g->a, env), db = decide_guard(g->b, env);
      if ((da && !*da) || (db && *db)) return true;
      if (da && *da && db && !*db) return false;
      return std::nullopt;
    }
  }
  throw std::logic_error("unreachable");
}

bool is_zero(const ExprPtr& e) {
  return e->kind == Expr::Kind::Term && e->term->kind == Term::Kind::Const &&
         e->term->value == 0;
}

ExprPtr simp_rec(const ExprPtr& f, IVEnv& env) {
  switch (f->kind) {
    case Expr::Kind::Term: {
      IV iv = iv_term(f->term, env);
      if (iv.hi && iv.lo == *iv.hi && f->term->kind != Term::Kind::Const)
        return e_const(iv.lo);
      return f;
    }
    case Expr::Kind::Iverson: {
      auto d = decide_guard(f->guard, env);
      if (d && !*d) return e_const(Rational(0));
      ExprPtr body = simp_rec(f->a, env);
      if (d && *d) return body;
      if (is_zero(body)) return body;
      return e_iverson(f->guard, body);
    }
    case Expr::Kind::Scale: {
      if (f->q == 0) return e_const(Rational(0));
      ExprPtr body = simp_rec(f->a, env);
      if (is_zero(body)) return body;
      return e_scale(f->q, body);
    }
    case Expr::Kind::Sum: {
      ExprPtr a = simp_rec(f->a, env);
      ExprPtr b = simp_rec(f->b, env);
      if (is_zero(a)) return b;
      if (is_zero(b)) return a;
      return e_sum(a, b);
    }
    case Expr::Kind::Sup:
    case Expr::Kind::Inf: {
      auto saved = env.find(f->var) == env.end()
                       ? std::optional<IV>{}
                       : std::optional<IV>{env[f->var]};
      env[f->var] = IV{f->lo, f->hi};
      ExprPtr body = simp_rec(f->a, env);
      if (saved)
        env[f->var] = *saved;
      else
        env.erase(f->var);
      if (!free_vars(body).count(f->var)) return body;
      return f->kind == Expr::Kind::Sup ? e_sup(f->var, f->lo, f->hi, body)
                                        : e_inf(f->var, f->lo, f->hi, body);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ExprPtr interval_simplify(const ExprPtr& f) {
  IVEnv env;
  return simp_rec(f, env);
}

}  // namespace pwv
