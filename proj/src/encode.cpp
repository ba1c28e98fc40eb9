#include "pwv/encode.hpp"

#include <stdexcept>

namespace pwv {

namespace {

struct QEntry {
  bool is_sup;
  std::string var;
  Rational lo, hi;
};

void split_quant(const ExprPtr& e, std::vector<QEntry>& prefix, ExprPtr& matrix) {
  if (e->kind == Expr::Kind::Sup || e->kind == Expr::Kind::Inf) {
    prefix.push_back({e->kind == Expr::Kind::Sup, e->var, e->lo, e->hi});
    split_quant(e->a, prefix, matrix);
    return;
  }
  matrix = e;
}

struct SplitPnf {
  std::vector<QEntry> prefix;
  ExprPtr matrix;
};

SplitPnf split_pnf_checked(const ExprPtr& f, const char* who) {
  SplitPnf s;
  split_quant(f, s.prefix, s.matrix);
  if (classify(s.matrix) != Classification::QuantifierFree)
    throw std::invalid_argument(std::string(who) +
                                ": expression is not in prenex normal form");
  return s;
}

void require_polarity(const SplitPnf& s, bool want_sup, const char* who) {
  for (const auto& q : s.prefix)
    if (q.is_sup != want_sup)
      throw std::invalid_argument(
          std::string(who) + ": wrong quantifier polarity (expected " +
          (want_sup ? "sup" : "inf") + "-only prefix)");
}

// Renames every prefix binder whose name is already in `used`; all final
// binder names are added to `used`.
ExprPtr alpha_rename_prefix(const ExprPtr& pnf, std::set<std::string>& used) {
  if (pnf->kind != Expr::Kind::Sup && pnf->kind != Expr::Kind::Inf) return pnf;
  auto quant = [&](const std::string& v, const ExprPtr& body) {
    return pnf->kind == Expr::Kind::Sup ? e_sup(v, pnf->lo, pnf->hi, body)
                                        : e_inf(v, pnf->lo, pnf->hi, body);
  };
  if (used.count(pnf->var)) {
    std::set<std::string> avoid = used;
    all_names(pnf, avoid);
    std::string v2 = fresh_name(pnf->var, avoid);
    used.insert(v2);
    ExprPtr body = substitute(pnf->a, pnf->var, t_var(v2));
    return quant(v2, alpha_rename_prefix(body, used));
  }
  used.insert(pnf->var);
  return quant(pnf->var, alpha_rename_prefix(pnf->a, used));
}

FOFormulaPtr bounds_formula(const QEntry& q) {
  return fo_and({fo_cmp(FOFormula::CmpOp::Le, fo_const(q.lo), fo_var(q.var)),
                 fo_cmp(FOFormula::CmpOp::Le, fo_var(q.var), fo_const(q.hi))});
}

FOFormulaPtr forall_chain(const std::vector<std::string>& vars, FOFormulaPtr body) {
  for (std::size_t i = vars.size(); i-- > 0;) body = fo_forall(vars[i], body);
  return body;
}

FOFormulaPtr nonneg(const std::string& v) {
  return fo_cmp(FOFormula::CmpOp::Le, fo_const(Rational(0)), fo_var(v));
}

}  // namespace

FOTermPtr encode_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Const:
      return fo_const(t->value);
    case Term::Kind::Var:
      return fo_var(t->name);
    case Term::Kind::Plus:
      return fo_add(encode_term(t->args[0]), encode_term(t->args[1]));
    case Term::Kind::Monus: {
      FOTermPtr a = encode_term(t->args[0]);
      FOTermPtr b = encode_term(t->args[1]);
      return fo_ite(fo_cmp(FOFormula::CmpOp::Le, b, a), fo_sub(a, b),
                    fo_const(Rational(0)));
    }
    case Term::Kind::Times:
      return fo_mul(encode_term(t->args[0]), encode_term(t->args[1]));
    case Term::Kind::App: {
      std::vector<FOTermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(encode_term(a));
      return fo_app(t->name, std::move(args));
    }
  }
  throw std::logic_error("unreachable");
}

FOFormulaPtr encode_guard(const GuardPtr& g) {
  switch (g->kind) {
    case Guard::Kind::Lt:
      return fo_cmp(FOFormula::CmpOp::Lt, encode_term(g->lhs), encode_term(g->rhs));
    case Guard::Kind::Le:
      return fo_cmp(FOFormula::CmpOp::Le, encode_term(g->lhs), encode_term(g->rhs));
    case Guard::Kind::Eq:
      return fo_cmp(FOFormula::CmpOp::Eq, encode_term(g->lhs), encode_term(g->rhs));
    case Guard::Kind::Neq:
      return fo_not(fo_cmp(FOFormula::CmpOp::Eq, encode_term(g->lhs), encode_term(g->rhs)));
    case Guard::Kind::Gt:
      return fo_cmp(FOFormula::CmpOp::Lt, encode_term(g->rhs), encode_term(g->lhs));
    case Guard::Kind::Ge:
      return fo_cmp(FOFormula::CmpOp::Le, encode_term(g->rhs), encode_term(g->lhs));
    case Guard::Kind::Not:
      return fo_not(encode_guard(g->a));
    case Guard::Kind::And:
      return fo_and({encode_guard(g->a), encode_guard(g->b)});
    case Guard::Kind::Or:
      return fo_or({encode_guard(g->a), encode_guard(g->b)});
    case Guard::Kind::Implies:
      return fo_implies(encode_guard(g->a), encode_guard(g->b));
  }
  throw std::logic_error("unreachable");
}

FOTermPtr encode_qf_expr(const ExprPtr& f) {
  switch (f->kind) {
    case Expr::Kind::Term:
      return encode_term(f->term);
    case Expr::Kind::Iverson:
      return fo_ite(encode_guard(f->guard), encode_qf_expr(f->a),
                    fo_const(Rational(0)));
    case Expr::Kind::Scale:
      return fo_mul(fo_const(f->q), encode_qf_expr(f->a));
    case Expr::Kind::Sum:
      return fo_add(encode_qf_expr(f->a), encode_qf_expr(f->b));
    case Expr::Kind::Sup:
    case Expr::Kind::Inf:
      throw std::invalid_argument("encode_qf_expr: input has quantifiers");
  }
  throw std::logic_error("unreachable");
}

FOFormulaPtr encode_expr(const ExprPtr& f, const std::string& result_var) {
  if (free_vars(f).count(result_var))
    throw std::invalid_argument("result variable occurs free in the expression");
  SplitPnf s = split_pnf_checked(f, "encode_expr");
  if (s.prefix.empty())
    return fo_cmp(FOFormula::CmpOp::Eq, fo_var(result_var),
                  encode_qf_expr(s.matrix));
  bool is_sup = s.prefix.front().is_sup;
  require_polarity(s, is_sup, "encode_expr");
  // sup: y is an upper bound of the matrix values, and below any other
  // upper bound. inf: dually.
  auto bound_clause = [&](const std::string& u) {
    std::vector<FOFormulaPtr> bounds;
    std::vector<std::string> binders;
    for (const auto& q : s.prefix) {
      bounds.push_back(bounds_formula(q));
      binders.push_back(q.var);
    }
    FOTermPtr val = encode_qf_expr(s.matrix);
    FOFormulaPtr cmp = is_sup ? fo_cmp(FOFormula::CmpOp::Le, val, fo_var(u))
                              : fo_cmp(FOFormula::CmpOp::Le, fo_var(u), val);
    return forall_chain(binders, fo_implies(fo_and(bounds), cmp));
  };
  std::string other = "%b!" + result_var;
  FOFormulaPtr least =
      fo_forall(other, fo_implies(bound_clause(other),
                                  is_sup ? fo_cmp(FOFormula::CmpOp::Le,
                                                  fo_var(result_var), fo_var(other))
                                         : fo_cmp(FOFormula::CmpOp::Le,
                                                  fo_var(other), fo_var(result_var))));
  return fo_and({bound_clause(result_var), least});
}

FOFormulaPtr entailment_formula(const ExprPtr& f, const ExprPtr& g) {
  std::set<std::string> used = free_vars(f);
  {
    std::set<std::string> gv = free_vars(g);
    used.insert(gv.begin(), gv.end());
  }
  std::vector<std::string> state_vars(used.begin(), used.end());
  used.insert("%yf");
  used.insert("%yg");
  ExprPtr fr = alpha_rename_prefix(f, used);
  ExprPtr gr = alpha_rename_prefix(g, used);
  SplitPnf sf = split_pnf_checked(fr, "entailment_formula (lhs)");
  SplitPnf sg = split_pnf_checked(gr, "entailment_formula (rhs)");
  require_polarity(sf, true, "entailment_formula (lhs must be inf-free)");
  require_polarity(sg, false, "entailment_formula (rhs must be sup-free)");

  std::vector<FOFormulaPtr> hyp;
  for (const auto& v : state_vars) hyp.push_back(nonneg(v));
  std::vector<std::string> binders;
  for (const auto& q : sf.prefix) {
    hyp.push_back(bounds_formula(q));
    binders.push_back(q.var);
  }
  for (const auto& q : sg.prefix) {
    hyp.push_back(bounds_formula(q));
    binders.push_back(q.var);
  }
  hyp.push_back(fo_cmp(FOFormula::CmpOp::Eq, fo_var("%yf"), encode_qf_expr(sf.matrix)));
  hyp.push_back(fo_cmp(FOFormula::CmpOp::Eq, fo_var("%yg"), encode_qf_expr(sg.matrix)));
  FOFormulaPtr body = fo_implies(
      fo_and(std::move(hyp)),
      fo_cmp(FOFormula::CmpOp::Le, fo_var("%yf"), fo_var("%yg")));

  std::vector<std::string> all_vars = state_vars;
  all_vars.insert(all_vars.end(), binders.begin(), binders.end());
  all_vars.push_back("%yf");
  all_vars.push_back("%yg");
  return forall_chain(all_vars, body);
}

FOFormulaPtr refutation_query(const ExprPtr& claimed, const ExprPtr& riemann,
                              RefuteDirection direction) {
  std::set<std::string> used = free_vars(claimed);
  {
    std::set<std::string> rv = free_vars(riemann);
    used.insert(rv.begin(), rv.end());
  }
  std::vector<std::string> state_vars(used.begin(), used.end());
  used.insert("%delta");
  ExprPtr cr = alpha_rename_prefix(claimed, used);
  ExprPtr rr = alpha_rename_prefix(riemann, used);
  SplitPnf sc = split_pnf_checked(cr, "refutation_query (claimed)");
  SplitPnf sr = split_pnf_checked(rr, "refutation_query (riemann)");
  bool upper = direction == RefuteDirection::Upper;
  // Upper refutation: claimed bound g is inf-free, the lower Riemann
  // transform has an inf-only prefix; we seek a state with
  // g + delta <= lwp everywhere in the cells. Dually for Lower.
  require_polarity(sc, upper, "refutation_query (claimed)");
  require_polarity(sr, !upper, "refutation_query (riemann)");

  std::vector<FOFormulaPtr> bounds;
  std::vector<std::string> binders;
  for (const auto& q : sc.prefix) {
    bounds.push_back(bounds_formula(q));
    binders.push_back(q.var);
  }
  for (const auto& q : sr.prefix) {
    bounds.push_back(bounds_formula(q));
    binders.push_back(q.var);
  }
  FOTermPtr cval = encode_qf_expr(sc.matrix);
  FOTermPtr rval = encode_qf_expr(sr.matrix);
  FOTermPtr delta = fo_var("%delta");
  FOFormulaPtr gap =
      upper ? fo_cmp(FOFormula::CmpOp::Le, fo_add(cval, delta), rval)
            : fo_cmp(FOFormula::CmpOp::Le, fo_add(rval, delta), cval);
  FOFormulaPtr core = binders.empty()
                          ? gap
                          : forall_chain(binders, fo_implies(fo_and(bounds), gap));
  std::vector<FOFormulaPtr> conj;
  for (const auto& v : state_vars) conj.push_back(nonneg(v));
  conj.push_back(fo_cmp(FOFormula::CmpOp::Lt, fo_const(Rational(0)), delta));
  conj.push_back(core);
  return fo_and(std::move(conj));
}

FOFormulaPtr one_bounded_formula(const ExprPtr& f) {
  SplitPnf s = split_pnf_checked(f, "one_bounded_formula");
  std::set<std::string> fv = free_vars(f);
  std::vector<FOFormulaPtr> hyp;
  std::vector<std::string> vars(fv.begin(), fv.end());
  for (const auto& v : vars) hyp.push_back(nonneg(v));
  std::vector<std::string> binders;
  for (const auto& q : s.prefix) {
    hyp.push_back(bounds_formula(q));
    binders.push_back(q.var);
  }
  hyp.push_back(fo_cmp(FOFormula::CmpOp::Eq, fo_var("%y"), encode_qf_expr(s.matrix)));
  FOFormulaPtr body =
      fo_implies(fo_and(std::move(hyp)),
                 fo_cmp(FOFormula::CmpOp::Le, fo_var("%y"), fo_const(Rational(1))));
  std::vector<std::string> all_vars = vars;
  all_vars.insert(all_vars.end(), binders.begin(), binders.end());
  all_vars.push_back("%y");
  return forall_chain(all_vars, body);
}

FOFormulaPtr equivalence_formula(const ExprPtr& f, const ExprPtr& g) {
  std::set<std::string> fv = free_vars(f);
  {
    std::set<std::string> gv = free_vars(g);
    fv.insert(gv.begin(), gv.end());
  }
  std::vector<std::string> vars(fv.begin(), fv.end());
  std::vector<FOFormulaPtr> hyp;
  for (const auto& v : vars) hyp.push_back(nonneg(v));
  hyp.push_back(encode_expr(f, "%y1"));
  hyp.push_back(encode_expr(g, "%y2"));
  FOFormulaPtr body = fo_implies(
      fo_and(std::move(hyp)),
      fo_cmp(FOFormula::CmpOp::Eq, fo_var("%y1"), fo_var("%y2")));
  std::vector<std::string> all_vars = vars;
  all_vars.push_back("%y1");
  all_vars.push_back("%y2");
  return forall_chain(all_vars, body);
}

}  // namespace pwv
