#include "pwv/fo.hpp"

#include <stdexcept>
#include <utility>

namespace pwv {

namespace {
std::shared_ptr<FOTerm> mk_term(FOTerm::Kind k) {
  auto t = std::make_shared<FOTerm>();
  t->kind = k;
  return t;
}
std::shared_ptr<FOFormula> mk_formula(FOFormula::Kind k) {
  auto f = std::make_shared<FOFormula>();
  f->kind = k;
  return f;
}
}  // namespace

FOTermPtr fo_const(Rational q) {
  auto t = mk_term(FOTerm::Kind::Const);
  t->value = std::move(q);
  return t;
}

FOTermPtr fo_var(std::string name) {
  auto t = mk_term(FOTerm::Kind::Var);
  t->name = std::move(name);
  return t;
}

static FOTermPtr binop(FOTerm::Kind k, FOTermPtr a, FOTermPtr b) {
  auto t = mk_term(k);
  t->args = {std::move(a), std::move(b)};
  return t;
}

FOTermPtr fo_add(FOTermPtr a, FOTermPtr b) { return binop(FOTerm::Kind::Add, std::move(a), std::move(b)); }
FOTermPtr fo_sub(FOTermPtr a, FOTermPtr b) { return binop(FOTerm::Kind::Sub, std::move(a), std::move(b)); }
FOTermPtr fo_mul(FOTermPtr a, FOTermPtr b) { return binop(FOTerm::Kind::Mul, std::move(a), std::move(b)); }

FOTermPtr fo_ite(FOFormulaPtr cond, FOTermPtr then_t, FOTermPtr else_t) {
  auto t = mk_term(FOTerm::Kind::Ite);
  t->cond = std::move(cond);
  t->args = {std::move(then_t), std::move(else_t)};
  return t;
}

FOTermPtr fo_app(std::string name, std::vector<FOTermPtr> args) {
  auto t = mk_term(FOTerm::Kind::App);
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

FOFormulaPtr fo_cmp(FOFormula::CmpOp op, FOTermPtr lhs, FOTermPtr rhs) {
  auto f = mk_formula(FOFormula::Kind::Cmp);
  f->op = op;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

FOFormulaPtr fo_not(FOFormulaPtr a) {
  auto f = mk_formula(FOFormula::Kind::Not);
  f->kids = {std::move(a)};
  return f;
}

FOFormulaPtr fo_and(std::vector<FOFormulaPtr> kids) {
  if (kids.empty()) return fo_bool(true);
  if (kids.size() == 1) return kids[0];
  auto f = mk_formula(FOFormula::Kind::And);
  f->kids = std::move(kids);
  return f;
}

FOFormulaPtr fo_or(std::vector<FOFormulaPtr> kids) {
  if (kids.empty()) return fo_bool(false);
  if (kids.size() == 1) return kids[0];
  auto f = mk_formula(FOFormula::Kind::Or);
  f->kids = std::move(kids);
  return f;
}

FOFormulaPtr fo_implies(FOFormulaPtr a, FOFormulaPtr b) {
  auto f = mk_formula(FOFormula::Kind::Implies);
  f->kids = {std::move(a), std::move(b)};
  return f;
}

FOFormulaPtr fo_forall(std::string var, FOFormulaPtr body) {
  auto f = mk_formula(FOFormula::Kind::Forall);
  f->var = std::move(var);
  f->body = std::move(body);
  return f;
}

FOFormulaPtr fo_exists(std::string var, FOFormulaPtr body) {
  auto f = mk_formula(FOFormula::Kind::Exists);
  f->var = std::move(var);
  f->body = std::move(body);
  return f;
}

FOFormulaPtr fo_bool(bool value) {
  auto f = mk_formula(FOFormula::Kind::BoolConst);
  f->bval = value;
  return f;
}

void fo_free_vars(const FOTermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case FOTerm::Kind::Const:
      return;
    case FOTerm::Kind::Var:
      out.insert(t->name);
      return;
    case FOTerm::Kind::Ite:
      fo_free_vars(t->cond, out);
      [[fallthrough]];
    default:
      for (const auto& a : t->args) fo_free_vars(a, out);
  }
}

void fo_free_vars(const FOFormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case FOFormula::Kind::Cmp:
      fo_free_vars(f->lhs, out);
      fo_free_vars(f->rhs, out);
      return;
    case FOFormula::Kind::Forall:
    case FOFormula::Kind::Exists: {
      std::set<std::string> inner;
      fo_free_vars(f->body, inner);
      inner.erase(f->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case FOFormula::Kind::BoolConst:
      return;
    default:
      for (const auto& k : f->kids) fo_free_vars(k, out);
  }
}

void fo_app_symbols(const FOTermPtr& t, std::set<std::string>& out) {
  if (t->kind == FOTerm::Kind::App) out.insert(t->name);
  if (t->kind == FOTerm::Kind::Ite) fo_app_symbols(t->cond, out);
  for (const auto& a : t->args) fo_app_symbols(a, out);
}

void fo_app_symbols(const FOFormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case FOFormula::Kind::Cmp:
      fo_app_symbols(f->lhs, out);
      fo_app_symbols(f->rhs, out);
      return;
    case FOFormula::Kind::Forall:
    case FOFormula::Kind::Exists:
      fo_app_symbols(f->body, out);
      return;
    case FOFormula::Kind::BoolConst:
      return;
    default:
      for (const auto& k : f->kids) fo_app_symbols(k, out);
  }
}

bool fo_has_quantifier(const FOFormulaPtr& f) {
  switch (f->kind) {
    case FOFormula::Kind::Forall:
    case FOFormula::Kind::Exists:
      return true;
    case FOFormula::Kind::Cmp: {
      // ite conditions are always quantifier-free in this code base.
      return false;
    }
    case FOFormula::Kind::BoolConst:
      return false;
    default:
      for (const auto& k : f->kids)
        if (fo_has_quantifier(k)) return true;
      return false;
  }
}

Rational fo_eval(const FOTermPtr& t, const std::map<std::string, Rational>& env) {
  switch (t->kind) {
    case FOTerm::Kind::Const:
      return t->value;
    case FOTerm::Kind::Var: {
      auto it = env.find(t->name);
      if (it == env.end()) return Rational(0);  // don't-care model variable
      return it->second;
    }
    case FOTerm::Kind::Add:
      return fo_eval(t->args[0], env) + fo_eval(t->args[1], env);
    case FOTerm::Kind::Sub:
      return fo_eval(t->args[0], env) - fo_eval(t->args[1], env);
    case FOTerm::Kind::Mul:
      return fo_eval(t->args[0], env) * fo_eval(t->args[1], env);
    case FOTerm::Kind::Ite:
      return fo_eval(t->cond, env) ? fo_eval(t->args[0], env)
                                   : fo_eval(t->args[1], env);
    case FOTerm::Kind::App:
      throw std::runtime_error("cannot evaluate uninterpreted application '" +
                               t->name + "'");
  }
  throw std::logic_error("unreachable");
}

bool fo_eval(const FOFormulaPtr& f, const std::map<std::string, Rational>& env) {
  switch (f->kind) {
    case FOFormula::Kind::Cmp: {
      Rational a = fo_eval(f->lhs, env);
      Rational b = fo_eval(f->rhs, env);
      switch (f->op) {
        case FOFormula::CmpOp::Lt: return a < b;
        case FOFormula::CmpOp::Le: return a <= b;
        case FOFormula::CmpOp::Eq: return a == b;
      }
      throw std::logic_error("unreachable");
    }
    case FOFormula::Kind::Not:
      return !fo_eval(f->kids[0], env);
    case FOFormula::Kind::And:
      for (const auto& k : f->kids)
        if (!fo_eval(k, env)) return false;
      return true;
    case FOFormula::Kind::Or:
      for (const auto& k : f->kids)
        if (fo_eval(k, env)) return true;
      return false;
    case FOFormula::Kind::Implies:
      return !fo_eval(f->kids[0], env) || fo_eval(f->kids[1], env);
    case FOFormula::Kind::BoolConst:
      return f->bval;
    case FOFormula::Kind::Forall:
    case FOFormula::Kind::Exists:
      throw std::runtime_error("cannot evaluate quantified formula");
  }
  throw std::logic_error("unreachable");
}

}  // namespace pwv
