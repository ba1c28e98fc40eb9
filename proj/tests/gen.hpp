#pragma once

// Shared helpers for the test suite: a seeded random AST generator used by
// the round-trip and property tests, an independent straight-line evaluator
// that serves as an oracle for eval_expr, and small file utilities.

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwv/ast.hpp"
#include "pwv/parser.hpp"
#include "pwv/semantics.hpp"

namespace pwvtest {

using namespace pwv;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string bench_path(const std::string& name) {
  return std::string(PWV_BENCH_DIR) + "/" + name;
}

inline ProgramPtr load_bench(const std::string& name, DomainDecl* dom = nullptr) {
  ParseResult r = parse_program_full(read_file(bench_path(name)));
  if (dom) *dom = r.domain;
  return r.program;
}

// ------------------------------------------------------------- generator

struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

  Rational rat(int max_num = 8, int max_den = 4) {
    return Rational(pick(max_num + 1), 1 + pick(max_den));
  }

  Rational prob() {
    int den = 1 + pick(4);
    return Rational(pick(den + 1), den);
  }

  std::string var() {
    static const char* pool[] = {"x", "y", "z", "count", "i", "M"};
    return pool[pick(6)];
  }

  std::string binder() {
    static const char* pool[] = {"v", "w", "u"};
    return pool[pick(3)];
  }

  TermPtr term(int depth) {
    if (depth <= 0 || pick(3) == 0)
      return pick(2) == 0 ? t_const(rat()) : t_var(var());
    switch (pick(3)) {
      case 0: return t_plus(term(depth - 1), term(depth - 1));
      case 1: return t_monus(term(depth - 1), term(depth - 1));
      default: return t_times(term(depth - 1), term(depth - 1));
    }
  }

  GuardPtr guard(int depth) {
    if (depth <= 0 || pick(3) == 0) {
      static const Guard::Kind cmps[] = {Guard::Kind::Lt, Guard::Kind::Le,
                                         Guard::Kind::Eq, Guard::Kind::Neq,
                                         Guard::Kind::Gt, Guard::Kind::Ge};
      return g_cmp(cmps[pick(6)], term(depth), term(depth));
    }
    switch (pick(4)) {
      case 0: return g_not(guard(depth - 1));
      case 1: return g_and(guard(depth - 1), guard(depth - 1));
      case 2: return g_or(guard(depth - 1), guard(depth - 1));
      default: return g_implies(guard(depth - 1), guard(depth - 1));
    }
  }

  ExprPtr expr(int depth, bool allow_quant = true) {
    if (depth <= 0 || pick(3) == 0) return e_term(term(2));
    switch (pick(allow_quant ? 5 : 4)) {
      case 0: return e_iverson(guard(1), expr(depth - 1, allow_quant));
      case 1: return e_scale(rat(), expr(depth - 1, allow_quant));
      case 2:
      case 3: return e_sum(expr(depth - 1, allow_quant), expr(depth - 1, allow_quant));
      default: {
        Rational lo = rat(2, 2);
        Rational hi = lo + rat(2, 2);
        ExprPtr body = expr(depth - 1, allow_quant);
        return pick(2) == 0 ? e_sup(binder(), lo, hi, body)
                            : e_inf(binder(), lo, hi, body);
      }
    }
  }

  // A single non-Seq statement. Sequences are built only as left-nested
  // chains of these (see chain), matching what the parser produces: the
  // printer flattens statement sequences, so other seq shapes would not
  // survive a round-trip.
  ProgramPtr stmt(int depth) {
    if (depth <= 0) {
      switch (pick(4)) {
        case 0: return p_skip();
        case 1: return p_diverge();
        case 2: return p_assign(var(), term(2));
        default: return p_unif(var(), pick(3) == 0 ? 1 + pick(4) : 0);
      }
    }
    switch (pick(5)) {
      case 0: return p_observe(guard(1));
      case 1: return p_ite(guard(1), chain(depth - 1), chain(depth - 1));
      case 2: return p_pchoice(chain(depth - 1), prob(), chain(depth - 1));
      case 3: {
        ExprPtr inv = pick(2) == 0 ? expr(1, false) : nullptr;
        return p_while(guard(1), chain(depth - 1), inv);
      }
      default: return stmt(depth - 1);
    }
  }

  ProgramPtr chain(int depth) {
    ProgramPtr acc = stmt(depth);
    int extra = pick(3);
    for (int k = 0; k < extra; ++k) acc = p_seq(acc, stmt(depth));
    return acc;
  }

  ProgramPtr program(int depth) { return chain(depth); }

  State state(const std::set<std::string>& vars, int max_num = 8, int max_den = 4) {
    State s;
    for (const auto& v : vars) s[v] = rat(max_num, max_den);
    return s;
  }
};

// ------------------------------------------- independent straight evaluator

// Deliberately written from scratch (no calls into pwv::eval_*) so it can
// serve as an oracle for the library's evaluator on quantifier-free input.

inline Rational straight_term(const TermPtr& t, const State& s) {
  switch (t->kind) {
    case Term::Kind::Const: return t->value;
    case Term::Kind::Var: {
      auto it = s.find(t->name);
      if (it == s.end()) throw std::runtime_error("unbound " + t->name);
      return it->second;
    }
    case Term::Kind::Plus:
      return straight_term(t->args[0], s) + straight_term(t->args[1], s);
    case Term::Kind::Monus: {
      Rational a = straight_term(t->args[0], s), b = straight_term(t->args[1], s);
      return a > b ? Rational(a - b) : Rational(0);
    }
    case Term::Kind::Times:
      return straight_term(t->args[0], s) * straight_term(t->args[1], s);
    case Term::Kind::App: throw std::runtime_error("app in straight eval");
  }
  throw std::runtime_error("bad term");
}

inline bool straight_guard(const GuardPtr& g, const State& s) {
  switch (g->kind) {
    case Guard::Kind::Lt: return straight_term(g->lhs, s) < straight_term(g->rhs, s);
    case Guard::Kind::Le: return straight_term(g->lhs, s) <= straight_term(g->rhs, s);
    case Guard::Kind::Eq: return straight_term(g->lhs, s) == straight_term(g->rhs, s);
    case Guard::Kind::Neq: return straight_term(g->lhs, s) != straight_term(g->rhs, s);
    case Guard::Kind::Gt: return straight_term(g->lhs, s) > straight_term(g->rhs, s);
    case Guard::Kind::Ge: return straight_term(g->lhs, s) >= straight_term(g->rhs, s);
    case Guard::Kind::Not: return !straight_guard(g->a, s);
    case Guard::Kind::And: return straight_guard(g->a, s) && straight_guard(g->b, s);
    case Guard::Kind::Or: return straight_guard(g->a, s) || straight_guard(g->b, s);
    case Guard::Kind::Implies:
      return !straight_guard(g->a, s) || straight_guard(g->b, s);
  }
  throw std::runtime_error("bad guard");
}

inline Rational straight_expr(const ExprPtr& f, const State& s) {
  switch (f->kind) {
    case Expr::Kind::Term: return straight_term(f->term, s);
    case Expr::Kind::Iverson:
      return straight_guard(f->guard, s) ? straight_expr(f->a, s) : Rational(0);
    case Expr::Kind::Scale: return f->q * straight_expr(f->a, s);
    case Expr::Kind::Sum: return straight_expr(f->a, s) + straight_expr(f->b, s);
    default: throw std::runtime_error("quantifier in straight eval");
  }
}

}  // namespace pwvtest
