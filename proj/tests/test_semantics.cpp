#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gen.hpp"
#include "pwv/parser.hpp"
#include "pwv/printer.hpp"
#include "pwv/semantics.hpp"

using namespace pwv;
using pwvtest::Gen;

namespace {

State st(std::initializer_list<std::pair<const char*, Rational>> xs) {
  State s;
  for (auto& [k, v] : xs) s[k] = v;
  return s;
}

}  // namespace

TEST_CASE("eval_term") {
  TermPtr t = parse_term_text("x - y");  // monus
  CHECK(eval_term(t, st({{"x", 1}, {"y", 3}})) == 0);
  CHECK(eval_term(t, st({{"x", 3}, {"y", 1}})) == 2);

  t = parse_term_text("2 * x + 1/2");
  CHECK(eval_term(t, st({{"x", Rational(3, 4)}})) == 2);

  t = parse_term_text("(M - i) + 1");
  CHECK(eval_term(t, st({{"M", 5}, {"i", 2}})) == 4);

  CHECK_THROWS(eval_term(parse_term_text("x"), State{}));
}

TEST_CASE("eval_guard") {
  GuardPtr g = parse_program("observe(x < 1 && !(x < 0))")->guard;
  CHECK(eval_guard(g, st({{"x", Rational(1, 2)}})));

  g = parse_program("observe(x * x + y * y <= 1)")->guard;
  CHECK_FALSE(eval_guard(g, st({{"x", 1}, {"y", 1}})));

  g = parse_program("observe(x < x)")->guard;
  CHECK_FALSE(eval_guard(g, st({{"x", Rational(7, 3)}})));
}

TEST_CASE("eval_expr: exact on quantifier-free, sampled on quantifiers") {
  Enclosure e = eval_expr(parse_expectation("sup v in [0,5]: [w == v*v] * v"),
                          st({{"w", 25}}), 5);
  CHECK(e.lo == 5);  // the sample point v = 5 hits the witness

  e = eval_expr(parse_expectation("[x >= 1/2] * 1"), st({{"x", Rational(1, 2)}}));
  CHECK(e.exact);
  CHECK(e.lo == 1);

  e = eval_expr(parse_expectation("inf v in [0,1]: v + x"), st({{"x", 2}}), 1);
  CHECK(e.lo == 2);  // minimum at the endpoint v = 0
}

TEST_CASE("eval_expr agrees with an independent evaluator on QF input") {
  Gen gen(11);
  for (int i = 0; i < 300; ++i) {
    ExprPtr f = gen.expr(3, /*allow_quant=*/false);
    State s = gen.state(free_vars(f));
    Enclosure e = eval_expr(f, s);
    REQUIRE(e.exact);
    CHECK(e.lo == pwvtest::straight_expr(f, s));
  }
}

TEST_CASE("substitute: examples") {
  ExprPtr f = parse_expectation("[x >= 1/2] * 1");
  ExprPtr g = substitute(f, "x", parse_term_text("y + y"));
  CHECK(free_vars(g) == std::set<std::string>({"y"}));
  CHECK(eval_expr(g, st({{"y", Rational(1, 4)}})).lo == 1);

  // Capture avoidance: the binder is renamed away from the substituted term.
  f = parse_expectation("sup v in [0,1]: v + x");
  g = substitute(f, "x", parse_term_text("v"));
  REQUIRE(g->kind == Expr::Kind::Sup);
  CHECK(g->var != "v");
  CHECK(free_vars(g) == std::set<std::string>({"v"}));

  // Identity substitution is semantically the identity.
  f = parse_expectation("x + (sup x in [0,1]: x)");
  g = substitute(f, "x", parse_term_text("x"));
  for (int k = 0; k < 5; ++k) {
    State s = st({{"x", Rational(k, 2)}});
    CHECK(eval_expr(f, s, 2).lo == eval_expr(g, s, 2).lo);
  }
}

TEST_CASE("substitute: semantic property at 100 random states") {
  Gen gen(13);
  for (int inst = 0; inst < 10; ++inst) {
    ExprPtr f = gen.expr(3, /*allow_quant=*/false);
    std::string x = gen.var();
    TermPtr t = gen.term(2);
    ExprPtr sub = substitute(f, x, t);
    std::set<std::string> vars = free_vars(f);
    std::set<std::string> tv;
    term_vars(t, tv);
    vars.insert(tv.begin(), tv.end());
    vars.insert(x);
    for (int k = 0; k < 100; ++k) {
      State s = gen.state(vars);
      State updated = s;
      updated[x] = eval_term(t, s);
      CHECK(eval_expr(sub, s).lo == eval_expr(f, updated).lo);
    }
  }
}

TEST_CASE("to_pnf: structure and flag preservation") {
  ExprPtr f = parse_expectation("x + y * y");
  CHECK(expr_equal(to_pnf(f), f));  // QF input is unchanged

  f = parse_expectation("(sup v in [0,1]: v) + (sup w in [0,1]: w)");
  ExprPtr p = to_pnf(f);
  REQUIRE(p->kind == Expr::Kind::Sup);
  REQUIRE(p->a->kind == Expr::Kind::Sup);
  CHECK(classify(p) == Classification::InfFree);
  CHECK(free_vars(p) == free_vars(f));

  f = parse_expectation("[x < 1] * (sup v in [0,1]: v + x)");
  p = to_pnf(f);
  REQUIRE(p->kind == Expr::Kind::Sup);
  CHECK(p->a->kind == Expr::Kind::Iverson);
  CHECK(free_vars(p) == free_vars(f));
}

TEST_CASE("to_pnf: preserves sampled semantics on random expressions") {
  Gen gen(17);
  for (int i = 0; i < 100; ++i) {
    ExprPtr f = gen.expr(3);
    ExprPtr p = to_pnf(f);
    CHECK(free_vars(p) == free_vars(f));
    Classification cf = classify(f);
    if (cf != Classification::Mixed) CHECK(classify(p) == cf);
    // Sampled evaluation agrees on a grid containing all interval endpoints
    // whenever the expression is quantifier-free.
    if (cf == Classification::QuantifierFree) {
      State s = gen.state(free_vars(f));
      CHECK(eval_expr(p, s).lo == eval_expr(f, s).lo);
    }
  }
}

TEST_CASE("classify") {
  CHECK(classify(parse_expectation("x + 1")) == Classification::QuantifierFree);
  CHECK(classify(parse_expectation("sup v in [0,1]: v")) == Classification::InfFree);
  CHECK(classify(parse_expectation("inf v in [0,1]: v")) == Classification::SupFree);
  CHECK(classify(parse_expectation(
            "(sup v in [0,1]: v) + (inf w in [0,1]: w)")) == Classification::Mixed);
}

TEST_CASE("fresh_name picks the reserved #k suffix") {
  std::set<std::string> avoid = {"x", "x#1"};
  std::string n = fresh_name("x", avoid);
  CHECK(n == "x#2");
  CHECK(avoid.count("x#2") == 1);
}

TEST_CASE("interval_simplify preserves semantics") {
  Gen gen(19);
  for (int i = 0; i < 200; ++i) {
    ExprPtr f = gen.expr(3, /*allow_quant=*/false);
    ExprPtr g = interval_simplify(f);
    State s = gen.state(free_vars(f));
    CHECK(eval_expr(g, s).lo == eval_expr(f, s).lo);
  }
  // Decidable Iverson guards are folded.
  ExprPtr f = parse_expectation("sup v in [0,1]: [v <= 2] * v");
  ExprPtr g = interval_simplify(to_pnf(f));
  REQUIRE(g->kind == Expr::Kind::Sup);
  CHECK(g->a->kind == Expr::Kind::Term);
}
