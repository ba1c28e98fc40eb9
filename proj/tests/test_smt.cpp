#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gen.hpp"
#include "pwv/encode.hpp"
#include "pwv/parser.hpp"
#include "pwv/semantics.hpp"
#include "pwv/smt.hpp"

using namespace pwv;
using pwvtest::Gen;

namespace {

SolverConfig cfg() {
  SolverConfig c;
  c.timeout_sec = 120;
  return c;  // command resolves to PWV_SOLVER or the built-in default
}

}  // namespace

TEST_CASE("emit_smtlib: deterministic, QF_NRA for decl-free skolemized queries") {
  ExprPtr f = to_pnf(parse_expectation("sup v in [0,5]: [w == v*v] * v"));
  ExprPtr g = parse_expectation("4");
  FOFormulaPtr phi = entailment_formula(f, g);
  DomainDecl none;
  std::string s1 = emit_smtlib(phi, none, /*negate_universal=*/true);
  std::string s2 = emit_smtlib(phi, none, /*negate_universal=*/true);
  CHECK(s1 == s2);  // byte-identical across runs
  CHECK(s1.find("(set-logic QF_NRA)") != std::string::npos);
  CHECK(s1.find("(get-model)") != std::string::npos);
  CHECK(s1.find("forall") == std::string::npos);  // fully skolemized
}

TEST_CASE("emit_smtlib: domain declarations, axioms, and ALL logic") {
  ParseResult pr = parse_program_full(pwvtest::read_file(
      pwvtest::bench_path("diverging.pw")));
  FOFormulaPtr phi = one_bounded_formula(
      parse_expectation("[a <= b] * (1 - exp(x))", &pr.domain));
  std::string s = emit_smtlib(phi, pr.domain, true);
  CHECK(s.find("(set-logic ALL)") != std::string::npos);
  CHECK(s.find("(declare-fun exp (Real) Real)") != std::string::npos);
  // Three user axioms plus the automatic nonnegative-codomain axiom.
  CHECK(s.find("exp_base") != std::string::npos);
  CHECK(s.find("exp_step") != std::string::npos);
  CHECK(s.find("exp_antitone") != std::string::npos);
}

TEST_CASE("check_validity: reflexive entailment is Valid") {
  ExprPtr f = parse_expectation("x + [x <= 1/2] * 1");
  SolverVerdict v = check_validity(entailment_formula(f, f), {}, cfg());
  CHECK(v.status == SolverStatus::Valid);
}

TEST_CASE("check_validity: sup vs constant counterexample") {
  ExprPtr f = to_pnf(parse_expectation("sup v in [0,5]: [w == v*v] * v"));
  ExprPtr g = parse_expectation("4");
  SolverVerdict v = check_validity(entailment_formula(f, g), {}, cfg());
  REQUIRE(v.status == SolverStatus::Invalid);
  // The witness is re-checkable: at w = 25 the sup reaches 5 > 4.
  REQUIRE(v.model.count("w") == 1);
  Rational w = v.model.at("w");
  ExprPtr inst = substitute(f, "w", t_const(w));
  CHECK(eval_expr(inst, {}, 20).lo > 4);
}

TEST_CASE("check_one_bounded") {
  CHECK(check_one_bounded(parse_expectation("1/2"), {}, cfg()).status ==
        SolverStatus::Valid);
  SolverVerdict v = check_one_bounded(parse_expectation("x"), {}, cfg());
  REQUIRE(v.status == SolverStatus::Invalid);
  REQUIRE(v.model.count("x") == 1);
  CHECK(v.model.at("x") > 1);
  CHECK(check_one_bounded(parse_expectation("[x <= 1] * x"), {}, cfg()).status ==
        SolverStatus::Valid);
}

TEST_CASE("to_pnf instances validated against hand-prenexed references") {
  const std::pair<const char*, const char*> instances[] = {
      {"(sup v in [0,1]: v) + (sup w in [0,1]: w)",
       "sup v in [0,1]: (sup w in [0,1]: v + w)"},
      {"[x < 1] * (sup v in [0,1]: v + x)",
       "sup v in [0,1]: [x < 1] * (v + x)"},
  };
  for (const auto& [src, ref] : instances) {
    ExprPtr p = to_pnf(parse_expectation(src));
    ExprPtr r = parse_expectation(ref);
    SolverVerdict v = check_validity(equivalence_formula(p, r), {}, cfg());
    CHECK_MESSAGE(v.status == SolverStatus::Valid, src << ": " << v.reason);
  }
}

TEST_CASE("entailment agreement with grid evaluation on random QF pairs") {
  Gen gen(47);
  int checked = 0;
  for (int i = 0; i < 40 && checked < 8; ++i) {
    ExprPtr f = gen.expr(2, /*allow_quant=*/false);
    ExprPtr g = gen.expr(2, /*allow_quant=*/false);
    std::set<std::string> vars = free_vars(f);
    std::set<std::string> gv = free_vars(g);
    vars.insert(gv.begin(), gv.end());
    if (vars.size() > 2) continue;

    bool grid_violation = false;
    std::vector<std::string> vn(vars.begin(), vars.end());
    for (int a = 0; a <= 20 && !grid_violation; ++a)
      for (int b = 0; b <= 20 && !grid_violation; ++b) {
        State s;
        if (vn.size() > 0) s[vn[0]] = Rational(a, 5);
        if (vn.size() > 1) s[vn[1]] = Rational(b, 5);
        if (eval_expr(f, s).lo > eval_expr(g, s).lo) grid_violation = true;
      }

    SolverVerdict v = check_validity(entailment_formula(f, g), {}, cfg());
    if (v.status == SolverStatus::Unknown) continue;
    if (grid_violation) CHECK(v.status == SolverStatus::Invalid);
    if (v.status == SolverStatus::Valid) CHECK_FALSE(grid_violation);
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("run_solver: raw sat/unsat answers") {
  RawAnswer a = run_solver(
      "(set-logic QF_NRA)\n(declare-fun x () Real)\n"
      "(assert (> (* x x) 2.0))\n(check-sat)\n(get-model)\n",
      cfg());
  CHECK(a.kind == RawAnswer::Kind::Sat);
  a = run_solver(
      "(set-logic QF_NRA)\n(declare-fun x () Real)\n"
      "(assert (< (* x x) 0.0))\n(check-sat)\n", cfg());
  CHECK(a.kind == RawAnswer::Kind::Unsat);
}
