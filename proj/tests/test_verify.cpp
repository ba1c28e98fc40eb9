#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gen.hpp"
#include "pwv/parser.hpp"
#include "pwv/semantics.hpp"
#include "pwv/transform.hpp"
#include "pwv/verify.hpp"

using namespace pwv;
using pwvtest::Gen;

namespace {

VerifyOptions opts() {
  VerifyOptions o;
  o.solver.timeout_sec = 120;
  return o;
}

TransformerKind K(TransformerKind::Op op, int n) { return TransformerKind{op, n}; }

ProgramPtr strip_init(ProgramPtr p) {
  while (p->kind == Program::Kind::Seq) p = p->b;
  return p;
}

}  // namespace

TEST_CASE("check_bound_loopfree: trivial and polarity errors") {
  ExprPtr f = parse_expectation("x + 1");
  Verdict v = check_bound_loopfree(Direction::Upper, K(TransformerKind::Op::Uwp, 4),
                                   p_skip(), f, f, {}, opts());
  CHECK(v.status == Status::Verified);

  // Direction/kind mismatch is misuse, not Unknown.
  CHECK_THROWS_AS(check_bound_loopfree(Direction::Upper,
                                       K(TransformerKind::Op::Lwp, 4), p_skip(),
                                       f, f, {}, opts()),
                  VerifyError);
  // Polarity violation: upper bound g may not contain sup.
  CHECK_THROWS_AS(check_bound_loopfree(Direction::Upper,
                                       K(TransformerKind::Op::Uwp, 4), p_skip(), f,
                                       parse_expectation("sup v in [0,1]: v + x"),
                                       {}, opts()),
                  VerifyError);
}

TEST_CASE("check_bound_loopfree: Monte Carlo inner block") {
  ProgramPtr inner = pwvtest::load_bench("montecarlo_inner.pw");
  ExprPtr count = parse_expectation("count");

  Verdict v = check_bound_loopfree(Direction::Upper, K(TransformerKind::Op::Uwp, 16),
                                   inner, count,
                                   parse_expectation("count + 0.85"), {}, opts());
  CHECK(v.status == Status::Verified);

  v = check_bound_loopfree(Direction::Upper, K(TransformerKind::Op::Uwp, 16),
                           inner, count, parse_expectation("count + 0.78"), {},
                           opts());
  REQUIRE(v.status == Status::Refuted);
  // The witness re-evaluates to a genuine violation of the Riemann bound.
  ExprPtr t = transform(K(TransformerKind::Op::Uwp, 16), inner, count);
  State w = v.witness;
  for (const auto& x : {"x", "y", "count"})
    if (!w.count(x)) w[x] = 0;
  CHECK(eval_expr(t, w, 1).lo > w.at("count") + Rational(78, 100));
}

TEST_CASE("check_superinvariant: Monte Carlo loop") {
  ProgramPtr loop = strip_init(pwvtest::load_bench("montecarlo.pw"));
  ExprPtr count = parse_expectation("count");
  REQUIRE(loop->kind == Program::Kind::While);

  Verdict v = check_superinvariant(16, loop, count, loop->invariant, {}, opts());
  CHECK(v.status == Status::Verified);

  ExprPtr weak = parse_expectation("count + [i <= M] * 0.70 * ((M - i) + 1)");
  v = check_superinvariant(16, loop, count, weak, {}, opts());
  REQUIRE(v.status == Status::Refuted);
  // Re-check the counterexample: Phi(weak) > weak at the witness state.
  ExprPtr phi = char_fn_apply(K(TransformerKind::Op::Uwp, 16), loop, count, weak);
  CHECK(eval_expr(phi, v.witness, 1).lo > eval_expr(weak, v.witness, 1).lo);
}

TEST_CASE("check_superinvariant: misuse") {
  ProgramPtr not_loop = parse_program("x := 1");
  CHECK_THROWS_AS(check_superinvariant(2, not_loop, parse_expectation("x"),
                                       parse_expectation("x"), {}, opts()),
                  VerifyError);
  ProgramPtr loop = parse_program("while (x < 1) { x := x + 1 }");
  CHECK_THROWS_AS(check_superinvariant(2, loop, parse_expectation("x"),
                                       parse_expectation("sup v in [0,1]: v + x"),
                                       {}, opts()),
                  VerifyError);
}

TEST_CASE("check_subinvariant_wlp: bottom is always a subinvariant") {
  ProgramPtr loop = parse_program("while (x <= 1/2) { x := unif }");
  Verdict v = check_subinvariant_wlp(2, loop, parse_expectation("[x <= 3/4] * 1"),
                                     parse_expectation("0"), {}, opts());
  CHECK(v.status == Status::Verified);
  CHECK(v.prov.assumptions.empty());  // 1-boundedness was solver-checked

  // Unbounded candidates are rejected as misuse.
  CHECK_THROWS_AS(check_subinvariant_wlp(2, loop, parse_expectation("1"),
                                         parse_expectation("x + 2"), {}, opts()),
                  VerifyError);
}

TEST_CASE("refute_upper_bound: x := unif against 1/4") {
  VerifyOptions o = opts();
  o.max_n = 8;
  ProgramPtr c = parse_program("x := unif");
  Verdict v = refute_upper_bound(c, parse_expectation("x"),
                                 parse_expectation("1/4"), {}, o);
  REQUIRE(v.status == Status::Refuted);
  CHECK(v.prov.n <= 4);  // lwp_4 = 3/8 > 1/4 already

  // Nothing to refute: the bound holds, so the budget runs out.
  o.max_n = 2;
  v = refute_upper_bound(p_skip(), parse_expectation("x"),
                         parse_expectation("x"), {}, o);
  CHECK(v.status == Status::Unknown);
  CHECK(v.reason.find("budget") != std::string::npos);

  v = refute_upper_bound(parse_program("while (0 < 1) { skip }"),
                         parse_expectation("1"), parse_expectation("0"), {}, o);
  CHECK(v.status == Status::Unknown);  // wp of the diverging loop is 0
}

TEST_CASE("refute_lower_bound_wlp: observe example") {
  VerifyOptions o = opts();
  o.max_n = 8;
  ProgramPtr c = parse_program("x := unif; observe(x <= 1/2)");
  Verdict v = refute_lower_bound_wlp(c, parse_expectation("1"),
                                     parse_expectation("3/4"), {}, o);
  REQUIRE(v.status == Status::Refuted);
  CHECK(v.prov.n == 8);  // uwlp_4 = 3/4 exactly; n = 8 gives 5/8 < 3/4

  o.max_n = 2;
  v = refute_lower_bound_wlp(c, parse_expectation("1"), parse_expectation("0"),
                             {}, o);
  CHECK(v.status == Status::Unknown);  // 0 is always a valid lower bound

  v = refute_lower_bound_wlp(p_diverge(), parse_expectation("1"),
                             parse_expectation("1"), {}, o);
  CHECK(v.status == Status::Unknown);  // wlp[diverge](1) = 1; the bound holds
}

TEST_CASE("refutation monotone progress along the doubling schedule") {
  Gen gen(53);
  ProgramPtr w = parse_program(
      "while (x <= 1/2) { x := unif; count := count + 1 }");
  ExprPtr f = parse_expectation("count + [x <= 3/4] * 1");
  for (int k = 0; k < 5; ++k) {
    State s = gen.state({"x", "count"}, 2, 4);
    Rational prev = -1;
    for (int n : {1, 2, 4}) {
      ExprPtr t = transform(K(TransformerKind::Op::Lwp, n), unfold(w, n), f);
      Rational v = eval_expr(t, s, 1).lo;
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("cwp_upper_bound: trivial denominator reduces to the wp bound") {
  ProgramPtr loop = strip_init(pwvtest::load_bench("montecarlo.pw"));
  CwpResult res = cwp_upper_bound(loop, parse_expectation("count"),
                                  loop->invariant, 16, parse_expectation("1"), 2,
                                  {}, opts());
  REQUIRE(res.verdict.status == Status::Verified);
  REQUIRE(res.report);
  CHECK(res.report->side_condition.find("> 0") != std::string::npos);

  // A failing numerator check propagates its Refuted verdict.
  ExprPtr weak = parse_expectation("count + [i <= M] * 0.70 * ((M - i) + 1)");
  res = cwp_upper_bound(loop, parse_expectation("count"), weak, 16,
                        parse_expectation("1"), 2, {}, opts());
  CHECK(res.verdict.status == Status::Refuted);
  CHECK_FALSE(res.report);
}

TEST_CASE("check_bound_program: whole-program Monte Carlo bound") {
  ProgramPtr prog = pwvtest::load_bench("montecarlo.pw");
  // After i:=1, count:=0 the invariant entails count + 0.85*M.
  Verdict v = check_bound_program(Direction::Upper, K(TransformerKind::Op::Uwp, 16),
                                  prog, parse_expectation("count"),
                                  parse_expectation("0.85 * M"), {}, opts());
  CHECK(v.status == Status::Verified);
}
