// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failing criteria (0 = all passed).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "gen.hpp"
#include "pwv/encode.hpp"
#include "pwv/fo.hpp"
#include "pwv/parser.hpp"
#include "pwv/printer.hpp"
#include "pwv/semantics.hpp"
#include "pwv/sim.hpp"
#include "pwv/smt.hpp"
#include "pwv/transform.hpp"
#include "pwv/verify.hpp"

using namespace pwv;
using pwvtest::Gen;

namespace {

int failures = 0;

void criterion(int num, const std::string& title, const std::function<bool()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string err;
  try {
    ok = body();
  } catch (const std::exception& e) {
    err = e.what();
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  std::printf("[%s] criterion %2d: %s (%lld ms)%s%s\n", ok ? "PASS" : "FAIL", num,
              title.c_str(), static_cast<long long>(ms), err.empty() ? "" : " -- ",
              err.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

TransformerKind K(TransformerKind::Op op, int n) { return TransformerKind{op, n}; }

VerifyOptions opts() {
  VerifyOptions o;
  o.solver.timeout_sec = 180;
  return o;
}

ProgramPtr strip_init(ProgramPtr p) {
  while (p->kind == Program::Kind::Seq) p = p->b;
  return p;
}

}  // namespace

int main() {
  DomainDecl none;

  // 1. Loop-free Monte Carlo bound + exact cell-count oracle equality.
  criterion(1, "Monte Carlo inner block: uwp_16(count) <= count + 0.85", [&] {
    ProgramPtr inner = pwvtest::load_bench("montecarlo_inner.pw");
    ExprPtr count = parse_expectation("count");
    Verdict v = check_bound_loopfree(Direction::Upper, K(TransformerKind::Op::Uwp, 16),
                                     inner, count,
                                     parse_expectation("count + 0.85"), none, opts());
    if (v.status != Status::Verified) return false;

    ExprPtr t = transform(K(TransformerKind::Op::Uwp, 16), inner, count);
    Rational u = eval_expr(t, {{"x", 0}, {"y", 0}, {"count", 0}}, 1).lo;
    int cells = 0;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        if (i * i + j * j <= 256) ++cells;
    return u == Rational(cells, 256);
  });

  // 2. Monte Carlo invariant accepted; 0.70-weakened variant refuted with a
  //    re-checkable counterexample.
  criterion(2, "Monte Carlo invariant: 0.85 accepted, 0.70 refuted", [&] {
    ProgramPtr loop = strip_init(pwvtest::load_bench("montecarlo.pw"));
    ExprPtr count = parse_expectation("count");
    Verdict good = check_superinvariant(16, loop, count, loop->invariant, none, opts());
    if (good.status != Status::Verified) return false;

    ExprPtr weak = parse_expectation("count + [i <= M] * 0.70 * ((M - i) + 1)");
    Verdict bad = check_superinvariant(16, loop, count, weak, none, opts());
    if (bad.status != Status::Refuted) return false;
    ExprPtr phi = char_fn_apply(K(TransformerKind::Op::Uwp, 16), loop, count, weak);
    return eval_expr(phi, bad.witness, 1).lo > eval_expr(weak, bad.witness, 1).lo;
  });

  // 3. Irwin-Hall superinvariant at N=10 (coefficient 1.1/2 = 0.55).
  criterion(3, "Irwin-Hall: uwp_10-superinvariant accepted", [&] {
    ProgramPtr loop = strip_init(pwvtest::load_bench("irwin_hall.pw"));
    Verdict v = check_superinvariant(10, loop, parse_expectation("x"),
                                     loop->invariant, none, opts());
    return v.status == Status::Verified;
  });

  // 4. Conditioned Irwin-Hall: wp part at N=19 and wlp part at N=2.
  criterion(4, "conditioned Irwin-Hall: uwp_19 invariant and lwlp_2 subinvariant", [&] {
    DomainDecl dom;
    ProgramPtr prog = pwvtest::load_bench("irwin_hall_cond.pw", &dom);
    ProgramPtr loop = strip_init(prog);
    Verdict wp = check_superinvariant(19, loop, parse_expectation("x", &dom),
                                      loop->invariant, dom, opts());
    if (wp.status != Status::Verified) return false;

    VerifyOptions o = opts();
    o.assume_bounded = true;  // exp makes 1-boundedness undecidable
    ExprPtr j = parse_expectation(
        "[i <= M] * exp((M - i) + 1) + [!(i <= M)] * 1", &dom);
    Verdict wlp = check_subinvariant_wlp(2, loop, parse_expectation("1"), j, dom, o);
    return wlp.status == Status::Verified;  // Unknown counts as failure
  });

  // 5. Diverging loop: lwlp_2 subinvariant with the exp domain.
  criterion(5, "diverging loop: lwlp_2 subinvariant accepted", [&] {
    DomainDecl dom;
    ProgramPtr loop = strip_init(pwvtest::load_bench("diverging.pw", &dom));
    VerifyOptions o = opts();
    o.assume_bounded = true;
    Verdict v = check_subinvariant_wlp(2, loop, parse_expectation("0"),
                                       loop->invariant, dom, o);
    return v.status == Status::Verified;
  });

  // 6. Tortoise-hare superinvariant at N=16, with N=25 as fallback.
  criterion(6, "tortoise-hare: uwp-superinvariant at N=16 (fallback 25)", [&] {
    ProgramPtr loop = strip_init(pwvtest::load_bench("tortoise_hare.pw"));
    ExprPtr count = parse_expectation("count");
    Verdict v = check_superinvariant(16, loop, count, loop->invariant, none, opts());
    if (v.status == Status::Verified) return true;
    v = check_superinvariant(25, loop, count, loop->invariant, none, opts());
    return v.status == Status::Verified;
  });

  // 7. Sandwich property suite.
  criterion(7, "sandwich: lwp <= uwp and lwlp <= uwlp on loop-free benchmarks", [&] {
    Gen gen(61);
    std::vector<ProgramPtr> benches = {
        pwvtest::load_bench("montecarlo_inner.pw"),
        parse_program("x := unif; observe(x <= 1/2)"),
        parse_program("{x := x + 1} [1/3] {x := unif}; y := x * x"),
        parse_program("x := unif; if (x <= 1/2) { y := y + x } else { y := y * x }"),
    };
    ExprPtr f_wp = parse_expectation("x + y + count");
    ExprPtr f_wlp = parse_expectation("[x <= 3/4] * 1");
    TransformOptions one;
    one.input_one_bounded = true;
    for (const ProgramPtr& c : benches) {
      std::set<std::string> vars;
      program_vars(c, vars);
      vars.insert({"x", "y", "count"});
      for (int n : {1, 2, 4, 8}) {
        ExprPtr lwp = transform(K(TransformerKind::Op::Lwp, n), c, f_wp);
        ExprPtr uwp = transform(K(TransformerKind::Op::Uwp, n), c, f_wp);
        ExprPtr lwlp = transform(K(TransformerKind::Op::Lwlp, n), c, f_wlp, one);
        ExprPtr uwlp = transform(K(TransformerKind::Op::Uwlp, n), c, f_wlp, one);
        for (int k = 0; k < 100; ++k) {
          State s = gen.state(vars);
          if (eval_expr(lwp, s, 1).lo > eval_expr(uwp, s, 1).lo) return false;
          if (eval_expr(lwlp, s, 1).lo > eval_expr(uwlp, s, 1).lo) return false;
        }
      }
    }
    return true;
  });

  // 8. Power-of-two and unfolding monotonicity.
  criterion(8, "power-of-two and unfold monotonicity at sampled states", [&] {
    Gen gen(67);
    ProgramPtr c =
        parse_program("x := unif; if (x <= 1/2) { y := y + x } else { skip }");
    ExprPtr f = parse_expectation("y + [x <= 2/3] * 1");
    for (int k = 0; k < 20; ++k) {
      State s = gen.state({"x", "y"});
      Rational pl = 0, pu = 0;
      for (int e = 1; e <= 5; ++e) {
        int n = 1 << e;
        Rational l = eval_expr(transform(K(TransformerKind::Op::Lwp, n), c, f), s, 1).lo;
        Rational u = eval_expr(transform(K(TransformerKind::Op::Uwp, n), c, f), s, 1).lo;
        if (e > 1 && (l < pl || u > pu)) return false;
        pl = l;
        pu = u;
      }
    }
    ProgramPtr w = parse_program(
        "while (x <= 1/2) { x := unif; count := count + 1 }");
    ExprPtr g = parse_expectation("count + [x <= 3/4] * 1");
    for (int k = 0; k < 20; ++k) {
      State s = gen.state({"x", "count"}, 2, 4);
      Rational prev = -1;
      for (unsigned d = 0; d <= 3; ++d) {
        Rational v =
            eval_expr(transform(K(TransformerKind::Op::Lwp, 2), unfold(w, d), g), s, 1)
                .lo;
        if (v < prev) return false;
        prev = v;
      }
    }
    return true;
  });

  // 9. Non-monotonicity witness: lwp_2 = 1/2 but lwp_3 = 1/3.
  criterion(9, "non-monotonicity: lwp_2 = 1/2, lwp_3 = 1/3 for [x >= 1/2]", [&] {
    ProgramPtr c = parse_program("x := unif");
    ExprPtr f = parse_expectation("[x >= 1/2] * 1");
    Rational v2 = eval_expr(transform(K(TransformerKind::Op::Lwp, 2), c, f),
                            {{"x", 0}}, 2).lo;
    Rational v3 = eval_expr(transform(K(TransformerKind::Op::Lwp, 3), c, f),
                            {{"x", 0}}, 3).lo;
    return v2 == Rational(1, 2) && v3 == Rational(1, 3);
  });

  // 10. Refutation with a certified witness at n <= 4.
  criterion(10, "refutation: wp[x := unif](x) <= 1/4 refuted by n <= 4", [&] {
    VerifyOptions o = opts();
    o.max_n = 8;
    ProgramPtr c = parse_program("x := unif");
    Verdict v = refute_upper_bound(c, parse_expectation("x"),
                                   parse_expectation("1/4"), none, o);
    if (v.status != Status::Refuted || v.prov.n > 4) return false;
    // Certify: lwp_n at the witness exceeds the claimed bound.
    ExprPtr t = transform(K(TransformerKind::Op::Lwp, v.prov.n), c,
                          parse_expectation("x"));
    State w = v.witness;
    if (!w.count("x")) w["x"] = 0;
    return eval_expr(t, w, v.prov.n).lo > Rational(1, 4);
  });

  // 11. Statistical bracketing at the case-study initial states.
  criterion(11, "statistical bracketing of Monte Carlo estimates", [&] {
    ProgramPtr inner = pwvtest::load_bench("montecarlo_inner.pw");
    ExprPtr count = parse_expectation("count");
    State s0 = {{"x", 0}, {"y", 0}, {"count", 0}};
    WpEstimate est = estimate_wp(inner, count, s0, 100000, 5);
    if (est.partial) return false;
    if (std::abs(est.mean - 0.785) > 0.01) return false;
    Rational lo = eval_expr(transform(K(TransformerKind::Op::Lwp, 16), inner, count),
                            s0, 1).lo;
    Rational hi = eval_expr(transform(K(TransformerKind::Op::Uwp, 16), inner, count),
                            s0, 1).lo;
    double slack = 4 * est.std_error;
    return rational_to_double(lo) - slack <= est.mean &&
           est.mean <= rational_to_double(hi) + slack;
  });

  // 12. Round-trip, FO-encoding soundness, and PNF entailment equivalence.
  criterion(12, "round-trip, encoding soundness, PNF equivalence suites", [&] {
    Gen gen(71);
    for (int i = 0; i < 1000; ++i) {
      ProgramPtr p = gen.program(3);
      if (!program_equal(p, parse_program(pretty(p)))) return false;
    }
    for (int i = 0; i < 50; ++i) {
      ExprPtr f = gen.expr(3, /*allow_quant=*/false);
      FOTermPtr t = encode_qf_expr(f);
      for (int k = 0; k < 10; ++k) {
        State s = gen.state(free_vars(f));
        std::map<std::string, Rational> env(s.begin(), s.end());
        if (fo_eval(t, env) != eval_expr(f, s).lo) return false;
      }
    }
    // PNF equivalence, solver-checked on 20 single-polarity instances:
    // to_pnf(f) must denote the same function as the prenexing of a
    // structurally different but equivalent rearrangement of f.
    SolverConfig cfg;
    cfg.timeout_sec = 60;
    int done = 0;
    for (int i = 0; done < 20; ++i) {
      if (i > 120) return false;
      ExprPtr f = gen.expr(2);
      Classification c = classify(f);
      if (c == Classification::Mixed || c == Classification::QuantifierFree)
        continue;
      ExprPtr p1 = to_pnf(f);
      ExprPtr p2 = to_pnf(e_sum(e_term(t_const(0)), f));
      SolverVerdict v = check_validity(equivalence_formula(p1, p2), none, cfg);
      if (v.status == SolverStatus::Invalid) return false;
      if (v.status != SolverStatus::Valid) continue;  // solver incompleteness
      ++done;
    }
    return true;
  });

  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures;
}
