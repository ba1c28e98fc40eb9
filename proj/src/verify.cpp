#include "pwv/verify.hpp"

#include <chrono>

#include "pwv/encode.hpp"
#include "pwv/printer.hpp"

namespace pwv {

namespace {

// ------------------------------------------------------------- helpers

bool term_app_free(const TermPtr& t) {
  if (t->kind == Term::Kind::App) return false;
  for (const auto& a : t->args)
    if (!term_app_free(a)) return false;
  return true;
}

bool guard_app_free(const GuardPtr& g) {
  if (g->lhs && !term_app_free(g->lhs)) return false;
  if (g->rhs && !term_app_free(g->rhs)) return false;
  if (g->a && !guard_app_free(g->a)) return false;
  if (g->b && !guard_app_free(g->b)) return false;
  return true;
}

bool expr_app_free(const ExprPtr& f) {
  switch (f->kind) {
    case Expr::Kind::Term:
      return term_app_free(f->term);
    case Expr::Kind::Iverson:
      return guard_app_free(f->guard) && expr_app_free(f->a);
    case Expr::Kind::Scale:
    case Expr::Kind::Sup:
    case Expr::Kind::Inf:
      return expr_app_free(f->a);
    case Expr::Kind::Sum:
      return expr_app_free(f->a) && expr_app_free(f->b);
  }
  return true;
}

State witness_from_model(const std::set<std::string>& state_vars,
                         const std::map<std::string, Rational>& model) {
  State s;
  for (const auto& v : state_vars) {
    auto it = model.find(v);
    s[v] = it == model.end() ? Rational(0) : it->second;
  }
  return s;
}

// Validity of lhs <= rhs over nonnegative states, folded into a Verdict.
Verdict entail_check(const ExprPtr& lhs, const ExprPtr& rhs,
                     const DomainDecl& domain, const VerifyOptions& opts,
                     Provenance prov) {
  prov.query_nodes += expr_size(lhs) + expr_size(rhs);
  FOFormulaPtr phi = entailment_formula(lhs, rhs);
  SolverVerdict sv = check_validity(phi, domain, opts.solver);
  Verdict out;
  out.prov = std::move(prov);
  out.prov.solver_time_ms += sv.solver_time_ms;
  switch (sv.status) {
    case SolverStatus::Valid:
      out.status = Status::Verified;
      return out;
    case SolverStatus::Unknown:
      out.status = Status::Unknown;
      out.reason = sv.reason;
      return out;
    case SolverStatus::Invalid:
      break;
  }
  out.status = Status::Refuted;
  std::set<std::string> sv_names = free_vars(lhs);
  free_vars(rhs, sv_names);
  out.witness = witness_from_model(sv_names, sv.model);
  out.prov.witness_exact =
      sv.model_exact && expr_app_free(lhs) && expr_app_free(rhs);
  return out;
}

// Discharges a 1-boundedness side condition. Returns a Verdict only when
// the solver answered Unknown (propagated); throws VerifyError when the
// input is provably not 1-bounded or undecidably so without
// --assume-bounded.
std::optional<Verdict> ensure_one_bounded(const ExprPtr& e, const char* what,
                                          const DomainDecl& domain,
                                          const VerifyOptions& opts,
                                          Provenance& prov) {
  if (!expr_app_free(e)) {
    if (!opts.assume_bounded)
      throw VerifyError(std::string("1-boundedness of ") + what +
                        " is undecidable with uninterpreted domain symbols; "
                        "rerun with --assume-bounded to accept it as an "
                        "explicit assumption");
    prov.assumptions.push_back(std::string("assumed 1-bounded: ") + what);
    return std::nullopt;
  }
  if (opts.assume_bounded) {
    prov.assumptions.push_back(std::string("assumed 1-bounded: ") + what);
    return std::nullopt;
  }
  SolverVerdict sv =
      check_one_bounded(interval_simplify(to_pnf(e)), domain, opts.solver);
  prov.solver_time_ms += sv.solver_time_ms;
  switch (sv.status) {
    case SolverStatus::Valid:
      return std::nullopt;
    case SolverStatus::Invalid:
      throw VerifyError(std::string(what) + " is not 1-bounded, as required "
                        "by the wlp transformer");
    case SolverStatus::Unknown: {
      Verdict v;
      v.status = Status::Unknown;
      v.reason = std::string("1-boundedness check of ") + what +
                 " inconclusive: " + sv.reason;
      v.prov = prov;
      return v;
    }
  }
  return std::nullopt;
}

std::vector<ProgramPtr> flatten_seq(const ProgramPtr& C) {
  if (C->kind == Program::Kind::Seq) {
    std::vector<ProgramPtr> a = flatten_seq(C->a);
    std::vector<ProgramPtr> b = flatten_seq(C->b);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  return {C};
}

void merge_prov(Provenance& into, const Provenance& sub) {
  into.solver_time_ms += sub.solver_time_ms;
  into.query_nodes = std::max(into.query_nodes, sub.query_nodes);
  into.assumptions.insert(into.assumptions.end(), sub.assumptions.begin(),
                          sub.assumptions.end());
  into.witness_exact = into.witness_exact && sub.witness_exact;
}

}  // namespace

Verdict check_bound_loopfree(Direction dir, const TransformerKind& kind,
                             const ProgramPtr& C, const ExprPtr& f,
                             const ExprPtr& g, const DomainDecl& domain,
                             const VerifyOptions& opts) {
  if ((dir == Direction::Upper) == kind.is_lower())
    throw VerifyError(std::string("direction/transformer mismatch: ") +
                      (dir == Direction::Upper ? "upper" : "lower") +
                      " bounds use the " +
                      (dir == Direction::Upper ? "upper" : "lower") +
                      " transformers, got " + kind.name());
  Classification gc = classify(g);
  if (dir == Direction::Upper
          ? (gc != Classification::QuantifierFree && gc != Classification::SupFree)
          : (gc != Classification::QuantifierFree && gc != Classification::InfFree))
    throw VerifyError(std::string("bound polarity violation: ") +
                      (dir == Direction::Upper
                           ? "upper bounds must be sup-free"
                           : "lower bounds must be inf-free"));
  Provenance prov{"check_bound_loopfree", kind.n};
  TransformOptions topts{opts.max_nodes, false};
  if (kind.is_wlp()) {
    if (auto v = ensure_one_bounded(f, "the post-expectation", domain, opts, prov))
      return *v;
    if (auto v = ensure_one_bounded(g, "the bound", domain, opts, prov))
      return *v;
    topts.input_one_bounded = true;
  }
  ExprPtr T = interval_simplify(to_pnf(transform(kind, C, f, topts)));
  ExprPtr gp = interval_simplify(to_pnf(g));
  return dir == Direction::Upper ? entail_check(T, gp, domain, opts, prov)
                                 : entail_check(gp, T, domain, opts, prov);
}

Verdict check_superinvariant(int N, const ProgramPtr& loop, const ExprPtr& post,
                             const ExprPtr& I, const DomainDecl& domain,
                             const VerifyOptions& opts) {
  if (loop->kind != Program::Kind::While)
    throw VerifyError("check_superinvariant expects a while loop");
  if (classify(I) != Classification::QuantifierFree)
    throw VerifyError("invariant candidates must be quantifier-free");
  Provenance prov{"check_superinvariant", N};
  TransformOptions topts{opts.max_nodes, false};
  TransformerKind kind{TransformerKind::Op::Uwp, N};
  ExprPtr phi = interval_simplify(to_pnf(char_fn_apply(kind, loop, post, I, topts)));
  return entail_check(phi, I, domain, opts, prov);
}

Verdict check_subinvariant_wlp(int N, const ProgramPtr& loop, const ExprPtr& post,
                               const ExprPtr& J, const DomainDecl& domain,
                               const VerifyOptions& opts) {
  if (loop->kind != Program::Kind::While)
    throw VerifyError("check_subinvariant_wlp expects a while loop");
  if (classify(J) != Classification::QuantifierFree)
    throw VerifyError("invariant candidates must be quantifier-free");
  Provenance prov{"check_subinvariant_wlp", N};
  if (auto v = ensure_one_bounded(J, "the invariant candidate", domain, opts, prov))
    return *v;
  if (auto v = ensure_one_bounded(post, "the post-expectation", domain, opts, prov))
    return *v;
  TransformOptions topts{opts.max_nodes, true};
  TransformerKind kind{TransformerKind::Op::Lwlp, N};
  ExprPtr phi = interval_simplify(to_pnf(char_fn_apply(kind, loop, post, J, topts)));
  return entail_check(J, phi, domain, opts, prov);
}

CwpResult cwp_upper_bound(const ProgramPtr& loop, const ExprPtr& f,
                          const ExprPtr& I, int N, const ExprPtr& J, int N_prime,
                          const DomainDecl& domain, const VerifyOptions& opts) {
  CwpResult res;
  Verdict num = check_superinvariant(N, loop, f, I, domain, opts);
  if (num.status != Status::Verified) {
    res.verdict = num;
    res.verdict.prov.kind = "cwp_upper_bound (numerator)";
    return res;
  }
  Verdict den = check_subinvariant_wlp(N_prime, loop, e_const(Rational(1)), J,
                                       domain, opts);
  if (den.status != Status::Verified) {
    res.verdict = den;
    merge_prov(res.verdict.prov, num.prov);
    res.verdict.prov.kind = "cwp_upper_bound (denominator)";
    return res;
  }
  res.verdict.status = Status::Verified;
  res.verdict.prov = num.prov;
  merge_prov(res.verdict.prov, den.prov);
  res.verdict.prov.kind = "cwp_upper_bound";
  CwpBoundReport rep;
  rep.numerator = I;
  rep.denominator = J;
  rep.n = N;
  rep.n_prime = N_prime;
  rep.side_condition = "J(s) > 0, i.e. " + pretty(J) + " > 0";
  rep.ratio = "cwp <= (" + pretty(I) + ") / (" + pretty(J) + ")";
  res.report = std::move(rep);
  return res;
}

namespace {

Verdict refute_impl(const ProgramPtr& C, const ExprPtr& f, const ExprPtr& g,
                    const DomainDecl& domain, const VerifyOptions& opts,
                    bool upper) {
  // upper: refute wp[C](f) <= g via g < lwp_n[unfold(C,n)](f).
  // !upper: refute g <= wlp[C](f) via uwlp_n[unfold(C,n)](f) < g.
  Provenance prov{upper ? "refute_upper_bound" : "refute_lower_bound_wlp", 0};
  TransformOptions topts{opts.max_nodes, !upper};
  if (!upper) {
    if (auto v = ensure_one_bounded(f, "the post-expectation", domain, opts, prov))
      return *v;
    if (auto v = ensure_one_bounded(g, "the claimed bound", domain, opts, prov))
      return *v;
  }
  Classification cf = classify(f);
  if (cf != Classification::QuantifierFree &&
      cf != (upper ? Classification::SupFree : Classification::InfFree))
    throw VerifyError("post-expectation has the wrong quantifier polarity "
                      "for this refutation direction");
  Classification cg = classify(g);
  if (cg != Classification::QuantifierFree &&
      cg != (upper ? Classification::InfFree : Classification::SupFree))
    throw VerifyError("claimed bound has the wrong quantifier polarity "
                      "for this refutation direction");
  ExprPtr gp = interval_simplify(to_pnf(g));
  std::string last_unknown;
  auto t0 = std::chrono::steady_clock::now();
  for (unsigned n = 1; n <= opts.max_n; n *= 2) {
    if (opts.max_seconds) {
      auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
      if (elapsed >= static_cast<long long>(opts.max_seconds)) {
        Verdict v;
        v.status = Status::Unknown;
        v.reason = "budget: time limit reached at n = " + std::to_string(n);
        v.prov = prov;
        return v;
      }
    }
    prov.n = static_cast<int>(n);
    TransformerKind kind{upper ? TransformerKind::Op::Lwp
                               : TransformerKind::Op::Uwlp,
                         static_cast<int>(n)};
    ExprPtr T;
    try {
      T = interval_simplify(to_pnf(transform(kind, unfold(C, n), f, topts)));
    } catch (const TransformError& e) {
      Verdict v;
      v.status = Status::Unknown;
      v.reason = std::string("budget: ") + e.what();
      v.prov = prov;
      return v;
    }
    prov.query_nodes = std::max(prov.query_nodes, expr_size(T));
    FOFormulaPtr q = refutation_query(gp, T,
                                      upper ? RefuteDirection::Upper
                                            : RefuteDirection::Lower);
    SolverVerdict sv = check_satisfiable(q, domain, opts.solver);
    prov.solver_time_ms += sv.solver_time_ms;
    if (sv.status == SolverStatus::Unknown) {
      last_unknown = sv.reason;
      continue;
    }
    if (sv.status == SolverStatus::Valid) continue;  // unsat at this n
    // Witness candidate; sanity-check it by re-evaluating the Riemann
    // expectation at the witness on the partition-endpoint grid. The grid
    // sample under-approximates sup and over-approximates inf, so a
    // failing comparison proves the model bogus and we move on.
    std::set<std::string> names = free_vars(gp);
    free_vars(T, names);
    State s = witness_from_model(names, sv.model);
    bool certified = true, cert_exact = false;
    try {
      Rational tv = eval_expr(T, s, n).lo;
      Rational gv = eval_expr(gp, s, n).lo;
      certified = upper ? (tv > gv) : (tv < gv);
      cert_exact = true;
    } catch (const std::exception&) {
      cert_exact = false;  // uninterpreted symbols: trust the solver model
    }
    if (!certified) continue;
    Verdict v;
    v.status = Status::Refuted;
    v.witness = std::move(s);
    v.prov = prov;
    v.prov.witness_exact = sv.model_exact && cert_exact;
    return v;
  }
  Verdict v;
  v.status = Status::Unknown;
  v.reason = last_unknown.empty()
                 ? "budget: no violation found up to n = " +
                       std::to_string(opts.max_n)
                 : "budget exhausted; solver inconclusive: " + last_unknown;
  v.prov = prov;
  return v;
}

}  // namespace

Verdict refute_upper_bound(const ProgramPtr& C, const ExprPtr& f, const ExprPtr& g,
                           const DomainDecl& domain, const VerifyOptions& opts) {
  return refute_impl(C, f, g, domain, opts, /*upper=*/true);
}

Verdict refute_lower_bound_wlp(const ProgramPtr& C, const ExprPtr& f,
                               const ExprPtr& g, const DomainDecl& domain,
                               const VerifyOptions& opts) {
  return refute_impl(C, f, g, domain, opts, /*upper=*/false);
}

Verdict check_bound_program(Direction dir, const TransformerKind& kind,
                            const ProgramPtr& C, const ExprPtr& f,
                            const ExprPtr& g, const DomainDecl& domain,
                            const VerifyOptions& opts) {
  if (!has_while(C)) return check_bound_loopfree(dir, kind, C, f, g, domain, opts);
  bool upper = dir == Direction::Upper;
  if (upper && kind.op != TransformerKind::Op::Uwp)
    throw VerifyError("programs with loops support upper bounds via uwp "
                      "superinvariants only");
  if (!upper && kind.op != TransformerKind::Op::Lwlp)
    throw VerifyError("programs with loops support lower bounds via lwlp "
                      "subinvariants only");
  Classification gc = classify(g);
  if (upper ? (gc != Classification::QuantifierFree && gc != Classification::SupFree)
            : (gc != Classification::QuantifierFree && gc != Classification::InfFree))
    throw VerifyError(std::string("bound polarity violation: ") +
                      (upper ? "upper bounds must be sup-free"
                             : "lower bounds must be inf-free"));
  Provenance prov{"check_bound_program", kind.n};
  TransformOptions topts{opts.max_nodes, false};
  if (!upper) {
    if (auto v = ensure_one_bounded(f, "the post-expectation", domain, opts, prov))
      return *v;
    if (auto v = ensure_one_bounded(g, "the bound", domain, opts, prov))
      return *v;
    topts.input_one_bounded = true;
  }
  std::vector<ProgramPtr> stmts = flatten_seq(C);
  ExprPtr post = f;
  for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) {
    const ProgramPtr& stmt = *it;
    if (stmt->kind == Program::Kind::While) {
      if (!stmt->invariant)
        throw VerifyError("while loop without an @invariant annotation; "
                          "bound checking needs one per loop");
      Verdict v = upper ? check_superinvariant(kind.n, stmt, post,
                                               stmt->invariant, domain, opts)
                        : check_subinvariant_wlp(kind.n, stmt, post,
                                                 stmt->invariant, domain, opts);
      merge_prov(prov, v.prov);
      if (v.status != Status::Verified) {
        v.prov = prov;
        v.prov.kind = "check_bound_program";
        return v;
      }
      post = stmt->invariant;
    } else if (has_while(stmt)) {
      throw VerifyError("loops nested under other statements are not supported");
    } else {
      post = transform(kind, stmt, post, topts);
    }
  }
  ExprPtr P = interval_simplify(to_pnf(post));
  ExprPtr gp = interval_simplify(to_pnf(g));
  Verdict v = upper ? entail_check(P, gp, domain, opts, prov)
                    : entail_check(gp, P, domain, opts, prov);
  v.prov.kind = "check_bound_program";
  return v;
}

}  // namespace pwv
