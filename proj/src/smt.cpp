#include "pwv/smt.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#ifndef PWV_DEFAULT_SOLVER
#define PWV_DEFAULT_SOLVER ""
#endif

namespace pwv {

namespace {

// ------------------------------------------------------------- symbols

bool needs_quoting(const std::string& s) {
  if (s.empty()) return true;
  if (s[0] >= '0' && s[0] <= '9') return true;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') ||
              std::string("~!@$%^&*_-+=<>.?/").find(c) != std::string::npos;
    if (!ok) return true;
  }
  return false;
}

std::string sym(const std::string& s) {
  return needs_quoting(s) ? "|" + s + "|" : s;
}

std::string smt_rational(const Rational& q) {
  Rational num = boost::multiprecision::numerator(q);
  Rational den = boost::multiprecision::denominator(q);
  bool neg = q < 0;
  Rational anum = neg ? Rational(-num) : num;
  std::string body;
  if (den == 1) {
    body = anum.str() + ".0";
  } else {
    body = "(/ " + anum.str() + ".0 " + den.str() + ".0)";
  }
  return neg ? "(- " + body + ")" : body;
}

// -------------------------------------------------- const collection

void collect_consts_term(const FOTermPtr& t, std::set<std::string>& bound,
                         std::set<std::string>& seen,
                         std::vector<std::string>& out);

void collect_consts(const FOFormulaPtr& f, std::set<std::string>& bound,
                    std::set<std::string>& seen, std::vector<std::string>& out) {
  switch (f->kind) {
    case FOFormula::Kind::Cmp:
      collect_consts_term(f->lhs, bound, seen, out);
      collect_consts_term(f->rhs, bound, seen, out);
      return;
    case FOFormula::Kind::Not:
    case FOFormula::Kind::And:
    case FOFormula::Kind::Or:
    case FOFormula::Kind::Implies:
      for (const auto& k : f->kids) collect_consts(k, bound, seen, out);
      return;
    case FOFormula::Kind::Forall:
    case FOFormula::Kind::Exists: {
      bool added = bound.insert(f->var).second;
      collect_consts(f->body, bound, seen, out);
      if (added) bound.erase(f->var);
      return;
    }
    case FOFormula::Kind::BoolConst:
      return;
  }
}

void collect_consts_term(const FOTermPtr& t, std::set<std::string>& bound,
                         std::set<std::string>& seen,
                         std::vector<std::string>& out) {
  switch (t->kind) {
    case FOTerm::Kind::Const:
      return;
    case FOTerm::Kind::Var:
      if (!bound.count(t->name) && seen.insert(t->name).second)
        out.push_back(t->name);
      return;
    case FOTerm::Kind::Ite:
      collect_consts(t->cond, bound, seen, out);
      collect_consts_term(t->args[0], bound, seen, out);
      collect_consts_term(t->args[1], bound, seen, out);
      return;
    default:
      for (const auto& a : t->args) collect_consts_term(a, bound, seen, out);
      return;
  }
}

// ------------------------------------------------------- serialization

struct Emitter {
  // Shared subterm -> define-fun name; populated by plan_cse.
  std::unordered_map<const FOTerm*, std::string> shared;
  std::unordered_map<const FOTerm*, std::set<std::string>> shared_fv;

  std::string term(const FOTermPtr& t, const std::set<std::string>& bound,
                   const FOTerm* self = nullptr) const {
    if (t.get() != self) {
      auto it = shared.find(t.get());
      if (it != shared.end()) {
        const auto& fv = shared_fv.at(t.get());
        bool shadowed = false;
        for (const auto& v : fv)
          if (bound.count(v)) { shadowed = true; break; }
        if (!shadowed) return it->second;
      }
    }
    switch (t->kind) {
      case FOTerm::Kind::Const:
        return smt_rational(t->value);
      case FOTerm::Kind::Var:
        return sym(t->name);
      case FOTerm::Kind::Add:
        return "(+ " + term(t->args[0], bound) + " " + term(t->args[1], bound) + ")";
      case FOTerm::Kind::Sub:
        return "(- " + term(t->args[0], bound) + " " + term(t->args[1], bound) + ")";
      case FOTerm::Kind::Mul:
        return "(* " + term(t->args[0], bound) + " " + term(t->args[1], bound) + ")";
      case FOTerm::Kind::Ite:
        return "(ite " + formula(t->cond, bound) + " " + term(t->args[0], bound) +
               " " + term(t->args[1], bound) + ")";
      case FOTerm::Kind::App: {
        std::string s = "(" + sym(t->name);
        for (const auto& a : t->args) s += " " + term(a, bound);
        return s + ")";
      }
    }
    throw std::logic_error("unreachable");
  }

  std::string formula(const FOFormulaPtr& f, std::set<std::string> bound) const {
    switch (f->kind) {
      case FOFormula::Kind::Cmp: {
        const char* op = f->op == FOFormula::CmpOp::Lt   ? "<"
                         : f->op == FOFormula::CmpOp::Le ? "<="
                                                         : "=";
        return std::string("(") + op + " " + term(f->lhs, bound) + " " +
               term(f->rhs, bound) + ")";
      }
      case FOFormula::Kind::Not:
        return "(not " + formula(f->kids[0], bound) + ")";
      case FOFormula::Kind::And:
      case FOFormula::Kind::Or: {
        std::string s = f->kind == FOFormula::Kind::And ? "(and" : "(or";
        for (const auto& k : f->kids) s += " " + formula(k, bound);
        return s + ")";
      }
      case FOFormula::Kind::Implies:
        return "(=> " + formula(f->kids[0], bound) + " " +
               formula(f->kids[1], bound) + ")";
      case FOFormula::Kind::Forall:
      case FOFormula::Kind::Exists: {
        // Merge a chain of like-polarity binders into one binder list.
        std::string kw = f->kind == FOFormula::Kind::Forall ? "forall" : "exists";
        std::string binders;
        const FOFormula* cur = f.get();
        while (cur->kind == f->kind) {
          binders += "(" + sym(cur->var) + " Real) ";
          bound.insert(cur->var);
          cur = cur->body.get();
        }
        binders.pop_back();
        FOFormulaPtr body(f, cur);  // aliasing ctor: same ownership
        return "(" + kw + " (" + binders + ") " + formula(body, bound) + ")";
      }
      case FOFormula::Kind::BoolConst:
        return f->bval ? "true" : "false";
    }
    throw std::logic_error("unreachable");
  }
};

// ----------------------------------------------------------------- CSE

struct CsePlan {
  std::unordered_map<const FOTerm*, int> count;
  std::unordered_map<const FOTerm*, std::size_t> size;  // approx serialized length
  std::unordered_map<const FOTerm*, std::set<std::string>> fv;
  std::vector<const FOTerm*> postorder;  // children before parents
  std::unordered_map<const FOTerm*, FOTermPtr> keep;    // keep nodes alive

  void visit_term(const FOTermPtr& t) {
    int& c = count[t.get()];
    ++c;
    if (c > 1) return;
    keep[t.get()] = t;
    std::size_t sz = 4;
    switch (t->kind) {
      case FOTerm::Kind::Const:
        sz = smt_rational(t->value).size();
        break;
      case FOTerm::Kind::Var:
        sz = t->name.size();
        fv[t.get()].insert(t->name);
        break;
      case FOTerm::Kind::Ite: {
        visit_formula(t->cond);
        visit_term(t->args[0]);
        visit_term(t->args[1]);
        fo_free_vars(t->cond, fv[t.get()]);
        sz += 40 + size[t->args[0].get()] + size[t->args[1].get()];
        for (int i = 0; i < 2; ++i) {
          const auto& s = fv[t->args[i].get()];
          fv[t.get()].insert(s.begin(), s.end());
        }
        break;
      }
      default:
        for (const auto& a : t->args) {
          visit_term(a);
          sz += 3 + size[a.get()];
          const auto& s = fv[a.get()];
          fv[t.get()].insert(s.begin(), s.end());
        }
        break;
    }
    size[t.get()] = sz;
    postorder.push_back(t.get());
  }

  void visit_formula(const FOFormulaPtr& f) {
    switch (f->kind) {
      case FOFormula::Kind::Cmp:
        visit_term(f->lhs);
        visit_term(f->rhs);
        return;
      case FOFormula::Kind::Forall:
      case FOFormula::Kind::Exists:
        visit_formula(f->body);
        return;
      case FOFormula::Kind::BoolConst:
        return;
      default:
        for (const auto& k : f->kids) visit_formula(k);
        return;
    }
  }
};

// --------------------------------------------------------- script build

struct Script {
  std::string text;
  std::vector<FOFormulaPtr> asserts;  // excluding domain axioms
  bool qf = false;                    // asserted part quantifier-free
  bool app_free = false;
};

Script build_script(const FOFormulaPtr& phi, const DomainDecl& domain,
                    bool negate_universal,
                    const std::optional<unsigned>& random_seed) {
  Script out;

  std::vector<std::string> skolems;
  FOFormulaPtr body = phi;
  if (negate_universal) {
    while (body->kind == FOFormula::Kind::Forall) {
      skolems.push_back(body->var);
      body = body->body;
    }
    if (body->kind == FOFormula::Kind::Implies) {
      const FOFormulaPtr& hyp = body->kids[0];
      if (hyp->kind == FOFormula::Kind::And)
        for (const auto& k : hyp->kids) out.asserts.push_back(k);
      else
        out.asserts.push_back(hyp);
      out.asserts.push_back(fo_not(body->kids[1]));
    } else {
      out.asserts.push_back(fo_not(body));
    }
  } else {
    if (body->kind == FOFormula::Kind::And)
      for (const auto& k : body->kids) out.asserts.push_back(k);
    else
      out.asserts.push_back(body);
  }

  // Constants: skolemized prefix first, then free variables in order of
  // first occurrence.
  std::vector<std::string> consts = skolems;
  std::set<std::string> seen(skolems.begin(), skolems.end());
  {
    std::set<std::string> bound;
    for (const auto& a : out.asserts) collect_consts(a, bound, seen, consts);
  }

  out.qf = true;
  out.app_free = true;
  for (const auto& a : out.asserts) {
    if (fo_has_quantifier(a)) out.qf = false;
    std::set<std::string> apps;
    fo_app_symbols(a, apps);
    if (!apps.empty()) out.app_free = false;
  }

  // CSE over the asserted formulas.
  CsePlan plan;
  for (const auto& a : out.asserts) plan.visit_formula(a);
  Emitter em;
  std::set<std::string> const_set(consts.begin(), consts.end());
  std::vector<const FOTerm*> defs;
  int next_id = 0;
  for (const FOTerm* t : plan.postorder) {
    if (plan.count[t] < 2) continue;
    if (t->kind == FOTerm::Kind::Const || t->kind == FOTerm::Kind::Var) continue;
    if (plan.size[t] < 40) continue;
    bool ground = true;
    for (const auto& v : plan.fv[t])
      if (!const_set.count(v)) { ground = false; break; }
    if (!ground) continue;
    em.shared[t] = "%t" + std::to_string(next_id++);
    em.shared_fv[t] = plan.fv[t];
    defs.push_back(t);
  }

  std::ostringstream os;
  if (random_seed) os << "(set-option :random-seed " << *random_seed << ")\n";
  bool use_qf_nra = out.qf && domain.empty();
  os << "(set-logic " << (use_qf_nra ? "QF_NRA" : "ALL") << ")\n";
  for (const auto& c : consts) os << "(declare-fun " << sym(c) << " () Real)\n";
  for (const auto& f : domain.funcs) {
    os << "(declare-fun " << sym(f.name) << " (";
    for (int i = 0; i < f.arity; ++i) os << (i ? " Real" : "Real");
    os << ") Real)\n";
    // Codomain is the nonnegative reals.
    os << "(assert (forall (";
    for (int i = 0; i < f.arity; ++i) os << (i ? " " : "") << "(%a" << i << " Real)";
    os << ") (<= 0.0 (" << sym(f.name);
    for (int i = 0; i < f.arity; ++i) os << " %a" << i;
    os << "))))\n";
  }
  for (const auto& ax : domain.axioms) {
    std::set<std::string> bound(ax.binders.begin(), ax.binders.end());
    os << "; axiom " << ax.name << "\n(assert ";
    if (ax.binders.empty()) {
      os << em.formula(ax.body, {});
    } else {
      os << "(forall (";
      for (std::size_t i = 0; i < ax.binders.size(); ++i)
        os << (i ? " " : "") << "(" << sym(ax.binders[i]) << " Real)";
      os << ") " << em.formula(ax.body, bound) << ")";
    }
    os << ")\n";
  }
  for (const FOTerm* t : defs) {
    FOTermPtr tp = plan.keep.at(t);
    os << "(define-fun " << em.shared.at(t) << " () Real "
       << em.term(tp, {}, t) << ")\n";
  }
  for (const auto& a : out.asserts)
    os << "(assert " << em.formula(a, {}) << ")\n";
  // Term-ites from Iverson brackets choke the default procedure on larger
  // nonlinear queries, where cofactoring them away first helps a lot — but
  // cofactoring itself can blow up when the ites share atoms. Try it on a
  // time slice, then fall back to the default procedure.
  if (use_qf_nra)
    os << "(check-sat-using (or-else (try-for (then simplify cofactor-term-ite "
          "smt) 45000) (then simplify smt)))\n";
  else
    os << "(check-sat)\n";
  os << "(get-model)\n";
  out.text = os.str();
  return out;
}

// --------------------------------------------------------- output parse

struct Sexp {
  std::string atom;  // empty for lists
  std::vector<Sexp> kids;
  bool is_list = false;
};

struct SexpParser {
  const std::string& s;
  std::size_t i = 0;
  explicit SexpParser(const std::string& src) : s(src) {}

  void skip_ws() {
    while (i < s.size()) {
      if (isspace(static_cast<unsigned char>(s[i]))) { ++i; continue; }
      if (s[i] == ';') {
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      break;
    }
  }

  bool parse(Sexp& out) {
    skip_ws();
    if (i >= s.size()) return false;
    if (s[i] == '(') {
      ++i;
      out.is_list = true;
      out.kids.clear();
      while (true) {
        skip_ws();
        if (i >= s.size()) return false;
        if (s[i] == ')') { ++i; return true; }
        Sexp k;
        if (!parse(k)) return false;
        out.kids.push_back(std::move(k));
      }
    }
    if (s[i] == ')') return false;
    if (s[i] == '|') {
      std::size_t j = s.find('|', i + 1);
      if (j == std::string::npos) return false;
      out.atom = s.substr(i + 1, j - i - 1);
      i = j + 1;
      return true;
    }
    if (s[i] == '"') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"') ++j;
      out.atom = s.substr(i, j - i + 1);
      i = j + 1;
      return true;
    }
    std::size_t j = i;
    while (j < s.size() && !isspace(static_cast<unsigned char>(s[j])) &&
           s[j] != '(' && s[j] != ')' && s[j] != ';')
      ++j;
    out.atom = s.substr(i, j - i);
    i = j;
    return true;
  }
};

bool parse_value(const Sexp& v, Rational& out) {
  if (!v.is_list) {
    try {
      out = rational_from_string(v.atom);
      return true;
    } catch (...) {
      return false;
    }
  }
  if (v.kids.empty()) return false;
  const std::string& op = v.kids[0].atom;
  if (op == "/" && v.kids.size() == 3) {
    Rational a, b;
    if (!parse_value(v.kids[1], a) || !parse_value(v.kids[2], b) || b == 0)
      return false;
    out = a / b;
    return true;
  }
  if (op == "-" && v.kids.size() == 2) {
    Rational a;
    if (!parse_value(v.kids[1], a)) return false;
    out = -a;
    return true;
  }
  return false;  // root-obj and friends: algebraic, not exact-rational
}

void parse_models(const std::string& text, RawAnswer& ans) {
  SexpParser p(text);
  Sexp e;
  while (p.parse(e)) {
    if (!e.is_list) continue;
    // Either a bare model list or one wrapped as (model ...).
    std::vector<const Sexp*> entries;
    std::size_t start = (!e.kids.empty() && e.kids[0].atom == "model") ? 1 : 0;
    for (std::size_t k = start; k < e.kids.size(); ++k) entries.push_back(&e.kids[k]);
    for (const Sexp* d : entries) {
      if (!d->is_list || d->kids.size() != 5) continue;
      if (d->kids[0].atom != "define-fun") continue;
      if (!d->kids[2].is_list || !d->kids[2].kids.empty()) continue;  // 0-ary only
      if (d->kids[3].atom != "Real") continue;
      Rational v;
      if (parse_value(d->kids[4], v))
        ans.model[d->kids[1].atom] = v;
      else
        ans.model_exact = false;
    }
  }
}

std::atomic<int> g_query_counter{0};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

std::string resolve_solver_cmd(const SolverConfig& cfg) {
  if (!cfg.solver_cmd.empty()) return cfg.solver_cmd;
  if (const char* env = std::getenv("PWV_SOLVER"); env && *env) return env;
  std::string def = PWV_DEFAULT_SOLVER;
  if (!def.empty()) return def;
  throw std::runtime_error(
      "no SMT solver configured (use --solver or set PWV_SOLVER)");
}

std::string emit_smtlib(const FOFormulaPtr& phi, const DomainDecl& domain,
                        bool negate_universal,
                        const std::optional<unsigned>& random_seed) {
  return build_script(phi, domain, negate_universal, random_seed).text;
}

RawAnswer run_solver(const std::string& script, const SolverConfig& cfg) {
  std::string cmd_prefix = resolve_solver_cmd(cfg);
  int id = ++g_query_counter;
  char buf[64];
  std::snprintf(buf, sizeof buf, "query-%04d.smt2", id);
  std::string path;
  if (!cfg.debug_dir.empty()) {
    path = cfg.debug_dir + "/" + buf;
  } else {
    path = "/tmp/pwv-" + std::to_string(getpid()) + "-" + buf;
  }
  {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write query file " + path);
    f << script;
  }

  RawAnswer ans;
  std::string cmd = "timeout " + std::to_string(cfg.timeout_sec) + " " +
                    cmd_prefix + " " + shell_quote(path) + " 2>&1";
  auto t0 = std::chrono::steady_clock::now();
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot start solver: " + cmd_prefix);
  std::string output;
  char chunk[4096];
  std::size_t got;
  while ((got = fread(chunk, 1, sizeof chunk, pipe)) > 0) output.append(chunk, got);
  int status = pclose(pipe);
  ans.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  if (cfg.debug_dir.empty()) std::remove(path.c_str());

  if (WIFEXITED(status) && WEXITSTATUS(status) == 124) {
    ans.kind = RawAnswer::Kind::Unknown;
    ans.reason = "solver timeout after " + std::to_string(cfg.timeout_sec) + "s";
    return ans;
  }

  // First standalone status token wins; error lines before it are tolerated.
  std::istringstream lines(output);
  std::string line, first_error;
  bool answered = false;
  std::size_t answer_end = 0;
  while (std::getline(lines, line)) {
    std::string trimmed = line;
    while (!trimmed.empty() && isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (trimmed == "sat") {
      ans.kind = RawAnswer::Kind::Sat;
      answered = true;
      {
        auto g = lines.tellg();
        answer_end = g < 0 ? std::string::npos : static_cast<std::size_t>(g);
      }
      break;
    }
    if (trimmed == "unsat") {
      ans.kind = RawAnswer::Kind::Unsat;
      answered = true;
      break;
    }
    if (trimmed == "unknown") {
      ans.kind = RawAnswer::Kind::Unknown;
      ans.reason = "solver returned unknown";
      answered = true;
      break;
    }
    if (first_error.empty() && trimmed.rfind("(error", 0) == 0)
      first_error = trimmed;
  }
  if (!answered) {
    ans.kind = RawAnswer::Kind::Unknown;
    ans.reason = first_error.empty()
                     ? (WIFEXITED(status)
                            ? "no answer from solver (exit " +
                                  std::to_string(WEXITSTATUS(status)) + ")"
                            : "solver terminated abnormally")
                     : first_error;
    return ans;
  }
  if (ans.kind == RawAnswer::Kind::Sat && answer_end != std::string::npos)
    parse_models(output.substr(answer_end), ans);
  else if (ans.kind == RawAnswer::Kind::Sat)
    parse_models(output, ans);
  return ans;
}

namespace {

SolverVerdict run_query(const Script& s, const SolverConfig& cfg,
                        bool validity_mode) {
  RawAnswer raw = run_solver(s.text, cfg);
  SolverVerdict v;
  v.solver_time_ms = raw.time_ms;
  switch (raw.kind) {
    case RawAnswer::Kind::Unsat:
      v.status = SolverStatus::Valid;
      return v;
    case RawAnswer::Kind::Unknown:
      v.status = SolverStatus::Unknown;
      v.reason = raw.reason;
      return v;
    case RawAnswer::Kind::Sat:
      break;
  }
  v.model = raw.model;
  v.model_exact = raw.model_exact;
  // Re-validate exact countermodels of quantifier-free, domain-free
  // queries by direct evaluation; a failing check means the solver answer
  // cannot be trusted, so degrade to Unknown rather than mis-report.
  if (validity_mode && s.qf && s.app_free && raw.model_exact) {
    try {
      for (const auto& a : s.asserts) {
        if (!fo_eval(a, raw.model)) {
          v.status = SolverStatus::Unknown;
          v.reason = "solver countermodel failed exact re-validation";
          return v;
        }
      }
    } catch (const std::exception& e) {
      v.status = SolverStatus::Unknown;
      v.reason = std::string("countermodel re-validation error: ") + e.what();
      return v;
    }
  }
  v.status = SolverStatus::Invalid;
  return v;
}

}  // namespace

SolverVerdict check_validity(const FOFormulaPtr& phi, const DomainDecl& domain,
                             const SolverConfig& cfg) {
  Script s = build_script(phi, domain, /*negate_universal=*/true, cfg.random_seed);
  return run_query(s, cfg, /*validity_mode=*/true);
}

SolverVerdict check_satisfiable(const FOFormulaPtr& phi, const DomainDecl& domain,
                                const SolverConfig& cfg) {
  Script s = build_script(phi, domain, /*negate_universal=*/false, cfg.random_seed);
  SolverVerdict v = run_query(s, cfg, /*validity_mode=*/false);
  // Flip the reading: sat = witness exists = Invalid; unsat = Valid.
  return v;
}

SolverVerdict check_one_bounded(const ExprPtr& f, const DomainDecl& domain,
                                const SolverConfig& cfg) {
  return check_validity(one_bounded_formula(f), domain, cfg);
}

}  // namespace pwv
