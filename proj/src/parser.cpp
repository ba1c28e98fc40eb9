#include "pwv/parser.hpp"

#include <cctype>
#include <map>
#include <utility>
#include <variant>

namespace pwv {

namespace {

// ------------------------------------------------------------------ Lexer

enum class Tok {
  Ident, Number, Punct, End,
};

struct Token {
  Tok kind;
  std::string text;   // Ident / Punct spelling
  Rational value;     // Number
  int line = 1, col = 1;
};

const char* kKeywords[] = {"skip",  "diverge", "observe", "if",     "else",
                           "while", "vars",    "sup",     "inf",    "in",
                           "domain", "func",   "axiom",   "forall", "invariant",
                           "unif"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col); }

  char peek(std::size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }

  void advance() {
    if (pos < src.size()) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void skip_ws() {
    for (;;) {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
        advance();
      if (peek() == '/' && peek(1) == '/') {
        while (pos < src.size() && src[pos] != '\n') advance();
        continue;
      }
      break;
    }
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t;
      t.line = line;
      t.col = col;
      char c = peek();
      if (c == '\0') {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
          id.push_back(peek());
          advance();
        }
        if (peek() == '#') fail("'#' is reserved for internally generated names");
        t.kind = Tok::Ident;
        t.text = std::move(id);
        out.push_back(std::move(t));
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          num.push_back(peek());
          advance();
        }
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
          num.push_back('.');
          advance();
          while (std::isdigit(static_cast<unsigned char>(peek()))) {
            num.push_back(peek());
            advance();
          }
        } else if (peek() == '/' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
          num.push_back('/');
          advance();
          while (std::isdigit(static_cast<unsigned char>(peek()))) {
            num.push_back(peek());
            advance();
          }
        }
        t.kind = Tok::Number;
        t.value = rational_from_string(num);
        out.push_back(std::move(t));
        continue;
      }
      // Longest-match punctuation.
      static const char* two[] = {":=", "<=", ">=", "==", "!=", "&&", "||", "->"};
      std::string p;
      for (const char* cand : two) {
        if (c == cand[0] && peek(1) == cand[1]) {
          p = cand;
          break;
        }
      }
      if (p.empty()) {
        static const std::string singles = ";(){}[],:+-*<>!@.";
        if (singles.find(c) == std::string::npos)
          fail(std::string("unexpected character '") + c + "'");
        p = std::string(1, c);
      }
      for (std::size_t i = 0; i < p.size(); ++i) advance();
      t.kind = Tok::Punct;
      t.text = std::move(p);
      out.push_back(std::move(t));
    }
  }
};

// ----------------------------------------------------------------- Parser

struct Parser {
  std::vector<Token> toks;
  std::size_t idx = 0;
  const DomainDecl* domain = nullptr;

  const Token& cur() const { return toks[idx]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }

  bool at_punct(const std::string& p) const {
    return cur().kind == Tok::Punct && cur().text == p;
  }
  bool at_kw(const std::string& k) const {
    return cur().kind == Tok::Ident && cur().text == k && is_keyword(k);
  }
  bool accept_punct(const std::string& p) {
    if (!at_punct(p)) return false;
    ++idx;
    return true;
  }
  void expect_punct(const std::string& p) {
    if (!accept_punct(p)) fail("expected '" + p + "'");
  }
  bool accept_kw(const std::string& k) {
    if (!at_kw(k)) return false;
    ++idx;
    return true;
  }
  void expect_kw(const std::string& k) {
    if (!accept_kw(k)) fail("expected '" + k + "'");
  }

  std::string expect_ident() {
    if (cur().kind != Tok::Ident) fail("expected identifier");
    if (is_keyword(cur().text)) fail("'" + cur().text + "' is a reserved word");
    return toks[idx++].text;
  }

  Rational expect_number() {
    if (cur().kind != Tok::Number) fail("expected numeric literal");
    return toks[idx++].value;
  }

  // ------------------------------------------------------------- Terms

  TermPtr parse_term() { return parse_term_add(); }

  TermPtr parse_term_add() {
    TermPtr t = parse_term_mul();
    for (;;) {
      if (accept_punct("+")) {
        t = t_plus(t, parse_term_mul());
      } else if (accept_punct("-")) {
        t = t_monus(t, parse_term_mul());
      } else {
        return t;
      }
    }
  }

  TermPtr parse_term_mul() {
    TermPtr t = parse_term_atom();
    while (accept_punct("*")) t = t_times(t, parse_term_atom());
    return t;
  }

  TermPtr parse_term_atom() {
    if (cur().kind == Tok::Number) return t_const(expect_number());
    if (cur().kind == Tok::Ident && !is_keyword(cur().text)) {
      std::string name = expect_ident();
      if (at_punct("(")) return parse_app(name);
      return t_var(name);
    }
    if (accept_punct("(")) {
      TermPtr t = parse_term_add();
      expect_punct(")");
      return t;
    }
    fail("expected term");
  }

  TermPtr parse_app(const std::string& name) {
    const DomainFunc* fn = domain ? domain->find(name) : nullptr;
    if (!fn) fail("unknown function symbol '" + name + "' (no domain declaration)");
    expect_punct("(");
    std::vector<TermPtr> args;
    if (!at_punct(")")) {
      args.push_back(parse_term_add());
      while (accept_punct(",")) args.push_back(parse_term_add());
    }
    expect_punct(")");
    if (static_cast<int>(args.size()) != fn->arity)
      fail("function '" + name + "' expects " + std::to_string(fn->arity) +
           " argument(s)");
    return t_app(name, std::move(args));
  }

  // ------------------------------------------------------------- Guards

  GuardPtr parse_guard() { return parse_guard_implies(); }

  GuardPtr parse_guard_implies() {
    GuardPtr a = parse_guard_or();
    if (accept_punct("->")) return g_implies(a, parse_guard_implies());
    return a;
  }

  GuardPtr parse_guard_or() {
    GuardPtr a = parse_guard_and();
    while (accept_punct("||")) a = g_or(a, parse_guard_and());
    return a;
  }

  GuardPtr parse_guard_and() {
    GuardPtr a = parse_guard_not();
    while (accept_punct("&&")) a = g_and(a, parse_guard_not());
    return a;
  }

  GuardPtr parse_guard_not() {
    if (accept_punct("!")) return g_not(parse_guard_not());
    return parse_guard_atom();
  }

  GuardPtr parse_guard_atom() {
    // Either `term cmp term` or a parenthesized guard; disambiguate by
    // attempting the comparison first and rewinding on failure.
    std::size_t save = idx;
    try {
      TermPtr lhs = parse_term();
      Guard::Kind k;
      if (accept_punct("<")) k = Guard::Kind::Lt;
      else if (accept_punct("<=")) k = Guard::Kind::Le;
      else if (accept_punct("==")) k = Guard::Kind::Eq;
      else if (accept_punct("!=")) k = Guard::Kind::Neq;
      else if (accept_punct(">")) k = Guard::Kind::Gt;
      else if (accept_punct(">=")) k = Guard::Kind::Ge;
      else fail("expected comparison operator");
      return g_cmp(k, lhs, parse_term());
    } catch (const ParseError&) {
      idx = save;
    }
    expect_punct("(");
    GuardPtr g = parse_guard();
    expect_punct(")");
    return g;
  }

  // ------------------------------------------------------- Expectations

  ExprPtr parse_expr() { return parse_expr_add(); }

  ExprPtr parse_expr_add() {
    ExprPtr acc = parse_expr_mul();
    for (;;) {
      if (accept_punct("+")) {
        acc = e_sum(acc, parse_expr_mul());
      } else if (at_punct("-")) {
        const Token& t = cur();
        ++idx;
        ExprPtr rhs = parse_expr_mul();
        if (acc->kind != Expr::Kind::Term || rhs->kind != Expr::Kind::Term)
          throw ParseError("'-' (monus) applies to terms only", t.line, t.col);
        acc = e_term(t_monus(acc->term, rhs->term));
      } else {
        return acc;
      }
    }
  }

  struct Factor {
    // Exactly one of `bracket` or `expr` is set.
    GuardPtr bracket;
    ExprPtr expr;
    int line = 0, col = 0;
  };

  ExprPtr parse_expr_mul() {
    std::vector<Factor> factors;
    bool saw_quant = false;
    for (;;) {
      Factor f;
      f.line = cur().line;
      f.col = cur().col;
      if (at_punct("[")) {
        ++idx;
        f.bracket = parse_guard();
        expect_punct("]");
        factors.push_back(std::move(f));
        if (!at_punct("*")) fail("expected '*' after Iverson bracket");
        ++idx;
        continue;
      }
      if (at_kw("sup") || at_kw("inf")) {
        bool is_sup = cur().text == "sup";
        ++idx;
        std::string v = expect_ident();
        expect_kw("in");
        expect_punct("[");
        Rational lo = expect_number();
        expect_punct(",");
        Rational hi = expect_number();
        expect_punct("]");
        expect_punct(":");
        if (lo > hi) fail("quantifier interval has lo > hi");
        ExprPtr body = parse_expr_add();
        f.expr = is_sup ? e_sup(v, lo, hi, body) : e_inf(v, lo, hi, body);
        factors.push_back(std::move(f));
        saw_quant = true;
        break;  // a quantifier extends to the end of the expression
      }
      f.expr = parse_expr_atom();
      factors.push_back(std::move(f));
      if (accept_punct("*")) continue;
      break;
    }
    (void)saw_quant;
    return fold_factors(std::move(factors));
  }

  ExprPtr parse_expr_atom() {
    if (cur().kind == Tok::Number) return e_const(expect_number());
    if (cur().kind == Tok::Ident && !is_keyword(cur().text)) {
      std::string name = expect_ident();
      if (at_punct("(")) return e_term(parse_app(name));
      return e_term(t_var(name));
    }
    if (accept_punct("(")) {
      ExprPtr e = parse_expr_add();
      expect_punct(")");
      return e;
    }
    fail("expected expectation expression");
  }

  static bool term_is_closed(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Const:
        return true;
      case Term::Kind::Var:
      case Term::Kind::App:
        return false;
      default:
        return term_is_closed(t->args[0]) && term_is_closed(t->args[1]);
    }
  }

  static Rational eval_closed(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Const:
        return t->value;
      case Term::Kind::Plus:
        return eval_closed(t->args[0]) + eval_closed(t->args[1]);
      case Term::Kind::Monus:
        return monus(eval_closed(t->args[0]), eval_closed(t->args[1]));
      case Term::Kind::Times:
        return eval_closed(t->args[0]) * eval_closed(t->args[1]);
      default:
        throw std::logic_error("eval_closed: open term");
    }
  }

  ExprPtr fold_factors(std::vector<Factor> factors) {
    // Merge maximal runs of adjacent plain-term factors, left-associatively.
    std::vector<Factor> merged;
    for (auto& f : factors) {
      if (!merged.empty() && f.expr && f.expr->kind == Expr::Kind::Term &&
          merged.back().expr && merged.back().expr->kind == Expr::Kind::Term) {
        merged.back().expr =
            e_term(t_times(merged.back().expr->term, f.expr->term));
      } else {
        merged.push_back(std::move(f));
      }
    }
    // Fold right-to-left: brackets become Iverson nodes, closed constant
    // terms become scalings.
    Factor& last = merged.back();
    if (!last.expr)
      throw ParseError("Iverson bracket must be followed by '*' and an operand",
                       last.line, last.col);
    ExprPtr acc = last.expr;
    for (std::size_t i = merged.size() - 1; i-- > 0;) {
      Factor& f = merged[i];
      if (f.bracket) {
        acc = e_iverson(f.bracket, acc);
      } else if (f.expr->kind == Expr::Kind::Term && term_is_closed(f.expr->term)) {
        acc = e_scale(eval_closed(f.expr->term), acc);
      } else {
        throw ParseError(
            "only rational constants and Iverson brackets may multiply a "
            "general expectation",
            f.line, f.col);
      }
    }
    return acc;
  }

  // ----------------------------------------------------------- Programs

  ProgramPtr parse_stmt_seq(const std::string& terminator) {
    ProgramPtr acc = parse_stmt();
    while (accept_punct(";")) {
      if (cur().kind == Tok::End || at_punct(terminator)) break;  // trailing ';'
      acc = p_seq(acc, parse_stmt());
    }
    return acc;
  }

  ProgramPtr parse_block() {
    expect_punct("{");
    ProgramPtr p = parse_stmt_seq("}");
    expect_punct("}");
    return p;
  }

  ProgramPtr parse_stmt() {
    if (accept_kw("skip")) return p_skip();
    if (accept_kw("diverge")) return p_diverge();
    if (accept_kw("observe")) {
      expect_punct("(");
      GuardPtr g = parse_guard();
      expect_punct(")");
      return p_observe(g);
    }
    if (accept_kw("if")) {
      expect_punct("(");
      GuardPtr g = parse_guard();
      expect_punct(")");
      ProgramPtr then_p = parse_block();
      expect_kw("else");
      ProgramPtr else_p = parse_block();
      return p_ite(g, then_p, else_p);
    }
    if (accept_kw("while")) {
      expect_punct("(");
      GuardPtr g = parse_guard();
      expect_punct(")");
      ExprPtr inv;
      if (accept_punct("@")) {
        expect_kw("invariant");
        expect_punct("(");
        inv = parse_expr();
        expect_punct(")");
      }
      ProgramPtr body = parse_block();
      return p_while(g, body, inv);
    }
    if (at_punct("{")) {
      // Probabilistic choice: { C1 } [p] { C2 }
      ProgramPtr a = parse_block();
      const Token& t = cur();
      expect_punct("[");
      Rational p = expect_number();
      expect_punct("]");
      ProgramPtr b = parse_block();
      if (p < 0 || p > 1)
        throw ParseError("choice probability must lie in [0,1]", t.line, t.col);
      return p_pchoice(a, p, b);
    }
    // Assignment.
    std::string var = expect_ident();
    expect_punct(":=");
    if (accept_kw("unif")) {
      int n_override = 0;
      if (accept_punct("@")) {
        const Token& t = cur();
        Rational n = expect_number();
        if (denominator(n) != 1 || n < 1)
          throw ParseError("unif partition override must be a positive integer",
                           t.line, t.col);
        n_override = static_cast<int>(numerator(n).convert_to<long>());
      }
      return p_unif(var, n_override);
    }
    return p_assign(var, parse_term());
  }

  // -------------------------------------------------------- Domain decl

  FOTermPtr parse_fo_add() {
    FOTermPtr t = parse_fo_mul();
    for (;;) {
      if (accept_punct("+")) t = fo_add(t, parse_fo_mul());
      else if (accept_punct("-")) t = fo_sub(t, parse_fo_mul());
      else return t;
    }
  }

  FOTermPtr parse_fo_mul() {
    FOTermPtr t = parse_fo_atom();
    while (accept_punct("*")) t = fo_mul(t, parse_fo_atom());
    return t;
  }

  FOTermPtr parse_fo_atom() {
    if (cur().kind == Tok::Number) return fo_const(expect_number());
    if (cur().kind == Tok::Ident && !is_keyword(cur().text)) {
      std::string name = expect_ident();
      if (at_punct("(")) {
        const DomainFunc* fn = domain ? domain->find(name) : nullptr;
        if (!fn) fail("unknown function symbol '" + name + "'");
        expect_punct("(");
        std::vector<FOTermPtr> args;
        if (!at_punct(")")) {
          args.push_back(parse_fo_add());
          while (accept_punct(",")) args.push_back(parse_fo_add());
        }
        expect_punct(")");
        if (static_cast<int>(args.size()) != fn->arity)
          fail("function '" + name + "' expects " + std::to_string(fn->arity) +
               " argument(s)");
        return fo_app(name, std::move(args));
      }
      return fo_var(name);
    }
    if (accept_punct("(")) {
      FOTermPtr t = parse_fo_add();
      expect_punct(")");
      return t;
    }
    fail("expected arithmetic term");
  }

  FOFormulaPtr parse_fo_formula() { return parse_fo_implies(); }

  FOFormulaPtr parse_fo_implies() {
    FOFormulaPtr a = parse_fo_or();
    if (accept_punct("->")) return fo_implies(a, parse_fo_implies());
    return a;
  }

  FOFormulaPtr parse_fo_or() {
    FOFormulaPtr a = parse_fo_and();
    while (accept_punct("||")) a = fo_or({a, parse_fo_and()});
    return a;
  }

  FOFormulaPtr parse_fo_and() {
    FOFormulaPtr a = parse_fo_not();
    while (accept_punct("&&")) a = fo_and({a, parse_fo_not()});
    return a;
  }

  FOFormulaPtr parse_fo_not() {
    if (accept_punct("!")) return fo_not(parse_fo_not());
    return parse_fo_atom_formula();
  }

  FOFormulaPtr parse_fo_atom_formula() {
    std::size_t save = idx;
    try {
      FOTermPtr lhs = parse_fo_add();
      if (accept_punct("<")) return fo_cmp(FOFormula::CmpOp::Lt, lhs, parse_fo_add());
      if (accept_punct("<=")) return fo_cmp(FOFormula::CmpOp::Le, lhs, parse_fo_add());
      if (accept_punct("==")) return fo_cmp(FOFormula::CmpOp::Eq, lhs, parse_fo_add());
      if (accept_punct("!=")) return fo_not(fo_cmp(FOFormula::CmpOp::Eq, lhs, parse_fo_add()));
      if (accept_punct(">")) return fo_cmp(FOFormula::CmpOp::Lt, parse_fo_add(), lhs);
      if (accept_punct(">=")) return fo_cmp(FOFormula::CmpOp::Le, parse_fo_add(), lhs);
      fail("expected comparison operator");
    } catch (const ParseError&) {
      idx = save;
    }
    expect_punct("(");
    FOFormulaPtr f = parse_fo_formula();
    expect_punct(")");
    return f;
  }

  DomainDecl parse_domain_block() {
    DomainDecl d;
    expect_kw("domain");
    expect_punct("{");
    while (!at_punct("}")) {
      if (accept_kw("func")) {
        DomainFunc fn;
        fn.name = expect_ident();
        expect_punct("(");
        Rational a = expect_number();
        if (denominator(a) != 1 || a < 1) fail("function arity must be a positive integer");
        fn.arity = static_cast<int>(numerator(a).convert_to<long>());
        expect_punct(")");
        expect_punct(";");
        if (d.find(fn.name)) fail("duplicate function symbol '" + fn.name + "'");
        d.funcs.push_back(std::move(fn));
        domain = &d;  // make earlier symbols visible to later axioms
        continue;
      }
      if (at_kw("axiom")) {
        const Token& at = cur();
        ++idx;
        DomainAxiom ax;
        ax.name = expect_ident();
        expect_punct(":");
        while (accept_kw("forall")) {
          ax.binders.push_back(expect_ident());
          expect_punct(".");
        }
        ax.body = parse_fo_formula();
        expect_punct(";");
        std::set<std::string> fv;
        fo_free_vars(ax.body, fv);
        for (const auto& b : ax.binders) fv.erase(b);
        if (!fv.empty())
          throw ParseError("axiom '" + ax.name + "' has unbound variable '" +
                               *fv.begin() + "'",
                           at.line, at.col);
        d.axioms.push_back(std::move(ax));
        continue;
      }
      fail("expected 'func', 'axiom', or '}' in domain block");
    }
    expect_punct("}");
    return d;
  }
};

}  // namespace

ParseResult parse_program_full(const std::string& text) {
  Lexer lex(text);
  Parser p{lex.run()};
  ParseResult result;
  if (p.at_kw("domain")) {
    result.domain = p.parse_domain_block();
    p.domain = &result.domain;
  }
  if (p.accept_kw("vars")) {
    std::vector<std::string> names;
    names.push_back(p.expect_ident());
    while (p.accept_punct(",")) names.push_back(p.expect_ident());
    p.expect_punct(";");
    result.declared_vars = std::move(names);
  }
  result.program = p.parse_stmt_seq("");
  if (p.cur().kind != Tok::End) p.fail("trailing input after program");
  if (result.declared_vars) {
    std::set<std::string> declared(result.declared_vars->begin(),
                                   result.declared_vars->end());
    std::set<std::string> used;
    program_vars(result.program, used);
    for (const auto& v : used)
      if (!declared.count(v))
        throw ParseError("undeclared variable '" + v + "'", 1, 1);
  }
  return result;
}

ProgramPtr parse_program(const std::string& text) {
  return parse_program_full(text).program;
}

ExprPtr parse_expectation(const std::string& text, const DomainDecl* domain) {
  Lexer lex(text);
  Parser p{lex.run()};
  p.domain = domain;
  ExprPtr e = p.parse_expr();
  if (p.cur().kind != Tok::End) p.fail("trailing input after expression");
  return e;
}

TermPtr parse_term_text(const std::string& text, const DomainDecl* domain) {
  Lexer lex(text);
  Parser p{lex.run()};
  p.domain = domain;
  TermPtr t = p.parse_term();
  if (p.cur().kind != Tok::End) p.fail("trailing input after term");
  return t;
}

}  // namespace pwv
