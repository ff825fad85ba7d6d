#include <charconv>
#include <set>

#include "lexer.hpp"
#include "specforge/parser.hpp"

namespace specforge {

using detail::Tok;
using detail::Token;

std::string format(const Diagnostic& d) {
  return to_string(d.span) + ": " +
         (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ") + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.severity == Diagnostic::Severity::Error) return true;
  }
  return false;
}

namespace {

constexpr int kMaxNesting = 200;

struct SyntaxError {
  std::string message;
  SourceSpan span;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)) {}

  Module parse_module() {
    Module m;
    while (!at(Tok::End)) {
      if (at_keyword("context")) {
        m.contexts.push_back(parse_context());
      } else if (at_keyword("machine")) {
        m.machines.push_back(parse_machine());
      } else {
        fail("expected 'context' or 'machine', found " + detail::describe(peek()));
      }
    }
    return m;
  }

  Expr parse_standalone_expression() {
    Expr e = parse_expr();
    if (!at(Tok::End)) fail("unexpected " + detail::describe(peek()) + " after expression");
    return e;
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }

  bool at(Tok kind) const {
    check_invalid();
    return peek().kind == kind;
  }

  bool at_keyword(std::string_view kw) const {
    return at(Tok::Keyword) && peek().text == kw;
  }

  void check_invalid() const {
    if (peek().kind == Tok::Invalid) throw SyntaxError{peek().text, span_of(peek())};
  }

  Token take() {
    check_invalid();
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  Token expect(Tok kind, std::string_view what) {
    if (!at(kind)) fail("expected " + std::string(what) + ", found " + detail::describe(peek()));
    return take();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      fail("expected '" + std::string(kw) + "', found " + detail::describe(peek()));
    }
    take();
  }

  bool accept_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    take();
    return true;
  }

  bool accept(Tok kind) {
    if (!at(kind)) return false;
    take();
    return true;
  }

  std::string expect_ident(std::string_view what) {
    if (at(Tok::Keyword)) {
      fail("expected " + std::string(what) + ", found reserved word '" + peek().text + "'");
    }
    return expect(Tok::Ident, what).text;
  }

  // IDENT ':' starts a labeled item or declaration.
  bool at_labeled_item() const {
    return peek().kind == Tok::Ident && peek(1).kind == Tok::Colon;
  }

  SourceSpan span_of(const Token& t) const {
    return SourceSpan{file_, t.line, t.column, t.end_line, t.end_column};
  }

  SourceSpan span_from(const Token& start) const {
    const Token& last = tokens_[pos_ == 0 ? 0 : pos_ - 1];
    return SourceSpan{file_, start.line, start.column, last.end_line, last.end_column};
  }

  [[noreturn]] void fail(std::string message) const {
    throw SyntaxError{std::move(message), span_of(peek())};
  }

  // -- definitions ----------------------------------------------------------

  ContextDef parse_context() {
    const Token start = peek();
    ContextDef c;
    c.comments = start.comments;
    expect_keyword("context");
    c.name = expect_ident("context name");
    if (accept_keyword("extends")) c.extends = expect_ident("context name");
    std::set<std::string> seen;
    while (!accept_keyword("end")) {
      if (!at(Tok::Keyword)) fail("expected a context section or 'end', found " + detail::describe(peek()));
      const Token kw = peek();
      if (!seen.insert(kw.text).second) fail("duplicate '" + kw.text + "' section");
      if (accept_keyword("sets")) {
        while (at(Tok::Ident)) {
          const Token s = peek();
          CarrierSet cs;
          cs.comments = s.comments;
          cs.name = take().text;
          expect(Tok::Eq, "'='");
          expect(Tok::LBrace, "'{'");
          do {
            cs.symbols.push_back(expect_ident("carrier-set element"));
          } while (accept(Tok::Comma));
          expect(Tok::RBrace, "'}'");
          cs.span = span_from(s);
          c.sets.push_back(std::move(cs));
        }
      } else if (accept_keyword("constants")) {
        while (at(Tok::Ident)) {
          const Token s = peek();
          Constant k;
          k.comments = s.comments;
          k.name = take().text;
          expect(Tok::Eq, "'='");
          k.definition = parse_expr();
          k.span = span_from(s);
          c.constants.push_back(std::move(k));
        }
      } else if (accept_keyword("axioms")) {
        parse_labeled_list(c.axioms);
      } else {
        fail("unexpected " + detail::describe(kw) + " in context");
      }
    }
    c.span = span_from(start);
    return c;
  }

  MachineDef parse_machine() {
    const Token start = peek();
    MachineDef m;
    m.comments = start.comments;
    expect_keyword("machine");
    m.name = expect_ident("machine name");
    for (;;) {
      if (accept_keyword("refines")) {
        if (m.refines) fail("duplicate 'refines' clause");
        m.refines = expect_ident("machine name");
      } else if (at_keyword("sees")) {
        if (!m.sees.empty()) fail("duplicate 'sees' clause");
        take();
        do {
          m.sees.push_back(expect_ident("context name"));
        } while (accept(Tok::Comma));
      } else {
        break;
      }
    }
    std::set<std::string> seen;
    while (!accept_keyword("end")) {
      if (!at(Tok::Keyword)) fail("expected a machine section or 'end', found " + detail::describe(peek()));
      const Token kw = peek();
      if (!seen.insert(kw.text).second) fail("duplicate '" + kw.text + "' section");
      if (accept_keyword("variables")) {
        while (at_labeled_item()) m.variables.push_back(parse_declaration());
      } else if (accept_keyword("invariants")) {
        parse_labeled_list(m.invariants);
      } else if (accept_keyword("gluing")) {
        parse_labeled_list(m.gluing);
      } else if (accept_keyword("variant")) {
        m.variant = parse_expr();
      } else if (accept_keyword("priority")) {
        do {
          m.priority.push_back(expect_ident("event name"));
        } while (accept(Tok::Comma));
      } else if (accept_keyword("init")) {
        while (at_labeled_item()) m.initialisation.push_back(parse_assignment());
      } else if (accept_keyword("events")) {
        while (at_keyword("event")) m.events.push_back(parse_event());
      } else {
        fail("unexpected " + detail::describe(kw) + " in machine");
      }
    }
    m.span = span_from(start);
    return m;
  }

  EventDef parse_event() {
    const Token start = peek();
    EventDef ev;
    ev.comments = start.comments;
    expect_keyword("event");
    ev.name = expect_ident("event name");
    if (accept_keyword("convergent")) {
      ev.status = EventStatus::Convergent;
    } else {
      accept_keyword("ordinary");
    }
    if (accept_keyword("refines")) ev.refines = expect_ident("abstract event name");
    if (accept_keyword("any")) {
      if (!at_labeled_item()) fail("expected a parameter declaration 'name : type'");
      while (at_labeled_item()) ev.parameters.push_back(parse_declaration());
    }
    if (accept_keyword("where")) parse_labeled_list(ev.guards);
    if (accept_keyword("then")) {
      while (at_labeled_item()) ev.actions.push_back(parse_assignment());
    }
    expect_keyword("end");
    ev.span = span_from(start);
    return ev;
  }

  void parse_labeled_list(std::vector<Labeled>& out) {
    while (at_labeled_item()) {
      const Token start = peek();
      Labeled l;
      l.comments = start.comments;
      l.label = take().text;
      expect(Tok::Colon, "':'");
      l.expr = parse_expr();
      l.span = span_from(start);
      out.push_back(std::move(l));
    }
  }

  Assignment parse_assignment() {
    const Token start = peek();
    Assignment a;
    a.comments = start.comments;
    a.label = take().text;
    expect(Tok::Colon, "':'");
    a.target = expect_ident("assignment target");
    expect(Tok::Assign, "':='");
    a.value = parse_expr();
    a.span = span_from(start);
    return a;
  }

  Variable parse_declaration() {
    const Token start = peek();
    Variable v;
    v.comments = start.comments;
    v.name = take().text;
    expect(Tok::Colon, "':'");
    v.type = parse_type();
    v.span = span_from(start);
    return v;
  }

  // -- types ----------------------------------------------------------------

  Type parse_type() {
    Type t = parse_base_type();
    while (accept(Tok::MapsTo)) t = Type::pair(std::move(t), parse_base_type());
    return t;
  }

  Type parse_base_type() {
    NestingGuard guard(*this);
    if (accept_keyword("BOOL")) return Type::boolean();
    if (accept_keyword("SET")) {
      expect(Tok::LParen, "'('");
      Type elem = parse_type();
      expect(Tok::RParen, "')'");
      return Type::set_of(std::move(elem));
    }
    if (accept(Tok::LParen)) {
      Type t = parse_type();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (accept_keyword("INT")) {
      expect_keyword("bounds");
      return parse_range();
    }
    if (at(Tok::Int) || at(Tok::Minus)) return parse_range();
    if (at(Tok::Ident)) return Type::carrier(take().text);
    fail("expected a type, found " + detail::describe(peek()));
  }

  Type parse_range() {
    const Token start = peek();
    std::int64_t lo = parse_signed_int();
    expect(Tok::DotDot, "'..'");
    std::int64_t hi = parse_signed_int();
    if (lo > hi) throw SyntaxError{"empty integer range", span_from(start)};
    return Type::integer(lo, hi);
  }

  std::int64_t parse_signed_int() {
    bool neg = accept(Tok::Minus);
    Token t = expect(Tok::Int, "an integer");
    std::int64_t v = to_int(t);
    return neg ? -v : v;
  }

  std::int64_t to_int(const Token& t) const {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{}) throw SyntaxError{"integer literal out of range", span_of(t)};
    return v;
  }

  // -- expressions ----------------------------------------------------------

  struct NestingGuard {
    explicit NestingGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) p_.fail("expression nested too deeply");
    }
    ~NestingGuard() { --p_.depth_; }
    NestingGuard(const NestingGuard&) = delete;
    NestingGuard& operator=(const NestingGuard&) = delete;
    Parser& p_;
  };

  Expr parse_expr() { return parse_implies(); }

  Expr parse_implies() {
    NestingGuard guard(*this);
    const Token start = peek();
    Expr lhs = parse_or();
    if (accept(Tok::Implies)) {
      Expr rhs = parse_implies();
      return Expr::binary(ExprKind::Implies, std::move(lhs), std::move(rhs), span_from(start));
    }
    return lhs;
  }

  Expr parse_or() {
    const Token start = peek();
    Expr lhs = parse_and();
    while (accept_keyword("or")) {
      lhs = Expr::binary(ExprKind::Or, std::move(lhs), parse_and(), span_from(start));
    }
    return lhs;
  }

  Expr parse_and() {
    const Token start = peek();
    Expr lhs = parse_comparison();
    while (accept(Tok::Amp)) {
      lhs = Expr::binary(ExprKind::And, std::move(lhs), parse_comparison(), span_from(start));
    }
    return lhs;
  }

  std::optional<ExprKind> comparison_op() const {
    switch (peek().kind) {
      case Tok::Eq: return ExprKind::Eq;
      case Tok::Neq: return ExprKind::Neq;
      case Tok::Lt: return ExprKind::Lt;
      case Tok::Le: return ExprKind::Le;
      case Tok::Gt: return ExprKind::Gt;
      case Tok::Ge: return ExprKind::Ge;
      case Tok::Keyword:
        if (peek().text == "in") return ExprKind::In;
        return std::nullopt;
      default: return std::nullopt;
    }
  }

  Expr parse_comparison() {
    const Token start = peek();
    Expr lhs = parse_maplet();
    check_invalid();
    if (auto op = comparison_op()) {
      take();
      Expr rhs = parse_maplet();
      check_invalid();
      if (comparison_op()) fail("comparison operators do not chain; add parentheses");
      return Expr::binary(*op, std::move(lhs), std::move(rhs), span_from(start));
    }
    return lhs;
  }

  Expr parse_maplet() {
    const Token start = peek();
    Expr lhs = parse_additive();
    while (accept(Tok::MapsTo)) {
      lhs = Expr::binary(ExprKind::Maplet, std::move(lhs), parse_additive(), span_from(start));
    }
    return lhs;
  }

  Expr parse_additive() {
    const Token start = peek();
    Expr lhs = parse_multiplicative();
    for (;;) {
      if (accept(Tok::Plus)) {
        lhs = Expr::binary(ExprKind::Add, std::move(lhs), parse_multiplicative(), span_from(start));
      } else if (accept(Tok::Minus)) {
        lhs = Expr::binary(ExprKind::Sub, std::move(lhs), parse_multiplicative(), span_from(start));
      } else {
        return lhs;
      }
    }
  }

  Expr parse_multiplicative() {
    const Token start = peek();
    Expr lhs = parse_unary();
    while (accept(Tok::Star)) {
      lhs = Expr::binary(ExprKind::Mul, std::move(lhs), parse_unary(), span_from(start));
    }
    return lhs;
  }

  Expr parse_unary() {
    NestingGuard guard(*this);
    const Token start = peek();
    if (accept_keyword("not")) {
      Expr operand = parse_unary();
      return Expr::unary(ExprKind::Not, std::move(operand), span_from(start));
    }
    if (accept(Tok::Minus)) {
      if (at(Tok::Int)) {
        Token t = take();
        return Expr::int_lit(-to_int(t), span_from(start));
      }
      Expr operand = parse_unary();
      return Expr::binary(ExprKind::Sub, Expr::int_lit(0, span_of(start)), std::move(operand),
                          span_from(start));
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token start = peek();
    if (at(Tok::Int)) {
      Token t = take();
      return Expr::int_lit(to_int(t), span_of(t));
    }
    if (accept_keyword("TRUE")) return Expr::bool_lit(true, span_of(start));
    if (accept_keyword("FALSE")) return Expr::bool_lit(false, span_of(start));
    if (at(Tok::Ident)) {
      Token t = take();
      return Expr::var_ref(t.text, span_of(t));
    }
    if (accept(Tok::LParen)) {
      Expr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (accept(Tok::LBrace)) {
      std::vector<Expr> elems;
      if (!accept(Tok::RBrace)) {
        do {
          elems.push_back(parse_expr());
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "'}' or ','");
      }
      return Expr::set_lit(std::move(elems), span_from(start));
    }
    fail("expected an expression, found " + detail::describe(peek()));
  }

  std::vector<Token> tokens_;
  std::string file_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

// -- post-parse structural checks --------------------------------------------

class DuplicateChecker {
 public:
  explicit DuplicateChecker(std::vector<Diagnostic>& out) : out_(out) {}

  template <typename Items, typename Key>
  void check(const Items& items, Key key, std::string_view what, std::string_view scope) {
    std::set<std::string> seen;
    for (const auto& item : items) {
      const std::string& k = key(item);
      if (!seen.insert(k).second) {
        out_.push_back({Diagnostic::Severity::Error,
                        "duplicate " + std::string(what) + " '" + k + "' in " + std::string(scope),
                        item.span});
      }
    }
  }

 private:
  std::vector<Diagnostic>& out_;
};

void check_duplicates(const Module& m, std::vector<Diagnostic>& diags) {
  DuplicateChecker dup(diags);
  auto label = [](const auto& x) -> const std::string& { return x.label; };
  auto name = [](const auto& x) -> const std::string& { return x.name; };
  dup.check(m.contexts, name, "context", "file");
  dup.check(m.machines, name, "machine", "file");
  for (const ContextDef& c : m.contexts) {
    const std::string scope = "context " + c.name;
    dup.check(c.sets, name, "carrier set", scope);
    dup.check(c.constants, name, "constant", scope);
    dup.check(c.axioms, label, "axiom label", scope);
    std::set<std::string> symbols;
    for (const CarrierSet& s : c.sets) {
      for (const std::string& sym : s.symbols) {
        if (!symbols.insert(sym).second) {
          diags.push_back({Diagnostic::Severity::Error,
                           "duplicate carrier-set element '" + sym + "' in " + scope, s.span});
        }
      }
    }
  }
  for (const MachineDef& mach : m.machines) {
    const std::string scope = "machine " + mach.name;
    dup.check(mach.variables, name, "variable", scope);
    std::vector<Labeled> all_invariants = mach.invariants;
    all_invariants.insert(all_invariants.end(), mach.gluing.begin(), mach.gluing.end());
    dup.check(all_invariants, label, "invariant label", scope);
    dup.check(mach.initialisation, label, "action label", scope + " init");
    dup.check(mach.events, name, "event", scope);
    for (const EventDef& ev : mach.events) {
      const std::string escope = "event " + ev.name;
      dup.check(ev.parameters, name, "parameter", escope);
      dup.check(ev.guards, label, "guard label", escope);
      dup.check(ev.actions, label, "action label", escope);
    }
  }
}

}  // namespace

ParseResult parse_module(std::string_view text, std::string_view file_name) {
  ParseResult result;
  Parser parser(detail::tokenize(text), std::string(file_name));
  Module module;
  try {
    module = parser.parse_module();
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back({Diagnostic::Severity::Error, e.message, e.span});
    return result;
  }
  check_duplicates(module, result.diagnostics);
  if (!has_errors(result.diagnostics)) result.module = std::move(module);
  return result;
}

std::optional<Expr> parse_expression(std::string_view text, std::string_view file_name,
                                     std::vector<Diagnostic>& diagnostics) {
  Parser parser(detail::tokenize(text), std::string(file_name));
  try {
    return parser.parse_standalone_expression();
  } catch (const SyntaxError& e) {
    diagnostics.push_back({Diagnostic::Severity::Error, e.message, e.span});
    return std::nullopt;
  }
}

}  // namespace specforge
