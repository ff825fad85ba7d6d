#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace specforge;

namespace {

Expr parse_expr(std::string_view text) {
  std::vector<Diagnostic> diags;
  auto e = parse_expression(text, "t", diags);
  if (!e) throw std::runtime_error(diags.empty() ? "parse failed" : diags.front().message);
  return *e;
}

bool all_valid(const Expr& e) { return !validate(e).has_value(); }

template <typename F>
void for_each_expr(const Module& m, F&& f) {
  for (const ContextDef& c : m.contexts) {
    for (const Constant& k : c.constants) f(k.definition);
    for (const Labeled& a : c.axioms) f(a.expr);
  }
  for (const MachineDef& d : m.machines) {
    for (const Labeled& l : d.invariants) f(l.expr);
    for (const Labeled& l : d.gluing) f(l.expr);
    if (d.variant) f(*d.variant);
    for (const Assignment& a : d.initialisation) f(a.value);
    for (const EventDef& ev : d.events) {
      for (const Labeled& g : ev.guards) f(g.expr);
      for (const Assignment& a : ev.actions) f(a.value);
    }
  }
}

}  // namespace

TEST(Parser, Inv2Shape) {
  Expr e = parse_expr(
      "softwareMode = Therapy & dialysateTemperature > 41 => dialyserState = {Dialysate |-> "
      "DialyserDisconnected} & dialyserDisconnectionTime < 60 & alarm = ALM639");
  ASSERT_EQ(e.kind(), ExprKind::Implies);
  const Expr& lhs = e.child(0);
  ASSERT_EQ(lhs.kind(), ExprKind::And);
  EXPECT_EQ(lhs.child(0).kind(), ExprKind::Eq);
  EXPECT_EQ(lhs.child(1).kind(), ExprKind::Gt);
  EXPECT_EQ(e.child(1).kind(), ExprKind::And);
}

TEST(Parser, Precedence) {
  Expr e = parse_expr("a & b => c or d");
  ASSERT_EQ(e.kind(), ExprKind::Implies);
  EXPECT_EQ(e.child(0).kind(), ExprKind::And);
  EXPECT_EQ(e.child(1).kind(), ExprKind::Or);

  Expr arith = parse_expr("1 + 2 * 3 < 10");
  ASSERT_EQ(arith.kind(), ExprKind::Lt);
  ASSERT_EQ(arith.child(0).kind(), ExprKind::Add);
  EXPECT_EQ(arith.child(0).child(1).kind(), ExprKind::Mul);

  Expr neg = parse_expr("not a & b");
  ASSERT_EQ(neg.kind(), ExprKind::And);
  EXPECT_EQ(neg.child(0).kind(), ExprKind::Not);

  Expr orand = parse_expr("a or b & c");
  ASSERT_EQ(orand.kind(), ExprKind::Or);
  EXPECT_EQ(orand.child(1).kind(), ExprKind::And);

  Expr sub = parse_expr("10 - 3 - 2");
  ASSERT_EQ(sub.kind(), ExprKind::Sub);
  EXPECT_EQ(sub.child(0).kind(), ExprKind::Sub);

  Expr mem = parse_expr("x + 1 in {1, 2} & y");
  ASSERT_EQ(mem.kind(), ExprKind::And);
  EXPECT_EQ(mem.child(0).kind(), ExprKind::In);
}

TEST(Parser, ImpliesIsRightAssociative) {
  Expr e = parse_expr("a => b => c");
  ASSERT_EQ(e.kind(), ExprKind::Implies);
  EXPECT_EQ(e.child(0).kind(), ExprKind::VarRef);
  EXPECT_EQ(e.child(1).kind(), ExprKind::Implies);
}

TEST(Parser, EmptyMachine) {
  ParseResult pr = parse_module("machine M0 variables invariants events end", "m.ebs");
  ASSERT_TRUE(pr.ok());
  ASSERT_EQ(pr.module->machines.size(), 1u);
  const MachineDef& m = pr.module->machines[0];
  EXPECT_EQ(m.name, "M0");
  EXPECT_TRUE(m.variables.empty());
  EXPECT_TRUE(m.invariants.empty());
  EXPECT_TRUE(m.events.empty());
}

TEST(Parser, MalformedAssignment) {
  ParseResult pr = parse_module("x := := 1", "bad.ebs");
  EXPECT_FALSE(pr.ok());
  ASSERT_EQ(pr.diagnostics.size(), 1u);
  EXPECT_EQ(pr.diagnostics[0].severity, Diagnostic::Severity::Error);
  EXPECT_EQ(pr.diagnostics[0].span.start_line, 1);
  EXPECT_FALSE(pr.diagnostics[0].message.empty());
}

TEST(Parser, DuplicateLabelIsDiagnosed) {
  ParseResult pr = parse_module(
      "machine M variables x : 0..1 invariants i: x = 0 i: x = 1 init a: x := 0 events end", "dup.ebs");
  EXPECT_FALSE(pr.ok());
  EXPECT_FALSE(pr.diagnostics.empty());
}

TEST(Parser, UnknownReferenceIsDiagnosedAtLink) {
  ParseResult pr = parse_module("machine M refines Nowhere variables invariants events end", "r.ebs");
  ASSERT_TRUE(pr.ok());
  LinkResult lr = link({*pr.module});
  EXPECT_FALSE(lr.ok());
  EXPECT_FALSE(lr.diagnostics.empty());
}

TEST(Parser, CrlfAccepted) {
  ParseResult pr = parse_module("machine M\r\nvariables x : 0..1\r\ninit a: x := 0\r\nevents end\r\n", "crlf.ebs");
  ASSERT_TRUE(pr.ok());
  EXPECT_EQ(pr.module->machines[0].variables.size(), 1u);
}

TEST(PrettyPrint, Literals) {
  EXPECT_EQ(pretty_print(Expr::int_lit(41)), "41");
  Expr m = Expr::set_lit({Expr::binary(ExprKind::Maplet, Expr::symbol_ref("Dialysate"),
                                       Expr::symbol_ref("DialyserDisconnected"))});
  EXPECT_EQ(pretty_print(m), "{Dialysate |-> DialyserDisconnected}");
}

TEST(PrettyPrint, MinimalParentheses) {
  EXPECT_EQ(pretty_print(parse_expr("(a & b) => (c or d)")), "a & b => c or d");
  EXPECT_EQ(pretty_print(parse_expr("(a => b) => c")), "(a => b) => c");
  EXPECT_EQ(pretty_print(parse_expr("10 - (3 - 2)")), "10 - (3 - 2)");
}

TEST(RoundTrip, WholeCorpus) {
  auto files = support::corpus_files();
  ASSERT_GE(files.size(), 9u);
  for (const auto& f : files) {
    SCOPED_TRACE(f.string());
    ParseResult first = parse_module(read_file(f), f.string());
    ASSERT_TRUE(first.ok());
    const std::string printed = pretty_print(*first.module);
    ParseResult second = parse_module(printed, "printed.ebs");
    ASSERT_TRUE(second.ok()) << printed;
    EXPECT_EQ(*first.module, *second.module);
    EXPECT_EQ(pretty_print(*second.module), printed);
    for_each_expr(*first.module, [](const Expr& e) { EXPECT_TRUE(all_valid(e)); });
  }
}

// Corpus files are kept in printed form, so printing them loses no comment.
TEST(RoundTrip, CorpusIsCanonical) {
  for (const auto& f : support::corpus_files()) {
    const std::string text = read_file(f);
    ParseResult pr = parse_module(text, f.string());
    ASSERT_TRUE(pr.ok()) << f;
    EXPECT_EQ(pretty_print(*pr.module), text) << f;
  }
}

TEST(RoundTrip, GeneratedExpressions) {
  std::mt19937 rng(5);
  const std::vector<ExprKind> binary{ExprKind::And, ExprKind::Or, ExprKind::Implies, ExprKind::Eq,
                                     ExprKind::Neq, ExprKind::Lt, ExprKind::Le, ExprKind::Gt,
                                     ExprKind::Ge, ExprKind::Add, ExprKind::Sub, ExprKind::Mul,
                                     ExprKind::In};
  std::function<Expr(int)> gen = [&](int depth) -> Expr {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 2);
    switch (pick(rng)) {
      case 0: return Expr::int_lit(std::uniform_int_distribution<int>(0, 99)(rng));
      case 1: return Expr::bool_lit(rng() % 2 == 0);
      case 2: return Expr::var_ref(std::string(1, static_cast<char>('a' + rng() % 5)));
      case 3: return Expr::unary(ExprKind::Not, gen(depth - 1));
      case 4: {
        std::vector<Expr> elems;
        for (int i = rng() % 3; i > 0; --i) elems.push_back(gen(depth - 1));
        return Expr::set_lit(elems);
      }
      case 5: return Expr::set_lit({Expr::binary(ExprKind::Maplet, gen(depth - 1), gen(depth - 1))});
      default: return Expr::binary(binary[rng() % binary.size()], gen(depth - 1), gen(depth - 1));
    }
  };
  for (int i = 0; i < 3000; ++i) {
    Expr e = gen(4);
    const std::string text = pretty_print(e);
    ASSERT_EQ(parse_expr(text), e) << text;
  }
}

TEST(Fuzz, RandomBytesNeverCrash) {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> len(0, 200);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 10000; ++i) {
    std::string text(static_cast<std::size_t>(len(rng)), '\0');
    for (char& c : text) c = static_cast<char>(byte(rng));
    ParseResult pr = parse_module(text, "fuzz.ebs");
    if (!pr.ok()) ASSERT_FALSE(pr.diagnostics.empty());
    std::vector<Diagnostic> diags;
    (void)parse_expression(text, "fuzz", diags);
  }
}

TEST(Fuzz, MutatedCorpusNeverCrashes) {
  std::mt19937 rng(99);
  const std::string base = read_file(support::corpus_dir() / "hd" / "r2.ebs");
  const std::string alphabet = "&|=>-<{}(),:;0123456789 \n\tabcxyzTRUE";
  for (int i = 0; i < 2000; ++i) {
    std::string text = base;
    for (int k = 0; k < 5; ++k) {
      const std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text[pos] = alphabet[rng() % alphabet.size()]; break;
        case 1: text.erase(pos, 1 + rng() % 8); break;
        default: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
      }
    }
    ParseResult pr = parse_module(text, "mut.ebs");
    if (!pr.ok()) {
      ASSERT_FALSE(pr.diagnostics.empty());
      for (const Diagnostic& d : pr.diagnostics) ASSERT_FALSE(d.message.empty());
    }
  }
}
