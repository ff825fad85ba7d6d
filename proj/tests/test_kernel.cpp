#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace specforge;

namespace {

Value dialysate(std::string_view state) {
  return Value::set({Value::maplet(Value::symbol("Dialysate", "POINT"), Value::symbol(state, "DIALYSER"))});
}

std::vector<Variable> decls() {
  return {Variable{"x", Type::integer(0, 10), {}, {}}, Variable{"y", Type::integer(0, 10), {}, {}},
          Variable{"dialyserDisconnectionTime", Type::integer(0, 60), {}, {}}};
}

Value random_value(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 4 : 2);
  std::uniform_int_distribution<int> small(-3, 3);
  switch (kind(rng)) {
    case 0: return Value::integer(small(rng));
    case 1: return Value::boolean(small(rng) > 0);
    case 2: return Value::symbol(small(rng) > 0 ? "A" : "B", "S");
    case 3: {
      std::vector<Value> elems;
      for (int i = std::uniform_int_distribution<int>(0, 3)(rng); i > 0; --i) elems.push_back(random_value(rng, depth - 1));
      return Value::set(elems);
    }
    default: return Value::maplet(random_value(rng, depth - 1), random_value(rng, depth - 1));
  }
}

}  // namespace

TEST(Value, IntegerEquality) { EXPECT_TRUE(value_equal(Value::integer(41), Value::integer(41))); }

TEST(Value, MapletSetEquality) {
  EXPECT_TRUE(value_equal(dialysate("DialyserDisconnected"), dialysate("DialyserDisconnected")));
  EXPECT_FALSE(value_equal(dialysate("DialyserDisconnected"), dialysate("DialyserConnected")));
}

TEST(Value, SetEqualityIgnoresOrder) {
  EXPECT_TRUE(value_equal(Value::set({Value::integer(1), Value::integer(2)}),
                          Value::set({Value::integer(2), Value::integer(1)})));
}

TEST(Value, SetDropsDuplicates) {
  EXPECT_EQ(Value::set({Value::integer(1), Value::integer(1)}).elements().size(), 1u);
}

TEST(Value, DifferentKindsCompareUnequal) {
  EXPECT_FALSE(value_equal(Value::integer(1), Value::boolean(true)));
  EXPECT_FALSE(value_equal(Value::symbol("A", "S"), Value::set({})));
}

TEST(Value, SymbolsOfDifferentCarriersDiffer) {
  EXPECT_FALSE(value_equal(Value::symbol("A", "S"), Value::symbol("A", "T")));
}

TEST(Value, PrintsInSourceSyntax) {
  EXPECT_EQ(print_value(dialysate("DialyserDisconnected")), "{Dialysate |-> DialyserDisconnected}");
  EXPECT_EQ(print_value(Value::integer(41)), "41");
  EXPECT_EQ(print_value(Value::boolean(true)), "TRUE");
  EXPECT_EQ(print_value(Value::set({})), "{}");
}

TEST(Value, AccessorsRejectWrongKind) {
  try {
    (void)Value::integer(1).as_bool();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TypeError);
  }
}

TEST(ValueProperty, EqualityIsAnEquivalence) {
  std::mt19937 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Value a = random_value(rng, 2), b = random_value(rng, 2), c = random_value(rng, 2);
    Value a2 = a;
    ASSERT_TRUE(value_equal(a, a));
    ASSERT_TRUE(value_equal(a, a2));
    ASSERT_EQ(value_equal(a, b), value_equal(b, a));
    if (value_equal(a, b) && value_equal(b, c)) ASSERT_TRUE(value_equal(a, c));
    if (value_equal(a, b)) ASSERT_EQ(a.hash(), b.hash());
    ASSERT_EQ(compare(a, b) < 0, compare(b, a) > 0);
  }
}

TEST(ValueProperty, SetEqualityIsPermutationInvariant) {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    std::vector<Value> elems;
    for (int k = 0; k < 5; ++k) elems.push_back(random_value(rng, 1));
    Value a = Value::set(elems);
    std::shuffle(elems.begin(), elems.end(), rng);
    ASSERT_TRUE(value_equal(a, Value::set(elems)));
  }
}

TEST(StateUpdate, ResetsClock) {
  State s({{"x", Value::integer(0)}, {"y", Value::integer(0)}, {"dialyserDisconnectionTime", Value::integer(7)}});
  std::vector<State::Entry> a{{"dialyserDisconnectionTime", Value::integer(0)}};
  auto d = decls();
  State t = state_update(s, a, d);
  EXPECT_EQ(t.at("dialyserDisconnectionTime"), Value::integer(0));
  EXPECT_EQ(s.at("dialyserDisconnectionTime"), Value::integer(7));
}

TEST(StateUpdate, EmptyAssignmentIsIdentity) {
  State s({{"x", Value::integer(3)}, {"y", Value::integer(4)}, {"dialyserDisconnectionTime", Value::integer(7)}});
  auto d = decls();
  EXPECT_EQ(state_update(s, {}, d), s);
}

TEST(StateUpdate, ParallelSwap) {
  State s({{"x", Value::integer(1)}, {"y", Value::integer(2)}, {"dialyserDisconnectionTime", Value::integer(0)}});
  std::vector<State::Entry> a{{"x", s.at("y")}, {"y", s.at("x")}};
  auto d = decls();
  State t = state_update(s, a, d);
  EXPECT_EQ(t.at("x"), Value::integer(2));
  EXPECT_EQ(t.at("y"), Value::integer(1));
}

TEST(StateUpdate, Errors) {
  State s({{"x", Value::integer(1)}, {"y", Value::integer(2)}, {"dialyserDisconnectionTime", Value::integer(0)}});
  auto d = decls();
  auto kind_of = [&](std::vector<State::Entry> a) {
    try {
      state_update(s, a, d);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind_of({{"z", Value::integer(1)}}), ErrorKind::UnknownVariable);
  EXPECT_EQ(kind_of({{"x", Value::boolean(true)}}), ErrorKind::TypeMismatch);
  EXPECT_EQ(kind_of({{"x", Value::integer(11)}}), ErrorKind::BoundsViolation);
  EXPECT_EQ(kind_of({{"x", Value::integer(1)}, {"x", Value::integer(2)}}), ErrorKind::DuplicateAssignment);
}

TEST(StateProperty, UpdateIsPureAndFramed) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> v(0, 10);
  auto d = decls();
  for (int i = 0; i < 1000; ++i) {
    State s({{"x", Value::integer(v(rng))}, {"y", Value::integer(v(rng))},
             {"dialyserDisconnectionTime", Value::integer(v(rng))}});
    const State before = s;
    std::vector<State::Entry> a{{"x", Value::integer(v(rng))}};
    State t = state_update(s, a, d);
    ASSERT_EQ(s, before);
    ASSERT_EQ(t.at("y"), s.at("y"));
    ASSERT_EQ(t.at("dialyserDisconnectionTime"), s.at("dialyserDisconnectionTime"));
  }
}

TEST(Expr, ValidatorChecksArityAndNames) {
  EXPECT_FALSE(validate(Expr::binary(ExprKind::And, Expr::bool_lit(true), Expr::bool_lit(false))));
  EXPECT_TRUE(validate(Expr::var_ref("1bad")));
}

TEST(Expr, StructuralEqualityIgnoresSpans) {
  SourceSpan a{"a", 1, 1, 1, 2}, b{"b", 9, 9, 9, 9};
  EXPECT_EQ(Expr::int_lit(41, a), Expr::int_lit(41, b));
}

TEST(Type, ConformanceAndBounds) {
  EXPECT_TRUE(conforms(Value::integer(30), Type::integer(30, 45)));
  EXPECT_FALSE(conforms(Value::integer(46), Type::integer(30, 45)));
  EXPECT_FALSE(conforms(Value::boolean(true), Type::integer(30, 45)));
  EXPECT_EQ(print_type(Type::integer(30, 45)), "30..45");
}
