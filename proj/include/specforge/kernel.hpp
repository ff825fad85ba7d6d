#pragma once

// Core data model shared by every spec-forge module: values, types,
// expressions, states and the static/dynamic halves of a model.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace specforge {

enum class ErrorKind {
  UnknownVariable,
  TypeMismatch,
  BoundsViolation,
  DuplicateAssignment,
  TypeError,
  UnboundName,
  UnknownEvent,
  EventNotEnabled,
  MissingVariant,
  GluingUnderspecified,
  EmptyTrace,
  NotInSubset,
  ManifestMismatch,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct SourceSpan {
  std::string file;
  int start_line = 0;
  int start_column = 0;
  int end_line = 0;
  int end_column = 0;

  bool valid() const { return start_line > 0; }
};

std::string to_string(const SourceSpan& span);

// ---------------------------------------------------------------------------
// Values

/// An element of a carrier set. Names are interned, so copies and equality
/// are pointer-cheap; ordering is by spelling and therefore stable.
class Symbol {
 public:
  Symbol(std::string_view name, std::string_view carrier);

  std::string_view name() const { return *name_; }
  std::string_view carrier() const { return *carrier_; }

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.name_ == b.name_ && a.carrier_ == b.carrier_;
  }

 private:
  const std::string* name_;
  const std::string* carrier_;
};

class Value {
 public:
  enum class Kind : std::uint8_t { Int, Bool, Symbol, Set, Maplet };

  Value() : rep_(std::int64_t{0}) {}

  static Value integer(std::int64_t v);
  static Value boolean(bool v);
  static Value symbol(std::string_view name, std::string_view carrier);
  /// Builds a finite set; duplicates are dropped and elements are kept in
  /// canonical order so equality is order-insensitive.
  static Value set(std::vector<Value> elements);
  static Value maplet(Value left, Value right);

  Kind kind() const { return static_cast<Kind>(rep_.index()); }
  bool is(Kind k) const { return kind() == k; }

  // Accessors throw Error(TypeError) on a kind mismatch.
  std::int64_t as_int() const;
  bool as_bool() const;
  const Symbol& as_symbol() const;
  std::span<const Value> elements() const;
  const Value& left() const;
  const Value& right() const;

  bool contains(const Value& element) const;
  std::size_t hash() const;

  friend int compare(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }

 private:
  using SetRep = std::shared_ptr<const std::vector<Value>>;
  using PairRep = std::shared_ptr<const std::pair<Value, Value>>;

  std::variant<std::int64_t, bool, Symbol, SetRep, PairRep> rep_;
};

bool value_equal(const Value& a, const Value& b);
std::string_view to_string(Value::Kind kind);

/// Prints a value in the specification language's own syntax.
std::string print_value(const Value& v);

// ---------------------------------------------------------------------------
// Type descriptors

class Type {
 public:
  enum class Kind : std::uint8_t { Int, Bool, Symbol, Set, Pair };

  static Type integer(std::int64_t lo, std::int64_t hi);
  static Type boolean();
  static Type carrier(std::string name);
  static Type set_of(Type element);
  static Type pair(Type left, Type right);

  Kind kind() const { return kind_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  const std::string& carrier_name() const { return carrier_; }
  const Type& element() const { return children_.at(0); }
  const Type& left() const { return children_.at(0); }
  const Type& right() const { return children_.at(1); }

  friend bool operator==(const Type& a, const Type& b);

 private:
  Kind kind_ = Kind::Bool;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::string carrier_;
  std::vector<Type> children_;
};

std::string print_type(const Type& t);

/// Throws TypeMismatch if the value's shape differs from the type and
/// BoundsViolation if an integer (possibly nested in a set) is out of range.
void check_conforms(const Value& v, const Type& t, std::string_view what);
bool conforms(const Value& v, const Type& t);

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind : std::uint8_t {
  IntLit,
  BoolLit,
  SymbolRef,
  VarRef,
  Not,
  And,
  Or,
  Implies,
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  In,
  SetLit,
  Maplet,
};

std::string_view to_string(ExprKind kind);
bool is_binary(ExprKind kind);
bool is_comparison(ExprKind kind);

class Expr {
 public:
  static Expr int_lit(std::int64_t v, SourceSpan span = {});
  static Expr bool_lit(bool v, SourceSpan span = {});
  static Expr symbol_ref(std::string name, SourceSpan span = {});
  static Expr var_ref(std::string name, SourceSpan span = {});
  static Expr unary(ExprKind kind, Expr operand, SourceSpan span = {});
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs, SourceSpan span = {});
  static Expr set_lit(std::vector<Expr> elements, SourceSpan span = {});

  ExprKind kind() const { return kind_; }
  const std::vector<Expr>& children() const { return children_; }
  const Expr& child(std::size_t i) const { return children_.at(i); }
  std::int64_t int_value() const { return std::get<std::int64_t>(payload_); }
  bool bool_value() const { return std::get<bool>(payload_); }
  const std::string& name() const { return std::get<std::string>(payload_); }
  const SourceSpan& span() const { return span_; }

  /// Same node with its kind switched; used when name resolution turns a
  /// VarRef into a SymbolRef.
  Expr with_kind(ExprKind kind) const;

  /// Structural equality; source spans are ignored.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  ExprKind kind_ = ExprKind::BoolLit;
  std::vector<Expr> children_;
  std::variant<std::monostate, std::int64_t, bool, std::string> payload_;
  SourceSpan span_;
};

bool is_identifier(std::string_view s);
/// Checks arity and identifier invariants over the whole tree; returns the
/// first violation found.
std::optional<std::string> validate(const Expr& e);

/// Calls f(name) for every VarRef in the tree.
template <typename F>
void for_each_var(const Expr& e, F&& f) {
  if (e.kind() == ExprKind::VarRef) f(e.name());
  for (const Expr& c : e.children()) for_each_var(c, f);
}

// ---------------------------------------------------------------------------
// Model definitions

struct Labeled {
  std::string label;
  Expr expr;
  std::vector<std::string> comments;
  SourceSpan span;

  friend bool operator==(const Labeled& a, const Labeled& b) {
    return a.label == b.label && a.expr == b.expr;
  }
};

struct Assignment {
  std::string label;
  std::string target;
  Expr value;
  std::vector<std::string> comments;
  SourceSpan span;

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.label == b.label && a.target == b.target && a.value == b.value;
  }
};

struct Variable {
  std::string name;
  Type type;
  std::vector<std::string> comments;
  SourceSpan span;

  friend bool operator==(const Variable& a, const Variable& b) {
    return a.name == b.name && a.type == b.type;
  }
};

using Parameter = Variable;

struct CarrierSet {
  std::string name;
  std::vector<std::string> symbols;
  std::vector<std::string> comments;
  SourceSpan span;

  friend bool operator==(const CarrierSet& a, const CarrierSet& b) {
    return a.name == b.name && a.symbols == b.symbols;
  }
};

struct Constant {
  std::string name;
  Expr definition;
  std::vector<std::string> comments;
  SourceSpan span;

  friend bool operator==(const Constant& a, const Constant& b) {
    return a.name == b.name && a.definition == b.definition;
  }
};

enum class EventStatus { Ordinary, Convergent };

struct EventDef {
  std::string name;
  EventStatus status = EventStatus::Ordinary;
  std::optional<std::string> refines;
  std::vector<Parameter> parameters;
  std::vector<Labeled> guards;
  std::vector<Assignment> actions;
  std::vector<std::string> comments;
  SourceSpan span;

  bool convergent() const { return status == EventStatus::Convergent; }

  friend bool operator==(const EventDef& a, const EventDef& b);
};

struct ContextDef {
  std::string name;
  std::optional<std::string> extends;
  std::vector<CarrierSet> sets;
  std::vector<Constant> constants;
  std::vector<Labeled> axioms;
  std::vector<std::string> comments;
  SourceSpan span;

  friend bool operator==(const ContextDef& a, const ContextDef& b);
};

struct MachineDef {
  std::string name;
  std::optional<std::string> refines;
  std::vector<std::string> sees;
  std::vector<Variable> variables;
  std::vector<Labeled> invariants;
  std::vector<Labeled> gluing;
  std::optional<Expr> variant;
  /// Scheduling order for code generation; empty means declaration order.
  std::vector<std::string> priority;
  std::vector<Assignment> initialisation;
  std::vector<EventDef> events;
  std::vector<std::string> comments;
  SourceSpan span;

  const EventDef* find_event(std::string_view name) const;
  const Variable* find_variable(std::string_view name) const;
  bool has_convergent_event() const;

  friend bool operator==(const MachineDef& a, const MachineDef& b);
};

// ---------------------------------------------------------------------------
// States

/// Variable name to value. Entries are kept sorted by name, so two states
/// over the same variables compare and hash consistently.
class State {
 public:
  using Entry = std::pair<std::string, Value>;

  State() = default;
  explicit State(std::vector<Entry> entries);

  const Value* find(std::string_view name) const;
  const Value& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::size_t hash() const;

  friend bool operator==(const State& a, const State& b) = default;
  friend bool operator<(const State& a, const State& b);

 private:
  friend State state_update(const State&, std::span<const Entry>,
                            std::span<const Variable>);
  std::vector<Entry> entries_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

/// Returns a copy of s with the listed variables replaced. All values must
/// already have been computed against the pre-state (parallel assignment).
/// Throws UnknownVariable, DuplicateAssignment, TypeMismatch, BoundsViolation.
State state_update(const State& s, std::span<const State::Entry> assignments,
                   std::span<const Variable> declarations);

}  // namespace specforge
