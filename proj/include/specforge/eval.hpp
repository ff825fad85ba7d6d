#pragma once

// Expression evaluation, static checking, and the guarded-event step
// relation (enabledness and firing).

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "specforge/kernel.hpp"
#include "specforge/parser.hpp"

namespace specforge {

/// Parameter name to value, in the event's declaration order.
class Binding {
 public:
  using Entry = std::pair<std::string, Value>;

  Binding() = default;
  explicit Binding(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  const Value* find(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const Binding& a, const Binding& b) = default;

 private:
  std::vector<Entry> entries_;
};

/// "name=value name=value" using printed values; empty for no parameters.
std::string print_binding(const Binding& b);

struct EnabledEvent {
  std::string event;
  Binding binding;

  friend bool operator==(const EnabledEvent& a, const EnabledEvent& b) = default;
};

/// Index form of an enabled event: position in the machine's event list and
/// in that event's binding enumeration.
struct EventChoice {
  std::size_t event = 0;
  std::size_t binding = 0;

  friend bool operator==(const EventChoice& a, const EventChoice& b) = default;
};

/// Flattened static environment of a machine or context: carrier sets,
/// symbols, and evaluated constants.
class Scope {
 public:
  Scope() = default;
  /// Evaluates constants in order; throws TypeError/UnboundName if a
  /// constant definition is ill-formed.
  explicit Scope(const ContextDef& merged);

  const std::vector<std::string>* carrier(std::string_view name) const;
  /// Carrier set that declares the symbol, or nullptr.
  const std::string* carrier_of(std::string_view symbol) const;
  const Value* constant(std::string_view name) const;
  const ContextDef& context() const { return context_; }

  /// All values of a type in enumeration order: integers ascending, FALSE
  /// before TRUE, symbols in declaration order, subsets by bitmask.
  std::vector<Value> domain(const Type& t) const;
  /// Cardinality of a type's domain, saturating at max.
  std::size_t domain_size(const Type& t, std::size_t max = 1u << 24) const;

 private:
  ContextDef context_;
  std::map<std::string, std::vector<std::string>, std::less<>> carriers_;
  std::map<std::string, std::string, std::less<>> symbol_carrier_;
  std::map<std::string, Value, std::less<>> constants_;
};

/// One context holding every set, constant and axiom visible to a machine
/// (or to a context, including what it extends).
ContextDef merged_context(const Model& model, const MachineDef& m);
ContextDef merged_context(const Model& model, const ContextDef& c);

/// Evaluates an expression. Names resolve binding first, then state, then
/// constants, then carrier-set names. And/Or/Implies short-circuit.
/// Throws Error(TypeError) on kind mismatch, Error(UnboundName) otherwise.
Value eval_expr(const Expr& e, const State& s, const Binding& env, const Scope& scope);
bool eval_predicate(const Expr& e, const State& s, const Binding& env, const Scope& scope);

/// Static well-definedness: one diagnostic per fault, empty when clean.
std::vector<Diagnostic> type_check(const Model& model);

/// The abstract event a concrete event refines: its explicit `refines`
/// target, otherwise an abstract event of the same name, otherwise null.
const EventDef* abstract_counterpart(const EventDef& concrete, const MachineDef& abstract);

/// Runtime view of a type-checked machine: the definition, its scope, and
/// enumerated parameter domains. Immutable after construction.
class Interpreter {
 public:
  Interpreter(const Model& model, const MachineDef& machine);
  Interpreter(MachineDef machine, Scope scope);

  const MachineDef& machine() const { return machine_; }
  const Scope& scope() const { return scope_; }

  /// Runs the init section against an empty state. Throws on bounds or type
  /// errors, or if a variable is left unassigned.
  State initial_state() const;

  Value eval(const Expr& e, const State& s, const Binding& env = {}) const;
  bool holds(const Expr& e, const State& s, const Binding& env = {}) const;

  /// Every binding of the event's parameters, in lexicographic order.
  const std::vector<Binding>& bindings(const EventDef& ev) const;
  bool guards_hold(const EventDef& ev, const State& s, const Binding& b) const;

  /// Enabled (event, binding) pairs in declaration order, then binding order.
  std::vector<EnabledEvent> enabled_events(const State& s) const;
  /// Throws UnknownEvent, EventNotEnabled, or BoundsViolation.
  State fire_event(const State& s, const EnabledEvent& ev) const;

  std::vector<EventChoice> enabled_choices(const State& s) const;
  /// Fires without re-checking guards. Throws BoundsViolation.
  State fire_choice(const State& s, EventChoice c) const;
  /// Right-hand sides of the event's actions under (s, binding), unchecked.
  std::vector<State::Entry> action_values(const State& s, EventChoice c) const;
  EnabledEvent describe(EventChoice c) const;
  const EventDef& event(EventChoice c) const { return machine_.events.at(c.event); }
  const Binding& binding(EventChoice c) const { return info_.at(c.event).bindings.at(c.binding); }

 private:
  struct EventInfo {
    std::vector<Binding> bindings;
    std::vector<std::size_t> binding_free_guards;
    std::vector<std::size_t> binding_guards;
  };

  void prepare();

  MachineDef machine_;
  Scope scope_;
  std::vector<EventInfo> info_;
};

std::vector<EnabledEvent> enabled_events(const Interpreter& machine, const State& s);
State fire_event(const Interpreter& machine, const State& s, const EnabledEvent& ev);

/// Prints a state as "name=value" pairs in the machine's declaration order.
std::vector<std::pair<std::string, std::string>> printed_state(const MachineDef& m,
                                                                const State& s);

}  // namespace specforge
