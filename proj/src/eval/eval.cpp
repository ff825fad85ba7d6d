#include <algorithm>
#include <set>
#include <sstream>

#include "specforge/eval.hpp"

namespace specforge {

const Value* Binding::find(std::string_view name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return &v;
  }
  return nullptr;
}

std::string print_binding(const Binding& b) {
  std::string out;
  for (const auto& [name, value] : b) {
    if (!out.empty()) out += ' ';
    out += name + "=" + print_value(value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scope

Scope::Scope(const ContextDef& merged) : context_(merged) {
  for (const CarrierSet& s : context_.sets) {
    carriers_[s.name] = s.symbols;
    for (const std::string& sym : s.symbols) symbol_carrier_.emplace(sym, s.name);
  }
  for (const Constant& k : context_.constants) {
    constants_.insert_or_assign(k.name, eval_expr(k.definition, State{}, Binding{}, *this));
  }
}

const std::vector<std::string>* Scope::carrier(std::string_view name) const {
  auto it = carriers_.find(name);
  return it == carriers_.end() ? nullptr : &it->second;
}

const std::string* Scope::carrier_of(std::string_view symbol) const {
  auto it = symbol_carrier_.find(symbol);
  return it == symbol_carrier_.end() ? nullptr : &it->second;
}

const Value* Scope::constant(std::string_view name) const {
  auto it = constants_.find(name);
  return it == constants_.end() ? nullptr : &it->second;
}

std::size_t Scope::domain_size(const Type& t, std::size_t max) const {
  auto sat_mul = [max](std::size_t a, std::size_t b) -> std::size_t {
    if (a != 0 && b > max / a) return max;
    return std::min(a * b, max);
  };
  switch (t.kind()) {
    case Type::Kind::Int: {
      auto width = static_cast<unsigned long long>(t.hi() - t.lo()) + 1;
      return width > max ? max : static_cast<std::size_t>(width);
    }
    case Type::Kind::Bool: return 2;
    case Type::Kind::Symbol: {
      const auto* syms = carrier(t.carrier_name());
      return syms ? syms->size() : 0;
    }
    case Type::Kind::Pair: return sat_mul(domain_size(t.left(), max), domain_size(t.right(), max));
    case Type::Kind::Set: {
      std::size_t n = domain_size(t.element(), max);
      if (n >= 63) return max;
      return std::min<std::size_t>(std::size_t{1} << n, max);
    }
  }
  return 0;
}

std::vector<Value> Scope::domain(const Type& t) const {
  std::vector<Value> out;
  switch (t.kind()) {
    case Type::Kind::Int:
      for (std::int64_t v = t.lo();; ++v) {
        out.push_back(Value::integer(v));
        if (v == t.hi()) break;
      }
      break;
    case Type::Kind::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case Type::Kind::Symbol:
      if (const auto* syms = carrier(t.carrier_name())) {
        for (const std::string& s : *syms) out.push_back(Value::symbol(s, t.carrier_name()));
      }
      break;
    case Type::Kind::Pair:
      for (const Value& l : domain(t.left())) {
        for (const Value& r : domain(t.right())) out.push_back(Value::maplet(l, r));
      }
      break;
    case Type::Kind::Set: {
      std::vector<Value> elems = domain(t.element());
      if (elems.size() >= 24) throw Error(ErrorKind::TypeError, "set domain too large to enumerate");
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << elems.size()); ++mask) {
        std::vector<Value> subset;
        for (std::size_t i = 0; i < elems.size(); ++i) {
          if (mask & (std::uint64_t{1} << i)) subset.push_back(elems[i]);
        }
        out.push_back(Value::set(std::move(subset)));
      }
      break;
    }
  }
  return out;
}

namespace {

void append_context(const Model& model, const ContextDef& c, ContextDef& into,
                    std::set<std::string>& done) {
  if (!done.insert(c.name).second) return;
  if (c.extends) {
    if (const ContextDef* parent = model.find_context(*c.extends)) {
      append_context(model, *parent, into, done);
    }
  }
  into.sets.insert(into.sets.end(), c.sets.begin(), c.sets.end());
  into.constants.insert(into.constants.end(), c.constants.begin(), c.constants.end());
  into.axioms.insert(into.axioms.end(), c.axioms.begin(), c.axioms.end());
}

}  // namespace

ContextDef merged_context(const Model& model, const MachineDef& m) {
  ContextDef out;
  out.name = m.name + "$context";
  std::set<std::string> done;
  for (const ContextDef* c : model.visible_contexts(m)) append_context(model, *c, out, done);
  return out;
}

ContextDef merged_context(const Model& model, const ContextDef& c) {
  ContextDef out;
  out.name = c.name;
  std::set<std::string> done;
  append_context(model, c, out, done);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void type_error(const Expr& e, const std::string& message) {
  std::string where = e.span().valid() ? to_string(e.span()) + ": " : "";
  throw Error(ErrorKind::TypeError, where + message);
}

std::int64_t int_operand(const Expr& e, const Value& v) {
  if (!v.is(Value::Kind::Int)) {
    type_error(e, "expected an integer, got " + std::string(to_string(v.kind())));
  }
  return v.as_int();
}

bool bool_operand(const Expr& e, const Value& v) {
  if (!v.is(Value::Kind::Bool)) {
    type_error(e, "expected a predicate, got " + std::string(to_string(v.kind())));
  }
  return v.as_bool();
}

// Structural comparability: same kind, same carrier for symbols, and
// comparable elements for sets and maplets.
bool comparable(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Symbol: return a.as_symbol().carrier() == b.as_symbol().carrier();
    case Value::Kind::Maplet: return comparable(a.left(), b.left()) && comparable(a.right(), b.right());
    case Value::Kind::Set: {
      auto xs = a.elements(), ys = b.elements();
      if (xs.empty() || ys.empty()) return true;
      return comparable(xs.front(), ys.front());
    }
    default: return true;
  }
}

std::int64_t checked(const Expr& e, bool overflow, std::int64_t v) {
  if (overflow) throw Error(ErrorKind::BoundsViolation, to_string(e.span()) + ": integer overflow");
  return v;
}

}  // namespace

Value eval_expr(const Expr& e, const State& s, const Binding& env, const Scope& scope) {
  switch (e.kind()) {
    case ExprKind::IntLit: return Value::integer(e.int_value());
    case ExprKind::BoolLit: return Value::boolean(e.bool_value());
    case ExprKind::SymbolRef: {
      const std::string* carrier = scope.carrier_of(e.name());
      if (!carrier) throw Error(ErrorKind::UnboundName, "unknown symbol '" + e.name() + "'");
      return Value::symbol(e.name(), *carrier);
    }
    case ExprKind::VarRef: {
      if (const Value* v = env.find(e.name())) return *v;
      if (const Value* v = s.find(e.name())) return *v;
      if (const Value* v = scope.constant(e.name())) return *v;
      if (const auto* syms = scope.carrier(e.name())) {
        std::vector<Value> elems;
        for (const std::string& sym : *syms) elems.push_back(Value::symbol(sym, e.name()));
        return Value::set(std::move(elems));
      }
      if (const std::string* carrier = scope.carrier_of(e.name())) {
        return Value::symbol(e.name(), *carrier);
      }
      throw Error(ErrorKind::UnboundName, "unbound name '" + e.name() + "'");
    }
    case ExprKind::Not:
      return Value::boolean(!bool_operand(e, eval_expr(e.child(0), s, env, scope)));
    case ExprKind::And: {
      if (!bool_operand(e, eval_expr(e.child(0), s, env, scope))) return Value::boolean(false);
      return Value::boolean(bool_operand(e, eval_expr(e.child(1), s, env, scope)));
    }
    case ExprKind::Or: {
      if (bool_operand(e, eval_expr(e.child(0), s, env, scope))) return Value::boolean(true);
      return Value::boolean(bool_operand(e, eval_expr(e.child(1), s, env, scope)));
    }
    case ExprKind::Implies: {
      if (!bool_operand(e, eval_expr(e.child(0), s, env, scope))) return Value::boolean(true);
      return Value::boolean(bool_operand(e, eval_expr(e.child(1), s, env, scope)));
    }
    case ExprKind::Eq:
    case ExprKind::Neq: {
      Value a = eval_expr(e.child(0), s, env, scope);
      Value b = eval_expr(e.child(1), s, env, scope);
      if (!comparable(a, b)) {
        type_error(e, "cannot compare " + print_value(a) + " with " + print_value(b));
      }
      return Value::boolean((a == b) == (e.kind() == ExprKind::Eq));
    }
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Gt:
    case ExprKind::Ge: {
      std::int64_t a = int_operand(e, eval_expr(e.child(0), s, env, scope));
      std::int64_t b = int_operand(e, eval_expr(e.child(1), s, env, scope));
      switch (e.kind()) {
        case ExprKind::Lt: return Value::boolean(a < b);
        case ExprKind::Le: return Value::boolean(a <= b);
        case ExprKind::Gt: return Value::boolean(a > b);
        default: return Value::boolean(a >= b);
      }
    }
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      std::int64_t a = int_operand(e, eval_expr(e.child(0), s, env, scope));
      std::int64_t b = int_operand(e, eval_expr(e.child(1), s, env, scope));
      std::int64_t r = 0;
      bool overflow = false;
      if (e.kind() == ExprKind::Add) overflow = __builtin_add_overflow(a, b, &r);
      if (e.kind() == ExprKind::Sub) overflow = __builtin_sub_overflow(a, b, &r);
      if (e.kind() == ExprKind::Mul) overflow = __builtin_mul_overflow(a, b, &r);
      return Value::integer(checked(e, overflow, r));
    }
    case ExprKind::In: {
      Value x = eval_expr(e.child(0), s, env, scope);
      Value set = eval_expr(e.child(1), s, env, scope);
      if (!set.is(Value::Kind::Set)) type_error(e, "right operand of 'in' is not a set");
      if (!set.elements().empty() && !comparable(x, set.elements().front())) {
        type_error(e, "element " + print_value(x) + " cannot belong to " + print_value(set));
      }
      return Value::boolean(set.contains(x));
    }
    case ExprKind::SetLit: {
      std::vector<Value> elems;
      elems.reserve(e.children().size());
      for (const Expr& c : e.children()) elems.push_back(eval_expr(c, s, env, scope));
      for (std::size_t i = 1; i < elems.size(); ++i) {
        if (!comparable(elems[0], elems[i])) type_error(e, "set literal mixes element kinds");
      }
      return Value::set(std::move(elems));
    }
    case ExprKind::Maplet:
      return Value::maplet(eval_expr(e.child(0), s, env, scope), eval_expr(e.child(1), s, env, scope));
  }
  type_error(e, "unknown expression kind");
}

bool eval_predicate(const Expr& e, const State& s, const Binding& env, const Scope& scope) {
  return bool_operand(e, eval_expr(e, s, env, scope));
}

// ---------------------------------------------------------------------------
// Interpreter

const EventDef* abstract_counterpart(const EventDef& concrete, const MachineDef& abstract) {
  return abstract.find_event(concrete.refines ? *concrete.refines : concrete.name);
}

Interpreter::Interpreter(const Model& model, const MachineDef& machine)
    : machine_(machine), scope_(merged_context(model, machine)) {
  prepare();
}

Interpreter::Interpreter(MachineDef machine, Scope scope)
    : machine_(std::move(machine)), scope_(std::move(scope)) {
  prepare();
}

void Interpreter::prepare() {
  info_.reserve(machine_.events.size());
  for (const EventDef& ev : machine_.events) {
    EventInfo info;
    // Odometer over parameter domains; the first parameter varies slowest.
    std::vector<std::vector<Value>> domains;
    for (const Parameter& p : ev.parameters) domains.push_back(scope_.domain(p.type));
    bool empty = std::any_of(domains.begin(), domains.end(), [](const auto& d) { return d.empty(); });
    if (!empty) {
      std::vector<std::size_t> idx(domains.size(), 0);
      for (;;) {
        std::vector<Binding::Entry> entries;
        for (std::size_t i = 0; i < domains.size(); ++i) {
          entries.emplace_back(ev.parameters[i].name, domains[i][idx[i]]);
        }
        info.bindings.emplace_back(std::move(entries));
        std::size_t k = domains.size();
        while (k > 0 && ++idx[k - 1] == domains[k - 1].size()) {
          idx[k - 1] = 0;
          --k;
        }
        if (k == 0) break;
      }
    }
    for (std::size_t g = 0; g < ev.guards.size(); ++g) {
      bool uses_param = false;
      for_each_var(ev.guards[g].expr, [&](const std::string& n) {
        for (const Parameter& p : ev.parameters) uses_param |= (p.name == n);
      });
      (uses_param ? info.binding_guards : info.binding_free_guards).push_back(g);
    }
    info_.push_back(std::move(info));
  }
}

Value Interpreter::eval(const Expr& e, const State& s, const Binding& env) const {
  return eval_expr(e, s, env, scope_);
}

bool Interpreter::holds(const Expr& e, const State& s, const Binding& env) const {
  return eval_predicate(e, s, env, scope_);
}

const std::vector<Binding>& Interpreter::bindings(const EventDef& ev) const {
  auto idx = static_cast<std::size_t>(&ev - machine_.events.data());
  if (idx >= info_.size()) throw Error(ErrorKind::UnknownEvent, "event not owned by this machine");
  return info_[idx].bindings;
}

bool Interpreter::guards_hold(const EventDef& ev, const State& s, const Binding& b) const {
  for (const Labeled& g : ev.guards) {
    if (!holds(g.expr, s, b)) return false;
  }
  return true;
}

State Interpreter::initial_state() const {
  std::vector<State::Entry> values;
  for (const Assignment& a : machine_.initialisation) {
    values.emplace_back(a.target, eval(a.value, State{}));
  }
  State s = state_update(State{}, values, machine_.variables);
  for (const Variable& v : machine_.variables) {
    if (!s.contains(v.name)) {
      throw Error(ErrorKind::UnknownVariable, "variable '" + v.name + "' is not initialised");
    }
  }
  return s;
}

std::vector<EventChoice> Interpreter::enabled_choices(const State& s) const {
  std::vector<EventChoice> out;
  for (std::size_t i = 0; i < machine_.events.size(); ++i) {
    const EventDef& ev = machine_.events[i];
    const EventInfo& info = info_[i];
    bool pre = true;
    for (std::size_t g : info.binding_free_guards) {
      if (!holds(ev.guards[g].expr, s)) {
        pre = false;
        break;
      }
    }
    if (!pre) continue;
    for (std::size_t b = 0; b < info.bindings.size(); ++b) {
      bool ok = true;
      for (std::size_t g : info.binding_guards) {
        if (!holds(ev.guards[g].expr, s, info.bindings[b])) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(EventChoice{i, b});
    }
  }
  return out;
}

std::vector<EnabledEvent> Interpreter::enabled_events(const State& s) const {
  std::vector<EnabledEvent> out;
  for (EventChoice c : enabled_choices(s)) out.push_back(describe(c));
  return out;
}

EnabledEvent Interpreter::describe(EventChoice c) const {
  return EnabledEvent{event(c).name, binding(c)};
}

std::vector<State::Entry> Interpreter::action_values(const State& s, EventChoice c) const {
  const EventDef& ev = event(c);
  const Binding& b = binding(c);
  std::vector<State::Entry> values;
  values.reserve(ev.actions.size());
  for (const Assignment& a : ev.actions) values.emplace_back(a.target, eval(a.value, s, b));
  return values;
}

State Interpreter::fire_choice(const State& s, EventChoice c) const {
  auto values = action_values(s, c);
  try {
    return state_update(s, values, machine_.variables);
  } catch (const Error& e) {
    throw Error(e.kind(), "event '" + event(c).name + "': " + e.what());
  }
}

State Interpreter::fire_event(const State& s, const EnabledEvent& ev) const {
  const EventDef* def = machine_.find_event(ev.event);
  if (!def) throw Error(ErrorKind::UnknownEvent, "unknown event '" + ev.event + "'");
  const auto idx = static_cast<std::size_t>(def - machine_.events.data());
  const auto& all = info_[idx].bindings;
  auto it = std::find(all.begin(), all.end(), ev.binding);
  if (it == all.end()) {
    throw Error(ErrorKind::EventNotEnabled,
                "event '" + ev.event + "': binding [" + print_binding(ev.binding) +
                    "] does not match its parameters");
  }
  if (!guards_hold(*def, s, ev.binding)) {
    throw Error(ErrorKind::EventNotEnabled, "event '" + ev.event + "' is not enabled");
  }
  return fire_choice(s, EventChoice{idx, static_cast<std::size_t>(it - all.begin())});
}

std::vector<EnabledEvent> enabled_events(const Interpreter& machine, const State& s) {
  return machine.enabled_events(s);
}

State fire_event(const Interpreter& machine, const State& s, const EnabledEvent& ev) {
  return machine.fire_event(s, ev);
}

std::vector<std::pair<std::string, std::string>> printed_state(const MachineDef& m, const State& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Variable& v : m.variables) {
    const Value* value = s.find(v.name);
    out.emplace_back(v.name, value ? print_value(*value) : "?");
  }
  return out;
}

}  // namespace specforge
