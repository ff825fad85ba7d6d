#include "oracle.hpp"

namespace oracle {

using namespace specforge;

Oracle::Oracle(const Model& model, const MachineDef& machine) : m_(machine) {
  for (const ContextDef* c : model.visible_contexts(machine)) {
    for (const CarrierSet& cs : c->sets) {
      carriers_[cs.name] = cs.symbols;
      for (const std::string& sym : cs.symbols) symbol_carrier_[sym] = cs.name;
    }
  }
  for (const ContextDef* c : model.visible_contexts(machine)) {
    for (const Constant& k : c->constants) constants_[k.name] = eval(k.definition, State{}, {});
  }
}

Value Oracle::eval(const Expr& e, const State& s, const Env& env) const {
  auto sub = [&](std::size_t i) { return eval(e.child(i), s, env); };
  auto arith = [&](auto op) {
    long long r = 0;
    if (op(sub(0).as_int(), sub(1).as_int(), &r)) throw Error(ErrorKind::BoundsViolation, "overflow");
    return Value::integer(r);
  };
  switch (e.kind()) {
    case ExprKind::IntLit: return Value::integer(e.int_value());
    case ExprKind::BoolLit: return Value::boolean(e.bool_value());
    case ExprKind::SymbolRef:
    case ExprKind::VarRef: {
      const std::string& n = e.name();
      if (auto it = env.find(n); it != env.end()) return it->second;
      if (const Value* v = s.find(n)) return *v;
      if (auto it = constants_.find(n); it != constants_.end()) return it->second;
      if (auto it = carriers_.find(n); it != carriers_.end()) {
        std::vector<Value> elems;
        for (const std::string& sym : it->second) elems.push_back(Value::symbol(sym, n));
        return Value::set(elems);
      }
      if (auto it = symbol_carrier_.find(n); it != symbol_carrier_.end()) return Value::symbol(n, it->second);
      throw Error(ErrorKind::UnboundName, n);
    }
    case ExprKind::Not: return Value::boolean(!sub(0).as_bool());
    case ExprKind::And: return Value::boolean(sub(0).as_bool() && sub(1).as_bool());
    case ExprKind::Or: return Value::boolean(sub(0).as_bool() || sub(1).as_bool());
    case ExprKind::Implies: return Value::boolean(!sub(0).as_bool() || sub(1).as_bool());
    case ExprKind::Eq: return Value::boolean(sub(0) == sub(1));
    case ExprKind::Neq: return Value::boolean(!(sub(0) == sub(1)));
    case ExprKind::Lt: return Value::boolean(sub(0).as_int() < sub(1).as_int());
    case ExprKind::Le: return Value::boolean(sub(0).as_int() <= sub(1).as_int());
    case ExprKind::Gt: return Value::boolean(sub(0).as_int() > sub(1).as_int());
    case ExprKind::Ge: return Value::boolean(sub(0).as_int() >= sub(1).as_int());
    case ExprKind::Add: return arith([](long long a, long long b, long long* r) { return __builtin_add_overflow(a, b, r); });
    case ExprKind::Sub: return arith([](long long a, long long b, long long* r) { return __builtin_sub_overflow(a, b, r); });
    case ExprKind::Mul: return arith([](long long a, long long b, long long* r) { return __builtin_mul_overflow(a, b, r); });
    case ExprKind::In: return Value::boolean(sub(1).contains(sub(0)));
    case ExprKind::SetLit: {
      std::vector<Value> elems;
      for (std::size_t i = 0; i < e.children().size(); ++i) elems.push_back(sub(i));
      return Value::set(elems);
    }
    case ExprKind::Maplet: return Value::maplet(sub(0), sub(1));
  }
  throw Error(ErrorKind::TypeError, "unknown expression");
}

std::vector<Value> Oracle::domain(const Type& t) const {
  std::vector<Value> out;
  switch (t.kind()) {
    case Type::Kind::Int:
      for (std::int64_t v = t.lo(); v <= t.hi(); ++v) out.push_back(Value::integer(v));
      break;
    case Type::Kind::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case Type::Kind::Symbol:
      for (const std::string& sym : carriers_.at(t.carrier_name())) out.push_back(Value::symbol(sym, t.carrier_name()));
      break;
    case Type::Kind::Pair:
      for (const Value& a : domain(t.left())) {
        for (const Value& b : domain(t.right())) out.push_back(Value::maplet(a, b));
      }
      break;
    case Type::Kind::Set: {
      const auto elems = domain(t.element());
      for (std::size_t mask = 0; mask < (std::size_t{1} << elems.size()); ++mask) {
        std::vector<Value> pick;
        for (std::size_t i = 0; i < elems.size(); ++i) {
          if (mask >> i & 1) pick.push_back(elems[i]);
        }
        out.push_back(Value::set(pick));
      }
      break;
    }
  }
  return out;
}

State Oracle::init() const {
  std::vector<State::Entry> entries;
  for (const Assignment& a : m_.initialisation) entries.emplace_back(a.target, eval(a.value, State{}, {}));
  return State(entries);
}

bool Oracle::holds(const Expr& e, const State& s) const { return eval(e, s, {}).as_bool(); }

std::vector<State> Oracle::successors(const State& s) const {
  std::vector<State> out;
  for (const EventDef& ev : m_.events) {
    // Bindings by recursion over the parameter list.
    std::vector<Env> envs{Env{}};
    for (const Parameter& p : ev.parameters) {
      std::vector<Env> next;
      for (const Env& env : envs) {
        for (const Value& v : domain(p.type)) {
          Env e = env;
          e[p.name] = v;
          next.push_back(std::move(e));
        }
      }
      envs = std::move(next);
    }
    for (const Env& env : envs) {
      bool enabled = true;
      for (const Labeled& g : ev.guards) {
        if (!eval(g.expr, s, env).as_bool()) {
          enabled = false;
          break;
        }
      }
      if (!enabled) continue;
      std::map<std::string, Value> values;
      for (const auto& [name, v] : s) values[name] = v;
      bool ok = true;
      try {
        for (const Assignment& a : ev.actions) values[a.target] = eval(a.value, s, env);
      } catch (const Error&) {
        ok = false;
      }
      for (const Variable& var : m_.variables) ok = ok && conforms(values[var.name], var.type);
      if (!ok) continue;
      out.push_back(State(std::vector<State::Entry>(values.begin(), values.end())));
    }
  }
  return out;
}

void Oracle::explore(const State& s, std::set<State>& seen) const {
  if (!seen.insert(s).second) return;
  for (const State& t : successors(s)) explore(t, seen);
}

std::set<State> Oracle::reachable() const {
  std::set<State> seen;
  explore(init(), seen);
  return seen;
}

std::vector<std::set<State>> Oracle::levels(std::size_t max_depth) const {
  std::vector<std::set<State>> out{{init()}};
  std::set<State> seen = out[0];
  while (out.size() <= max_depth) {
    std::set<State> next;
    for (const State& s : out.back()) {
      for (const State& t : successors(s)) {
        if (!seen.count(t)) next.insert(t);
      }
    }
    if (next.empty()) break;
    seen.insert(next.begin(), next.end());
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace oracle
