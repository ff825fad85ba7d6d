#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "specforge/codegen.hpp"

namespace specforge {

namespace {

[[noreturn]] void not_in_subset(const std::string& message) {
  throw Error(ErrorKind::NotInSubset, message);
}

// A SET(A |-> B) variable where A has a single symbol, lowered to one B.
struct Mapping {
  std::string point;
  std::string target_carrier;
};

std::optional<Mapping> as_mapping(const Type& t, const Scope& scope) {
  if (t.kind() != Type::Kind::Set || t.element().kind() != Type::Kind::Pair) return std::nullopt;
  const Type& l = t.element().left();
  const Type& r = t.element().right();
  if (l.kind() != Type::Kind::Symbol || r.kind() != Type::Kind::Symbol) return std::nullopt;
  const auto* points = scope.carrier(l.carrier_name());
  if (!points || points->size() != 1) return std::nullopt;
  return Mapping{points->front(), r.carrier_name()};
}

std::string c_int(std::int64_t v) {
  if (v == std::numeric_limits<std::int64_t>::min()) return "INT64_MIN";
  return "INT64_C(" + std::to_string(v) + ")";
}

std::string c_symbol(std::string_view name) { return "SYM_" + std::string(name); }

class Lowering {
 public:
  Lowering(const MachineDef& m, const Scope& scope) : m_(m), scope_(scope) {}

  std::string expr(const Expr& e) const {
    switch (e.kind()) {
      case ExprKind::IntLit: return c_int(e.int_value());
      case ExprKind::BoolLit: return e.bool_value() ? "1" : "0";
      case ExprKind::SymbolRef: return c_symbol(e.name());
      case ExprKind::VarRef: return name(e);
      case ExprKind::Not: return "(!" + expr(e.child(0)) + ")";
      case ExprKind::And: return "(" + expr(e.child(0)) + " && " + expr(e.child(1)) + ")";
      case ExprKind::Or: return "(" + expr(e.child(0)) + " || " + expr(e.child(1)) + ")";
      case ExprKind::Implies: return "(!" + expr(e.child(0)) + " || " + expr(e.child(1)) + ")";
      case ExprKind::Eq: return "(" + expr(e.child(0)) + " == " + expr(e.child(1)) + ")";
      case ExprKind::Neq: return "(" + expr(e.child(0)) + " != " + expr(e.child(1)) + ")";
      case ExprKind::Lt: return "(" + expr(e.child(0)) + " < " + expr(e.child(1)) + ")";
      case ExprKind::Le: return "(" + expr(e.child(0)) + " <= " + expr(e.child(1)) + ")";
      case ExprKind::Gt: return "(" + expr(e.child(0)) + " > " + expr(e.child(1)) + ")";
      case ExprKind::Ge: return "(" + expr(e.child(0)) + " >= " + expr(e.child(1)) + ")";
      case ExprKind::Add: return "(" + expr(e.child(0)) + " + " + expr(e.child(1)) + ")";
      case ExprKind::Sub: return "(" + expr(e.child(0)) + " - " + expr(e.child(1)) + ")";
      case ExprKind::Mul: return "(" + expr(e.child(0)) + " * " + expr(e.child(1)) + ")";
      case ExprKind::In: return membership(e);
      case ExprKind::SetLit: return mapping_literal(e);
      case ExprKind::Maplet: not_in_subset("a maplet outside a mapping literal: " + pretty_print(e));
    }
    not_in_subset("unsupported expression " + pretty_print(e));
  }

 private:
  std::string name(const Expr& e) const {
    if (m_.find_variable(e.name())) return "s->v_" + e.name();
    if (const Value* v = scope_.constant(e.name())) {
      switch (v->kind()) {
        case Value::Kind::Int: return c_int(v->as_int());
        case Value::Kind::Bool: return v->as_bool() ? "1" : "0";
        case Value::Kind::Symbol: return c_symbol(v->as_symbol().name());
        default: not_in_subset("constant " + e.name() + " is not an integer, boolean or symbol");
      }
    }
    if (scope_.carrier_of(e.name())) return c_symbol(e.name());
    not_in_subset("name " + e.name() + " cannot be lowered");
  }

  // {p |-> b} with p the only point of its carrier denotes b.
  std::string mapping_literal(const Expr& e) const {
    if (e.children().size() == 1 && e.child(0).kind() == ExprKind::Maplet) {
      const Expr& left = e.child(0).child(0);
      if (left.kind() == ExprKind::SymbolRef || left.kind() == ExprKind::VarRef) {
        const std::string* carrier = scope_.carrier_of(left.name());
        const auto* points = carrier ? scope_.carrier(*carrier) : nullptr;
        if (points && points->size() == 1 && !m_.find_variable(left.name())) {
          return expr(e.child(0).child(1));
        }
      }
    }
    not_in_subset("set literal " + pretty_print(e) + " is not a single-maplet mapping");
  }

  std::string membership(const Expr& e) const {
    const Expr& set = e.child(1);
    if (set.kind() == ExprKind::VarRef && scope_.carrier(set.name()) && !m_.find_variable(set.name()) &&
        !scope_.constant(set.name())) {
      return "1";
    }
    if (set.kind() != ExprKind::SetLit) {
      not_in_subset("membership needs a set literal or carrier set: " + pretty_print(e));
    }
    if (set.children().empty()) return "0";
    const std::string x = expr(e.child(0));
    std::string out = "(";
    for (std::size_t i = 0; i < set.children().size(); ++i) {
      if (i) out += " || ";
      out += x + " == " + expr(set.child(i));
    }
    return out + ")";
  }

  const MachineDef& m_;
  const Scope& scope_;
};

void check_variable(const Variable& v, const Scope& scope, std::vector<Diagnostic>& out) {
  switch (v.type.kind()) {
    case Type::Kind::Int:
    case Type::Kind::Bool:
    case Type::Kind::Symbol: return;
    case Type::Kind::Set:
      if (as_mapping(v.type, scope)) return;
      out.push_back(Diagnostic{Diagnostic::Severity::Error,
                               "variable " + v.name + " : " + print_type(v.type) +
                                   " is set-valued; only single-maplet mappings are in the subset",
                               v.span});
      return;
    case Type::Kind::Pair:
      out.push_back(Diagnostic{Diagnostic::Severity::Error,
                               "variable " + v.name + " : " + print_type(v.type) +
                                   " is a pair; pairs are not in the subset",
                               v.span});
      return;
  }
}

}  // namespace

std::vector<std::string> schedule_order(const MachineDef& m) {
  std::vector<std::string> order = m.priority;
  for (const EventDef& ev : m.events) {
    if (std::find(order.begin(), order.end(), ev.name) == order.end()) order.push_back(ev.name);
  }
  return order;
}

SubsetReport check_subset(const Model& model, const MachineDef& m, const ExploreConfig& cfg) {
  SubsetReport report;
  auto& out = report.violations;
  Interpreter interp(model, m);
  const Scope& scope = interp.scope();

  for (const EventDef& ev : m.events) {
    if (!ev.parameters.empty()) {
      out.push_back(Diagnostic{Diagnostic::Severity::Error,
                               "event " + ev.name + ": parameters not in subset", ev.span});
    }
  }
  for (const Variable& v : m.variables) check_variable(v, scope, out);

  Lowering lower(m, scope);
  auto try_lower = [&](const Expr& e, const SourceSpan& span, const std::string& where) {
    try {
      lower.expr(e);
    } catch (const Error& err) {
      out.push_back(Diagnostic{Diagnostic::Severity::Error, where + ": " + err.what(), span});
    }
  };
  for (const Assignment& a : m.initialisation) try_lower(a.value, a.span, "init " + a.label);
  for (const EventDef& ev : m.events) {
    for (const Labeled& g : ev.guards) try_lower(g.expr, g.span, "event " + ev.name + " guard " + g.label);
    for (const Assignment& a : ev.actions) {
      try_lower(a.value, a.span, "event " + ev.name + " action " + a.label);
    }
  }

  if (m.priority.empty() && out.empty()) {
    ExploreResult r = explore(interp, cfg);
    for (std::size_t i = 0; i < r.states.size(); ++i) {
      if (r.edges[i].size() > 1) {
        std::string names;
        for (const Transition& t : r.edges[i]) {
          names += (names.empty() ? "" : ", ") + interp.event(t.choice).name;
        }
        out.push_back(Diagnostic{Diagnostic::Severity::Error,
                                 "events " + names +
                                     " are enabled together in a reachable state and no priority "
                                     "clause orders them",
                                 m.span});
        break;
      }
    }
    if (out.empty() && r.bound_exhausted) {
      out.push_back(Diagnostic{Diagnostic::Severity::Error,
                               "determinism could not be established within the exploration bound",
                               m.span});
    }
  }
  report.eligible = out.empty();
  return report;
}

std::string generate_c(const Model& model, const MachineDef& m) {
  SubsetReport subset = check_subset(model, m);
  if (!subset.eligible) {
    std::string msg = "machine " + m.name + " is not in the code generation subset";
    for (const Diagnostic& d : subset.violations) msg += "\n  " + d.message;
    not_in_subset(msg);
  }
  Interpreter interp(model, m);
  const Scope& scope = interp.scope();
  Lowering lower(m, scope);
  std::ostringstream os;

  os << "/* Generated by specforge from machine " << m.name << ". */\n"
     << "#include <inttypes.h>\n#include <stdint.h>\n#include <stdio.h>\n#include <stdlib.h>\n\n";

  std::set<std::string> printed;
  for (const Variable& v : m.variables) {
    if (v.type.kind() == Type::Kind::Symbol) printed.insert(v.type.carrier_name());
    if (auto mp = as_mapping(v.type, scope)) printed.insert(mp->target_carrier);
  }
  for (const CarrierSet& cs : scope.context().sets) {
    os << "enum set_" << cs.name << " {";
    for (std::size_t i = 0; i < cs.symbols.size(); ++i) os << (i ? ", " : " ") << c_symbol(cs.symbols[i]);
    os << " };\n";
    if (!printed.count(cs.name)) continue;
    os << "static const char *const names_" << cs.name << "[] = {";
    for (std::size_t i = 0; i < cs.symbols.size(); ++i) os << (i ? ", " : "") << '"' << cs.symbols[i] << '"';
    os << "};\n";
  }

  os << "\nstruct state {\n";
  for (const Variable& v : m.variables) {
    switch (v.type.kind()) {
      case Type::Kind::Int: os << "  int64_t v_" << v.name << ";\n"; break;
      case Type::Kind::Bool: os << "  int v_" << v.name << ";\n"; break;
      case Type::Kind::Symbol: os << "  enum set_" << v.type.carrier_name() << " v_" << v.name << ";\n"; break;
      default:
        os << "  enum set_" << as_mapping(v.type, scope)->target_carrier << " v_" << v.name << "; /* "
           << print_type(v.type) << " */\n";
        break;
    }
  }
  os << "};\n\n";

  os << "static int check_bounds(const struct state *s) {\n  (void)s;\n";
  for (const Variable& v : m.variables) {
    if (v.type.kind() != Type::Kind::Int) continue;
    os << "  if (s->v_" << v.name << " < " << c_int(v.type.lo()) << " || s->v_" << v.name << " > "
       << c_int(v.type.hi()) << ") {\n"
       << "    fprintf(stderr, \"bounds violation: " << v.name << "=%\" PRId64 \"\\n\", s->v_" << v.name
       << ");\n    return 0;\n  }\n";
  }
  os << "  return 1;\n}\n\n";

  os << "static void print_state(const struct state *s) {\n  (void)s;\n";
  for (const Variable& v : m.variables) {
    const std::string field = "s->v_" + v.name;
    switch (v.type.kind()) {
      case Type::Kind::Int:
        os << "  printf(\"  " << v.name << "=%\" PRId64 \"\\n\", " << field << ");\n";
        break;
      case Type::Kind::Bool:
        os << "  printf(\"  " << v.name << "=%s\\n\", " << field << " ? \"TRUE\" : \"FALSE\");\n";
        break;
      case Type::Kind::Symbol:
        os << "  printf(\"  " << v.name << "=%s\\n\", names_" << v.type.carrier_name() << '[' << field
           << "]);\n";
        break;
      default: {
        Mapping mp = *as_mapping(v.type, scope);
        os << "  printf(\"  " << v.name << "={" << mp.point << " |-> %s}\\n\", names_" << mp.target_carrier
           << '[' << field << "]);\n";
        break;
      }
    }
  }
  os << "}\n";

  for (const EventDef& ev : m.events) {
    os << "\nstatic int guard_" << ev.name << "(const struct state *s) {\n  (void)s;\n  return ";
    if (ev.guards.empty()) os << '1';
    for (std::size_t i = 0; i < ev.guards.size(); ++i) {
      if (i) os << "\n      && ";
      os << lower.expr(ev.guards[i].expr);
    }
    os << ";\n}\n\n";
    // Right-hand sides read the pre-state; writes go to a copy.
    os << "static void fire_" << ev.name << "(struct state *s) {\n  struct state next = *s;\n";
    for (const Assignment& a : ev.actions) {
      const Variable* v = m.find_variable(a.target);
      os << "  next.v_" << a.target << " = ";
      if (v && v->type.kind() == Type::Kind::Bool) {
        os << "!!" << lower.expr(a.value);
      } else {
        os << lower.expr(a.value);
      }
      os << ";\n";
    }
    os << "  *s = next;\n}\n";
  }

  os << "\nint main(int argc, char **argv) {\n"
     << "  long long limit = 1000;\n  long long step;\n  struct state init;\n  struct state *s = &init;\n"
     << "  if (argc > 1) limit = strtoll(argv[1], NULL, 10);\n";
  for (const Assignment& a : m.initialisation) {
    const Variable* v = m.find_variable(a.target);
    os << "  init.v_" << a.target << " = " << (v && v->type.kind() == Type::Kind::Bool ? "!!" : "")
       << lower.expr(a.value) << ";\n";
  }
  os << "  if (!check_bounds(s)) return 2;\n"
     << "  for (step = 1; step <= limit; ++step) {\n    const char *name;\n";
  const auto order = schedule_order(m);
  for (std::size_t i = 0; i < order.size(); ++i) {
    os << "    " << (i ? "} else if" : "if") << " (guard_" << order[i] << "(s)) {\n"
       << "      fire_" << order[i] << "(s);\n      name = \"" << order[i] << "\";\n";
  }
  if (order.empty()) {
    os << "    (void)name;\n    return 1;\n";
  } else {
    os << "    } else {\n      return 1;\n    }\n";
  }
  if (!order.empty()) {
    os << "    if (!check_bounds(s)) return 2;\n"
       << "    printf(\"step %lld: %s\\n\", step, name);\n    print_state(s);\n";
  }
  os << "  }\n  return 0;\n}\n";
  return os.str();
}

TraceRun reference_trace(const Interpreter& machine, std::size_t step_limit) {
  TraceRun run;
  const MachineDef& m = machine.machine();
  State s;
  try {
    s = machine.initial_state();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BoundsViolation && e.kind() != ErrorKind::TypeMismatch) throw;
    run.exit_code = 2;
    return run;
  }
  std::vector<std::size_t> order;
  for (const std::string& name : schedule_order(m)) {
    order.push_back(static_cast<std::size_t>(m.find_event(name) - m.events.data()));
  }
  std::ostringstream os;
  for (std::size_t step = 1; step <= step_limit; ++step) {
    std::optional<EventChoice> pick;
    for (std::size_t e : order) {
      const EventDef& ev = m.events[e];
      const auto& bindings = machine.bindings(ev);
      if (!bindings.empty() && machine.guards_hold(ev, s, bindings.front())) {
        pick = EventChoice{e, 0};
        break;
      }
    }
    if (!pick) {
      run.exit_code = 1;
      break;
    }
    try {
      s = machine.fire_choice(s, *pick);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BoundsViolation && e.kind() != ErrorKind::TypeMismatch) throw;
      run.exit_code = 2;
      break;
    }
    os << "step " << step << ": " << m.events[pick->event].name << '\n';
    for (const auto& [name, value] : printed_state(m, s)) os << "  " << name << '=' << value << '\n';
  }
  run.text = os.str();
  return run;
}

}  // namespace specforge
