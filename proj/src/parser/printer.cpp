#include <sstream>

#include "specforge/parser.hpp"

namespace specforge {

namespace {

// Binding strength, loosest first. Mirrors the parser's precedence ladder.
enum Prec : int {
  kImplies = 1,
  kOr,
  kAnd,
  kCompare,
  kMaplet,
  kAdd,
  kMul,
  kUnary,
  kPrimary,
};

int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Implies: return kImplies;
    case ExprKind::Or: return kOr;
    case ExprKind::And: return kAnd;
    case ExprKind::Maplet: return kMaplet;
    case ExprKind::Add:
    case ExprKind::Sub: return kAdd;
    case ExprKind::Mul: return kMul;
    case ExprKind::Not: return kUnary;
    default: return is_comparison(e.kind()) ? kCompare : kPrimary;
  }
}

std::string_view op_text(ExprKind k) {
  switch (k) {
    case ExprKind::And: return " & ";
    case ExprKind::Or: return " or ";
    case ExprKind::Implies: return " => ";
    case ExprKind::Eq: return " = ";
    case ExprKind::Neq: return " /= ";
    case ExprKind::Lt: return " < ";
    case ExprKind::Le: return " <= ";
    case ExprKind::Gt: return " > ";
    case ExprKind::Ge: return " >= ";
    case ExprKind::Add: return " + ";
    case ExprKind::Sub: return " - ";
    case ExprKind::Mul: return " * ";
    case ExprKind::In: return " in ";
    case ExprKind::Maplet: return " |-> ";
    default: return " ? ";
  }
}

void print_expr(std::ostream& os, const Expr& e, int min_prec) {
  const int p = precedence(e);
  const bool parens = p < min_prec;
  if (parens) os << '(';
  switch (e.kind()) {
    case ExprKind::IntLit: os << e.int_value(); break;
    case ExprKind::BoolLit: os << (e.bool_value() ? "TRUE" : "FALSE"); break;
    case ExprKind::SymbolRef:
    case ExprKind::VarRef: os << e.name(); break;
    case ExprKind::Not:
      os << "not ";
      print_expr(os, e.child(0), kUnary);
      break;
    case ExprKind::SetLit: {
      os << '{';
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) os << ", ";
        print_expr(os, e.child(i), kImplies);
      }
      os << '}';
      break;
    }
    default: {
      int lhs_prec = p;
      int rhs_prec = p + 1;
      if (e.kind() == ExprKind::Implies) {
        lhs_prec = p + 1;
        rhs_prec = p;
      } else if (p == kCompare) {
        lhs_prec = p + 1;
      }
      print_expr(os, e.child(0), lhs_prec);
      os << op_text(e.kind());
      print_expr(os, e.child(1), rhs_prec);
      break;
    }
  }
  if (parens) os << ')';
}

void print_comments(std::ostream& os, const std::vector<std::string>& comments,
                    std::string_view indent) {
  for (const auto& c : comments) os << indent << "//" << c << '\n';
}

void print_labeled(std::ostream& os, const std::vector<Labeled>& items, std::string_view indent) {
  for (const Labeled& l : items) {
    print_comments(os, l.comments, indent);
    os << indent << l.label << ": ";
    print_expr(os, l.expr, kImplies);
    os << '\n';
  }
}

void print_assignments(std::ostream& os, const std::vector<Assignment>& items,
                       std::string_view indent) {
  for (const Assignment& a : items) {
    print_comments(os, a.comments, indent);
    os << indent << a.label << ": " << a.target << " := ";
    print_expr(os, a.value, kImplies);
    os << '\n';
  }
}

void print_declarations(std::ostream& os, const std::vector<Variable>& vars,
                        std::string_view indent) {
  for (const Variable& v : vars) {
    print_comments(os, v.comments, indent);
    os << indent << v.name << " : " << print_type(v.type) << '\n';
  }
}

void print_context(std::ostream& os, const ContextDef& c) {
  print_comments(os, c.comments, "");
  os << "context " << c.name;
  if (c.extends) os << " extends " << *c.extends;
  os << '\n';
  if (!c.sets.empty()) {
    os << "sets\n";
    for (const CarrierSet& s : c.sets) {
      print_comments(os, s.comments, "  ");
      os << "  " << s.name << " = {";
      for (std::size_t i = 0; i < s.symbols.size(); ++i) os << (i ? ", " : "") << s.symbols[i];
      os << "}\n";
    }
  }
  if (!c.constants.empty()) {
    os << "constants\n";
    for (const Constant& k : c.constants) {
      print_comments(os, k.comments, "  ");
      os << "  " << k.name << " = ";
      print_expr(os, k.definition, kImplies);
      os << '\n';
    }
  }
  if (!c.axioms.empty()) {
    os << "axioms\n";
    print_labeled(os, c.axioms, "  ");
  }
  os << "end\n";
}

void print_event(std::ostream& os, const EventDef& ev) {
  print_comments(os, ev.comments, "  ");
  os << "  event " << ev.name;
  if (ev.convergent()) os << " convergent";
  if (ev.refines) os << " refines " << *ev.refines;
  os << '\n';
  if (!ev.parameters.empty()) {
    os << "    any\n";
    print_declarations(os, ev.parameters, "      ");
  }
  if (!ev.guards.empty()) {
    os << "    where\n";
    print_labeled(os, ev.guards, "      ");
  }
  if (!ev.actions.empty()) {
    os << "    then\n";
    print_assignments(os, ev.actions, "      ");
  }
  os << "  end\n";
}

void print_machine(std::ostream& os, const MachineDef& m) {
  print_comments(os, m.comments, "");
  os << "machine " << m.name;
  if (m.refines) os << " refines " << *m.refines;
  if (!m.sees.empty()) {
    os << " sees ";
    for (std::size_t i = 0; i < m.sees.size(); ++i) os << (i ? ", " : "") << m.sees[i];
  }
  os << '\n';
  if (!m.variables.empty()) {
    os << "variables\n";
    print_declarations(os, m.variables, "  ");
  }
  if (!m.invariants.empty()) {
    os << "invariants\n";
    print_labeled(os, m.invariants, "  ");
  }
  if (!m.gluing.empty()) {
    os << "gluing\n";
    print_labeled(os, m.gluing, "  ");
  }
  if (m.variant) {
    os << "variant\n  ";
    print_expr(os, *m.variant, kImplies);
    os << '\n';
  }
  if (!m.priority.empty()) {
    os << "priority\n  ";
    for (std::size_t i = 0; i < m.priority.size(); ++i) os << (i ? ", " : "") << m.priority[i];
    os << '\n';
  }
  if (!m.initialisation.empty()) {
    os << "init\n";
    print_assignments(os, m.initialisation, "  ");
  }
  if (!m.events.empty()) {
    os << "events\n";
    for (std::size_t i = 0; i < m.events.size(); ++i) {
      if (i) os << '\n';
      print_event(os, m.events[i]);
    }
  }
  os << "end\n";
}

}  // namespace

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, kImplies);
  return os.str();
}

std::string pretty_print(const ContextDef& context) {
  std::ostringstream os;
  print_context(os, context);
  return os.str();
}

std::string pretty_print(const MachineDef& machine) {
  std::ostringstream os;
  print_machine(os, machine);
  return os.str();
}

std::string pretty_print(const Module& module) {
  std::ostringstream os;
  bool first = true;
  for (const ContextDef& c : module.contexts) {
    if (!first) os << '\n';
    first = false;
    print_context(os, c);
  }
  for (const MachineDef& m : module.machines) {
    if (!first) os << '\n';
    first = false;
    print_machine(os, m);
  }
  return os.str();
}

}  // namespace specforge
