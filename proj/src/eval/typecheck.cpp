#include <map>
#include <set>

#include "specforge/eval.hpp"

namespace specforge {

namespace {

// Static shape of an expression. `any` marks the unknown element type of an
// empty set literal; it unifies with everything.
struct Shape {
  enum class Kind { Int, Bool, Symbol, Set, Pair, Any };
  Kind kind = Kind::Any;
  std::string carrier;
  std::vector<Shape> kids;

  static Shape of(Kind k) { return Shape{k, {}, {}}; }
  static Shape symbol(std::string c) { return Shape{Kind::Symbol, std::move(c), {}}; }
  static Shape set(Shape e) { return Shape{Kind::Set, {}, {std::move(e)}}; }
  static Shape pair(Shape l, Shape r) { return Shape{Kind::Pair, {}, {std::move(l), std::move(r)}}; }
};

Shape from_type(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Int: return Shape::of(Shape::Kind::Int);
    case Type::Kind::Bool: return Shape::of(Shape::Kind::Bool);
    case Type::Kind::Symbol: return Shape::symbol(t.carrier_name());
    case Type::Kind::Set: return Shape::set(from_type(t.element()));
    case Type::Kind::Pair: return Shape::pair(from_type(t.left()), from_type(t.right()));
  }
  return {};
}

std::string describe(const Shape& s) {
  switch (s.kind) {
    case Shape::Kind::Int: return "INT";
    case Shape::Kind::Bool: return "BOOL";
    case Shape::Kind::Symbol: return s.carrier;
    case Shape::Kind::Set: return "SET(" + describe(s.kids[0]) + ")";
    case Shape::Kind::Pair: return describe(s.kids[0]) + " |-> " + describe(s.kids[1]);
    case Shape::Kind::Any: return "?";
  }
  return "?";
}

std::optional<Shape> unify(const Shape& a, const Shape& b) {
  if (a.kind == Shape::Kind::Any) return b;
  if (b.kind == Shape::Kind::Any) return a;
  if (a.kind != b.kind) return std::nullopt;
  if (a.kind == Shape::Kind::Symbol && a.carrier != b.carrier) return std::nullopt;
  Shape out = a;
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    auto k = unify(a.kids[i], b.kids[i]);
    if (!k) return std::nullopt;
    out.kids[i] = *k;
  }
  return out;
}

struct Names {
  std::map<std::string, Shape> params;
  std::map<std::string, Shape> variables;
  std::map<std::string, Shape> constants;
  std::map<std::string, std::string> symbols;  // symbol -> carrier
  std::set<std::string> carriers;
};

class Checker {
 public:
  explicit Checker(std::vector<Diagnostic>& out) : out_(out) {}

  void error(const SourceSpan& span, std::string_view kind, const std::string& message) {
    out_.push_back(Diagnostic{Diagnostic::Severity::Error, std::string(kind) + ": " + message, span});
  }

  // Returns nullopt after reporting a fault, so callers stop cascading.
  std::optional<Shape> infer(const Expr& e, const Names& n) {
    switch (e.kind()) {
      case ExprKind::IntLit: return Shape::of(Shape::Kind::Int);
      case ExprKind::BoolLit: return Shape::of(Shape::Kind::Bool);
      case ExprKind::SymbolRef: {
        auto it = n.symbols.find(e.name());
        if (it == n.symbols.end()) {
          error(e.span(), "UnboundName", "unknown symbol '" + e.name() + "'");
          return std::nullopt;
        }
        return Shape::symbol(it->second);
      }
      case ExprKind::VarRef: {
        if (auto it = n.params.find(e.name()); it != n.params.end()) return it->second;
        if (auto it = n.variables.find(e.name()); it != n.variables.end()) return it->second;
        if (auto it = n.constants.find(e.name()); it != n.constants.end()) return it->second;
        if (n.carriers.count(e.name())) return Shape::set(Shape::symbol(e.name()));
        if (auto it = n.symbols.find(e.name()); it != n.symbols.end()) return Shape::symbol(it->second);
        error(e.span(), "UnknownVariable", "'" + e.name() + "' is not declared");
        return std::nullopt;
      }
      case ExprKind::Not: {
        if (!expect(e.child(0), n, Shape::of(Shape::Kind::Bool))) return std::nullopt;
        return Shape::of(Shape::Kind::Bool);
      }
      case ExprKind::And:
      case ExprKind::Or:
      case ExprKind::Implies: {
        bool a = expect(e.child(0), n, Shape::of(Shape::Kind::Bool));
        bool b = expect(e.child(1), n, Shape::of(Shape::Kind::Bool));
        if (!a || !b) return std::nullopt;
        return Shape::of(Shape::Kind::Bool);
      }
      case ExprKind::Eq:
      case ExprKind::Neq: {
        auto a = infer(e.child(0), n);
        auto b = infer(e.child(1), n);
        if (!a || !b) return std::nullopt;
        if (!unify(*a, *b)) {
          error(e.span(), "TypeError",
                "cannot compare " + describe(*a) + " with " + describe(*b));
          return std::nullopt;
        }
        return Shape::of(Shape::Kind::Bool);
      }
      case ExprKind::Lt:
      case ExprKind::Le:
      case ExprKind::Gt:
      case ExprKind::Ge:
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul: {
        bool a = expect(e.child(0), n, Shape::of(Shape::Kind::Int));
        bool b = expect(e.child(1), n, Shape::of(Shape::Kind::Int));
        if (!a || !b) return std::nullopt;
        return Shape::of(is_comparison(e.kind()) ? Shape::Kind::Bool : Shape::Kind::Int);
      }
      case ExprKind::In: {
        auto x = infer(e.child(0), n);
        auto s = infer(e.child(1), n);
        if (!x || !s) return std::nullopt;
        if (s->kind != Shape::Kind::Set) {
          error(e.child(1).span(), "TypeError", "right operand of 'in' is " + describe(*s) + ", not a set");
          return std::nullopt;
        }
        if (!unify(*x, s->kids[0])) {
          error(e.span(), "TypeError", describe(*x) + " cannot be a member of " + describe(*s));
          return std::nullopt;
        }
        return Shape::of(Shape::Kind::Bool);
      }
      case ExprKind::SetLit: {
        Shape elem;
        for (const Expr& c : e.children()) {
          auto s = infer(c, n);
          if (!s) return std::nullopt;
          auto u = unify(elem, *s);
          if (!u) {
            error(c.span(), "TypeError",
                  "set element of type " + describe(*s) + " where " + describe(elem) + " expected");
            return std::nullopt;
          }
          elem = *u;
        }
        return Shape::set(elem);
      }
      case ExprKind::Maplet: {
        auto l = infer(e.child(0), n);
        auto r = infer(e.child(1), n);
        if (!l || !r) return std::nullopt;
        return Shape::pair(*l, *r);
      }
    }
    return std::nullopt;
  }

  bool expect(const Expr& e, const Names& n, const Shape& want) {
    auto got = infer(e, n);
    if (!got) return false;
    if (!unify(*got, want)) {
      error(e.span(), "TypeError", "expected " + describe(want) + ", found " + describe(*got));
      return false;
    }
    return true;
  }

  void check_type(const Type& t, const Names& n, const SourceSpan& span) {
    switch (t.kind()) {
      case Type::Kind::Int:
        if (t.lo() > t.hi()) error(span, "TypeError", "empty integer range " + print_type(t));
        break;
      case Type::Kind::Bool: break;
      case Type::Kind::Symbol:
        if (!n.carriers.count(t.carrier_name())) {
          error(span, "UnboundName", "unknown carrier set '" + t.carrier_name() + "'");
        }
        break;
      case Type::Kind::Set: check_type(t.element(), n, span); break;
      case Type::Kind::Pair:
        check_type(t.left(), n, span);
        check_type(t.right(), n, span);
        break;
    }
  }

  void check_assignments(const std::vector<Assignment>& items, const Names& n,
                         const std::vector<Variable>& vars, std::string_view where) {
    std::set<std::string> seen;
    for (const Assignment& a : items) {
      const Variable* target = nullptr;
      for (const Variable& v : vars) {
        if (v.name == a.target) target = &v;
      }
      if (!target) {
        error(a.span, "UnknownVariable",
              std::string(where) + " assigns undeclared variable '" + a.target + "'");
        infer(a.value, n);
        continue;
      }
      if (!seen.insert(a.target).second) {
        error(a.span, "DuplicateAssignment",
              std::string(where) + " assigns '" + a.target + "' more than once");
      }
      expect(a.value, n, from_type(target->type));
    }
  }

 private:
  std::vector<Diagnostic>& out_;
};

void add_context_names(const ContextDef& merged, Names& n, Checker& ck) {
  for (const CarrierSet& s : merged.sets) {
    n.carriers.insert(s.name);
    for (const std::string& sym : s.symbols) {
      if (!n.symbols.emplace(sym, s.name).second) {
        ck.error(s.span, "TypeError", "symbol '" + sym + "' is declared in more than one carrier set");
      }
    }
  }
  for (const Constant& k : merged.constants) {
    auto shape = ck.infer(k.definition, n);
    if (n.constants.count(k.name)) {
      ck.error(k.span, "TypeError", "constant '" + k.name + "' is defined more than once");
    }
    if (n.symbols.count(k.name) || n.carriers.count(k.name)) {
      ck.error(k.span, "TypeError", "constant '" + k.name + "' clashes with a carrier set or symbol");
    }
    n.constants[k.name] = shape ? *shape : Shape{};
  }
}

void check_context(const Model& model, const ContextDef& c, std::vector<Diagnostic>& out) {
  Checker ck(out);
  Names n;
  add_context_names(merged_context(model, c), n, ck);
  for (const Labeled& a : c.axioms) ck.expect(a.expr, n, Shape::of(Shape::Kind::Bool));
}

void check_machine(const Model& model, const MachineDef& m, std::vector<Diagnostic>& out) {
  Checker ck(out);
  Names n;
  {
    // Contexts were already checked on their own; only collect their names.
    std::vector<Diagnostic> scratch;
    Checker quiet(scratch);
    add_context_names(merged_context(model, m), n, quiet);
  }
  for (const Variable& v : m.variables) {
    ck.check_type(v.type, n, v.span);
    if (n.constants.count(v.name) || n.symbols.count(v.name) || n.carriers.count(v.name)) {
      ck.error(v.span, "TypeError", "variable '" + v.name + "' clashes with a context name");
    }
    n.variables[v.name] = from_type(v.type);
  }
  for (const Labeled& l : m.invariants) ck.expect(l.expr, n, Shape::of(Shape::Kind::Bool));

  const MachineDef* abstract = m.refines ? model.find_machine(*m.refines) : nullptr;
  if (!m.gluing.empty() && !abstract) {
    ck.error(m.gluing.front().span, "TypeError", "gluing invariants require a 'refines' clause");
  }
  if (abstract) {
    Names glue = n;
    std::set<std::string> guard;
    for (const MachineDef* a = abstract; a && guard.insert(a->name).second;
         a = a->refines ? model.find_machine(*a->refines) : nullptr) {
      for (const Variable& v : a->variables) {
        auto [it, fresh] = glue.variables.emplace(v.name, from_type(v.type));
        if (!fresh && a == abstract && !unify(it->second, from_type(v.type))) {
          ck.error(m.span, "TypeError",
                   "variable '" + v.name + "' changes type from " + print_type(v.type) +
                       " in the abstract machine");
        }
      }
    }
    for (const Labeled& l : m.gluing) ck.expect(l.expr, glue, Shape::of(Shape::Kind::Bool));
  }
  if (m.variant) ck.expect(*m.variant, n, Shape::of(Shape::Kind::Int));

  // Initialisation runs against an empty state: only context names are visible.
  Names init_names = n;
  init_names.variables.clear();
  ck.check_assignments(m.initialisation, init_names, m.variables, "init");
  for (const Variable& v : m.variables) {
    bool assigned = false;
    for (const Assignment& a : m.initialisation) assigned |= (a.target == v.name);
    if (!assigned) ck.error(v.span, "UnknownVariable", "variable '" + v.name + "' is not initialised");
  }

  for (const EventDef& ev : m.events) {
    Names local = n;
    for (const Parameter& p : ev.parameters) {
      ck.check_type(p.type, n, p.span);
      if (n.variables.count(p.name) || n.constants.count(p.name) || n.symbols.count(p.name) ||
          n.carriers.count(p.name)) {
        ck.error(p.span, "TypeError",
                 "parameter '" + p.name + "' of event " + ev.name + " shadows another name");
      }
      local.params[p.name] = from_type(p.type);
    }
    for (const Labeled& g : ev.guards) ck.expect(g.expr, local, Shape::of(Shape::Kind::Bool));
    ck.check_assignments(ev.actions, local, m.variables, "event " + ev.name);
    if (ev.refines) {
      if (!abstract) {
        ck.error(ev.span, "UnknownEvent",
                 "event " + ev.name + " refines '" + *ev.refines + "' but the machine refines nothing");
      } else if (!abstract->find_event(*ev.refines)) {
        ck.error(ev.span, "UnknownEvent",
                 "event " + ev.name + " refines unknown abstract event '" + *ev.refines + "'");
      }
    }
  }
  std::set<std::string> listed;
  for (const std::string& p : m.priority) {
    if (!m.find_event(p)) ck.error(m.span, "UnknownEvent", "priority lists unknown event '" + p + "'");
    if (!listed.insert(p).second) ck.error(m.span, "TypeError", "priority lists '" + p + "' twice");
  }
}

}  // namespace

std::vector<Diagnostic> type_check(const Model& model) {
  std::vector<Diagnostic> out;
  for (const ContextDef& c : model.contexts) check_context(model, c, out);
  for (const MachineDef& m : model.machines) check_machine(model, m, out);
  return out;
}

}  // namespace specforge
