#include "specforge/kernel.hpp"

#include <cctype>

namespace specforge {

std::string_view to_string(ExprKind kind) {
  switch (kind) {
    case ExprKind::IntLit: return "IntLit";
    case ExprKind::BoolLit: return "BoolLit";
    case ExprKind::SymbolRef: return "SymbolRef";
    case ExprKind::VarRef: return "VarRef";
    case ExprKind::Not: return "Not";
    case ExprKind::And: return "And";
    case ExprKind::Or: return "Or";
    case ExprKind::Implies: return "Implies";
    case ExprKind::Eq: return "Eq";
    case ExprKind::Neq: return "Neq";
    case ExprKind::Lt: return "Lt";
    case ExprKind::Le: return "Le";
    case ExprKind::Gt: return "Gt";
    case ExprKind::Ge: return "Ge";
    case ExprKind::Add: return "Add";
    case ExprKind::Sub: return "Sub";
    case ExprKind::Mul: return "Mul";
    case ExprKind::In: return "In";
    case ExprKind::SetLit: return "SetLit";
    case ExprKind::Maplet: return "Maplet";
  }
  return "?";
}

bool is_comparison(ExprKind kind) {
  switch (kind) {
    case ExprKind::Eq:
    case ExprKind::Neq:
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Gt:
    case ExprKind::Ge:
    case ExprKind::In: return true;
    default: return false;
  }
}

bool is_binary(ExprKind kind) {
  switch (kind) {
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Implies:
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Maplet: return true;
    default: return is_comparison(kind);
  }
}

Expr Expr::int_lit(std::int64_t v, SourceSpan span) {
  Expr e;
  e.kind_ = ExprKind::IntLit;
  e.payload_ = v;
  e.span_ = std::move(span);
  return e;
}

Expr Expr::bool_lit(bool v, SourceSpan span) {
  Expr e;
  e.kind_ = ExprKind::BoolLit;
  e.payload_ = v;
  e.span_ = std::move(span);
  return e;
}

Expr Expr::symbol_ref(std::string name, SourceSpan span) {
  Expr e;
  e.kind_ = ExprKind::SymbolRef;
  e.payload_ = std::move(name);
  e.span_ = std::move(span);
  return e;
}

Expr Expr::var_ref(std::string name, SourceSpan span) {
  Expr e = symbol_ref(std::move(name), std::move(span));
  e.kind_ = ExprKind::VarRef;
  return e;
}

Expr Expr::unary(ExprKind kind, Expr operand, SourceSpan span) {
  Expr e;
  e.kind_ = kind;
  e.children_.push_back(std::move(operand));
  e.span_ = std::move(span);
  return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs, SourceSpan span) {
  Expr e;
  e.kind_ = kind;
  e.children_.push_back(std::move(lhs));
  e.children_.push_back(std::move(rhs));
  e.span_ = std::move(span);
  return e;
}

Expr Expr::set_lit(std::vector<Expr> elements, SourceSpan span) {
  Expr e;
  e.kind_ = ExprKind::SetLit;
  e.children_ = std::move(elements);
  e.span_ = std::move(span);
  return e;
}

Expr Expr::with_kind(ExprKind kind) const {
  Expr e = *this;
  e.kind_ = kind;
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  return a.kind_ == b.kind_ && a.payload_ == b.payload_ && a.children_ == b.children_;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::optional<std::string> validate(const Expr& e) {
  const std::size_t n = e.children().size();
  switch (e.kind()) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      if (n != 0) return "literal with children";
      break;
    case ExprKind::SymbolRef:
    case ExprKind::VarRef:
      if (n != 0) return "reference with children";
      if (!is_identifier(e.name())) return "malformed identifier '" + e.name() + "'";
      break;
    case ExprKind::Not:
      if (n != 1) return "Not requires exactly one operand";
      break;
    case ExprKind::SetLit: break;
    default:
      if (n != 2) return std::string(to_string(e.kind())) + " requires exactly two operands";
      break;
  }
  for (const Expr& c : e.children()) {
    if (auto err = validate(c)) return err;
  }
  return std::nullopt;
}

}  // namespace specforge
