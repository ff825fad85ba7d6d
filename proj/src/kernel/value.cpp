#include "specforge/kernel.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_set>

namespace specforge {

namespace {

// Process-wide string pool. Node-based storage keeps the returned pointers
// stable for the lifetime of the process.
const std::string* intern(std::string_view s) {
  static std::mutex mu;
  static std::unordered_set<std::string> pool;
  std::lock_guard<std::mutex> lock(mu);
  return &*pool.emplace(s).first;
}

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::BoundsViolation: return "BoundsViolation";
    case ErrorKind::DuplicateAssignment: return "DuplicateAssignment";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::UnboundName: return "UnboundName";
    case ErrorKind::UnknownEvent: return "UnknownEvent";
    case ErrorKind::EventNotEnabled: return "EventNotEnabled";
    case ErrorKind::MissingVariant: return "MissingVariant";
    case ErrorKind::GluingUnderspecified: return "GluingUnderspecified";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::NotInSubset: return "NotInSubset";
    case ErrorKind::ManifestMismatch: return "ManifestMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::string to_string(const SourceSpan& span) {
  std::ostringstream os;
  os << (span.file.empty() ? "<input>" : span.file) << ':' << span.start_line << ':'
     << span.start_column;
  return os.str();
}

Symbol::Symbol(std::string_view name, std::string_view carrier)
    : name_(intern(name)), carrier_(intern(carrier)) {}

Value Value::integer(std::int64_t v) {
  Value out;
  out.rep_ = v;
  return out;
}

Value Value::boolean(bool v) {
  Value out;
  out.rep_ = v;
  return out;
}

Value Value::symbol(std::string_view name, std::string_view carrier) {
  Value out;
  out.rep_ = Symbol(name, carrier);
  return out;
}

Value Value::set(std::vector<Value> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  Value out;
  out.rep_ = std::make_shared<const std::vector<Value>>(std::move(elements));
  return out;
}

Value Value::maplet(Value left, Value right) {
  Value out;
  out.rep_ = std::make_shared<const std::pair<Value, Value>>(std::move(left), std::move(right));
  return out;
}

std::string_view to_string(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::Int: return "integer";
    case Value::Kind::Bool: return "boolean";
    case Value::Kind::Symbol: return "symbol";
    case Value::Kind::Set: return "set";
    case Value::Kind::Maplet: return "maplet";
  }
  return "?";
}

namespace {

[[noreturn]] void kind_error(Value::Kind want, Value::Kind got) {
  throw Error(ErrorKind::TypeError, "expected " + std::string(to_string(want)) + ", got " +
                                        std::string(to_string(got)));
}

}  // namespace

std::int64_t Value::as_int() const {
  if (!is(Kind::Int)) kind_error(Kind::Int, kind());
  return std::get<std::int64_t>(rep_);
}

bool Value::as_bool() const {
  if (!is(Kind::Bool)) kind_error(Kind::Bool, kind());
  return std::get<bool>(rep_);
}

const Symbol& Value::as_symbol() const {
  if (!is(Kind::Symbol)) kind_error(Kind::Symbol, kind());
  return std::get<Symbol>(rep_);
}

std::span<const Value> Value::elements() const {
  if (!is(Kind::Set)) kind_error(Kind::Set, kind());
  return *std::get<SetRep>(rep_);
}

const Value& Value::left() const {
  if (!is(Kind::Maplet)) kind_error(Kind::Maplet, kind());
  return std::get<PairRep>(rep_)->first;
}

const Value& Value::right() const {
  if (!is(Kind::Maplet)) kind_error(Kind::Maplet, kind());
  return std::get<PairRep>(rep_)->second;
}

bool Value::contains(const Value& element) const {
  auto elems = elements();
  return std::binary_search(elems.begin(), elems.end(), element);
}

int compare(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Value::Kind::Int: {
      auto x = std::get<std::int64_t>(a.rep_), y = std::get<std::int64_t>(b.rep_);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case Value::Kind::Bool: {
      int x = std::get<bool>(a.rep_), y = std::get<bool>(b.rep_);
      return x - y;
    }
    case Value::Kind::Symbol: {
      const Symbol& x = std::get<Symbol>(a.rep_);
      const Symbol& y = std::get<Symbol>(b.rep_);
      if (x == y) return 0;
      if (int c = x.name().compare(y.name())) return c < 0 ? -1 : 1;
      int c = x.carrier().compare(y.carrier());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Value::Kind::Set: {
      const auto& x = *std::get<Value::SetRep>(a.rep_);
      const auto& y = *std::get<Value::SetRep>(b.rep_);
      if (&x == &y) return 0;
      for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (int c = compare(x[i], y[i])) return c;
      }
      return x.size() < y.size() ? -1 : (x.size() > y.size() ? 1 : 0);
    }
    case Value::Kind::Maplet: {
      const auto& x = *std::get<Value::PairRep>(a.rep_);
      const auto& y = *std::get<Value::PairRep>(b.rep_);
      if (int c = compare(x.first, y.first)) return c;
      return compare(x.second, y.second);
    }
  }
  return 0;
}

std::size_t Value::hash() const {
  std::size_t h = static_cast<std::size_t>(kind());
  switch (kind()) {
    case Kind::Int: return mix(h, std::hash<std::int64_t>{}(std::get<std::int64_t>(rep_)));
    case Kind::Bool: return mix(h, std::get<bool>(rep_) ? 1 : 2);
    case Kind::Symbol: {
      const Symbol& s = std::get<Symbol>(rep_);
      return mix(mix(h, std::hash<std::string_view>{}(s.name())),
                 std::hash<std::string_view>{}(s.carrier()));
    }
    case Kind::Set:
      for (const Value& e : elements()) h = mix(h, e.hash());
      return h;
    case Kind::Maplet: return mix(mix(h, left().hash()), right().hash());
  }
  return h;
}

bool value_equal(const Value& a, const Value& b) { return a == b; }

namespace {

void print_into(std::ostringstream& os, const Value& v, bool nested_right) {
  switch (v.kind()) {
    case Value::Kind::Int: os << v.as_int(); break;
    case Value::Kind::Bool: os << (v.as_bool() ? "TRUE" : "FALSE"); break;
    case Value::Kind::Symbol: os << v.as_symbol().name(); break;
    case Value::Kind::Set: {
      os << '{';
      bool first = true;
      for (const Value& e : v.elements()) {
        if (!first) os << ", ";
        first = false;
        print_into(os, e, false);
      }
      os << '}';
      break;
    }
    case Value::Kind::Maplet:
      // |-> associates to the left, so a maplet on the right needs parens.
      if (nested_right) os << '(';
      print_into(os, v.left(), false);
      os << " |-> ";
      print_into(os, v.right(), true);
      if (nested_right) os << ')';
      break;
  }
}

}  // namespace

std::string print_value(const Value& v) {
  std::ostringstream os;
  print_into(os, v, false);
  return os.str();
}

// ---------------------------------------------------------------------------

Type Type::integer(std::int64_t lo, std::int64_t hi) {
  Type t;
  t.kind_ = Kind::Int;
  t.lo_ = lo;
  t.hi_ = hi;
  return t;
}

Type Type::boolean() { return Type{}; }

Type Type::carrier(std::string name) {
  Type t;
  t.kind_ = Kind::Symbol;
  t.carrier_ = std::move(name);
  return t;
}

Type Type::set_of(Type element) {
  Type t;
  t.kind_ = Kind::Set;
  t.children_.push_back(std::move(element));
  return t;
}

Type Type::pair(Type left, Type right) {
  Type t;
  t.kind_ = Kind::Pair;
  t.children_.push_back(std::move(left));
  t.children_.push_back(std::move(right));
  return t;
}

bool operator==(const Type& a, const Type& b) {
  return a.kind_ == b.kind_ && a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.carrier_ == b.carrier_ &&
         a.children_ == b.children_;
}

std::string print_type(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Int: return std::to_string(t.lo()) + ".." + std::to_string(t.hi());
    case Type::Kind::Bool: return "BOOL";
    case Type::Kind::Symbol: return t.carrier_name();
    case Type::Kind::Set: return "SET(" + print_type(t.element()) + ")";
    case Type::Kind::Pair: {
      std::string rhs = print_type(t.right());
      if (t.right().kind() == Type::Kind::Pair) rhs = "(" + rhs + ")";
      return print_type(t.left()) + " |-> " + rhs;
    }
  }
  return "?";
}

void check_conforms(const Value& v, const Type& t, std::string_view what) {
  auto mismatch = [&] {
    throw Error(ErrorKind::TypeMismatch, std::string(what) + ": value " + print_value(v) +
                                             " does not match type " + print_type(t));
  };
  switch (t.kind()) {
    case Type::Kind::Int:
      if (!v.is(Value::Kind::Int)) mismatch();
      if (v.as_int() < t.lo() || v.as_int() > t.hi()) {
        throw Error(ErrorKind::BoundsViolation, std::string(what) + ": value " +
                                                    std::to_string(v.as_int()) +
                                                    " outside bounds " + print_type(t));
      }
      return;
    case Type::Kind::Bool:
      if (!v.is(Value::Kind::Bool)) mismatch();
      return;
    case Type::Kind::Symbol:
      if (!v.is(Value::Kind::Symbol) || v.as_symbol().carrier() != t.carrier_name()) mismatch();
      return;
    case Type::Kind::Set:
      if (!v.is(Value::Kind::Set)) mismatch();
      for (const Value& e : v.elements()) check_conforms(e, t.element(), what);
      return;
    case Type::Kind::Pair:
      if (!v.is(Value::Kind::Maplet)) mismatch();
      check_conforms(v.left(), t.left(), what);
      check_conforms(v.right(), t.right(), what);
      return;
  }
}

bool conforms(const Value& v, const Type& t) {
  try {
    check_conforms(v, t, "");
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace specforge
