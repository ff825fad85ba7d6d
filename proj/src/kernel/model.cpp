#include "specforge/kernel.hpp"

#include <algorithm>

namespace specforge {

bool operator==(const EventDef& a, const EventDef& b) {
  return a.name == b.name && a.status == b.status && a.refines == b.refines &&
         a.parameters == b.parameters && a.guards == b.guards && a.actions == b.actions;
}

bool operator==(const ContextDef& a, const ContextDef& b) {
  return a.name == b.name && a.extends == b.extends && a.sets == b.sets &&
         a.constants == b.constants && a.axioms == b.axioms;
}

bool operator==(const MachineDef& a, const MachineDef& b) {
  return a.name == b.name && a.refines == b.refines && a.sees == b.sees &&
         a.variables == b.variables && a.invariants == b.invariants && a.gluing == b.gluing &&
         a.variant == b.variant && a.priority == b.priority &&
         a.initialisation == b.initialisation && a.events == b.events;
}

const EventDef* MachineDef::find_event(std::string_view n) const {
  auto it = std::find_if(events.begin(), events.end(), [&](const EventDef& e) { return e.name == n; });
  return it == events.end() ? nullptr : &*it;
}

const Variable* MachineDef::find_variable(std::string_view n) const {
  auto it = std::find_if(variables.begin(), variables.end(),
                         [&](const Variable& v) { return v.name == n; });
  return it == variables.end() ? nullptr : &*it;
}

bool MachineDef::has_convergent_event() const {
  return std::any_of(events.begin(), events.end(), [](const EventDef& e) { return e.convergent(); });
}

// ---------------------------------------------------------------------------

namespace {

bool entry_less(const State::Entry& a, const State::Entry& b) { return a.first < b.first; }

}  // namespace

State::State(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), entry_less);
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i - 1].first == entries_[i].first) {
      throw Error(ErrorKind::DuplicateAssignment, "variable '" + entries_[i].first +
                                                      "' appears twice in state");
    }
  }
}

const Value* State::find(std::string_view name) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const Entry& e, std::string_view n) { return e.first < n; });
  if (it == entries_.end() || it->first != name) return nullptr;
  return &it->second;
}

const Value& State::at(std::string_view name) const {
  if (const Value* v = find(name)) return *v;
  throw Error(ErrorKind::UnknownVariable, "unknown variable '" + std::string(name) + "'");
}

std::size_t State::hash() const {
  std::size_t h = entries_.size();
  for (const auto& [name, value] : entries_) {
    h ^= value.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool operator<(const State& a, const State& b) {
  return std::lexicographical_compare(
      a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
      [](const State::Entry& x, const State::Entry& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second < y.second;
      });
}

State state_update(const State& s, std::span<const State::Entry> assignments,
                   std::span<const Variable> declarations) {
  State out = s;
  std::vector<std::string_view> seen;
  seen.reserve(assignments.size());
  for (const auto& [name, value] : assignments) {
    auto decl = std::find_if(declarations.begin(), declarations.end(),
                             [&](const Variable& v) { return v.name == name; });
    if (decl == declarations.end()) {
      throw Error(ErrorKind::UnknownVariable, "assignment to undeclared variable '" + name + "'");
    }
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) {
      throw Error(ErrorKind::DuplicateAssignment, "variable '" + name + "' assigned twice");
    }
    seen.push_back(name);
    check_conforms(value, decl->type, name);
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), name,
                               [](const State::Entry& e, const std::string& n) { return e.first < n; });
    if (it != out.entries_.end() && it->first == name) {
      it->second = value;
    } else {
      out.entries_.insert(it, {name, value});
    }
  }
  return out;
}

}  // namespace specforge
