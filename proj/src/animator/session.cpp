#include "specforge/animator.hpp"

namespace specforge {

Session::Session(std::shared_ptr<const Interpreter> machine)
    : machine_(std::move(machine)), initial_(machine_->initial_state()), state_(initial_) {
  for (const auto& [label, ok] : invariant_flags()) init_flagged_ |= !ok;
}

std::vector<std::pair<std::string, bool>> Session::invariant_flags() const {
  std::vector<std::pair<std::string, bool>> out;
  for (const Labeled& inv : machine_->machine().invariants) {
    bool ok = false;
    try {
      ok = machine_->holds(inv.expr, state_);
    } catch (const Error&) {
      ok = false;
    }
    out.emplace_back(inv.label, ok);
  }
  return out;
}

std::vector<EnabledEvent> Session::enabled() const { return machine_->enabled_events(state_); }

void Session::fire(const EnabledEvent& ev) {
  State next = machine_->fire_event(state_, ev);
  trace_.push_back(TraceEntry{ev, next});
  state_ = std::move(next);
}

void Session::undo() {
  if (trace_.empty()) throw Error(ErrorKind::EmptyTrace, "nothing to undo");
  trace_.pop_back();
  state_ = replay();
}

void Session::reset() {
  trace_.clear();
  state_ = initial_;
}

State Session::replay() const {
  State s = initial_;
  for (const TraceEntry& step : trace_) s = machine_->fire_event(s, step.event);
  return s;
}

Binding make_binding(const Interpreter& m, const std::string& event,
                     const std::vector<std::pair<std::string, std::string>>& args, const State& s) {
  const EventDef* def = m.machine().find_event(event);
  if (!def) throw Error(ErrorKind::UnknownEvent, "unknown event '" + event + "'");
  std::vector<Binding::Entry> entries;
  for (const Parameter& p : def->parameters) {
    const std::string* text = nullptr;
    for (const auto& [name, value] : args) {
      if (name == p.name) text = &value;
    }
    if (!text) {
      throw Error(ErrorKind::EventNotEnabled,
                  "event '" + event + "' needs a value for parameter '" + p.name + "'");
    }
    std::vector<Diagnostic> diags;
    auto expr = parse_expression(*text, "<binding>", diags);
    if (!expr) {
      throw Error(ErrorKind::TypeError, "parameter '" + p.name + "': " +
                                            (diags.empty() ? "bad value" : diags.front().message));
    }
    Value v = m.eval(*expr, s);
    if (!conforms(v, p.type)) {
      throw Error(ErrorKind::EventNotEnabled, "parameter '" + p.name + "' = " + print_value(v) +
                                                  " is outside " + print_type(p.type));
    }
    entries.emplace_back(p.name, std::move(v));
  }
  for (const auto& [name, value] : args) {
    bool known = false;
    for (const Parameter& p : def->parameters) known |= (p.name == name);
    if (!known) {
      throw Error(ErrorKind::EventNotEnabled, "event '" + event + "' has no parameter '" + name + "'");
    }
  }
  return Binding(std::move(entries));
}

}  // namespace specforge
