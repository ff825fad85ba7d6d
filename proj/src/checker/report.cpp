#include <iomanip>
#include <sstream>

#include "specforge/checker.hpp"

namespace specforge {

using nlohmann::ordered_json;

namespace {

ordered_json state_json(const MachineDef& m, const State& s) {
  ordered_json out = ordered_json::object();
  for (const auto& [name, value] : printed_state(m, s)) out[name] = value;
  return out;
}

ordered_json binding_json(const Binding& b) {
  ordered_json out = ordered_json::object();
  for (const auto& [name, value] : b) out[name] = print_value(value);
  return out;
}

}  // namespace

ordered_json to_json(const Counterexample& cx, const MachineDef& m) {
  ordered_json steps = ordered_json::array();
  for (const TraceStep& step : cx.steps) {
    steps.push_back({{"event", step.event},
                     {"binding", binding_json(step.binding)},
                     {"state", state_json(m, step.state)}});
  }
  return steps;
}

ordered_json to_json(const CheckReport& report, const MachineDef& m) {
  ordered_json out;
  out["machine"] = report.machine;
  if (report.refines) out["refines"] = *report.refines;
  ordered_json obligations = ordered_json::array();
  for (const Obligation& o : report.obligations) {
    ordered_json j;
    j["kind"] = to_string(o.kind);
    j["subject"] = o.subject;
    j["verdict"] = to_string(o.verdict);
    if (o.counterexample) {
      j["depth"] = o.counterexample->depth();
      if (!o.counterexample->steps.empty()) j["trace"] = to_json(*o.counterexample, m);
    }
    if (!o.message.empty()) j["message"] = o.message;
    obligations.push_back(std::move(j));
  }
  out["obligations"] = std::move(obligations);
  out["states_explored"] = report.states_explored;
  out["transitions"] = report.transitions;
  out["bound_exhausted"] = report.bound_exhausted;
  out["max_states"] = report.max_states;
  if (report.max_depth) out["max_depth"] = *report.max_depth;
  return out;
}

std::string format_text(const CheckReport& report, const MachineDef& m) {
  std::ostringstream os;
  os << "machine " << report.machine;
  if (report.refines) os << " refines " << *report.refines;
  os << '\n';
  std::size_t width = 7;
  for (const Obligation& o : report.obligations) width = std::max(width, o.subject.size());
  for (const Obligation& o : report.obligations) {
    os << "  " << std::left << std::setw(8) << to_string(o.kind) << ' ' << std::setw(static_cast<int>(width))
       << o.subject << "  " << to_string(o.verdict);
    if (o.counterexample && o.verdict == Verdict::Violated) {
      os << " (depth " << o.counterexample->depth() << ')';
    }
    os << '\n';
    if (!o.message.empty()) os << "      " << o.message << '\n';
    if (o.verdict != Verdict::Violated || !o.counterexample) continue;
    std::size_t n = 0;
    for (const TraceStep& step : o.counterexample->steps) {
      os << "      " << n++ << ": " << step.event;
      if (!step.binding.empty()) os << " [" << print_binding(step.binding) << ']';
      os << '\n';
      for (const auto& [name, value] : printed_state(m, step.state)) {
        os << "           " << name << '=' << value << '\n';
      }
    }
  }
  os << "states explored: " << report.states_explored << ", transitions: " << report.transitions
     << ", max states: " << report.max_states;
  if (report.max_depth) os << ", max depth: " << *report.max_depth;
  os << (report.bound_exhausted ? ", bound exhausted" : ", exhaustive") << '\n';
  return os.str();
}

}  // namespace specforge
