#include <cstdlib>
#include <algorithm>

#include "specforge/checker.hpp"

namespace specforge {

std::string_view to_string(ObligationKind k) {
  switch (k) {
    case ObligationKind::INV: return "INV";
    case ObligationKind::DLK: return "DLK";
    case ObligationKind::VAR: return "VAR";
    case ObligationKind::ENB: return "ENB";
    case ObligationKind::GRD_REF: return "GRD_REF";
    case ObligationKind::SIM_REF: return "SIM_REF";
    case ObligationKind::AXM: return "AXM";
    case ObligationKind::INIT: return "INIT";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Proved: return "proved";
    case Verdict::Violated: return "violated";
    case Verdict::BoundExhausted: return "bound-exhausted";
  }
  return "?";
}

ExploreConfig config_from_environment() {
  ExploreConfig cfg;
  if (const char* env = std::getenv("SPECFORGE_MAX_STATES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || env[0] == '-') {
      throw Error(ErrorKind::TypeError,
                  "SPECFORGE_MAX_STATES must be a positive integer, got '" + std::string(env) + "'");
    }
    cfg.max_states = static_cast<std::size_t>(v);
  }
  return cfg;
}

std::optional<std::size_t> ExploreResult::find(const State& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Names the variable an out-of-range action wrote and rebuilds the
// would-be successor with the offending values in place.
BoundsFinding describe_bounds(const Interpreter& m, const State& s, std::size_t from,
                              EventChoice choice, const std::string& message) {
  BoundsFinding f;
  f.from = from;
  f.choice = choice;
  f.message = message;
  auto values = m.action_values(s, choice);
  std::vector<State::Entry> entries(s.begin(), s.end());
  for (const auto& [name, value] : values) {
    for (auto& e : entries) {
      if (e.first == name) e.second = value;
    }
    const Variable* decl = m.machine().find_variable(name);
    if (f.variable.empty() && decl && !conforms(value, decl->type)) f.variable = name;
  }
  if (f.variable.empty()) f.variable = "?";
  f.bad_state = State(std::move(entries));
  return f;
}

}  // namespace

ExploreResult explore(const Interpreter& machine, const ExploreConfig& cfg) {
  ExploreResult r;
  State init;
  try {
    init = machine.initial_state();
  } catch (const Error& e) {
    r.init_error = e.what();
    return r;
  }

  auto add = [&r](State s, std::size_t parent, EventChoice via, std::size_t depth) {
    r.index_.emplace(s, r.states.size());
    r.states.push_back(std::move(s));
    r.parent.push_back(parent);
    r.via.push_back(via);
    r.depth.push_back(depth);
    r.edges.emplace_back();
    r.expanded.push_back(false);
  };
  add(std::move(init), 0, EventChoice{}, 0);

  const std::size_t max_states = std::max<std::size_t>(cfg.max_states, 1);
  std::set<std::string> bounded_vars;
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    auto choices = machine.enabled_choices(r.states[i]);
    if (cfg.max_depth && r.depth[i] >= *cfg.max_depth) {
      if (!choices.empty()) {
        r.bound_exhausted = true;
        continue;
      }
    }
    r.expanded[i] = true;
    std::vector<Transition> out;
    out.reserve(choices.size());
    for (EventChoice c : choices) {
      Transition t{c, Transition::kDropped};
      ++r.transitions;
      std::optional<State> next;
      try {
        next = machine.fire_choice(r.states[i], c);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BoundsViolation && e.kind() != ErrorKind::TypeMismatch) throw;
        BoundsFinding f = describe_bounds(machine, r.states[i], i, c, e.what());
        if (bounded_vars.insert(f.variable).second) r.bounds.push_back(std::move(f));
      }
      if (next) {
        auto it = r.index_.find(*next);
        if (it != r.index_.end()) {
          t.target = it->second;
        } else if (r.states.size() < max_states) {
          t.target = r.states.size();
          add(std::move(*next), i, c, r.depth[i] + 1);
        } else {
          r.bound_exhausted = true;
        }
      }
      out.push_back(t);
    }
    r.edges[i] = std::move(out);
  }
  return r;
}

Counterexample trace_to(const Interpreter& machine, const ExploreResult& r, std::size_t state) {
  std::vector<std::size_t> path;
  for (std::size_t cur = state;; cur = r.parent[cur]) {
    path.push_back(cur);
    if (cur == 0) break;
  }
  Counterexample cx;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (*it == 0) {
      cx.steps.push_back(TraceStep{"INITIALISATION", Binding{}, r.states[0]});
    } else {
      EnabledEvent ev = machine.describe(r.via[*it]);
      cx.steps.push_back(TraceStep{ev.event, ev.binding, r.states[*it]});
    }
  }
  return cx;
}

Counterexample trace_through(const Interpreter& machine, const ExploreResult& r, std::size_t from,
                             EventChoice choice, const State& after) {
  Counterexample cx = trace_to(machine, r, from);
  EnabledEvent ev = machine.describe(choice);
  cx.steps.push_back(TraceStep{ev.event, ev.binding, after});
  return cx;
}

}  // namespace specforge
