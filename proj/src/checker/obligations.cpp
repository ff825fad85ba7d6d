#include "specforge/checker.hpp"

namespace specforge {

namespace {

Obligation make(ObligationKind kind, const Interpreter& m, std::string subject) {
  Obligation o;
  o.kind = kind;
  o.machine = m.machine().name;
  o.subject = std::move(subject);
  return o;
}

Verdict unviolated(const ExploreResult& r) {
  return r.bound_exhausted ? Verdict::BoundExhausted : Verdict::Proved;
}

bool state_free(const Interpreter& m, const Expr& e) {
  bool free = true;
  for_each_var(e, [&](const std::string& n) {
    if (m.machine().find_variable(n)) free = false;
  });
  return free;
}

// Invariant truth with evaluation faults folded into a message.
bool holds_or_explain(const Interpreter& m, const Expr& e, const State& s, std::string& why) {
  try {
    return m.holds(e, s);
  } catch (const Error& err) {
    why = err.what();
    return false;
  }
}

Counterexample empty_witness(std::string label) {
  Counterexample cx;
  cx.label = std::move(label);
  return cx;
}

}  // namespace

std::vector<Obligation> check_axioms(const Interpreter& machine) {
  std::vector<Obligation> out;
  for (const Labeled& ax : machine.scope().context().axioms) {
    Obligation o = make(ObligationKind::AXM, machine, ax.label);
    std::string why;
    if (!holds_or_explain(machine, ax.expr, State{}, why)) {
      o.verdict = Verdict::Violated;
      o.counterexample = empty_witness(ax.label);
      o.message = why.empty() ? "axiom " + ax.label + " is false" : why;
    }
    out.push_back(std::move(o));
  }
  return out;
}

Obligation check_init(const Interpreter& machine) {
  Obligation o = make(ObligationKind::INIT, machine, "INITIALISATION");
  State init;
  try {
    init = machine.initial_state();
  } catch (const Error& e) {
    o.verdict = Verdict::Violated;
    o.counterexample = empty_witness("INITIALISATION");
    o.message = e.what();
    return o;
  }
  for (const Labeled& inv : machine.machine().invariants) {
    std::string why;
    if (!holds_or_explain(machine, inv.expr, init, why)) {
      o.verdict = Verdict::Violated;
      Counterexample cx;
      cx.steps.push_back(TraceStep{"INITIALISATION", Binding{}, init});
      cx.label = inv.label;
      o.counterexample = std::move(cx);
      o.message = "initial state violates " + inv.label + (why.empty() ? "" : ": " + why);
      break;
    }
  }
  return o;
}

std::vector<Obligation> check_invariants(const Interpreter& machine, const ExploreResult& r) {
  std::vector<Obligation> out;
  for (const Labeled& inv : machine.machine().invariants) {
    Obligation o = make(ObligationKind::INV, machine, inv.label);
    if (r.init_error) {
      o.verdict = Verdict::Violated;
      o.counterexample = empty_witness(inv.label);
      o.message = *r.init_error;
      out.push_back(std::move(o));
      continue;
    }
    o.verdict = unviolated(r);
    const bool only_init = state_free(machine, inv.expr);
    const std::size_t n = only_init ? 1 : r.states.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::string why;
      if (!holds_or_explain(machine, inv.expr, r.states[i], why)) {
        o.verdict = Verdict::Violated;
        o.counterexample = trace_to(machine, r, i);
        o.counterexample->label = inv.label;
        if (!why.empty()) o.message = why;
        break;
      }
    }
    if (only_init && o.verdict != Verdict::Violated) o.verdict = Verdict::Proved;
    out.push_back(std::move(o));
  }
  for (const BoundsFinding& f : r.bounds) {
    Obligation o = make(ObligationKind::INV, machine, "bounds:" + f.variable);
    o.verdict = Verdict::Violated;
    o.counterexample = trace_through(machine, r, f.from, f.choice, f.bad_state);
    o.counterexample->label = o.subject;
    o.message = f.message;
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Obligation> check_invariants(const Interpreter& machine, const ExploreConfig& cfg) {
  bool all_free = true;
  for (const Labeled& inv : machine.machine().invariants) all_free &= state_free(machine, inv.expr);
  if (all_free) {
    // Nothing depends on the state: the initial state decides every verdict.
    ExploreConfig init_only = cfg;
    init_only.max_depth = 0;
    ExploreResult r = explore(machine, init_only);
    r.bound_exhausted = false;
    return check_invariants(machine, r);
  }
  return check_invariants(machine, explore(machine, cfg));
}

Obligation check_deadlock(const Interpreter& machine, const ExploreResult& r) {
  Obligation o = make(ObligationKind::DLK, machine, machine.machine().name);
  if (r.init_error) {
    o.verdict = Verdict::Violated;
    o.counterexample = empty_witness("deadlock");
    o.message = *r.init_error;
    return o;
  }
  o.verdict = unviolated(r);
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    if (r.expanded[i] && r.edges[i].empty()) {
      o.verdict = Verdict::Violated;
      o.counterexample = trace_to(machine, r, i);
      o.counterexample->label = "deadlock";
      o.message = "no event is enabled";
      break;
    }
  }
  return o;
}

std::vector<Obligation> check_variant(const Interpreter& machine, const ExploreResult& r) {
  const MachineDef& m = machine.machine();
  std::vector<Obligation> out;
  if (!m.has_convergent_event()) return out;
  if (!m.variant) {
    throw Error(ErrorKind::MissingVariant,
                "machine " + m.name + " has convergent events but declares no variant");
  }
  std::vector<std::optional<std::int64_t>> cache(r.states.size());
  auto variant_at = [&](std::size_t i) {
    if (!cache[i]) cache[i] = machine.eval(*m.variant, r.states[i]).as_int();
    return *cache[i];
  };
  for (std::size_t e = 0; e < m.events.size(); ++e) {
    if (!m.events[e].convergent()) continue;
    Obligation o = make(ObligationKind::VAR, machine, m.events[e].name);
    o.verdict = r.init_error ? Verdict::Proved : unviolated(r);
    for (std::size_t i = 0; i < r.states.size() && o.verdict != Verdict::Violated; ++i) {
      for (const Transition& t : r.edges[i]) {
        if (t.choice.event != e || t.target == Transition::kDropped) continue;
        const std::int64_t before = variant_at(i);
        const std::int64_t after = variant_at(t.target);
        if (before >= 0 && after < before) continue;
        o.verdict = Verdict::Violated;
        o.counterexample = trace_through(machine, r, i, t.choice, r.states[t.target]);
        o.counterexample->label = o.subject;
        o.message = before < 0 ? "variant is negative (" + std::to_string(before) + ") before the event"
                               : "variant does not decrease: " + std::to_string(before) + " -> " +
                                     std::to_string(after);
        break;
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

bool CheckReport::any_violated() const {
  for (const Obligation& o : obligations) {
    if (o.verdict == Verdict::Violated) return true;
  }
  return false;
}

int CheckReport::exit_code() const {
  if (any_violated()) return 1;
  for (const Obligation& o : obligations) {
    if (o.verdict == Verdict::BoundExhausted) return 2;
  }
  return bound_exhausted ? 2 : 0;
}

const Obligation* CheckReport::find(ObligationKind kind, std::string_view subject) const {
  for (const Obligation& o : obligations) {
    if (o.kind == kind && o.subject == subject) return &o;
  }
  return nullptr;
}

CheckReport check_machine(const Model& model, const MachineDef& machine, const ExploreConfig& cfg,
                          const MachineDef* abstract) {
  Interpreter concrete(model, machine);
  CheckReport report;
  report.machine = machine.name;
  report.max_states = cfg.max_states;
  report.max_depth = cfg.max_depth;
  auto append = [&report](std::vector<Obligation> obs) {
    for (Obligation& o : obs) report.obligations.push_back(std::move(o));
  };

  if (cfg.wants(ObligationKind::AXM)) append(check_axioms(concrete));
  if (cfg.wants(ObligationKind::INIT)) report.obligations.push_back(check_init(concrete));

  ExploreResult r = explore(concrete, cfg);
  report.states_explored = r.states.size();
  report.transitions = r.transitions;
  report.bound_exhausted = r.bound_exhausted;

  if (cfg.wants(ObligationKind::INV)) append(check_invariants(concrete, r));
  if (cfg.wants(ObligationKind::DLK)) report.obligations.push_back(check_deadlock(concrete, r));
  if (cfg.wants(ObligationKind::VAR)) append(check_variant(concrete, r));
  if (abstract) {
    report.refines = abstract->name;
    Interpreter abs(model, *abstract);
    std::vector<Obligation> ref = check_refinement(concrete, abs, r);
    for (Obligation& o : ref) {
      if (cfg.wants(o.kind)) report.obligations.push_back(std::move(o));
    }
  }
  return report;
}

}  // namespace specforge
