#include <algorithm>

#include "specforge/checker.hpp"

namespace specforge {

namespace {

constexpr std::size_t kMaxGluingCandidates = std::size_t{1} << 20;

std::string show(const MachineDef& m, const State& s) {
  std::string out;
  for (const auto& [name, value] : printed_state(m, s)) {
    if (!out.empty()) out += ", ";
    out += name + "=" + value;
  }
  return out;
}

bool agrees(const Binding& abstract, const Binding& concrete) {
  for (const auto& [name, value] : abstract) {
    const Value* v = concrete.find(name);
    if (v && !(*v == value)) return false;
  }
  return true;
}

}  // namespace

State glue_state(const Interpreter& concrete, const Interpreter& abstract, const State& c) {
  const MachineDef& am = abstract.machine();
  std::vector<State::Entry> fixed;
  std::vector<const Variable*> free;
  for (const Variable& v : am.variables) {
    if (const Value* value = c.find(v.name)) {
      if (!conforms(*value, v.type)) {
        throw Error(ErrorKind::GluingUnderspecified,
                    "concrete value " + v.name + "=" + print_value(*value) +
                        " lies outside the abstract type " + print_type(v.type));
      }
      fixed.emplace_back(v.name, *value);
    } else {
      free.push_back(&v);
    }
  }

  std::vector<std::vector<Value>> domains;
  std::size_t product = 1;
  for (const Variable* v : free) {
    product *= std::max<std::size_t>(abstract.scope().domain_size(v->type, kMaxGluingCandidates), 1);
    if (product > kMaxGluingCandidates) {
      throw Error(ErrorKind::GluingUnderspecified,
                  "too many abstract candidates to enumerate for the gluing invariant");
    }
    domains.push_back(abstract.scope().domain(v->type));
  }

  std::optional<State> match;
  std::size_t matches = 0;
  std::vector<std::size_t> idx(free.size(), 0);
  const bool empty_domain =
      std::any_of(domains.begin(), domains.end(), [](const auto& d) { return d.empty(); });
  for (bool more = !empty_domain; more;) {
    std::vector<State::Entry> joint(c.begin(), c.end());
    std::vector<State::Entry> candidate = fixed;
    for (std::size_t k = 0; k < free.size(); ++k) {
      joint.emplace_back(free[k]->name, domains[k][idx[k]]);
      candidate.emplace_back(free[k]->name, domains[k][idx[k]]);
    }
    State joint_state(std::move(joint));
    bool ok = true;
    for (const Labeled& g : concrete.machine().gluing) {
      if (!concrete.holds(g.expr, joint_state)) {
        ok = false;
        break;
      }
    }
    if (ok && ++matches == 1) match = State(std::move(candidate));
    std::size_t k = free.size();
    while (k > 0 && ++idx[k - 1] == domains[k - 1].size()) {
      idx[k - 1] = 0;
      --k;
    }
    more = k > 0;
  }
  if (matches != 1) {
    throw Error(ErrorKind::GluingUnderspecified,
                "gluing invariants of " + concrete.machine().name + " admit " +
                    std::to_string(matches) + " abstract states for concrete state {" +
                    show(concrete.machine(), c) + "}");
  }
  return *match;
}

std::vector<Obligation> check_refinement(const Interpreter& concrete, const Interpreter& abstract,
                                         const ExploreResult& r) {
  const MachineDef& cm = concrete.machine();
  const MachineDef& am = abstract.machine();
  const Verdict clean = r.bound_exhausted ? Verdict::BoundExhausted : Verdict::Proved;

  auto make = [&](ObligationKind kind, std::string subject) {
    Obligation o;
    o.kind = kind;
    o.machine = cm.name;
    o.subject = std::move(subject);
    o.verdict = clean;
    return o;
  };

  Obligation init = make(ObligationKind::SIM_REF, "INITIALISATION");
  std::vector<Obligation> grd, sim;
  std::vector<const EventDef*> counterpart;
  for (const EventDef& ev : cm.events) {
    const EventDef* a = abstract_counterpart(ev, am);
    counterpart.push_back(a);
    if (a) grd.push_back(make(ObligationKind::GRD_REF, ev.name));
    sim.push_back(make(ObligationKind::SIM_REF, ev.name));
  }
  Obligation enb = make(ObligationKind::ENB, am.name);

  auto collect = [&]() {
    std::vector<Obligation> out;
    out.push_back(std::move(init));
    std::size_t gi = 0;
    for (std::size_t e = 0; e < cm.events.size(); ++e) {
      if (counterpart[e]) out.push_back(std::move(grd[gi++]));
      out.push_back(std::move(sim[e]));
    }
    out.push_back(std::move(enb));
    return out;
  };
  auto grd_slot = [&](std::size_t e) -> Obligation& {
    std::size_t gi = 0;
    for (std::size_t k = 0; k < e; ++k) gi += counterpart[k] ? 1 : 0;
    return grd[gi];
  };
  auto violate = [](Obligation& o, Counterexample cx, std::string message) {
    o.verdict = Verdict::Violated;
    cx.label = o.subject;
    o.counterexample = std::move(cx);
    o.message = std::move(message);
  };

  if (r.init_error) {
    violate(init, Counterexample{}, *r.init_error);
    return collect();
  }

  std::vector<State> glued;
  glued.reserve(r.states.size());
  for (const State& s : r.states) glued.push_back(glue_state(concrete, abstract, s));

  try {
    State abstract_init = abstract.initial_state();
    if (!(abstract_init == glued[0])) {
      violate(init, trace_to(concrete, r, 0),
              "glued initial state {" + show(am, glued[0]) + "} differs from the abstract {" +
                  show(am, abstract_init) + "}");
    }
  } catch (const Error& e) {
    violate(init, trace_to(concrete, r, 0), std::string("abstract initialisation fails: ") + e.what());
  }

  for (std::size_t i = 0; i < r.states.size(); ++i) {
    if (!r.expanded[i]) continue;
    const State& a = glued[i];
    if (r.edges[i].empty() && enb.verdict != Verdict::Violated) {
      auto abstract_enabled = abstract.enabled_events(a);
      if (!abstract_enabled.empty()) {
        violate(enb, trace_to(concrete, r, i),
                "abstract event " + abstract_enabled.front().event +
                    " is enabled but no concrete event is");
      }
    }
    for (const Transition& t : r.edges[i]) {
      const std::size_t e = t.choice.event;
      const EventDef& ev = cm.events[e];
      const Binding& cb = concrete.binding(t.choice);
      const bool stored = t.target != Transition::kDropped;
      const State& after = stored ? r.states[t.target] : r.states[i];
      auto witness = [&]() {
        return stored ? trace_through(concrete, r, i, t.choice, after) : trace_to(concrete, r, i);
      };

      const EventDef* aev = counterpart[e];
      if (!aev) {
        if (sim[e].verdict == Verdict::Violated) continue;
        if (!ev.convergent()) {
          violate(sim[e], witness(), "new event " + ev.name + " must be convergent");
        } else if (stored && !(glued[t.target] == a)) {
          violate(sim[e], witness(),
                  "new event " + ev.name + " changes the abstract state from {" + show(am, a) +
                      "} to {" + show(am, glued[t.target]) + "}");
        }
        continue;
      }

      Obligation& g = grd_slot(e);
      if (g.verdict == Verdict::Violated && sim[e].verdict == Verdict::Violated) continue;
      bool guard_ok = false, sim_ok = !stored;
      for (const Binding& ab : abstract.bindings(*aev)) {
        if (!agrees(ab, cb) || !abstract.guards_hold(*aev, a, ab)) continue;
        guard_ok = true;
        if (sim_ok) break;
        try {
          const auto aidx = static_cast<std::size_t>(aev - am.events.data());
          const auto& all = abstract.bindings(*aev);
          const auto bidx = static_cast<std::size_t>(&ab - all.data());
          if (abstract.fire_choice(a, EventChoice{aidx, bidx}) == glued[t.target]) sim_ok = true;
        } catch (const Error&) {
          // An abstract bounds violation means this binding cannot simulate.
        }
        if (sim_ok) break;
      }
      if (!guard_ok && g.verdict != Verdict::Violated) {
        violate(g, witness(),
                "abstract event " + aev->name + " is not enabled in the glued state {" +
                    show(am, a) + "}");
      }
      if (!sim_ok && sim[e].verdict != Verdict::Violated) {
        violate(sim[e], witness(),
                "no binding of abstract event " + aev->name + " leads from {" + show(am, a) +
                    "} to the glued successor {" + show(am, glued[t.target]) + "}");
      }
    }
  }
  return collect();
}

}  // namespace specforge
