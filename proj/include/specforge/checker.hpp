#pragma once

// Bounded explicit-state verification. Every obligation is discharged by
// breadth-first exploration of the reachable states; "proved" means "holds
// on every state reached within the configured bounds".

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "specforge/eval.hpp"

namespace specforge {

enum class ObligationKind { INV, DLK, VAR, ENB, GRD_REF, SIM_REF, AXM, INIT };
enum class Verdict { Proved, Violated, BoundExhausted };

std::string_view to_string(ObligationKind k);
std::string_view to_string(Verdict v);

struct TraceStep {
  std::string event;  // "INITIALISATION" for the first step
  Binding binding;
  State state;
};

struct Counterexample {
  /// Starts at the initial state; each later step is one fired event.
  std::vector<TraceStep> steps;
  std::string label;

  std::size_t depth() const { return steps.empty() ? 0 : steps.size() - 1; }
  const State& final_state() const { return steps.back().state; }
};

struct Obligation {
  ObligationKind kind = ObligationKind::INV;
  std::string machine;
  std::string subject;
  Verdict verdict = Verdict::Proved;
  std::optional<Counterexample> counterexample;
  std::string message;
};

struct ExploreConfig {
  static constexpr std::size_t kDefaultMaxStates = 1'000'000;

  std::size_t max_states = kDefaultMaxStates;
  std::optional<std::size_t> max_depth;
  /// Obligation kinds to discharge; empty means all that apply.
  std::set<ObligationKind> checks;

  bool wants(ObligationKind k) const { return checks.empty() || checks.count(k) > 0; }
};

/// max_states from SPECFORGE_MAX_STATES when set, else the default. Throws
/// TypeError when the variable is not a positive integer.
ExploreConfig config_from_environment();

struct Transition {
  static constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max();

  EventChoice choice;
  /// Index of the successor, or kDropped when the successor was not stored
  /// (bounds violation or state budget exhausted).
  std::size_t target = kDropped;
};

/// An action that drove a variable outside its declared type.
struct BoundsFinding {
  std::size_t from = 0;
  EventChoice choice;
  std::string variable;
  /// The would-be successor, holding the offending value.
  State bad_state;
  std::string message;
};

struct ExploreResult {
  /// Reachable states in breadth-first discovery order; index 0 is init.
  std::vector<State> states;
  std::vector<std::size_t> parent;
  std::vector<EventChoice> via;
  std::vector<std::size_t> depth;
  std::vector<std::vector<Transition>> edges;
  /// False for states left unexpanded by the depth bound.
  std::vector<bool> expanded;
  std::size_t transitions = 0;
  bool bound_exhausted = false;
  /// First finding per variable, in breadth-first order.
  std::vector<BoundsFinding> bounds;
  /// Set when the initialisation itself fails; states is then empty.
  std::optional<std::string> init_error;

  std::optional<std::size_t> find(const State& s) const;

 private:
  friend ExploreResult explore(const Interpreter&, const ExploreConfig&);
  std::unordered_map<State, std::size_t, StateHash> index_;
};

ExploreResult explore(const Interpreter& machine, const ExploreConfig& cfg);

/// Path from init to the given state through the parent links.
Counterexample trace_to(const Interpreter& machine, const ExploreResult& r, std::size_t state);
/// trace_to(from) extended by one more step.
Counterexample trace_through(const Interpreter& machine, const ExploreResult& r,
                             std::size_t from, EventChoice choice, const State& after);

std::vector<Obligation> check_axioms(const Interpreter& machine);
/// INIT: the initial state exists and satisfies every invariant.
Obligation check_init(const Interpreter& machine);
/// One INV per invariant, plus one INV "bounds:<var>" per bounds finding.
std::vector<Obligation> check_invariants(const Interpreter& machine, const ExploreResult& r);
std::vector<Obligation> check_invariants(const Interpreter& machine, const ExploreConfig& cfg);
Obligation check_deadlock(const Interpreter& machine, const ExploreResult& r);
/// One VAR per convergent event. Throws MissingVariant.
std::vector<Obligation> check_variant(const Interpreter& machine, const ExploreResult& r);

/// Maps a concrete state to the unique abstract state allowed by the gluing
/// invariants. Throws GluingUnderspecified when there is none or several.
State glue_state(const Interpreter& concrete, const Interpreter& abstract, const State& c);

/// GRD_REF and SIM_REF per concrete event (SIM_REF also for the
/// initialisation) and one ENB. Throws GluingUnderspecified.
std::vector<Obligation> check_refinement(const Interpreter& concrete, const Interpreter& abstract,
                                         const ExploreResult& r);

struct CheckReport {
  std::string machine;
  std::optional<std::string> refines;
  std::vector<Obligation> obligations;
  std::size_t states_explored = 0;
  std::size_t transitions = 0;
  bool bound_exhausted = false;
  std::size_t max_states = 0;
  std::optional<std::size_t> max_depth;

  bool any_violated() const;
  /// 0 all proved, 1 any violated, 2 bound-exhausted only.
  int exit_code() const;
  const Obligation* find(ObligationKind kind, std::string_view subject) const;
};

/// Runs every requested obligation on one machine of a type-checked model.
/// With `abstract` set, also checks refinement against that machine.
/// Throws MissingVariant and GluingUnderspecified.
CheckReport check_machine(const Model& model, const MachineDef& machine, const ExploreConfig& cfg,
                          const MachineDef* abstract = nullptr);

nlohmann::ordered_json to_json(const Counterexample& cx, const MachineDef& m);
nlohmann::ordered_json to_json(const CheckReport& report, const MachineDef& m);
std::string format_text(const CheckReport& report, const MachineDef& m);

}  // namespace specforge
