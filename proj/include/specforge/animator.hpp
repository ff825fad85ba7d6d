#pragma once

// Interactive animation: a session steps one machine by firing enabled
// events, keeps an undoable trace, runs scripted scenarios, and can be
// driven over a local JSON/HTTP service.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specforge/eval.hpp"

namespace specforge {

struct TraceEntry {
  EnabledEvent event;
  State state;
};

class Session {
 public:
  /// Starts at the initial state. A failing initialisation throws; an
  /// initial state that violates an invariant opens a flagged session.
  explicit Session(std::shared_ptr<const Interpreter> machine);

  const Interpreter& machine() const { return *machine_; }
  const State& state() const { return state_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  /// True when the initial state violates some invariant.
  bool init_flagged() const { return init_flagged_; }
  const std::vector<std::string>& log() const { return log_; }

  std::vector<std::pair<std::string, bool>> invariant_flags() const;
  std::vector<EnabledEvent> enabled() const;

  /// Throws UnknownEvent or EventNotEnabled; the session is unchanged then.
  void fire(const EnabledEvent& ev);
  /// Throws EmptyTrace.
  void undo();
  void reset();
  void note(std::string line) { log_.push_back(std::move(line)); }

  /// The state obtained by replaying the trace from the initial state.
  State replay() const;

 private:
  std::shared_ptr<const Interpreter> machine_;
  State initial_;
  State state_;
  std::vector<TraceEntry> trace_;
  std::vector<std::string> log_;
  bool init_flagged_ = false;
};

/// Builds a binding for an event from textual parameter values. Each text is
/// an expression evaluated in `s` (so symbols, literals and variables work).
/// Throws UnknownEvent, EventNotEnabled (unknown or missing parameter, value
/// outside the parameter's type) or the evaluator's errors.
Binding make_binding(const Interpreter& m, const std::string& event,
                     const std::vector<std::pair<std::string, std::string>>& args, const State& s);

struct ScenarioStep {
  enum class Kind { Fire, Assert };

  Kind kind = Kind::Fire;
  int line = 0;
  std::string event;
  std::vector<std::pair<std::string, std::string>> args;
  std::string label;
  std::optional<Expr> predicate;
};

struct Scenario {
  std::string name;
  std::vector<ScenarioStep> steps;
};

struct ScenarioParse {
  std::optional<Scenario> scenario;
  std::vector<Diagnostic> diagnostics;
};

/// `.scn` text: one step per line, `fire event [p=value ...]` or
/// `assert label: expression`; `//` starts a comment.
ScenarioParse parse_scenario(std::string_view text, std::string name, std::string_view file_name = {});
/// Parses the file; the scenario name is the file stem. Throws Io.
ScenarioParse load_scenario(const std::filesystem::path& path);

struct ScenarioReport {
  std::string name;
  bool passed = true;
  /// 1-based index of the failing step; 0 when passed.
  std::size_t failed_step = 0;
  int failed_line = 0;
  std::string reason;
  std::size_t steps_run = 0;
};

/// Runs from the session's initial state; the session is left at the state
/// the run reached. Failures are reported, never thrown.
ScenarioReport run_scenario(Session& session, const Scenario& sc);
ScenarioReport run_scenario(std::shared_ptr<const Interpreter> machine, const Scenario& sc);

nlohmann::ordered_json state_payload(const Session& session);
nlohmann::ordered_json machine_payload(const Interpreter& m, const std::vector<std::string>& scenarios);
nlohmann::ordered_json trace_payload(const Session& session);
nlohmann::ordered_json to_json(const ScenarioReport& report);

/// Binding from a JSON object; numbers and booleans map directly, strings
/// are parsed as expressions.
Binding binding_from_json(const Interpreter& m, const std::string& event, const nlohmann::json& j,
                          const State& s);

/// Single-session HTTP front end. Requests are handled one at a time.
class AnimatorService {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = 7077;
    std::optional<std::filesystem::path> ui_dir;
    std::map<std::string, Scenario> scenarios;
  };

  AnimatorService(std::shared_ptr<const Interpreter> machine, Options options);
  ~AnimatorService();
  AnimatorService(const AnimatorService&) = delete;
  AnimatorService& operator=(const AnimatorService&) = delete;

  /// Binds the socket; returns the bound port, or nullopt if it is taken.
  /// Port 0 asks the OS for a free port.
  std::optional<int> bind();
  /// Serves until stop(); call after a successful bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace specforge
