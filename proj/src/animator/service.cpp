#include <mutex>

#include <httplib.h>

#include "specforge/animator.hpp"

namespace specforge {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json binding_json(const Binding& b) {
  ordered_json out = ordered_json::object();
  for (const auto& [name, value] : b) out[name] = print_value(value);
  return out;
}

ordered_json state_json(const MachineDef& m, const State& s) {
  ordered_json out = ordered_json::object();
  for (const auto& [name, value] : printed_state(m, s)) out[name] = value;
  return out;
}

ordered_json declarations(const std::vector<Variable>& vars) {
  ordered_json out = ordered_json::array();
  for (const Variable& v : vars) out.push_back({{"name", v.name}, {"type", print_type(v.type)}});
  return out;
}

ordered_json labeled(const std::vector<Labeled>& items) {
  ordered_json out = ordered_json::array();
  for (const Labeled& l : items) out.push_back({{"label", l.label}, {"expr", pretty_print(l.expr)}});
  return out;
}

}  // namespace

ordered_json state_payload(const Session& session) {
  const MachineDef& m = session.machine().machine();
  ordered_json out;
  out["state"] = state_json(m, session.state());
  ordered_json flags = ordered_json::object();
  for (const auto& [label, ok] : session.invariant_flags()) flags[label] = ok;
  out["invariant_flags"] = std::move(flags);
  const Value* alarm = session.state().find("alarm");
  out["alarm"] = alarm ? json(print_value(*alarm)) : json(nullptr);
  ordered_json enabled = ordered_json::array();
  for (const EnabledEvent& ev : session.enabled()) {
    enabled.push_back({{"event", ev.event}, {"binding", binding_json(ev.binding)}});
  }
  out["enabled"] = std::move(enabled);
  out["trace_len"] = session.trace().size();
  out["init_flagged"] = session.init_flagged();
  return out;
}

ordered_json machine_payload(const Interpreter& interp, const std::vector<std::string>& scenarios) {
  const MachineDef& m = interp.machine();
  ordered_json out;
  out["name"] = m.name;
  out["refines"] = m.refines ? json(*m.refines) : json(nullptr);
  out["sees"] = m.sees;
  out["variables"] = declarations(m.variables);
  out["invariants"] = labeled(m.invariants);
  ordered_json events = ordered_json::array();
  for (const EventDef& ev : m.events) {
    events.push_back({{"name", ev.name},
                      {"status", ev.convergent() ? "convergent" : "ordinary"},
                      {"parameters", declarations(ev.parameters)},
                      {"guards", labeled(ev.guards)}});
  }
  out["events"] = std::move(events);
  out["scenarios"] = scenarios;
  return out;
}

ordered_json trace_payload(const Session& session) {
  const MachineDef& m = session.machine().machine();
  ordered_json out = ordered_json::array();
  for (const TraceEntry& step : session.trace()) {
    out.push_back({{"event", step.event.event},
                   {"binding", binding_json(step.event.binding)},
                   {"state", state_json(m, step.state)}});
  }
  return out;
}

ordered_json to_json(const ScenarioReport& report) {
  ordered_json out;
  out["name"] = report.name;
  out["result"] = report.passed ? "pass" : "fail";
  out["passed"] = report.passed;
  out["steps_run"] = report.steps_run;
  if (!report.passed) {
    out["failed_step"] = report.failed_step;
    out["failed_line"] = report.failed_line;
    out["reason"] = report.reason;
  }
  return out;
}

Binding binding_from_json(const Interpreter& m, const std::string& event, const json& j,
                          const State& s) {
  std::vector<std::pair<std::string, std::string>> args;
  if (!j.is_null()) {
    if (!j.is_object()) throw Error(ErrorKind::TypeError, "binding must be a JSON object");
    for (const auto& [name, value] : j.items()) {
      if (value.is_string()) {
        args.emplace_back(name, value.get<std::string>());
      } else if (value.is_boolean()) {
        args.emplace_back(name, value.get<bool>() ? "TRUE" : "FALSE");
      } else if (value.is_number_integer()) {
        args.emplace_back(name, std::to_string(value.get<std::int64_t>()));
      } else {
        throw Error(ErrorKind::TypeError, "parameter '" + name + "' must be an integer, boolean or string");
      }
    }
  }
  return make_binding(m, event, args, s);
}

struct AnimatorService::Impl {
  std::shared_ptr<const Interpreter> machine;
  Options options;
  Session session;
  std::mutex mutex;
  httplib::Server server;

  Impl(std::shared_ptr<const Interpreter> m, Options o)
      : machine(m), options(std::move(o)), session(std::move(m)) {}

  static void reply(httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void error(httplib::Response& res, int status, std::string_view kind, const std::string& message) {
    reply(res, status, ordered_json{{"error", kind}, {"message", message}});
  }

  static int status_for(ErrorKind kind) {
    switch (kind) {
      case ErrorKind::UnknownEvent: return 404;
      case ErrorKind::EventNotEnabled:
      case ErrorKind::EmptyTrace: return 409;
      case ErrorKind::BoundsViolation: return 422;
      default: return 400;
    }
  }

  // Runs a handler under the session lock and maps errors to JSON replies.
  template <typename F>
  httplib::Server::Handler locked(F f) {
    return [this, f](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard<std::mutex> lock(mutex);
      try {
        f(req, res);
      } catch (const Error& e) {
        error(res, status_for(e.kind()), to_string(e.kind()), e.what());
      } catch (const json::exception& e) {
        error(res, 400, "BadRequest", e.what());
      }
    };
  }

  void routes() {
    server.Get("/api/machine", locked([this](const httplib::Request&, httplib::Response& res) {
      std::vector<std::string> names;
      for (const auto& [name, sc] : options.scenarios) names.push_back(name);
      reply(res, 200, machine_payload(*machine, names));
    }));
    server.Get("/api/state", locked([this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, state_payload(session));
    }));
    server.Post("/api/fire", locked([this](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body);
      if (!body.is_object() || !body.contains("event") || !body["event"].is_string()) {
        error(res, 400, "BadRequest", "expected {\"event\": name, \"binding\": {...}}");
        return;
      }
      const std::string event = body["event"].get<std::string>();
      Binding b = binding_from_json(*machine, event, body.value("binding", json(nullptr)), session.state());
      session.fire(EnabledEvent{event, b});
      reply(res, 200, state_payload(session));
    }));
    server.Post("/api/undo", locked([this](const httplib::Request&, httplib::Response& res) {
      session.undo();
      reply(res, 200, state_payload(session));
    }));
    server.Post("/api/reset", locked([this](const httplib::Request&, httplib::Response& res) {
      session.reset();
      reply(res, 200, state_payload(session));
    }));
    server.Get("/api/trace", locked([this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, trace_payload(session));
    }));
    server.Post("/api/scenario/run", locked([this](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body);
      const std::string name = body.value("name", std::string());
      auto it = options.scenarios.find(name);
      if (it == options.scenarios.end()) {
        error(res, 404, "UnknownScenario", "no scenario named '" + name + "'");
        return;
      }
      ScenarioReport report = run_scenario(session, it->second);
      ordered_json out = to_json(report);
      out["state"] = state_payload(session);
      reply(res, 200, out);
    }));
    if (options.ui_dir) server.set_mount_point("/", options.ui_dir->string());
  }
};

AnimatorService::AnimatorService(std::shared_ptr<const Interpreter> machine, Options options)
    : impl_(std::make_unique<Impl>(std::move(machine), std::move(options))) {
  impl_->routes();
}

AnimatorService::~AnimatorService() { stop(); }

std::optional<int> AnimatorService::bind() {
  if (impl_->options.port == 0) {
    int port = impl_->server.bind_to_any_port(impl_->options.host);
    if (port <= 0) return std::nullopt;
    return port;
  }
  if (!impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) return std::nullopt;
  return impl_->options.port;
}

void AnimatorService::serve() { impl_->server.listen_after_bind(); }

void AnimatorService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace specforge
