#include <sstream>

#include "specforge/animator.hpp"

namespace specforge {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ScenarioParse parse_scenario(std::string_view text, std::string name, std::string_view file_name) {
  ScenarioParse out;
  Scenario sc;
  sc.name = std::move(name);
  const std::string file = file_name.empty() ? sc.name + ".scn" : std::string(file_name);
  auto fail = [&](int line, std::string message) {
    SourceSpan span{file, line, 1, line, 1};
    out.diagnostics.push_back(Diagnostic{Diagnostic::Severity::Error, std::move(message), span});
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto c = raw.find("//"); c != std::string_view::npos) raw = raw.substr(0, c);
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    ScenarioStep step;
    step.line = line_no;
    if (line.rfind("fire", 0) == 0 && (line.size() == 4 || line[4] == ' ' || line[4] == '\t')) {
      std::istringstream words{std::string(line.substr(4))};
      std::string word;
      if (!(words >> step.event) || !is_identifier(step.event)) {
        fail(line_no, "expected an event name after 'fire'");
        continue;
      }
      bool ok = true;
      while (words >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == word.size() ||
            !is_identifier(word.substr(0, eq))) {
          fail(line_no, "expected 'parameter=value', found '" + word + "'");
          ok = false;
          break;
        }
        step.args.emplace_back(word.substr(0, eq), word.substr(eq + 1));
      }
      if (!ok) continue;
      step.kind = ScenarioStep::Kind::Fire;
    } else if (line.rfind("assert", 0) == 0 && (line.size() > 6 && (line[6] == ' ' || line[6] == '\t'))) {
      std::string_view rest = trim(line.substr(6));
      const auto colon = rest.find(':');
      if (colon == std::string_view::npos || !is_identifier(trim(rest.substr(0, colon)))) {
        fail(line_no, "expected 'assert label: expression'");
        continue;
      }
      step.kind = ScenarioStep::Kind::Assert;
      step.label = std::string(trim(rest.substr(0, colon)));
      std::vector<Diagnostic> diags;
      step.predicate = parse_expression(rest.substr(colon + 1), file, diags);
      if (!step.predicate) {
        fail(line_no, diags.empty() ? "malformed assertion" : diags.front().message);
        continue;
      }
    } else {
      fail(line_no, "expected 'fire' or 'assert'");
      continue;
    }
    sc.steps.push_back(std::move(step));
  }
  if (out.diagnostics.empty()) out.scenario = std::move(sc);
  return out;
}

ScenarioParse load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.stem().string(), path.string());
}

ScenarioReport run_scenario(Session& session, const Scenario& sc) {
  ScenarioReport report;
  report.name = sc.name;
  session.reset();
  session.note("scenario " + sc.name);
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const ScenarioStep& step = sc.steps[i];
    auto fail = [&](std::string reason) {
      report.passed = false;
      report.failed_step = i + 1;
      report.failed_line = step.line;
      report.reason = std::move(reason);
      session.note("  step " + std::to_string(i + 1) + " failed: " + report.reason);
    };
    try {
      if (step.kind == ScenarioStep::Kind::Fire) {
        Binding b = make_binding(session.machine(), step.event, step.args, session.state());
        session.fire(EnabledEvent{step.event, b});
        session.note("  fire " + step.event + (b.empty() ? "" : " " + print_binding(b)));
      } else if (!session.machine().holds(*step.predicate, session.state())) {
        fail("assertion " + step.label + " is false: " + pretty_print(*step.predicate));
      } else {
        session.note("  assert " + step.label + " holds");
      }
    } catch (const Error& e) {
      fail(std::string(to_string(e.kind())) + ": " + e.what());
    }
    report.steps_run = i + 1;
    if (!report.passed) break;
  }
  return report;
}

ScenarioReport run_scenario(std::shared_ptr<const Interpreter> machine, const Scenario& sc) {
  try {
    Session session(std::move(machine));
    return run_scenario(session, sc);
  } catch (const Error& e) {
    ScenarioReport report;
    report.name = sc.name;
    report.passed = false;
    report.reason = std::string("initialisation failed: ") + e.what();
    return report;
  }
}

}  // namespace specforge
