#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "specforge/animator.hpp"
#include "specforge/cli.hpp"
#include "specforge/codegen.hpp"

namespace specforge {

namespace fs = std::filesystem;

namespace {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// The file's own directory and its siblings, so a mutant can find the
// machine it refines next door.
std::vector<fs::path> search_path(const std::vector<fs::path>& files, const std::vector<fs::path>& extra) {
  std::vector<fs::path> dirs = extra;
  auto add = [&](const fs::path& d) {
    if (std::find(dirs.begin(), dirs.end(), d) == dirs.end()) dirs.push_back(d);
  };
  for (const fs::path& f : files) {
    const fs::path dir = f.has_parent_path() ? f.parent_path() : fs::path(".");
    add(dir);
    std::error_code ec;
    std::vector<fs::path> siblings;
    for (const auto& d : fs::directory_iterator(dir.has_parent_path() ? dir.parent_path() : fs::path(".."), ec)) {
      if (d.is_directory(ec)) siblings.push_back(d.path());
    }
    std::sort(siblings.begin(), siblings.end());
    for (const fs::path& s : siblings) add(s);
  }
  return dirs;
}

// Parse, link and type-check; prints diagnostics. Returns nullopt with the
// exit code to use on failure.
struct Loaded {
  std::optional<LoadResult> result;
  int code = exit_code::ok;
};

Loaded load_model(const std::vector<fs::path>& files, const std::vector<fs::path>& includes, Streams io) {
  Loaded out;
  for (const fs::path& f : files) {
    std::error_code ec;
    if (!fs::is_regular_file(f, ec)) {
      io.err << "specforge: cannot read " << f.string() << "\n";
      out.code = exit_code::io;
      return out;
    }
  }
  LoadResult lr;
  try {
    lr = load_files(files, search_path(files, includes));
  } catch (const Error& e) {
    io.err << "specforge: " << e.what() << "\n";
    out.code = e.kind() == ErrorKind::Io ? exit_code::io : exit_code::bad_model;
    return out;
  }
  for (const Diagnostic& d : lr.diagnostics) io.err << format(d) << "\n";
  if (!lr.ok()) {
    out.code = exit_code::bad_model;
    return out;
  }
  auto diags = type_check(*lr.model);
  for (const Diagnostic& d : diags) io.err << format(d) << "\n";
  if (has_errors(diags)) {
    out.code = exit_code::bad_model;
    return out;
  }
  out.result = std::move(lr);
  return out;
}

// The machine a single-file command acts on: the last one defined in the file.
const MachineDef* primary_machine(const LoadResult& lr, const std::string& wanted, Streams io) {
  if (!wanted.empty()) {
    const MachineDef* m = lr.model->find_machine(wanted);
    if (!m) io.err << "specforge: no machine named " << wanted << "\n";
    return m;
  }
  if (lr.primary_machines.empty()) {
    io.err << "specforge: the file defines no machine\n";
    return nullptr;
  }
  return lr.model->find_machine(lr.primary_machines.back());
}

std::optional<ObligationKind> parse_kind(const std::string& text) {
  for (ObligationKind k : {ObligationKind::INV, ObligationKind::DLK, ObligationKind::VAR, ObligationKind::ENB,
                           ObligationKind::GRD_REF, ObligationKind::SIM_REF, ObligationKind::AXM,
                           ObligationKind::INIT}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

int cmd_check(const std::vector<std::string>& files, const std::string& refines, const std::vector<std::string>& includes,
              const std::vector<std::string>& only, bool as_json, std::optional<std::size_t> max_states,
              std::optional<std::size_t> max_depth, Streams io) {
  ExploreConfig cfg;
  try {
    cfg = config_from_environment();
  } catch (const Error& e) {
    io.err << "specforge: " << e.what() << "\n";
    return exit_code::usage;
  }
  if (max_states) cfg.max_states = *max_states;
  cfg.max_depth = max_depth;
  for (const std::string& k : only) {
    auto kind = parse_kind(k);
    if (!kind) {
      io.err << "specforge: unknown obligation kind " << k << "\n";
      return exit_code::usage;
    }
    cfg.checks.insert(*kind);
  }

  std::vector<fs::path> paths(files.begin(), files.end());
  if (!refines.empty()) paths.emplace_back(refines);
  Loaded loaded = load_model(paths, {includes.begin(), includes.end()}, io);
  if (!loaded.result) return loaded.code;
  const LoadResult& lr = *loaded.result;
  const Model& model = *lr.model;

  // Machines defined by the --refines file are abstractions, not subjects.
  std::set<std::string> abstract_only;
  if (!refines.empty()) {
    LoadResult ar = load_files({fs::path(refines)}, search_path({fs::path(refines)}, {includes.begin(), includes.end()}));
    abstract_only.insert(ar.primary_machines.begin(), ar.primary_machines.end());
  }
  std::vector<const MachineDef*> subjects;
  for (const std::string& name : lr.primary_machines) {
    if (!abstract_only.count(name)) subjects.push_back(model.find_machine(name));
  }
  if (subjects.empty()) {
    io.err << "specforge: no machine to check\n";
    return exit_code::usage;
  }

  int code = exit_code::ok;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const MachineDef* m : subjects) {
    const MachineDef* abstract = m->refines ? model.find_machine(*m->refines) : nullptr;
    CheckReport report;
    try {
      report = check_machine(model, *m, cfg, abstract);
    } catch (const Error& e) {
      io.err << "specforge: " << m->name << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
      if (e.kind() == ErrorKind::GluingUnderspecified) {
        code = exit_code::violated;
        continue;
      }
      return exit_code::bad_model;
    }
    if (as_json) {
      reports.push_back(to_json(report, *m));
    } else {
      io.out << format_text(report, *m);
    }
    const int c = report.exit_code();
    if (c == exit_code::violated || (c == exit_code::bound_exhausted && code == exit_code::ok)) code = c;
  }
  if (as_json) io.out << (reports.size() == 1 ? reports[0] : reports).dump(2) << "\n";
  return code;
}

std::map<std::string, Scenario> load_scenario_dir(const fs::path& dir, Streams io, bool& ok) {
  std::map<std::string, Scenario> out;
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(dir, ec)) {
    if (f.path().extension() == ".scn") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    ScenarioParse sp = load_scenario(f);
    for (const Diagnostic& d : sp.diagnostics) io.err << format(d) << "\n";
    if (!sp.scenario) {
      ok = false;
      continue;
    }
    out.emplace(sp.scenario->name, std::move(*sp.scenario));
  }
  return out;
}

int cmd_serve(const std::string& file, const std::string& machine, const std::vector<std::string>& includes,
              const std::string& host, int port, const std::string& ui, const std::string& scenarios, Streams io) {
  Loaded loaded = load_model({fs::path(file)}, {includes.begin(), includes.end()}, io);
  if (!loaded.result) return loaded.code;
  const MachineDef* m = primary_machine(*loaded.result, machine, io);
  if (!m) return exit_code::bad_model;

  AnimatorService::Options opts;
  opts.host = host;
  opts.port = port;
  if (!ui.empty()) {
    if (!fs::is_directory(ui)) {
      io.err << "specforge: UI directory " << ui << " does not exist\n";
      return exit_code::io;
    }
    opts.ui_dir = fs::path(ui);
  }
  fs::path scn_dir = scenarios;
  if (scn_dir.empty()) {
    const fs::path dir = fs::path(file).has_parent_path() ? fs::path(file).parent_path() : fs::path(".");
    scn_dir = dir.parent_path() / "scenarios";
  }
  bool ok = true;
  if (fs::is_directory(scn_dir)) opts.scenarios = load_scenario_dir(scn_dir, io, ok);
  if (!ok) return exit_code::bad_model;

  std::shared_ptr<const Interpreter> interp;
  try {
    interp = std::make_shared<const Interpreter>(*loaded.result->model, *m);
    interp->initial_state();
  } catch (const Error& e) {
    io.err << "specforge: " << m->name << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code::bad_model;
  }
  AnimatorService service(interp, std::move(opts));
  auto bound = service.bind();
  if (!bound) {
    io.err << "specforge: cannot listen on " << host << ":" << port << " (port in use?)\n";
    return exit_code::port_in_use;
  }
  io.out << "specforge animator for " << m->name << " at http://" << host << ":" << *bound << "/" << std::endl;
  service.serve();
  return exit_code::ok;
}

int cmd_generate(const std::string& file, const std::string& machine, const std::vector<std::string>& includes,
                 std::string out_path, Streams io) {
  Loaded loaded = load_model({fs::path(file)}, {includes.begin(), includes.end()}, io);
  if (!loaded.result) return loaded.code;
  const MachineDef* m = primary_machine(*loaded.result, machine, io);
  if (!m) return exit_code::bad_model;
  const Model& model = *loaded.result->model;

  SubsetReport subset = check_subset(model, *m);
  if (!subset.eligible) {
    io.out << "machine " << m->name << " is not in the code generation subset:\n";
    for (const Diagnostic& d : subset.violations) io.out << "  " << to_string(d.span) << ": " << d.message << "\n";
    return exit_code::violated;
  }
  const std::string source = generate_c(model, *m);
  if (out_path.empty()) out_path = fs::path(file).stem().string() + ".c";
  std::ofstream os(out_path, std::ios::binary | std::ios::trunc);
  if (!os || !(os << source) || !os.flush()) {
    io.err << "specforge: cannot write " << out_path << "\n";
    return exit_code::cannot_create;
  }
  io.out << "wrote " << out_path << " (" << m->name << ", " << m->events.size() << " events)\n";
  return exit_code::ok;
}

int cmd_scenario(const std::string& file, const std::string& machine, const std::vector<std::string>& includes,
                 const std::vector<std::string>& scenario_files, bool as_json, Streams io) {
  Loaded loaded = load_model({fs::path(file)}, {includes.begin(), includes.end()}, io);
  if (!loaded.result) return loaded.code;
  const MachineDef* m = primary_machine(*loaded.result, machine, io);
  if (!m) return exit_code::bad_model;

  std::vector<Scenario> scenarios;
  for (const std::string& f : scenario_files) {
    std::error_code ec;
    if (!fs::is_regular_file(f, ec)) {
      io.err << "specforge: cannot read " << f << "\n";
      return exit_code::io;
    }
    ScenarioParse sp = load_scenario(f);
    for (const Diagnostic& d : sp.diagnostics) io.err << format(d) << "\n";
    if (!sp.scenario) return exit_code::bad_model;
    scenarios.push_back(std::move(*sp.scenario));
  }
  auto interp = std::make_shared<const Interpreter>(*loaded.result->model, *m);
  int code = exit_code::ok;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const Scenario& sc : scenarios) {
    ScenarioReport r = run_scenario(interp, sc);
    if (!r.passed) code = exit_code::violated;
    if (as_json) {
      reports.push_back(to_json(r));
    } else if (r.passed) {
      io.out << "PASS " << r.name << " (" << r.steps_run << " steps)\n";
    } else {
      io.out << "FAIL " << r.name << " at step " << r.failed_step << " (line " << r.failed_line << "): " << r.reason
             << "\n";
    }
  }
  if (as_json) io.out << reports.dump(2) << "\n";
  return code;
}

std::size_t count_comments(const std::string& text) {
  std::size_t n = 0;
  for (auto pos = text.find("//"); pos != std::string::npos; pos = text.find("//", pos + 2)) ++n;
  return n;
}

int cmd_fmt(const std::vector<std::string>& files, bool to_stdout, bool check, bool drop_comments, Streams io) {
  int code = exit_code::ok;
  for (const std::string& f : files) {
    std::string text;
    try {
      text = read_file(f);
    } catch (const Error& e) {
      io.err << "specforge: " << e.what() << "\n";
      return exit_code::io;
    }
    ParseResult pr = parse_module(text, f);
    for (const Diagnostic& d : pr.diagnostics) io.err << format(d) << "\n";
    if (!pr.ok()) return exit_code::bad_model;
    const std::string formatted = pretty_print(*pr.module);
    if (to_stdout) {
      io.out << formatted;
      continue;
    }
    if (check) {
      if (formatted != text) {
        io.out << f << " is not formatted\n";
        code = exit_code::violated;
      }
      continue;
    }
    if (formatted == text) continue;
    if (!drop_comments && count_comments(formatted) < count_comments(text)) {
      io.err << "specforge: " << f << " has comments in positions formatting would drop; use --drop-comments or --stdout\n";
      code = exit_code::violated;
      continue;
    }
    std::ofstream os(f, std::ios::binary | std::ios::trunc);
    if (!os || !(os << formatted) || !os.flush()) {
      io.err << "specforge: cannot write " << f << "\n";
      return exit_code::cannot_create;
    }
    io.out << "formatted " << f << "\n";
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Streams io{out, err};
  CLI::App app{"specforge: check, animate and generate code from machine models", "specforge"};
  app.require_subcommand(1);

  std::vector<std::string> includes;
  std::string machine;
  bool as_json = false;

  auto* check = app.add_subcommand("check", "Discharge proof obligations by explicit-state exploration");
  std::vector<std::string> check_files;
  std::string refines;
  std::vector<std::string> only;
  std::optional<std::size_t> max_states, max_depth;
  check->add_option("files", check_files, "Model files")->required();
  check->add_option("--refines", refines, "File defining the abstract machine");
  check->add_option("-I,--include", includes, "Extra directory searched for seen/refined definitions");
  check->add_option("--only", only, "Obligation kinds to check (INV, DLK, VAR, ENB, GRD_REF, SIM_REF, AXM, INIT)");
  check->add_option("--max-states", max_states, "State limit (overrides SPECFORGE_MAX_STATES)");
  check->add_option("--max-depth", max_depth, "Depth limit");
  check->add_flag("--json", as_json, "Print the report as JSON");

  auto* serve = app.add_subcommand("serve", "Serve the animator HTTP API");
  std::string serve_file, host = "127.0.0.1", ui, scenarios;
  int port = 7077;
  serve->add_option("file", serve_file, "Model file")->required();
  serve->add_option("--machine", machine, "Machine to animate (default: last in file)");
  serve->add_option("-I,--include", includes, "Extra search directory");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Port; 0 picks a free one")->check(CLI::Range(0, 65535));
  serve->add_option("--ui", ui, "Directory of static UI files");
  serve->add_option("--scenarios", scenarios, "Directory of .scn files");

  auto* gen = app.add_subcommand("generate", "Emit a C program for a deterministic machine");
  std::string gen_file, gen_out;
  gen->add_option("file", gen_file, "Model file")->required();
  gen->add_option("--machine", machine, "Machine to translate (default: last in file)");
  gen->add_option("-I,--include", includes, "Extra search directory");
  gen->add_option("-o,--out", gen_out, "Output path (default: <file stem>.c)");

  auto* scn = app.add_subcommand("scenario", "Replay scenario files against a machine");
  std::string scn_model;
  std::vector<std::string> scn_files;
  scn->add_option("file", scn_model, "Model file")->required();
  scn->add_option("scenarios", scn_files, "Scenario files")->required();
  scn->add_option("--machine", machine, "Machine (default: last in file)");
  scn->add_option("-I,--include", includes, "Extra search directory");
  scn->add_flag("--json", as_json, "Print reports as JSON");

  auto* fmt = app.add_subcommand("fmt", "Pretty-print model files in place");
  std::vector<std::string> fmt_files;
  bool fmt_stdout = false, fmt_check = false, drop_comments = false;
  fmt->add_option("files", fmt_files, "Model files")->required();
  fmt->add_flag("--stdout", fmt_stdout, "Print instead of rewriting");
  fmt->add_flag("--check", fmt_check, "Exit 1 if a file is not formatted");
  fmt->add_flag("--drop-comments", drop_comments, "Rewrite even when comments would be lost");

  std::vector<std::string> argv_store{"specforge"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "specforge: " << e.what() << "\n";
    for (CLI::App* sub : app.get_subcommands()) {
      err << sub->help();
      return exit_code::usage;
    }
    err << app.help();
    return exit_code::usage;
  }

  try {
    if (check->parsed()) {
      return cmd_check(check_files, refines, includes, only, as_json, max_states, max_depth, io);
    }
    if (serve->parsed()) return cmd_serve(serve_file, machine, includes, host, port, ui, scenarios, io);
    if (gen->parsed()) return cmd_generate(gen_file, machine, includes, gen_out, io);
    if (scn->parsed()) return cmd_scenario(scn_model, machine, includes, scn_files, as_json, io);
    if (fmt->parsed()) return cmd_fmt(fmt_files, fmt_stdout, fmt_check, drop_comments, io);
  } catch (const Error& e) {
    err << "specforge: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? exit_code::io : exit_code::bad_model;
  }
  return exit_code::usage;
}

}  // namespace specforge
