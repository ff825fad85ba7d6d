#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "specforge/corpus.hpp"

namespace specforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void mismatch(const std::string& message) { throw Error(ErrorKind::ManifestMismatch, message); }

Verdict parse_verdict(const std::string& text, const std::string& where) {
  for (Verdict v : {Verdict::Proved, Verdict::Violated, Verdict::BoundExhausted}) {
    if (text == to_string(v)) return v;
  }
  mismatch(where + ": unknown verdict '" + text + "'");
}

std::optional<ErrorKind> parse_error_kind(const std::string& text) {
  for (int k = 0; k <= static_cast<int>(ErrorKind::Io); ++k) {
    if (text == to_string(static_cast<ErrorKind>(k))) return static_cast<ErrorKind>(k);
  }
  return std::nullopt;
}

std::string key(const Obligation& o) { return std::string(to_string(o.kind)) + ":" + o.subject; }

CorpusEntry parse_entry(const json& j) {
  CorpusEntry e;
  e.id = j.at("id").get<std::string>();
  const std::string where = "entry " + e.id;
  for (const auto& f : j.at("files")) e.files.emplace_back(f.get<std::string>());
  e.machine = j.at("machine").get<std::string>();
  if (j.contains("refines")) e.refines = j["refines"].get<std::string>();
  e.description = j.value("description", std::string());
  e.default_verdict = parse_verdict(j.value("default", std::string("proved")), where);
  if (j.contains("expected")) {
    for (const auto& [k, v] : j["expected"].items()) e.expected[k] = parse_verdict(v.get<std::string>(), where);
  }
  if (j.contains("error")) {
    const std::string text = j["error"].get<std::string>();
    e.expected_error = parse_error_kind(text);
    if (!e.expected_error) mismatch(where + ": unknown error kind '" + text + "'");
  }
  if (j.contains("scenarios")) {
    for (const auto& s : j["scenarios"]) {
      ScenarioExpectation x;
      x.file = s.at("file").get<std::string>();
      x.pass = s.value("result", std::string("pass")) == "pass";
      x.failed_step = s.value("failed_step", std::size_t{0});
      e.scenarios.push_back(std::move(x));
    }
  }
  return e;
}

}  // namespace

const MachineDef& CorpusEntry::machine_def() const {
  const MachineDef* m = model ? model->find_machine(machine) : nullptr;
  if (!m) throw Error(ErrorKind::ManifestMismatch, "entry " + id + ": machine " + machine + " not loaded");
  return *m;
}

const MachineDef* CorpusEntry::abstract_def() const {
  return refines && model ? model->find_machine(*refines) : nullptr;
}

std::vector<fs::path> corpus_search_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  std::error_code ec;
  for (const auto& d : fs::directory_iterator(root, ec)) {
    if (d.is_directory()) dirs.push_back(d.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::vector<CorpusEntry> read_manifest(const fs::path& root) {
  const fs::path path = root / "manifest.json";
  std::ifstream in(path);
  if (!in) mismatch("no manifest at " + path.string());
  std::vector<CorpusEntry> out;
  try {
    json j = json::parse(in);
    for (const auto& e : j.at("entries")) out.push_back(parse_entry(e));
  } catch (const json::exception& e) {
    mismatch("malformed manifest " + path.string() + ": " + e.what());
  }
  if (out.empty()) mismatch("manifest " + path.string() + " lists no entries");
  return out;
}

std::vector<std::string> verify_entry(CorpusEntry& entry, const fs::path& root, const ExploreConfig& cfg) {
  std::vector<std::string> problems;
  const std::string where = "entry " + entry.id + ": ";
  std::vector<fs::path> files;
  for (const fs::path& f : entry.files) files.push_back(root / f);

  LoadResult lr = load_files(files, corpus_search_dirs(root));
  if (!lr.ok()) {
    for (const Diagnostic& d : lr.diagnostics) problems.push_back(where + format(d));
    if (problems.empty()) problems.push_back(where + "model failed to load");
    return problems;
  }
  for (const Diagnostic& d : type_check(*lr.model)) problems.push_back(where + format(d));
  if (!problems.empty()) return problems;
  entry.model = std::make_shared<const Model>(std::move(*lr.model));
  if (!entry.model->find_machine(entry.machine)) return {where + "machine " + entry.machine + " not found"};
  if (entry.refines && !entry.abstract_def()) return {where + "abstract machine " + *entry.refines + " not found"};

  try {
    entry.report = check_machine(*entry.model, entry.machine_def(), cfg, entry.abstract_def());
    if (entry.expected_error) {
      problems.push_back(where + "expected " + std::string(to_string(*entry.expected_error)) +
                         " but checking completed");
    }
  } catch (const Error& e) {
    if (!entry.expected_error || e.kind() != *entry.expected_error) {
      problems.push_back(where + "checking failed with " + std::string(to_string(e.kind())) + ": " + e.what());
    }
  }

  if (entry.report) {
    for (const Obligation& o : entry.report->obligations) {
      auto it = entry.expected.find(key(o));
      const Verdict want = it == entry.expected.end() ? entry.default_verdict : it->second;
      if (o.verdict != want) {
        problems.push_back(where + key(o) + " is " + std::string(to_string(o.verdict)) + ", manifest says " +
                           std::string(to_string(want)));
      }
    }
    for (const auto& [k, v] : entry.expected) {
      bool found = false;
      for (const Obligation& o : entry.report->obligations) found |= key(o) == k;
      if (!found) problems.push_back(where + k + " is listed in the manifest but not produced by the checker");
    }
  }

  if (!entry.scenarios.empty()) {
    auto interp = std::make_shared<const Interpreter>(*entry.model, entry.machine_def());
    for (const ScenarioExpectation& x : entry.scenarios) {
      ScenarioParse sp = load_scenario(root / x.file);
      if (!sp.scenario) {
        for (const Diagnostic& d : sp.diagnostics) problems.push_back(where + format(d));
        continue;
      }
      ScenarioReport rep = run_scenario(interp, *sp.scenario);
      if (rep.passed != x.pass) {
        problems.push_back(where + "scenario " + sp.scenario->name + (rep.passed ? " passed" : " failed") +
                           ", manifest says " + (x.pass ? "pass" : "fail") +
                           (rep.passed ? "" : " (" + rep.reason + ")"));
      } else if (!x.pass && x.failed_step != 0 && rep.failed_step != x.failed_step) {
        problems.push_back(where + "scenario " + sp.scenario->name + " failed at step " +
                           std::to_string(rep.failed_step) + ", manifest says step " +
                           std::to_string(x.failed_step));
      }
    }
  }
  return problems;
}

std::vector<CorpusEntry> load_corpus(const fs::path& root, const ExploreConfig& cfg) {
  std::vector<CorpusEntry> entries = read_manifest(root);
  std::vector<std::string> problems;
  for (CorpusEntry& e : entries) {
    auto p = verify_entry(e, root, cfg);
    problems.insert(problems.end(), p.begin(), p.end());
  }
  if (!problems.empty()) {
    std::string msg = "corpus disagrees with its manifest:";
    for (const std::string& p : problems) msg += "\n  " + p;
    mismatch(msg);
  }
  return entries;
}

}  // namespace specforge
