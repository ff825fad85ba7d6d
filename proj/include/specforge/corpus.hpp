#pragma once

// The shipped model family and the verdicts its manifest promises.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specforge/animator.hpp"
#include "specforge/checker.hpp"

namespace specforge {

struct ScenarioExpectation {
  std::filesystem::path file;
  bool pass = true;
  /// 1-based step at which a failing scenario must stop.
  std::size_t failed_step = 0;
};

struct CorpusEntry {
  std::string id;
  std::vector<std::filesystem::path> files;
  std::string machine;
  std::optional<std::string> refines;
  std::string description;
  /// "KIND:subject" -> verdict. Obligations not listed expect `default_verdict`.
  std::map<std::string, Verdict> expected;
  Verdict default_verdict = Verdict::Proved;
  /// Set when checking is expected to stop with this error instead of a report.
  std::optional<ErrorKind> expected_error;
  std::vector<ScenarioExpectation> scenarios;

  std::shared_ptr<const Model> model;
  std::optional<CheckReport> report;

  const MachineDef& machine_def() const;
  const MachineDef* abstract_def() const;
};

/// Parses manifest.json under root; does not load models.
std::vector<CorpusEntry> read_manifest(const std::filesystem::path& root);

/// Parses, type-checks and checks the entry, then runs its scenarios.
/// Returns one line per disagreement with the manifest.
std::vector<std::string> verify_entry(CorpusEntry& entry, const std::filesystem::path& root,
                                      const ExploreConfig& cfg = ExploreConfig{});

/// All manifest entries with models and reports attached. Throws
/// ManifestMismatch when the manifest is missing or any verdict differs.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& root,
                                     const ExploreConfig& cfg = ExploreConfig{});

/// Subdirectories of root holding model files, used as the import search path.
std::vector<std::filesystem::path> corpus_search_dirs(const std::filesystem::path& root);

}  // namespace specforge
