#pragma once

// Shared helpers for the unit tests and the acceptance binary.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "specforge/checker.hpp"

namespace support {

namespace fs = std::filesystem;
using namespace specforge;

inline fs::path corpus_dir() { return fs::path(SPECFORGE_CORPUS_DIR); }

inline std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  for (const char* dir : {"hd", "mutants"}) {
    for (const auto& f : fs::directory_iterator(corpus_dir() / dir)) {
      if (f.path().extension() == ".ebs") out.push_back(f.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Loads corpus files (relative to the corpus root) and type-checks them.
inline std::shared_ptr<const Model> load_corpus_model(const std::vector<std::string>& files) {
  std::vector<fs::path> paths;
  for (const std::string& f : files) paths.push_back(corpus_dir() / f);
  LoadResult lr = load_files(paths, {corpus_dir() / "hd", corpus_dir() / "mutants"});
  std::string msg;
  for (const Diagnostic& d : lr.diagnostics) msg += format(d) + "\n";
  if (!lr.ok()) throw std::runtime_error("corpus load failed:\n" + msg);
  for (const Diagnostic& d : type_check(*lr.model)) msg += format(d) + "\n";
  if (!msg.empty()) throw std::runtime_error("corpus type errors:\n" + msg);
  return std::make_shared<const Model>(std::move(*lr.model));
}

/// Parses, links and type-checks inline source.
inline std::shared_ptr<const Model> model_from(std::string_view text) {
  ParseResult pr = parse_module(text, "inline.ebs");
  std::string msg;
  for (const Diagnostic& d : pr.diagnostics) msg += format(d) + "\n";
  if (!pr.ok()) throw std::runtime_error("parse failed:\n" + msg);
  LinkResult lr = link({*pr.module});
  for (const Diagnostic& d : lr.diagnostics) msg += format(d) + "\n";
  if (!lr.ok()) throw std::runtime_error("link failed:\n" + msg);
  for (const Diagnostic& d : type_check(*lr.model)) msg += format(d) + "\n";
  if (!msg.empty()) throw std::runtime_error("type errors:\n" + msg);
  return std::make_shared<const Model>(std::move(*lr.model));
}

inline const MachineDef& machine(const Model& m, std::string_view name) {
  const MachineDef* def = m.find_machine(name);
  if (!def) throw std::runtime_error("no machine " + std::string(name));
  return *def;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("specforge-test-" + std::to_string(rd()) + std::to_string(::getpid()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::permissions(path_, fs::perms::owner_all, fs::perm_options::add, ec);
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct ProcessResult {
  int exit_code = -1;
  std::string output;
};

/// Runs a shell command, capturing standard output.
inline ProcessResult run(const std::string& command) {
  ProcessResult r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace support
