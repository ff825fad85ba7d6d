#pragma once

// Surface syntax for contexts and machines (.ebs files): lexer, parser,
// pretty-printer, and the linker that resolves names across a load set.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specforge/kernel.hpp"

namespace specforge {

struct Diagnostic {
  enum class Severity { Error, Warning };

  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

/// "file:line:col: error: message"
std::string format(const Diagnostic& d);
bool has_errors(const std::vector<Diagnostic>& diags);

/// The definitions found in one source text, in file order.
struct Module {
  std::vector<ContextDef> contexts;
  std::vector<MachineDef> machines;

  friend bool operator==(const Module& a, const Module& b) = default;
};

struct ParseResult {
  std::optional<Module> module;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return module.has_value(); }
};

/// Parses a whole .ebs text. Either a module or diagnostics is returned,
/// never a partial module. Identifiers are left as VarRef; link() turns
/// references to carrier-set elements into SymbolRef.
ParseResult parse_module(std::string_view text, std::string_view file_name);

/// Parses a standalone expression (scenario assertions, binding values).
std::optional<Expr> parse_expression(std::string_view text, std::string_view file_name,
                                     std::vector<Diagnostic>& diagnostics);

std::string pretty_print(const Module& module);
std::string pretty_print(const ContextDef& context);
std::string pretty_print(const MachineDef& machine);
std::string pretty_print(const Expr& e);

// ---------------------------------------------------------------------------
// Linking

/// A closed set of definitions where every sees/refines/extends reference
/// resolves. Identifiers naming carrier-set elements are SymbolRef.
struct Model {
  std::vector<ContextDef> contexts;
  std::vector<MachineDef> machines;

  const ContextDef* find_context(std::string_view name) const;
  const MachineDef* find_machine(std::string_view name) const;
  /// Contexts visible to a machine: its seen contexts, the contexts seen by
  /// machines it refines, and everything those extend (deduplicated).
  std::vector<const ContextDef*> visible_contexts(const MachineDef& m) const;
};

struct LinkResult {
  std::optional<Model> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

LinkResult link(const std::vector<Module>& modules);

/// Reads and links the given files. A sees/refines/extends target not
/// defined in the files themselves is looked up as "<lowercase name>.ebs"
/// in each search directory. Throws Error(Io) when a file cannot be read.
struct LoadResult {
  std::optional<Model> model;
  /// Definitions that came from the requested files (not from search).
  std::vector<std::string> primary_machines;
  std::vector<std::string> primary_contexts;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

LoadResult load_files(const std::vector<std::filesystem::path>& files,
                      const std::vector<std::filesystem::path>& search_dirs);

std::string read_file(const std::filesystem::path& path);

}  // namespace specforge
