#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "specforge/parser.hpp"

namespace specforge {

namespace fs = std::filesystem;

const ContextDef* Model::find_context(std::string_view name) const {
  for (const ContextDef& c : contexts) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const MachineDef* Model::find_machine(std::string_view name) const {
  for (const MachineDef& m : machines) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::vector<const ContextDef*> Model::visible_contexts(const MachineDef& m) const {
  std::vector<const ContextDef*> out;
  std::set<std::string> seen_machines;
  auto add_context = [&](std::string_view name) {
    std::vector<const ContextDef*> chain;
    std::set<std::string> guard;
    for (const ContextDef* c = find_context(name); c && guard.insert(c->name).second;
         c = c->extends ? find_context(*c->extends) : nullptr) {
      chain.push_back(c);
    }
    // Ancestors first, so lookups see the most general definitions first.
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
    }
  };
  for (const MachineDef* cur = &m; cur && seen_machines.insert(cur->name).second;
       cur = cur->refines ? find_machine(*cur->refines) : nullptr) {
    for (const std::string& s : cur->sees) add_context(s);
  }
  return out;
}

namespace {

Diagnostic error_at(const SourceSpan& span, std::string message) {
  return Diagnostic{Diagnostic::Severity::Error, std::move(message), span};
}

Expr resolve_symbols(const Expr& e, const std::set<std::string>& symbols,
                     const std::set<std::string>& shadowed) {
  if (e.kind() == ExprKind::VarRef) {
    if (symbols.count(e.name()) && !shadowed.count(e.name())) return e.with_kind(ExprKind::SymbolRef);
    return e;
  }
  if (e.children().empty()) return e;
  std::vector<Expr> kids;
  kids.reserve(e.children().size());
  for (const Expr& c : e.children()) kids.push_back(resolve_symbols(c, symbols, shadowed));
  if (e.kind() == ExprKind::SetLit) return Expr::set_lit(std::move(kids), e.span());
  if (e.kind() == ExprKind::Not) return Expr::unary(ExprKind::Not, std::move(kids[0]), e.span());
  return Expr::binary(e.kind(), std::move(kids[0]), std::move(kids[1]), e.span());
}

std::set<std::string> symbols_of(const std::vector<const ContextDef*>& contexts) {
  std::set<std::string> out;
  for (const ContextDef* c : contexts) {
    for (const CarrierSet& s : c->sets) out.insert(s.symbols.begin(), s.symbols.end());
  }
  return out;
}

std::vector<const ContextDef*> context_chain(const Model& model, const ContextDef& c) {
  std::vector<const ContextDef*> out;
  std::set<std::string> guard;
  for (const ContextDef* cur = &c; cur && guard.insert(cur->name).second;
       cur = cur->extends ? model.find_context(*cur->extends) : nullptr) {
    out.push_back(cur);
  }
  return out;
}

}  // namespace

LinkResult link(const std::vector<Module>& modules) {
  LinkResult result;
  Model model;
  std::map<std::string, SourceSpan> defined;
  for (const Module& mod : modules) {
    for (const ContextDef& c : mod.contexts) {
      if (!defined.emplace(c.name, c.span).second) {
        result.diagnostics.push_back(error_at(c.span, "'" + c.name + "' is defined more than once"));
        continue;
      }
      model.contexts.push_back(c);
    }
    for (const MachineDef& m : mod.machines) {
      if (!defined.emplace(m.name, m.span).second) {
        result.diagnostics.push_back(error_at(m.span, "'" + m.name + "' is defined more than once"));
        continue;
      }
      model.machines.push_back(m);
    }
  }

  for (const ContextDef& c : model.contexts) {
    if (c.extends && !model.find_context(*c.extends)) {
      result.diagnostics.push_back(
          error_at(c.span, "context " + c.name + " extends unknown context '" + *c.extends + "'"));
    }
    std::set<std::string> guard;
    for (const ContextDef* cur = &c; cur && cur->extends;
         cur = model.find_context(*cur->extends)) {
      if (!guard.insert(cur->name).second) {
        result.diagnostics.push_back(error_at(c.span, "cyclic 'extends' chain through " + c.name));
        break;
      }
    }
  }
  for (const MachineDef& m : model.machines) {
    for (const std::string& s : m.sees) {
      if (!model.find_context(s)) {
        result.diagnostics.push_back(
            error_at(m.span, "machine " + m.name + " sees unknown context '" + s + "'"));
      }
    }
    if (m.refines && !model.find_machine(*m.refines)) {
      result.diagnostics.push_back(
          error_at(m.span, "machine " + m.name + " refines unknown machine '" + *m.refines + "'"));
    }
    std::set<std::string> guard;
    for (const MachineDef* cur = &m; cur && cur->refines; cur = model.find_machine(*cur->refines)) {
      if (!guard.insert(cur->name).second) {
        result.diagnostics.push_back(error_at(m.span, "cyclic 'refines' chain through " + m.name));
        break;
      }
    }
  }
  if (has_errors(result.diagnostics)) return result;

  // Name resolution: identifiers that denote carrier-set elements become
  // SymbolRef unless a variable, parameter or constant of the same name is
  // in scope (type checking reports such clashes).
  for (ContextDef& c : model.contexts) {
    const auto symbols = symbols_of(context_chain(model, c));
    std::set<std::string> shadowed;
    for (const ContextDef* anc : context_chain(model, c)) {
      for (const Constant& k : anc->constants) shadowed.insert(k.name);
    }
    for (Constant& k : c.constants) k.definition = resolve_symbols(k.definition, symbols, shadowed);
    for (Labeled& a : c.axioms) a.expr = resolve_symbols(a.expr, symbols, shadowed);
  }
  for (MachineDef& m : model.machines) {
    const auto contexts = model.visible_contexts(m);
    const auto symbols = symbols_of(contexts);
    std::set<std::string> shadowed;
    for (const ContextDef* c : contexts) {
      for (const Constant& k : c->constants) shadowed.insert(k.name);
    }
    for (const Variable& v : m.variables) shadowed.insert(v.name);
    std::set<std::string> glue_shadowed = shadowed;
    if (m.refines) {
      std::set<std::string> guard;
      for (const MachineDef* a = model.find_machine(*m.refines); a && guard.insert(a->name).second;
           a = a->refines ? model.find_machine(*a->refines) : nullptr) {
        for (const Variable& v : a->variables) glue_shadowed.insert(v.name);
      }
    }
    for (Labeled& l : m.invariants) l.expr = resolve_symbols(l.expr, symbols, shadowed);
    for (Labeled& l : m.gluing) l.expr = resolve_symbols(l.expr, symbols, glue_shadowed);
    if (m.variant) m.variant = resolve_symbols(*m.variant, symbols, shadowed);
    for (Assignment& a : m.initialisation) a.value = resolve_symbols(a.value, symbols, shadowed);
    for (EventDef& ev : m.events) {
      std::set<std::string> local = shadowed;
      for (const Parameter& p : ev.parameters) local.insert(p.name);
      for (Labeled& g : ev.guards) g.expr = resolve_symbols(g.expr, symbols, local);
      for (Assignment& a : ev.actions) a.value = resolve_symbols(a.value, symbols, local);
    }
  }
  result.model = std::move(model);
  return result;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "error while reading " + path.string());
  return buf.str();
}

LoadResult load_files(const std::vector<fs::path>& files, const std::vector<fs::path>& search_dirs) {
  LoadResult result;
  std::vector<Module> modules;
  std::set<std::string> loaded;  // canonical paths
  std::vector<fs::path> dirs;

  auto load_one = [&](const fs::path& path) -> bool {
    std::error_code ec;
    fs::path canon = fs::weakly_canonical(path, ec);
    const std::string key = ec ? path.string() : canon.string();
    if (!loaded.insert(key).second) return true;
    ParseResult parsed = parse_module(read_file(path), path.string());
    result.diagnostics.insert(result.diagnostics.end(), parsed.diagnostics.begin(),
                              parsed.diagnostics.end());
    if (!parsed.ok()) return false;
    modules.push_back(std::move(*parsed.module));
    return true;
  };

  bool ok = true;
  for (const fs::path& f : files) {
    const std::size_t before = modules.size();
    ok = load_one(f) && ok;
    if (modules.size() > before) {
      for (const ContextDef& c : modules.back().contexts) result.primary_contexts.push_back(c.name);
      for (const MachineDef& m : modules.back().machines) result.primary_machines.push_back(m.name);
    }
    dirs.push_back(f.parent_path().empty() ? fs::path(".") : f.parent_path());
  }
  dirs.insert(dirs.end(), search_dirs.begin(), search_dirs.end());
  if (!ok) return result;

  // Pull in referenced definitions from the search path until closed.
  for (bool changed = true; changed;) {
    changed = false;
    std::set<std::string> defined, wanted;
    for (const Module& mod : modules) {
      for (const ContextDef& c : mod.contexts) {
        defined.insert(c.name);
        if (c.extends) wanted.insert(*c.extends);
      }
      for (const MachineDef& m : mod.machines) {
        defined.insert(m.name);
        wanted.insert(m.sees.begin(), m.sees.end());
        if (m.refines) wanted.insert(*m.refines);
      }
    }
    for (const std::string& name : wanted) {
      if (defined.count(name)) continue;
      std::string file = name;
      std::transform(file.begin(), file.end(), file.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      file += ".ebs";
      for (const fs::path& d : dirs) {
        fs::path candidate = d / file;
        std::error_code ec;
        if (!fs::is_regular_file(candidate, ec)) continue;
        std::size_t before = loaded.size();
        if (!load_one(candidate)) return result;
        if (loaded.size() != before) changed = true;
        break;
      }
    }
  }

  LinkResult linked = link(modules);
  result.diagnostics.insert(result.diagnostics.end(), linked.diagnostics.begin(),
                            linked.diagnostics.end());
  if (linked.ok()) result.model = std::move(linked.model);
  return result;
}

}  // namespace specforge
