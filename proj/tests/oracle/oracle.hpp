#pragma once

// Independent reference semantics for tests: its own evaluator and a naive
// enumerator. Shares only the kernel and parser with the library.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "specforge/parser.hpp"

namespace oracle {

using specforge::Expr;
using specforge::State;
using specforge::Value;

class Oracle {
 public:
  Oracle(const specforge::Model& model, const specforge::MachineDef& machine);

  State init() const;
  /// Successors over all events and bindings whose guards hold; successors
  /// that break a declared type or bound are left out.
  std::vector<State> successors(const State& s) const;
  bool holds(const Expr& e, const State& s) const;

  /// Every state reachable from init.
  std::set<State> reachable() const;
  /// levels[k] holds the states whose shortest distance from init is k.
  std::vector<std::set<State>> levels(std::size_t max_depth) const;

 private:
  using Env = std::map<std::string, Value>;

  Value eval(const Expr& e, const State& s, const Env& env) const;
  std::vector<Value> domain(const specforge::Type& t) const;
  void explore(const State& s, std::set<State>& seen) const;

  const specforge::MachineDef& m_;
  std::map<std::string, std::vector<std::string>> carriers_;
  std::map<std::string, std::string> symbol_carrier_;
  std::map<std::string, Value> constants_;
};

}  // namespace oracle
