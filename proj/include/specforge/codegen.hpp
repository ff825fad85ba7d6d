#pragma once

// Translation of a deterministic machine into a self-contained C program.

#include <string>
#include <vector>

#include "specforge/checker.hpp"

namespace specforge {

struct SubsetReport {
  bool eligible = true;
  std::vector<Diagnostic> violations;
};

/// Eligible iff: no event parameters; every variable is an integer, boolean,
/// symbol, or a single-maplet mapping SET(A |-> B) whose A has one symbol;
/// every expression lowers to C; and either a priority clause is declared or
/// exploration finds at most one enabled event in every reachable state.
SubsetReport check_subset(const Model& model, const MachineDef& m,
                          const ExploreConfig& cfg = ExploreConfig{});

/// Events in scheduling order: the priority clause first, then any events it
/// omits in declaration order.
std::vector<std::string> schedule_order(const MachineDef& m);

/// C source for the machine. The program's first argument is the step limit
/// (default 1000). Each step prints "step <n>: <event>" and then
/// "  <var>=<value>" per variable. Exit status: 0 after the step limit, 1 on
/// deadlock, 2 on a bounds violation. Throws NotInSubset.
std::string generate_c(const Model& model, const MachineDef& m);

struct TraceRun {
  std::string text;
  int exit_code = 0;
};

/// The interpreter's run under the same scheduler, in the generated
/// program's output format.
TraceRun reference_trace(const Interpreter& machine, std::size_t step_limit);

}  // namespace specforge
