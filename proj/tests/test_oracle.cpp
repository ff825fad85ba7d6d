#include <gtest/gtest.h>

#include "oracle.hpp"
#include "support.hpp"

using namespace specforge;
using support::machine;

namespace {

struct Subject {
  const char* file;
  const char* name;
};

const Subject kAll[] = {{"hd/r0.ebs", "R0"},          {"hd/r1.ebs", "R1"},
                        {"hd/r2.ebs", "R2"},          {"hd/r2det.ebs", "R2det"},
                        {"mutants/mut_tick.ebs", "MUT_TICK"}, {"mutants/mut_dlk.ebs", "MUT_DLK"},
                        {"mutants/mut_sim.ebs", "MUT_SIM"},   {"mutants/mut_glue.ebs", "MUT_GLUE"}};

}  // namespace

TEST(Oracle, ReachableSetsMatchExplore) {
  for (const Subject& s : kAll) {
    SCOPED_TRACE(s.name);
    auto model = support::load_corpus_model({s.file});
    const MachineDef& m = machine(*model, s.name);
    oracle::Oracle o(*model, m);
    std::set<State> expected = o.reachable();
    ExploreResult r = explore(Interpreter(*model, m), ExploreConfig{});
    ASSERT_FALSE(r.bound_exhausted);
    std::set<State> got(r.states.begin(), r.states.end());
    EXPECT_EQ(got.size(), r.states.size()) << "explore stored a duplicate";
    EXPECT_EQ(got, expected);
  }
}

TEST(Oracle, GoldenCounts) {
  auto count = [](const char* file, const char* name) {
    auto model = support::load_corpus_model({file});
    return oracle::Oracle(*model, machine(*model, name)).reachable().size();
  };
  EXPECT_EQ(count("hd/r0.ebs", "R0"), 80u);
  EXPECT_EQ(count("hd/r2.ebs", "R2"), 880u);
}

TEST(Oracle, DepthsMatchLevelSets) {
  auto model = support::load_corpus_model({"hd/r2.ebs"});
  const MachineDef& m = machine(*model, "R2");
  auto levels = oracle::Oracle(*model, m).levels(1000);
  ExploreResult r = explore(Interpreter(*model, m), ExploreConfig{});
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    ASSERT_LT(r.depth[i], levels.size());
    EXPECT_TRUE(levels[r.depth[i]].count(r.states[i])) << "state " << i;
  }
}

// No state closer to init than the reported depth violates the invariant,
// and the reported final state lies exactly at that depth.
TEST(Oracle, CounterexamplesAreMinimal) {
  for (const Subject& s : kAll) {
    auto model = support::load_corpus_model({s.file});
    const MachineDef& m = machine(*model, s.name);
    CheckReport report = check_machine(*model, m, ExploreConfig{});
    oracle::Oracle o(*model, m);
    for (const Obligation& ob : report.obligations) {
      if (ob.verdict != Verdict::Violated || ob.kind != ObligationKind::INV) continue;
      const Labeled* inv = nullptr;
      for (const Labeled& l : m.invariants) {
        if (l.label == ob.subject) inv = &l;
      }
      if (!inv) continue;
      SCOPED_TRACE(std::string(s.name) + " " + ob.subject);
      const std::size_t d = ob.counterexample->depth();
      auto levels = o.levels(d);
      ASSERT_EQ(levels.size(), d + 1);
      for (std::size_t k = 0; k < d; ++k) {
        for (const State& st : levels[k]) ASSERT_TRUE(o.holds(inv->expr, st)) << "shorter violation at depth " << k;
      }
      EXPECT_TRUE(levels[d].count(ob.counterexample->final_state()));
      EXPECT_FALSE(o.holds(inv->expr, ob.counterexample->final_state()));
    }
  }
}

TEST(Oracle, DeadlockWitnessIsMinimal) {
  auto model = support::load_corpus_model({"mutants/mut_dlk.ebs"});
  const MachineDef& m = machine(*model, "MUT_DLK");
  CheckReport report = check_machine(*model, m, ExploreConfig{});
  const Obligation* dlk = report.find(ObligationKind::DLK, "MUT_DLK");
  ASSERT_TRUE(dlk && dlk->counterexample);
  oracle::Oracle o(*model, m);
  const std::size_t d = dlk->counterexample->depth();
  auto levels = o.levels(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (const State& st : levels[k]) EXPECT_FALSE(o.successors(st).empty());
  }
  EXPECT_TRUE(o.successors(dlk->counterexample->final_state()).empty());
}

TEST(Oracle, CorpusInvariantsHoldEverywhere) {
  for (const Subject& s : {kAll[0], kAll[1], kAll[2], kAll[3]}) {
    auto model = support::load_corpus_model({s.file});
    const MachineDef& m = machine(*model, s.name);
    oracle::Oracle o(*model, m);
    for (const State& st : o.reachable()) {
      for (const Labeled& inv : m.invariants) ASSERT_TRUE(o.holds(inv.expr, st)) << s.name << " " << inv.label;
      ASSERT_FALSE(o.successors(st).empty()) << s.name << " deadlocks";
    }
  }
}
