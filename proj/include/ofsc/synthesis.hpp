#pragma once

#include <iosfwd>
#include <vector>

#include "ofsc/finite_system.hpp"

namespace ofsc {

struct Spec {
  enum class Kind { Safe, Reach, SafeBounded, ReachBounded, RecurrenceHold };
  Kind kind = Kind::Safe;
  // Output-symbol target/safe sets; one entry except for RecurrenceHold.
  std::vector<std::vector<OutputId>> targets;
  int from = 0, to = 0;  // bounded-horizon window [a, b]
  int hold = 1;
};

// Finite-memory observation-feedback controller. Observations are the ids of
// whatever the synthesized-on system emits (its states, for the state-based
// systems all solvers here work on). decision/memory_next are dense
// (memory x observation) tables with -1 for undefined.
struct Controller {
  int num_memory = 1;
  int init_memory = 0;
  int num_obs = 0;
  std::vector<std::vector<InputId>> decision;
  std::vector<std::vector<int>> memory_next;
  std::vector<std::vector<std::vector<InputId>>> permissive;  // may be empty
  std::vector<StateId> domain;

  InputId decide(int m, int obs) const { return decision[m][obs]; }
  int next_memory(int m, int obs) const { return memory_next[m][obs]; }

  void write(std::ostream& os) const;
  static Controller read(std::istream& is);
};

// Maximal controlled-invariant set inside H^-1(F); memoryless.
Controller solve_safety(const FiniteSystem& fs, const std::vector<OutputId>& safe_outputs);

// Least fixed point attractor of H^-1(T) with strict ranking progress.
Controller solve_reach(const FiniteSystem& fs, const std::vector<OutputId>& target_outputs);
// Attractor ranks of the last solve (test hook): rank[x], -1 outside.
std::vector<int> reach_ranks(const FiniteSystem& fs, const std::vector<OutputId>& targets);

// Time-indexed backward induction over the horizon; memory = step counter.
Controller solve_bounded(const FiniteSystem& fs, const Spec& spec);

// Cyclic reach-and-hold objective over k targets; memory = (mode, hold step).
Controller solve_recurrence_hold(const FiniteSystem& fs,
                                 const std::vector<std::vector<OutputId>>& targets, int hold);

// Re-key a state-observed memoryless controller by output symbol; requires
// the output map to be injective on the controller's domain.
Controller rekey_by_output(const Controller& c, const FiniteSystem& fs);

// Closed-loop graph check used by tests: every run from every domain state
// satisfies the spec (Safe and Reach kinds).
bool verify_closed_loop(const FiniteSystem& fs, const Controller& c, const Spec& spec);

}  // namespace ofsc
