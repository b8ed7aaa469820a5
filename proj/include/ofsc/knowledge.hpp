#pragma once

#include <unordered_map>
#include <vector>

#include "ofsc/bitset.hpp"
#include "ofsc/finite_system.hpp"
#include "ofsc/synthesis.hpp"

namespace ofsc {

// Post(s, u) intersected with H^-1(y). An empty result signals an
// observation inconsistent with the model, not a fault.
Bitset knowledge_update(const FiniteSystem& m, const Bitset& s, InputId u, OutputId y);

// Perfect-information game over reachable knowledge sets. Game states are
// knowledge sets, seeded with the first-observation refinements of s0;
// outputs are the states themselves (state-based).
struct KnowledgeGame {
  FiniteSystem game;
  std::vector<Bitset> knowledge;          // game state id -> members
  std::vector<int> seed_of_output;        // model output y -> game state id, -1 if infeasible
};

KnowledgeGame build_knowledge_game(const FiniteSystem& model, const Bitset& s0,
                                   size_t cap = 2000000);

// Universal lifting: a knowledge state belongs to the lifted set iff every
// member's output lies in the given set.
std::vector<OutputId> lift_spec(const KnowledgeGame& g, const FiniteSystem& model,
                                const std::vector<OutputId>& outputs);

// Executable wrapper: tracks knowledge with the embedded model, emits the
// strategy's input. Re-seeds from H^-1(y) when an update comes back empty
// (only reachable with unsound abstractions); re-seed count is reported.
class GameController {
 public:
  GameController(const FiniteSystem& model, const KnowledgeGame& game, Controller strategy);

  // Feed the next observation; returns the input to apply.
  InputId step(OutputId y);
  void reset();

  const Bitset& current_knowledge() const { return knowledge_; }
  int knowledge_size() const { return knowledge_.count(); }
  int reseeds() const { return reseeds_; }

 private:
  const FiniteSystem& model_;
  const KnowledgeGame& game_;
  Controller strategy_;
  Bitset knowledge_;
  std::unordered_map<Bitset, int, Bitset::Hash> index_;
  bool started_ = false;
  InputId last_input_ = -1;
  int reseeds_ = 0;
};

}  // namespace ofsc
