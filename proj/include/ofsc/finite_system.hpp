#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ofsc/errors.hpp"

namespace ofsc {

// Finite transition system over dense integer ids: states, inputs, outputs,
// a transition relation stored row-wise per (state, input), and a total
// single-valued output map. Immutable after finalize(); all queries are pure
// and safe to share read-only.
class FiniteSystem {
 public:
  FiniteSystem() = default;
  FiniteSystem(int num_states, int num_inputs, int num_outputs);

  // -- construction (single writer, before finalize) --
  void add_transition(StateId x, InputId u, StateId xp);
  void set_output(StateId x, OutputId y);
  void set_initial(StateId x, bool on = true);
  // Optional per-(state,input) quality weight used as a synthesis tie-break.
  void set_margin(StateId x, InputId u, double m);
  void finalize();

  // -- shape --
  int num_states() const { return nx_; }
  int num_inputs() const { return nu_; }
  int num_outputs() const { return ny_; }
  long num_transitions() const { return long(succ_.size()); }
  bool finalized() const { return finalized_; }

  const std::vector<StateId>& initial_states() const { return initial_; }
  bool is_initial(StateId x) const;
  OutputId output(StateId x) const;
  std::span<const StateId> output_preimage(OutputId y) const;

  // u-successors of x; empty span allowed.
  std::span<const StateId> post(StateId x, InputId u) const;
  bool has_transition(StateId x, InputId u, StateId xp) const;
  double margin(StateId x, InputId u) const;

  // { u | post(x,u) != empty }
  std::vector<InputId> admissible_inputs(StateId x) const;
  // Intersection of admissible_inputs over H^-1(y). DomainError if the
  // preimage is empty.
  std::vector<InputId> output_admissible_inputs(OutputId y) const;
  // H(union of post over the preimage of y). DomainError unless u is
  // output-admissible for y.
  std::vector<OutputId> output_post(OutputId y, InputId u) const;

  // States reachable from `start` along input word alpha whose visited
  // outputs match beta elementwise, |beta| = |alpha| + 1. Sorted.
  std::vector<StateId> alpha_beta_post(std::span<const StateId> start,
                                       std::span<const InputId> alpha,
                                       std::span<const OutputId> beta) const;

  bool is_total() const;
  bool is_deterministic() const;

  // Predecessor index, built lazily on first use: (x', u) pairs with
  // x in post(x', u).
  std::span<const std::pair<StateId, InputId>> pre(StateId x) const;

  // Flat text format: `states N`, `inputs M`, `outputs K`, `initial ...`,
  // one `outmap x y` per state, one `t x u x'` per transition.
  void write(std::ostream& os) const;
  static FiniteSystem read(std::istream& is);

 private:
  void check_state(StateId x) const;
  void check_input(InputId u) const;
  void check_output(OutputId y) const;
  size_t row(StateId x, InputId u) const { return size_t(x) * nu_ + u; }

  int nx_ = 0, nu_ = 0, ny_ = 0;
  bool finalized_ = false;
  std::vector<OutputId> outmap_;
  std::vector<StateId> initial_;
  // CSR rows per (state, input)
  std::vector<std::pair<uint64_t, StateId>> build_buf_;  // (row, succ) before finalize
  std::vector<StateId> succ_;
  std::vector<long> row_off_;  // nx*nu + 1 offsets
  std::vector<double> margins_;
  // output index
  std::vector<StateId> out_pre_;
  std::vector<long> out_off_;
  // lazy reverse index
  mutable std::vector<std::pair<StateId, InputId>> pred_;
  mutable std::vector<long> pred_off_;
  mutable bool pred_built_ = false;
};

// Alphabet embeddings declared by the caller for compositions:
// feedback composition needs Y1 -> U2 and Y2 -> U1.
struct FeedbackEmbedding {
  std::vector<InputId> y1_to_u2;
  std::vector<InputId> y2_to_u1;
};

struct ComposabilityWitness {
  StateId x1, x2;
};

// Def-3 blocking condition over all state pairs; nullopt means composable.
std::optional<ComposabilityWitness> check_feedback_composable(
    const FiniteSystem& s1, const FiniteSystem& s2, const FeedbackEmbedding& emb);

// Product systems, restricted to the part reachable from initial states.
// Output ids of the feedback product are y1 * s2.num_outputs() + y2.
struct ProductSystem {
  FiniteSystem system;
  // product state -> (x1, x2)
  std::vector<std::pair<StateId, StateId>> state_pairs;
};

ProductSystem feedback_compose(const FiniteSystem& s1, const FiniteSystem& s2,
                               const FeedbackEmbedding& emb);

// Observation composition S2 <| S1 (Def. 4): S2 consumes (u1, y1) pairs,
// declared as u2 = u1 * s1.num_outputs() + y1. Product output is the S2 state.
ProductSystem observation_compose(const FiniteSystem& s2, const FiniteSystem& s1);

}  // namespace ofsc
