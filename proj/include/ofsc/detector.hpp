#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ofsc/bitset.hpp"
#include "ofsc/finite_system.hpp"
#include "ofsc/synthesis.hpp"

namespace ofsc {

// NFA over subsets of model states of size 1 or 2 plus the dummy initial
// state (id 0). Labels are (input-or-phi, output) pairs, phi encoded as
// input id -1.
struct DetectorNfa {
  struct Edge {
    int src;
    InputId u;  // -1 = phi
    OutputId y;
    int dst;
  };
  // members[i] = (a, b) with a <= b; singleton iff a == b; (-1, -1) for the
  // dummy initial state at index 0.
  std::vector<std::pair<StateId, StateId>> members;
  std::vector<Edge> edges;
  std::vector<char> limit;    // filled by compute_limit_points
  int transient_steps = -1;   // filled by transient_period
  int model_states = 0;

  int num_states() const { return int(members.size()); }
  bool is_singleton(int q) const { return q > 0 && members[q].first == members[q].second; }
};

// Algorithm-1 subset construction, verbatim 2-subset expansion.
DetectorNfa build_detector_nfa(const FiniteSystem& model);

// States reachable from cycles (nontrivial SCCs or self-loops), via forward
// closure. Fills nfa.limit and returns the limit-state count.
int compute_limit_points(DetectorNfa& nfa);

// Minimal t such that every feasible label word of t inputs ends only in
// limit states; counted in input steps. Requires limit points.
int transient_period(DetectorNfa& nfa);

struct DetectabilityResult {
  bool detectable = false;
  // on failure: a size-2 limit state and a lasso path of edges reaching it
  int witness_state = -1;
  std::vector<DetectorNfa::Edge> lasso;
};

DetectabilityResult is_detectable(const DetectorNfa& nfa);

// Text export: `n id size members...`, `e src lbl_u lbl_y dst`,
// `limit id ...`, `Tt k`.
void write_nfa(const DetectorNfa& nfa, std::ostream& os);

// Runtime state tracking per Eq.-(7) semantics: full state set seeded on the
// first observation, then Post cap H^-1(y). Emits the unique member once the
// knowledge is a singleton (detected flag latches), else emits p (-1).
class DetectorRuntime {
 public:
  explicit DetectorRuntime(const FiniteSystem& model);

  // u = -1 on the first call (phi). Returns detected state or -1 (= p).
  // When the update comes back empty the detector re-seeds from the current
  // observation and drops the detected flag; reseeds() counts those events.
  StateId step(InputId u, OutputId y);

  bool detected() const { return detected_; }
  int knowledge_size() const { return knowledge_.count(); }
  const Bitset& knowledge() const { return knowledge_; }
  int reseeds() const { return reseeds_; }
  void reset();

 private:
  const FiniteSystem& model_;
  Bitset knowledge_;
  bool started_ = false;
  bool detected_ = false;
  int reseeds_ = 0;
};

// C_m: emits kappa (-1) while the detector reports p, switches permanently
// to the wrapped controller on the first detected state.
class CmController {
 public:
  explicit CmController(const Controller& inner);

  // obs = detected state or -1 (p). Returns input or -1 (kappa).
  InputId step(StateId obs);
  bool active() const { return active_; }
  void reset();

 private:
  const Controller& inner_;
  int memory_;
  bool active_ = false;
};

enum class PrefixMode { Safe, Reach };

// Lexicographically first input word (alphabet ordered by |value| via the
// given candidate order) of length `steps` keeping all abstract runs from
// the start set inside `domain` (Safe) or ending inside it (Reach).
// Safe mode starts from the domain cells, Reach mode from all cells.
std::optional<std::vector<InputId>> search_prefix(const FiniteSystem& model, int steps,
                                                  const std::vector<StateId>& domain,
                                                  PrefixMode mode,
                                                  const std::vector<InputId>& input_order,
                                                  int max_steps = 6);

}  // namespace ofsc
