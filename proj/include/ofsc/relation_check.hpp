#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ofsc/finite_system.hpp"

namespace ofsc {

// Brute-force checkers for feedback refinement relations and their
// output-level extensions. Both systems must share an input id space
// (abstract input u means the same id in s1); guarded to |X1|*|X2| <= 1e6.

struct RelationViolation {
  // 0 = strictness, 1..3 = condition (i)..(iii)
  int condition = 0;
  StateId x1 = -1, x2 = -1;
  InputId u = -1;
  StateId x1_succ = -1;
  OutputId y1 = -1, y2 = -1;
  std::string describe() const;
};

struct RelationReport {
  bool ok = true;
  std::vector<RelationViolation> violations;  // first counterexample per failing condition
};

using PairList = std::vector<std::pair<StateId, StateId>>;

// Def. 8 conditions on the state-based versions of s1, s2.
RelationReport check_frr(const FiniteSystem& s1, const FiniteSystem& s2, const PairList& q);

// Def. 9: z is a relation over (s1 outputs, s2 outputs), q its underlying FRR.
RelationReport check_ofrr(const FiniteSystem& s1, const FiniteSystem& s2, const PairList& q,
                          const PairList& z);

// The canonical OFRR of an FRR: { (H1(x1), H2(x2)) | (x1,x2) in Q }.
PairList canonical_z(const FiniteSystem& s1, const FiniteSystem& s2, const PairList& q);

}  // namespace ofsc
