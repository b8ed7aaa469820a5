#include "ofsc/relation_check.hpp"

#include <algorithm>
#include <set>

namespace ofsc {

std::string RelationViolation::describe() const {
  switch (condition) {
    case 0: return "strictness fails at x1=" + std::to_string(x1);
    case 1:
      return "condition (i) fails at (" + std::to_string(x1) + "," + std::to_string(x2) +
             "): input " + std::to_string(u) + " admissible only abstractly";
    case 2:
      return "condition (ii) fails at (" + std::to_string(x1) + "," + std::to_string(x2) +
             ") under input " + std::to_string(u) + ": successor " + std::to_string(x1_succ) +
             " not covered";
    case 3:
      return y1 >= 0 ? "condition (iii) fails at (y" + std::to_string(y1) + ",y" +
                           std::to_string(y2) + ")"
                     : "condition (iii) fails at (" + std::to_string(x1) + "," +
                           std::to_string(x2) + ")";
    default: return "unknown violation";
  }
}

namespace {

void guard(const FiniteSystem& s1, const FiniteSystem& s2) {
  if (long(s1.num_states()) * s2.num_states() > 1000000)
    throw DomainError("relation check: systems too large to enumerate");
}

template <class F>
void add_first(RelationReport& rep, int condition, F&& fill) {
  for (const auto& v : rep.violations)
    if (v.condition == condition) return;
  RelationViolation v;
  v.condition = condition;
  fill(v);
  rep.violations.push_back(v);
  rep.ok = false;
}

}  // namespace

RelationReport check_frr(const FiniteSystem& s1, const FiniteSystem& s2, const PairList& q) {
  guard(s1, s2);
  RelationReport rep;

  std::vector<std::vector<StateId>> qmap(s1.num_states());
  for (auto [a, b] : q) qmap[a].push_back(b);
  for (StateId a = 0; a < s1.num_states(); ++a) {
    std::sort(qmap[a].begin(), qmap[a].end());
    if (qmap[a].empty()) add_first(rep, 0, [&](RelationViolation& v) { v.x1 = a; });
  }

  for (auto [x1, x2] : q) {
    auto adm2 = s2.admissible_inputs(x2);
    for (InputId u : adm2) {
      // (i): abstract-admissible inputs must be concretely admissible
      if (s1.post(x1, u).empty()) {
        add_first(rep, 1, [&](RelationViolation& v) { v.x1 = x1; v.x2 = x2; v.u = u; });
        continue;
      }
      // (ii): Q(post1) subseteq post2
      auto p2 = s2.post(x2, u);
      for (StateId x1p : s1.post(x1, u))
        for (StateId x2p : qmap[x1p])
          if (!std::binary_search(p2.begin(), p2.end(), x2p))
            add_first(rep, 2, [&](RelationViolation& v) {
              v.x1 = x1;
              v.x2 = x2;
              v.u = u;
              v.x1_succ = x1p;
            });
    }
    // (iii): initiality
    if (s1.is_initial(x1) && !s2.is_initial(x2))
      add_first(rep, 3, [&](RelationViolation& v) { v.x1 = x1; v.x2 = x2; });
  }
  return rep;
}

RelationReport check_ofrr(const FiniteSystem& s1, const FiniteSystem& s2, const PairList& q,
                          const PairList& z) {
  guard(s1, s2);
  RelationReport rep;
  std::set<std::pair<OutputId, OutputId>> zset(z.begin(), z.end());
  std::set<std::pair<StateId, StateId>> qset(q.begin(), q.end());

  // (i) output-admissibility containment
  for (auto [y1, y2] : z) {
    auto a2 = s2.output_admissible_inputs(y2);
    auto a1 = s1.output_admissible_inputs(y1);
    for (InputId u : a2)
      if (!std::binary_search(a1.begin(), a1.end(), u)) {
        add_first(rep, 1, [&](RelationViolation& v) { v.y1 = y1; v.y2 = y2; v.u = u; });
        break;
      }
  }

  // (ii) every Q pair has an output pair in Z
  for (auto [x1, x2] : q)
    if (!zset.count({s1.output(x1), s2.output(x2)}))
      add_first(rep, 2, [&](RelationViolation& v) {
        v.x1 = x1;
        v.x2 = x2;
        v.y1 = s1.output(x1);
        v.y2 = s2.output(x2);
      });

  // (iii) every Z pair is witnessed by a Q pair
  for (auto [y1, y2] : z) {
    bool witnessed = false;
    for (StateId a : s1.output_preimage(y1)) {
      for (StateId b : s2.output_preimage(y2))
        if (qset.count({a, b})) { witnessed = true; break; }
      if (witnessed) break;
    }
    if (!witnessed)
      add_first(rep, 3, [&](RelationViolation& v) { v.y1 = y1; v.y2 = y2; });
  }
  return rep;
}

PairList canonical_z(const FiniteSystem& s1, const FiniteSystem& s2, const PairList& q) {
  std::set<std::pair<OutputId, OutputId>> zset;
  for (auto [a, b] : q) zset.insert({s1.output(a), s2.output(b)});
  return {zset.begin(), zset.end()};
}

}  // namespace ofsc
