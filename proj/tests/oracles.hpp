// Independent brute-force oracles used by the property tests. Everything in
// here deliberately avoids the library's algorithmic paths: plain
// enumeration, exhaustive strategy search, depth-bounded BFS.
#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "ofsc/detector.hpp"
#include "ofsc/finite_system.hpp"

namespace oracles {

using namespace ofsc;

inline FiniteSystem random_system(std::mt19937_64& rng, int nx, int nu, int ny,
                                  double edge_prob = 0.35, bool total = false) {
  FiniteSystem fs(nx, nu, ny);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> state(0, nx - 1), out(0, ny - 1);
  for (StateId x = 0; x < nx; ++x) fs.set_output(x, out(rng));
  for (StateId x = 0; x < nx; ++x)
    for (InputId u = 0; u < nu; ++u) {
      bool any = false;
      for (StateId xp = 0; xp < nx; ++xp)
        if (coin(rng) < edge_prob) {
          fs.add_transition(x, u, xp);
          any = true;
        }
      if (total && !any) fs.add_transition(x, u, state(rng));
    }
  for (StateId x = 0; x < nx; ++x) fs.set_initial(x);
  fs.finalize();
  return fs;
}

// All (alpha, beta)-successors by explicit path enumeration (DFS over all
// transition paths, checking outputs as visited).
inline std::set<StateId> path_enum_post(const FiniteSystem& fs, const std::vector<StateId>& start,
                                        const std::vector<InputId>& alpha,
                                        const std::vector<OutputId>& beta) {
  std::set<StateId> res;
  struct Frame { StateId x; size_t depth; };
  std::vector<Frame> stack;
  for (StateId x : start)
    if (fs.output(x) == beta[0]) stack.push_back({x, 0});
  while (!stack.empty()) {
    auto [x, d] = stack.back();
    stack.pop_back();
    if (d == alpha.size()) {
      res.insert(x);
      continue;
    }
    for (StateId xp : fs.post(x, alpha[d]))
      if (fs.output(xp) == beta[d + 1]) stack.push_back({xp, d + 1});
  }
  return res;
}

// Safety domain by exhaustive positional-strategy enumeration: x is winning
// iff some strategy keeps every run from x inside F forever.
inline std::vector<char> safety_domain_oracle(const FiniteSystem& fs,
                                              const std::vector<char>& in_f) {
  const int nx = fs.num_states(), nu = fs.num_inputs();
  std::vector<char> win(nx, 0);
  long total = 1;
  for (int i = 0; i < nx; ++i) total *= nu;
  for (long code = 0; code < total; ++code) {
    std::vector<InputId> strat(nx);
    long c = code;
    for (int i = 0; i < nx; ++i) {
      strat[i] = InputId(c % nu);
      c /= nu;
    }
    // under this strategy: safe states = largest set closed under the moves
    std::vector<char> ok(nx, 1);
    bool changed = true;
    while (changed) {
      changed = false;
      for (StateId x = 0; x < nx; ++x) {
        if (!ok[x]) continue;
        if (!in_f[x] || fs.post(x, strat[x]).empty()) {
          ok[x] = 0;
          changed = true;
          continue;
        }
        for (StateId s : fs.post(x, strat[x]))
          if (!ok[s]) {
            ok[x] = 0;
            changed = true;
            break;
          }
      }
    }
    for (StateId x = 0; x < nx; ++x)
      if (ok[x]) win[x] = 1;
  }
  return win;
}

// Reach domain by exhaustive positional-strategy enumeration: all runs from x
// must hit T within |X| steps.
inline std::vector<char> reach_domain_oracle(const FiniteSystem& fs,
                                             const std::vector<char>& in_t) {
  const int nx = fs.num_states(), nu = fs.num_inputs();
  std::vector<char> win(nx, 0);
  long total = 1;
  for (int i = 0; i < nx; ++i) total *= nu;
  for (long code = 0; code < total; ++code) {
    std::vector<InputId> strat(nx);
    long c = code;
    for (int i = 0; i < nx; ++i) {
      strat[i] = InputId(c % nu);
      c /= nu;
    }
    for (StateId x0 = 0; x0 < nx; ++x0) {
      if (win[x0]) continue;
      // BFS over strategy-closed runs; fail on blocking, escape beyond |X|
      std::vector<char> cur(nx, 0);
      cur[x0] = 1;
      bool good = in_t[x0], dead = false;
      for (int t = 0; t < nx && !good && !dead; ++t) {
        std::vector<char> nxt(nx, 0);
        bool all_hit = true, any = false;
        for (StateId x = 0; x < nx; ++x) {
          if (!cur[x]) continue;
          auto p = fs.post(x, strat[x]);
          if (p.empty()) { dead = true; break; }
          for (StateId s : p) {
            if (!in_t[s]) { nxt[s] = 1; all_hit = false; }
            any = true;
          }
        }
        if (dead) break;
        if (any && all_hit) { good = true; break; }
        cur.swap(nxt);
      }
      if (good) win[x0] = 1;
    }
  }
  return win;
}

// Classical Buchi game solver on an explicit product arena used as the
// recurrence-hold oracle. Controller picks the input, environment the
// successor; win = visit `accept` infinitely often.
struct ProductArena {
  int n = 0;
  std::vector<std::vector<std::vector<int>>> succ;  // succ[v][u] = successors
  std::vector<char> accept;
};

// nu Z . mu Y . ((B cap Pre(Z)) cup Pre(Y)) with the controllable
// predecessor Pre(S) = { v | exists u: {} != succ(v,u) subseteq S }.
inline std::vector<char> buchi_win(const ProductArena& a) {
  const int n = a.n;
  const int nu = n ? int(a.succ[0].size()) : 0;
  auto pre_of = [&](int v, const std::vector<char>& s) {
    for (int u = 0; u < nu; ++u) {
      const auto& succ = a.succ[v][u];
      if (succ.empty()) continue;
      bool all = true;
      for (int w : succ)
        if (!s[w]) { all = false; break; }
      if (all) return true;
    }
    return false;
  };
  std::vector<char> z(n, 1);
  while (true) {
    std::vector<char> core(n, 0);
    for (int v = 0; v < n; ++v) core[v] = a.accept[v] && pre_of(v, z);
    std::vector<char> y = core;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int v = 0; v < n; ++v)
        if (!y[v] && pre_of(v, y)) {
          y[v] = 1;
          changed = true;
        }
    }
    if (y == z) return z;
    z = y;
  }
}

// Limit points by pumping depth: states occurring at edge-depth >= |Q| in
// some run from the initial state (cap 2|Q|+1).
inline std::vector<char> limit_points_oracle(const DetectorNfa& nfa) {
  const int n = nfa.num_states();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : nfa.edges) adj[e.src].push_back(e.dst);
  std::vector<char> res(n, 0);
  std::vector<char> cur(n, 0);
  cur[0] = 1;
  for (int depth = 1; depth <= 2 * n + 1; ++depth) {
    std::vector<char> nxt(n, 0);
    for (int v = 0; v < n; ++v) {
      if (!cur[v]) continue;
      for (int w : adj[v]) nxt[w] = 1;
    }
    if (depth >= n)
      for (int v = 0; v < n; ++v)
        if (nxt[v]) res[v] = 1;
    cur.swap(nxt);
  }
  return res;
}

// Transient period by feasible-word depth: max input count whose word can
// end on a non-limit state, plus one (0 when none).
inline int transient_period_oracle(const DetectorNfa& nfa, const std::vector<char>& limit) {
  const int n = nfa.num_states();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : nfa.edges) adj[e.src].push_back(e.dst);
  int worst = -1;  // edge-depth of the deepest non-limit landing
  std::vector<char> cur(n, 0);
  cur[0] = 1;
  for (int depth = 1; depth <= n + 1; ++depth) {
    std::vector<char> nxt(n, 0);
    bool any = false;
    for (int v = 0; v < n; ++v) {
      if (!cur[v]) continue;
      for (int w : adj[v]) {
        nxt[w] = 1;
        if (!limit[w]) {
          worst = std::max(worst, depth);
          any = true;
        }
      }
    }
    cur.swap(nxt);
    if (!any && depth > worst + 1 && depth > n) break;
  }
  // a word of t inputs traces t+1 edges; deepest non-limit at edge-depth d
  // fails words of d-1 inputs, so T_t = d
  return worst < 0 ? 0 : worst;
}

// AND-OR search over knowledge sets: does an observation-feedback strategy
// win Safe(F) / Reach(T) from the given initial knowledge? Independent of
// the subset-construction module (works directly on set states).
struct KnowledgeSearch {
  const FiniteSystem& fs;
  std::vector<char> inset;  // over outputs
  bool safe_mode;
  std::map<std::vector<StateId>, int> memo;  // 0 unknown/in progress, 1 win, 2 lose

  bool knowledge_ok(const std::vector<StateId>& k) {
    if (!safe_mode) return true;
    for (StateId x : k)
      if (!inset[fs.output(x)]) return false;
    return true;
  }
  bool target_hit(const std::vector<StateId>& k) {
    if (safe_mode) return false;
    for (StateId x : k)
      if (!inset[fs.output(x)]) return false;
    return true;  // universal: every consistent state is in the target
  }

  bool win(const std::vector<StateId>& k, std::set<std::vector<StateId>>& path) {
    if (!knowledge_ok(k)) return false;
    if (target_hit(k)) return true;
    auto it = memo.find(k);
    if (it != memo.end() && it->second) return it->second == 1;
    if (path.count(k)) return safe_mode;  // revisit: safe wins, reach loses
    path.insert(k);
    bool res = false;
    for (InputId u = 0; u < fs.num_inputs() && !res; ++u) {
      std::set<StateId> post;
      for (StateId x : k)
        for (StateId s : fs.post(x, u)) post.insert(s);
      if (post.empty()) continue;
      // split by observation; strategy must win every branch
      std::map<OutputId, std::vector<StateId>> branches;
      for (StateId s : post) branches[fs.output(s)].push_back(s);
      bool all = true;
      for (auto& [y, ks] : branches)
        if (!win(ks, path)) { all = false; break; }
      res = all;
    }
    path.erase(k);
    memo[k] = res ? 1 : 2;
    return res;
  }
};

}  // namespace oracles
