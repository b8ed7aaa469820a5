#include "ofsc/detector.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <ostream>
#include <set>

namespace ofsc {

namespace {

// canonical subset key: singleton (a,a), pair (a,b) with a < b
using Key = std::pair<StateId, StateId>;

}  // namespace

DetectorNfa build_detector_nfa(const FiniteSystem& model) {
  DetectorNfa nfa;
  nfa.model_states = model.num_states();
  nfa.members.push_back({-1, -1});  // dummy initial
  std::map<Key, int> index;
  std::deque<int> frontier;
  auto intern = [&](Key k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = nfa.num_states();
    index.emplace(k, id);
    nfa.members.push_back(k);
    frontier.push_back(id);
    return id;
  };

  // step (1): seed singletons or all 2-subsets per output class
  for (OutputId y = 0; y < model.num_outputs(); ++y) {
    auto xs = model.output_preimage(y);
    if (xs.size() == 1) {
      nfa.edges.push_back({0, -1, y, intern({xs[0], xs[0]})});
    } else if (xs.size() > 1) {
      for (size_t a = 0; a < xs.size(); ++a)
        for (size_t b = a + 1; b < xs.size(); ++b)
          nfa.edges.push_back({0, -1, y, intern({xs[a], xs[b]})});
    }
  }

  // step (2): expand each frontier state under every (u, y)
  while (!frontier.empty()) {
    int q = frontier.front();
    frontier.pop_front();
    auto [a, b] = nfa.members[q];
    for (InputId u = 0; u < model.num_inputs(); ++u) {
      std::set<StateId> post;
      for (StateId s : model.post(a, u)) post.insert(s);
      if (b != a)
        for (StateId s : model.post(b, u)) post.insert(s);
      if (post.empty()) continue;
      // partition by observed output
      std::map<OutputId, std::vector<StateId>> by_y;
      for (StateId s : post) by_y[model.output(s)].push_back(s);
      for (auto& [y, xs] : by_y) {
        if (xs.size() == 1) {
          nfa.edges.push_back({q, u, y, intern({xs[0], xs[0]})});
        } else {
          for (size_t i = 0; i < xs.size(); ++i)
            for (size_t j = i + 1; j < xs.size(); ++j)
              nfa.edges.push_back({q, u, y, intern({xs[i], xs[j]})});
        }
      }
    }
  }
  return nfa;
}

int compute_limit_points(DetectorNfa& nfa) {
  const int n = nfa.num_states();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : nfa.edges) adj[e.src].push_back(e.dst);

  // iterative Tarjan
  std::vector<int> index(n, -1), low(n, 0), scc(n, -1);
  std::vector<char> onstack(n, 0);
  std::vector<int> stack;
  int counter = 0, nscc = 0;
  std::vector<int> scc_size;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<int, size_t>> work{{root, 0}};
    while (!work.empty()) {
      auto& [v, pi] = work.back();
      if (pi == 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        onstack[v] = 1;
      }
      bool descended = false;
      while (pi < adj[v].size()) {
        int w = adj[v][pi++];
        if (index[w] < 0) {
          work.push_back({w, 0});
          descended = true;
          break;
        }
        if (onstack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        int size = 0;
        while (true) {
          int w = stack.back();
          stack.pop_back();
          onstack[w] = 0;
          scc[w] = nscc;
          ++size;
          if (w == v) break;
        }
        scc_size.push_back(size);
        ++nscc;
      }
      int finished = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[finished]);
    }
  }

  std::vector<char> cyc(n, 0);
  for (int v = 0; v < n; ++v)
    if (scc_size[scc[v]] > 1) cyc[v] = 1;
  for (const auto& e : nfa.edges)
    if (e.src == e.dst) cyc[e.src] = 1;

  // forward closure
  nfa.limit.assign(n, 0);
  std::deque<int> q;
  for (int v = 0; v < n; ++v)
    if (cyc[v]) {
      nfa.limit[v] = 1;
      q.push_back(v);
    }
  int count = int(q.size());
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (!nfa.limit[w]) {
        nfa.limit[w] = 1;
        ++count;
        q.push_back(w);
      }
  }
  return count;
}

int transient_period(DetectorNfa& nfa) {
  if (nfa.limit.empty()) compute_limit_points(nfa);
  const int n = nfa.num_states();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : nfa.edges)
    if (!nfa.limit[e.src] && !nfa.limit[e.dst]) adj[e.src].push_back(e.dst);

  // the non-limit subgraph is acyclic; longest edge path from the dummy
  // initial state to a non-limit state, in edges, equals T_t
  std::vector<int> memo(n, -1);
  std::vector<std::pair<int, size_t>> work;
  auto longest = [&](int start) {
    if (memo[start] >= 0) return memo[start];
    work.push_back({start, 0});
    while (!work.empty()) {
      auto& [v, pi] = work.back();
      if (pi < adj[v].size()) {
        int w = adj[v][pi++];
        if (memo[w] < 0) work.push_back({w, 0});
        continue;
      }
      int best = 0;
      for (int w : adj[v]) best = std::max(best, 1 + memo[w]);
      memo[v] = best;
      work.pop_back();
    }
    return memo[start];
  };
  int tt = nfa.limit[0] ? 0 : longest(0);
  nfa.transient_steps = tt;
  return tt;
}

DetectabilityResult is_detectable(const DetectorNfa& nfa) {
  if (nfa.limit.empty()) throw DomainError("is_detectable: limit points not computed");
  DetectabilityResult res;
  int bad = -1;
  for (int q = 1; q < nfa.num_states(); ++q)
    if (nfa.limit[q] && !nfa.is_singleton(q)) { bad = q; break; }
  if (bad < 0) {
    res.detectable = true;
    return res;
  }
  res.detectable = false;
  res.witness_state = bad;

  // lasso: path from the dummy initial state to a cycle, around it, then to
  // `bad`; built from parent pointers of two BFS passes plus a cycle walk
  const int n = nfa.num_states();
  std::vector<std::vector<std::pair<int, int>>> radj(n), fadj(n);  // (node, edge idx)
  for (int i = 0; i < int(nfa.edges.size()); ++i) {
    fadj[nfa.edges[i].src].push_back({nfa.edges[i].dst, i});
    radj[nfa.edges[i].dst].push_back({nfa.edges[i].src, i});
  }
  // find a cycle state that reaches `bad`: backward BFS from bad over limit
  std::vector<int> back_edge(n, -1);
  std::vector<char> seen(n, 0);
  std::deque<int> q{bad};
  seen[bad] = 1;
  int cyc_state = -1;
  auto on_cycle = [&](int v) {
    for (auto [w, ei] : fadj[v])
      if (w == v) return true;
    return false;
  };
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    // a state on a cycle: self loop, or it can reach itself (checked below)
    if (on_cycle(v)) { cyc_state = v; break; }
    // nontrivial cycle membership: BFS from v back to v
    {
      std::vector<char> vis(n, 0);
      std::deque<int> qq;
      for (auto [w, ei] : fadj[v])
        if (!vis[w]) { vis[w] = 1; qq.push_back(w); }
      bool loops = false;
      while (!qq.empty() && !loops) {
        int x = qq.front();
        qq.pop_front();
        if (x == v) loops = true;
        for (auto [w, ei] : fadj[x])
          if (!vis[w]) { vis[w] = 1; qq.push_back(w); }
      }
      if (loops) { cyc_state = v; break; }
    }
    for (auto [w, ei] : radj[v])
      if (!seen[w]) {
        seen[w] = 1;
        back_edge[w] = ei;
        q.push_back(w);
      }
  }
  if (cyc_state < 0) return res;  // witness without a lasso; should not happen

  // stem: dummy initial -> cyc_state
  std::vector<int> stem_edge(n, -1);
  std::vector<char> vis(n, 0);
  std::deque<int> bfs{0};
  vis[0] = 1;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop_front();
    for (auto [w, ei] : fadj[v])
      if (!vis[w]) {
        vis[w] = 1;
        stem_edge[w] = ei;
        bfs.push_back(w);
      }
  }
  std::vector<DetectorNfa::Edge> stem;
  for (int v = cyc_state; v != 0 && stem_edge[v] >= 0;) {
    stem.push_back(nfa.edges[stem_edge[v]]);
    v = nfa.edges[stem_edge[v]].src;
  }
  std::reverse(stem.begin(), stem.end());
  res.lasso = stem;
  // tail: cyc_state -> bad via back_edge chain recorded from the backward BFS
  std::vector<DetectorNfa::Edge> tail;
  for (int v = cyc_state; v != bad && back_edge[v] >= 0;) {
    tail.push_back(nfa.edges[back_edge[v]]);
    v = nfa.edges[back_edge[v]].dst;
  }
  for (auto& e : tail) res.lasso.push_back(e);
  return res;
}

void write_nfa(const DetectorNfa& nfa, std::ostream& os) {
  for (int q = 0; q < nfa.num_states(); ++q) {
    auto [a, b] = nfa.members[q];
    if (q == 0) os << "n 0 0\n";
    else if (a == b) os << "n " << q << " 1 " << a << "\n";
    else os << "n " << q << " 2 " << a << ' ' << b << "\n";
  }
  for (const auto& e : nfa.edges)
    os << "e " << e.src << ' ' << e.u << ' ' << e.y << ' ' << e.dst << "\n";
  if (!nfa.limit.empty()) {
    os << "limit";
    for (int q = 0; q < nfa.num_states(); ++q)
      if (nfa.limit[q]) os << ' ' << q;
    os << "\n";
  }
  if (nfa.transient_steps >= 0) os << "Tt " << nfa.transient_steps << "\n";
}

DetectorRuntime::DetectorRuntime(const FiniteSystem& model)
    : model_(model), knowledge_(model.num_states()) {}

void DetectorRuntime::reset() {
  knowledge_ = Bitset(model_.num_states());
  started_ = false;
  detected_ = false;
  reseeds_ = 0;
}

StateId DetectorRuntime::step(InputId u, OutputId y) {
  Bitset seed(model_.num_states());
  for (StateId x : model_.output_preimage(y)) seed.set(x);
  if (!started_) {
    if (u != -1) throw DomainError("detector: first call must use phi");
    knowledge_ = seed;
    started_ = true;
  } else {
    knowledge_ = knowledge_update(model_, knowledge_, u, y);
    if (knowledge_.empty()) {
      knowledge_ = seed;
      detected_ = false;
      ++reseeds_;
    }
  }
  if (knowledge_.empty()) throw RefusalError("detector: observation inconsistent with the model");
  if (knowledge_.count() == 1) detected_ = true;
  return detected_ && knowledge_.count() == 1 ? StateId(knowledge_.first()) : StateId(-1);
}

CmController::CmController(const Controller& inner) : inner_(inner), memory_(inner.init_memory) {}

void CmController::reset() {
  memory_ = inner_.init_memory;
  active_ = false;
}

InputId CmController::step(StateId obs) {
  if (obs < 0) return -1;  // kappa while undetected
  active_ = true;
  InputId u = inner_.decide(memory_, obs);
  memory_ = inner_.next_memory(memory_, obs);
  if (memory_ < 0) throw RefusalError("controller memory left its domain");
  return u;
}

std::optional<std::vector<InputId>> search_prefix(const FiniteSystem& model, int steps,
                                                  const std::vector<StateId>& domain,
                                                  PrefixMode mode,
                                                  const std::vector<InputId>& input_order,
                                                  int max_steps) {
  if (steps > max_steps) throw DomainError("search_prefix: transient period exceeds the bound");
  std::vector<char> indomain(model.num_states(), 0);
  for (StateId x : domain) indomain[x] = 1;

  std::vector<StateId> start;
  if (mode == PrefixMode::Safe) start = domain;
  else
    for (StateId x = 0; x < model.num_states(); ++x) start.push_back(x);

  if (steps == 0) {
    for (StateId x : start)
      if (!indomain[x]) return std::nullopt;
    return std::vector<InputId>{};
  }

  std::vector<InputId> word(steps, 0);
  std::vector<size_t> pos(steps, 0);
  int depth = 0;
  while (true) {
    if (pos[depth] >= input_order.size()) {
      if (depth == 0) return std::nullopt;
      pos[depth] = 0;
      --depth;
      ++pos[depth];
      continue;
    }
    word[depth] = input_order[pos[depth]];
    // evaluate the word prefix up to `depth`
    std::vector<char> cur(model.num_states(), 0);
    for (StateId x : start) cur[x] = 1;
    bool ok = true;
    for (int t = 0; t <= depth && ok; ++t) {
      std::vector<char> nxt(model.num_states(), 0);
      bool any = false;
      for (StateId x = 0; x < model.num_states(); ++x) {
        if (!cur[x]) continue;
        auto p = model.post(x, word[t]);
        if (p.empty()) { ok = false; break; }  // a run blocks: reject word
        for (StateId s : p) {
          nxt[s] = 1;
          any = true;
        }
      }
      if (!ok || !any) { ok = false; break; }
      if (mode == PrefixMode::Safe)
        for (StateId x = 0; x < model.num_states() && ok; ++x)
          if (nxt[x] && !indomain[x]) ok = false;
      if (ok && t == steps - 1 && mode == PrefixMode::Reach)
        for (StateId x = 0; x < model.num_states() && ok; ++x)
          if (nxt[x] && !indomain[x]) ok = false;
      cur.swap(nxt);
    }
    if (ok) {
      if (depth == steps - 1) return word;
      ++depth;
      pos[depth] = 0;
    } else {
      ++pos[depth];
    }
  }
}

}  // namespace ofsc
