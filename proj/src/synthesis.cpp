#include "ofsc/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

namespace ofsc {

namespace {

std::vector<char> output_set_to_states(const FiniteSystem& fs, const std::vector<OutputId>& ys) {
  std::vector<char> inset(fs.num_states(), 0);
  for (OutputId y : ys)
    for (StateId x : fs.output_preimage(y)) inset[x] = 1;
  return inset;
}

// Input choice among candidates: maximum margin, ties to the lowest id.
InputId pick(const FiniteSystem& fs, StateId x, const std::vector<InputId>& candidates) {
  InputId best = -1;
  double bm = -1e300;
  for (InputId u : candidates)
    if (fs.margin(x, u) > bm + 1e-12) {
      bm = fs.margin(x, u);
      best = u;
    }
  return best;
}

// Maximal W inside `allowed` with exists u: {} != post(x,u) subseteq W.
// Counter-based worklist over the predecessor index.
std::vector<char> controlled_invariant(const FiniteSystem& fs, const std::vector<char>& allowed) {
  const int nx = fs.num_states(), nu = fs.num_inputs();
  std::vector<char> in(allowed);
  std::vector<int> bad(size_t(nx) * nu, 0);
  std::vector<int> valid(nx, 0);
  std::deque<StateId> dead;
  for (StateId x = 0; x < nx; ++x) {
    for (InputId u = 0; u < nu; ++u) {
      auto p = fs.post(x, u);
      if (p.empty()) continue;
      int b = 0;
      for (StateId s : p)
        if (!in[s]) ++b;
      bad[size_t(x) * nu + u] = b;
      if (b == 0) ++valid[x];
    }
    if (in[x] && valid[x] == 0) dead.push_back(x);
  }
  while (!dead.empty()) {
    StateId x = dead.front();
    dead.pop_front();
    if (!in[x]) continue;
    in[x] = 0;
    for (auto [p, u] : fs.pre(x)) {
      if (bad[size_t(p) * nu + u]++ == 0) {
        if (--valid[p] == 0 && in[p]) dead.push_back(p);
      }
    }
  }
  return in;
}

std::vector<InputId> invariant_inputs(const FiniteSystem& fs, StateId x,
                                      const std::vector<char>& w) {
  std::vector<InputId> res;
  for (InputId u = 0; u < fs.num_inputs(); ++u) {
    auto p = fs.post(x, u);
    if (p.empty()) continue;
    bool all = true;
    for (StateId s : p)
      if (!w[s]) { all = false; break; }
    if (all) res.push_back(u);
  }
  return res;
}

// Least fixed point W = target cup {x | exists u: {} != post subseteq W},
// with ranks. Worklist attractor over the predecessor index.
std::pair<std::vector<int>, std::vector<char>> attractor(const FiniteSystem& fs,
                                                         const std::vector<char>& target) {
  const int nx = fs.num_states(), nu = fs.num_inputs();
  std::vector<char> in(nx, 0);
  std::vector<int> rank(nx, -1);
  std::vector<int> out(size_t(nx) * nu, 0);
  std::vector<char> nonempty(size_t(nx) * nu, 0);
  std::deque<StateId> q;
  for (StateId x = 0; x < nx; ++x)
    for (InputId u = 0; u < nu; ++u) {
      auto p = fs.post(x, u);
      out[size_t(x) * nu + u] = int(p.size());
      nonempty[size_t(x) * nu + u] = !p.empty();
    }
  for (StateId x = 0; x < nx; ++x)
    if (target[x]) {
      in[x] = 1;
      rank[x] = 0;
      q.push_back(x);
    }
  while (!q.empty()) {
    StateId s = q.front();
    q.pop_front();
    for (auto [p, u] : fs.pre(s)) {
      if (--out[size_t(p) * nu + u] == 0 && nonempty[size_t(p) * nu + u] && !in[p]) {
        in[p] = 1;
        rank[p] = rank[s] + 1;  // BFS over certification order
        q.push_back(p);
      }
    }
  }
  // tighten ranks: rank(x) = 1 + max rank over successors of the best input
  return {std::move(rank), std::move(in)};
}

std::vector<InputId> progress_inputs(const FiniteSystem& fs, StateId x,
                                     const std::vector<int>& rank) {
  std::vector<InputId> res;
  for (InputId u = 0; u < fs.num_inputs(); ++u) {
    auto p = fs.post(x, u);
    if (p.empty()) continue;
    bool ok = true;
    for (StateId s : p)
      if (rank[s] < 0 || rank[s] >= rank[x]) { ok = false; break; }
    if (ok) res.push_back(u);
  }
  return res;
}

Controller make_memoryless(const FiniteSystem& fs) {
  Controller c;
  c.num_memory = 1;
  c.init_memory = 0;
  c.num_obs = fs.num_states();
  c.decision.assign(1, std::vector<InputId>(fs.num_states(), -1));
  c.memory_next.assign(1, std::vector<int>(fs.num_states(), 0));
  c.permissive.assign(1, {});
  c.permissive[0].resize(fs.num_states());
  return c;
}

}  // namespace

Controller solve_safety(const FiniteSystem& fs, const std::vector<OutputId>& safe_outputs) {
  if (safe_outputs.empty()) throw DomainError("solve_safety: empty safe set");
  auto w = controlled_invariant(fs, output_set_to_states(fs, safe_outputs));
  Controller c = make_memoryless(fs);
  for (StateId x = 0; x < fs.num_states(); ++x) {
    if (!w[x]) continue;
    auto inputs = invariant_inputs(fs, x, w);
    c.decision[0][x] = pick(fs, x, inputs);
    c.permissive[0][x] = std::move(inputs);
    c.domain.push_back(x);
  }
  if (c.domain.empty()) throw NoControllerError("solve_safety: empty winning region");
  return c;
}

std::vector<int> reach_ranks(const FiniteSystem& fs, const std::vector<OutputId>& targets) {
  auto [rank, in] = attractor(fs, output_set_to_states(fs, targets));
  return rank;
}

Controller solve_reach(const FiniteSystem& fs, const std::vector<OutputId>& target_outputs) {
  if (target_outputs.empty()) throw DomainError("solve_reach: empty target set");
  auto tgt = output_set_to_states(fs, target_outputs);
  auto [rank, in] = attractor(fs, tgt);
  Controller c = make_memoryless(fs);
  for (StateId x = 0; x < fs.num_states(); ++x) {
    if (!in[x]) continue;
    std::vector<InputId> inputs;
    if (rank[x] > 0) {
      inputs = progress_inputs(fs, x, rank);
    } else {
      // inside the target: stay in the winning region when possible
      std::vector<char> w(in.begin(), in.end());
      inputs = invariant_inputs(fs, x, w);
      if (inputs.empty()) inputs = fs.admissible_inputs(x);
    }
    if (inputs.empty() && rank[x] > 0) continue;  // unreachable given ranks
    c.decision[0][x] = inputs.empty() ? -1 : pick(fs, x, inputs);
    c.permissive[0][x] = std::move(inputs);
    c.domain.push_back(x);
  }
  if (c.domain.empty()) throw NoControllerError("solve_reach: empty winning region");
  return c;
}

Controller solve_bounded(const FiniteSystem& fs, const Spec& spec) {
  if (spec.kind != Spec::Kind::SafeBounded && spec.kind != Spec::Kind::ReachBounded)
    throw DomainError("solve_bounded: wrong spec kind");
  if (spec.to < spec.from || spec.from < 0) throw DomainError("solve_bounded: bad window");
  if (spec.to > 10000) throw DomainError("solve_bounded: horizon too long");
  const int nx = fs.num_states();
  const int b = spec.to;
  auto inset = output_set_to_states(fs, spec.targets.at(0));
  const bool safe = spec.kind == Spec::Kind::SafeBounded;

  // win[t][x]: controller can satisfy the remaining window from x at step t
  std::vector<std::vector<char>> win(b + 1, std::vector<char>(nx, 0));
  std::vector<std::vector<InputId>> act(b + 1, std::vector<InputId>(nx, -1));
  for (int t = b; t >= 0; --t) {
    for (StateId x = 0; x < nx; ++x) {
      bool now = t >= spec.from && t <= spec.to && inset[x];
      if (safe) {
        if (t >= spec.from && !inset[x]) continue;
        if (t == b) { win[t][x] = 1; continue; }
      } else {
        if (now) { win[t][x] = 1; continue; }  // satisfied; nothing further required
        if (t == b) continue;
      }
      std::vector<InputId> ok;
      for (InputId u = 0; u < fs.num_inputs(); ++u) {
        auto p = fs.post(x, u);
        if (p.empty()) continue;
        bool all = true;
        for (StateId s : p)
          if (!win[t + 1][s]) { all = false; break; }
        if (all) ok.push_back(u);
      }
      if (!ok.empty()) {
        win[t][x] = 1;
        act[t][x] = pick(fs, x, ok);
      }
    }
  }

  Controller c;
  c.num_memory = b + 1;
  c.init_memory = 0;
  c.num_obs = nx;
  c.decision.assign(b + 1, std::vector<InputId>(nx, -1));
  c.memory_next.assign(b + 1, std::vector<int>(nx, 0));
  for (int t = 0; t <= b; ++t)
    for (StateId x = 0; x < nx; ++x) {
      c.memory_next[t][x] = std::min(t + 1, b);
      if (act[t][x] >= 0) c.decision[t][x] = act[t][x];
      else if (win[t][x]) {
        auto adm = fs.admissible_inputs(x);
        if (!adm.empty()) c.decision[t][x] = pick(fs, x, adm);
      }
    }
  for (StateId x = 0; x < nx; ++x)
    if (win[0][x]) c.domain.push_back(x);
  if (c.domain.empty()) throw NoControllerError("solve_bounded: empty winning region");
  return c;
}

Controller solve_recurrence_hold(const FiniteSystem& fs,
                                 const std::vector<std::vector<OutputId>>& targets, int hold) {
  const int k = int(targets.size());
  if (k < 1) throw DomainError("solve_recurrence_hold: need at least one target");
  if (hold < 1) throw DomainError("solve_recurrence_hold: hold must be >= 1");
  const int nx = fs.num_states();

  std::vector<std::vector<char>> tset;
  for (auto& t : targets) tset.push_back(output_set_to_states(fs, t));

  // greatest fixed point: V[i] = Attr(holdable entry set of T_i continuing in V[i+1])
  std::vector<std::vector<char>> v(k, std::vector<char>(nx, 1));
  std::vector<std::vector<std::vector<char>>> chain(k);  // chain[i][j], j = 0..hold-1
  std::vector<std::vector<int>> vrank(k);
  for (int iter = 0;; ++iter) {
    if (iter > 2 * nx + 4) throw DomainError("solve_recurrence_hold: fixed point did not settle");
    bool stable = true;
    std::vector<std::vector<char>> vnew(k);
    for (int i = 0; i < k; ++i) {
      const auto& cont = v[(i + 1) % k];
      // D_{hold-1} = T_i cap continuation, D_j = T_i cap pre(D_{j+1})
      std::vector<std::vector<char>> d(hold);
      d[hold - 1].assign(nx, 0);
      for (StateId x = 0; x < nx; ++x) d[hold - 1][x] = tset[i][x] && cont[x];
      for (int j = hold - 2; j >= 0; --j) {
        d[j].assign(nx, 0);
        for (StateId x = 0; x < nx; ++x) {
          if (!tset[i][x]) continue;
          for (InputId u = 0; u < fs.num_inputs(); ++u) {
            auto p = fs.post(x, u);
            if (p.empty()) continue;
            bool all = true;
            for (StateId s : p)
              if (!d[j + 1][s]) { all = false; break; }
            if (all) { d[j][x] = 1; break; }
          }
        }
      }
      auto [rank, in] = attractor(fs, d[0]);
      vnew[i] = in;
      chain[i] = std::move(d);
      vrank[i] = std::move(rank);
      if (vnew[i] != v[i]) stable = false;
    }
    v = std::move(vnew);
    if (stable) break;
  }

  // memory layout: i*(hold+1) = travel toward T_i, i*(hold+1)+1+j = hold step j
  const int per = hold + 1;
  Controller c;
  c.num_memory = k * per;
  c.init_memory = 0;
  c.num_obs = nx;
  c.decision.assign(c.num_memory, std::vector<InputId>(nx, -1));
  c.memory_next.assign(c.num_memory, std::vector<int>(nx, -1));

  auto travel_m = [&](int i) { return i * per; };
  auto hold_m = [&](int i, int j) { return i * per + 1 + j; };

  for (int i = 0; i < k; ++i) {
    int inext = (i + 1) % k;
    for (StateId x = 0; x < nx; ++x) {
      // memory transition consumed the observation; decisions follow the
      // phase the update lands in
      int m_in_travel = chain[i][0][x] ? hold_m(i, 0) : travel_m(i);
      c.memory_next[travel_m(i)][x] = m_in_travel;
      for (int j = 0; j < hold; ++j) {
        int m_next;
        if (!tset[i][x]) m_next = travel_m(i);  // hold broken, re-approach
        else if (j + 1 < hold) m_next = hold_m(i, j + 1);
        else m_next = chain[inext][0][x] ? hold_m(inext, 0) : travel_m(inext);
        c.memory_next[hold_m(i, j)][x] = m_next;
      }
    }
  }
  // decisions per effective phase
  for (int i = 0; i < k; ++i) {
    for (StateId x = 0; x < nx; ++x) {
      // travel phase: attractor progress toward chain[i][0]
      if (v[i][x] && !chain[i][0][x] && vrank[i][x] > 0) {
        auto inputs = progress_inputs(fs, x, vrank[i]);
        if (!inputs.empty()) c.decision[travel_m(i)][x] = pick(fs, x, inputs);
      }
      // hold step j: stay inside the chain
      for (int j = 0; j < hold; ++j) {
        if (!chain[i][j][x]) continue;
        if (j + 1 < hold) {
          std::vector<InputId> inputs;
          for (InputId u = 0; u < fs.num_inputs(); ++u) {
            auto p = fs.post(x, u);
            if (p.empty()) continue;
            bool all = true;
            for (StateId s : p)
              if (!chain[i][j + 1][s]) { all = false; break; }
            if (all) inputs.push_back(u);
          }
          if (!inputs.empty()) c.decision[hold_m(i, j)][x] = pick(fs, x, inputs);
        }
        // j == hold-1: the memory update switches mode; the decision comes
        // from the next phase's table via the update, handled by the runtime
      }
    }
  }
  // last hold step and travel-landing decisions: route through the updated
  // memory so (m, x) pairs reachable right after a switch are defined
  for (int m = 0; m < c.num_memory; ++m)
    for (StateId x = 0; x < nx; ++x) {
      if (c.decision[m][x] >= 0) continue;
      int m2 = c.memory_next[m][x];
      if (m2 >= 0 && m2 != m && c.decision[m2][x] >= 0) c.decision[m][x] = c.decision[m2][x];
    }

  for (StateId x = 0; x < nx; ++x)
    if (v[0][x]) c.domain.push_back(x);
  if (c.domain.empty()) throw NoControllerError("solve_recurrence_hold: empty winning region");
  return c;
}

Controller rekey_by_output(const Controller& c, const FiniteSystem& fs) {
  Controller out = c;
  out.num_obs = fs.num_outputs();
  out.decision.assign(c.num_memory, std::vector<InputId>(fs.num_outputs(), -1));
  out.memory_next.assign(c.num_memory, std::vector<int>(fs.num_outputs(), -1));
  out.permissive.clear();
  std::vector<char> indomain(fs.num_states(), 0);
  for (StateId x : c.domain) indomain[x] = 1;
  for (StateId x = 0; x < fs.num_states(); ++x) {
    OutputId y = fs.output(x);
    for (int m = 0; m < c.num_memory; ++m) {
      if (c.decision[m][x] < 0) continue;
      if (out.decision[m][y] >= 0 && out.decision[m][y] != c.decision[m][x])
        throw ConfigError(
            "controller is not realizable over outputs: output " + std::to_string(y) +
            " merges states with different decisions; use an estimation-based method");
      out.decision[m][y] = c.decision[m][x];
      out.memory_next[m][y] = c.memory_next[m][x];
    }
  }
  return out;
}

bool verify_closed_loop(const FiniteSystem& fs, const Controller& c, const Spec& spec) {
  auto inset = output_set_to_states(fs, spec.targets.at(0));
  if (spec.kind == Spec::Kind::Safe) {
    // closed loop from every domain state remains in domain and in F
    std::vector<char> dom(fs.num_states(), 0);
    for (StateId x : c.domain) dom[x] = 1;
    for (StateId x : c.domain) {
      if (!inset[x]) return false;
      InputId u = c.decision[0][x];
      if (u < 0) return false;
      auto p = fs.post(x, u);
      if (p.empty()) return false;
      for (StateId s : p)
        if (!dom[s]) return false;
    }
    return true;
  }
  if (spec.kind == Spec::Kind::Reach) {
    // all closed-loop paths from the domain hit the target within |X| steps
    std::vector<char> dom(fs.num_states(), 0);
    for (StateId x : c.domain) dom[x] = 1;
    for (StateId x0 : c.domain) {
      std::vector<char> cur(fs.num_states(), 0);
      cur[x0] = 1;
      bool reached = inset[x0];
      for (int t = 0; t < fs.num_states() && !reached; ++t) {
        std::vector<char> nxt(fs.num_states(), 0);
        bool all_reached = true;
        for (StateId x = 0; x < fs.num_states(); ++x) {
          if (!cur[x]) continue;
          InputId u = c.decision[0][x];
          if (u < 0) return false;
          auto p = fs.post(x, u);
          if (p.empty()) return false;
          for (StateId s : p) {
            if (!inset[s]) {
              nxt[s] = 1;
              all_reached = false;
            }
          }
        }
        reached = all_reached;
        cur.swap(nxt);
      }
      if (!reached) return false;
    }
    return true;
  }
  throw DomainError("verify_closed_loop: unsupported spec kind");
}

void Controller::write(std::ostream& os) const {
  os << "memstates " << num_memory << "\n";
  os << "obs " << num_obs << "\n";
  os << "init " << init_memory << "\n";
  for (int m = 0; m < num_memory; ++m)
    for (int y = 0; y < num_obs; ++y)
      if (decision[m][y] >= 0) os << "d " << m << ' ' << y << ' ' << decision[m][y] << "\n";
  for (int m = 0; m < num_memory; ++m)
    for (int y = 0; y < num_obs; ++y)
      if (memory_next[m][y] >= 0) os << "g " << m << ' ' << y << ' ' << memory_next[m][y] << "\n";
  os << "domain";
  for (StateId x : domain) os << ' ' << x;
  os << "\n";
  if (!permissive.empty())
    for (int m = 0; m < num_memory; ++m)
      for (int y = 0; y < num_obs && m < int(permissive.size()); ++y) {
        if (y >= int(permissive[m].size()) || permissive[m][y].empty()) continue;
        os << "P " << m << ' ' << y;
        for (InputId u : permissive[m][y]) os << ' ' << u;
        os << "\n";
      }
}

Controller Controller::read(std::istream& is) {
  Controller c;
  c.num_memory = 0;
  std::string line, key;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls >> key;
    auto fail = [&](const std::string& m) {
      throw ConfigError("controller line " + std::to_string(lineno) + ": " + m);
    };
    if (key == "memstates") ls >> c.num_memory;
    else if (key == "obs") {
      ls >> c.num_obs;
      if (c.num_memory <= 0 || c.num_obs <= 0) fail("bad header");
      c.decision.assign(c.num_memory, std::vector<InputId>(c.num_obs, -1));
      c.memory_next.assign(c.num_memory, std::vector<int>(c.num_obs, -1));
    } else if (key == "init") ls >> c.init_memory;
    else if (key == "d") {
      int m, y, u;
      if (!(ls >> m >> y >> u)) fail("bad decision");
      c.decision.at(m).at(y) = u;
    } else if (key == "g") {
      int m, y, m2;
      if (!(ls >> m >> y >> m2)) fail("bad memory update");
      c.memory_next.at(m).at(y) = m2;
    } else if (key == "domain") {
      StateId x;
      while (ls >> x) c.domain.push_back(x);
    } else if (key == "P") {
      int m, y, u;
      ls >> m >> y;
      if (c.permissive.empty())
        c.permissive.assign(c.num_memory, std::vector<std::vector<InputId>>(c.num_obs));
      while (ls >> u) c.permissive.at(m).at(y).push_back(u);
    } else fail("unknown key '" + key + "'");
  }
  if (c.num_memory <= 0 || c.num_obs <= 0) throw ConfigError("controller: missing header");
  return c;
}

}  // namespace ofsc
