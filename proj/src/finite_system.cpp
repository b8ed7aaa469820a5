#include "ofsc/finite_system.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>

namespace ofsc {

FiniteSystem::FiniteSystem(int num_states, int num_inputs, int num_outputs)
    : nx_(num_states), nu_(num_inputs), ny_(num_outputs), outmap_(num_states, -1) {
  if (num_states <= 0 || num_inputs <= 0 || num_outputs <= 0)
    throw DomainError("finite system: all sets must be nonempty");
}

void FiniteSystem::check_state(StateId x) const {
  if (x < 0 || x >= nx_) throw DomainError("invalid state id " + std::to_string(x));
}
void FiniteSystem::check_input(InputId u) const {
  if (u < 0 || u >= nu_) throw DomainError("invalid input id " + std::to_string(u));
}
void FiniteSystem::check_output(OutputId y) const {
  if (y < 0 || y >= ny_) throw DomainError("invalid output id " + std::to_string(y));
}

void FiniteSystem::add_transition(StateId x, InputId u, StateId xp) {
  if (finalized_) throw DomainError("system is finalized");
  check_state(x);
  check_input(u);
  check_state(xp);
  build_buf_.emplace_back(uint64_t(row(x, u)), xp);
}

void FiniteSystem::set_output(StateId x, OutputId y) {
  if (finalized_) throw DomainError("system is finalized");
  check_state(x);
  check_output(y);
  outmap_[x] = y;
}

void FiniteSystem::set_initial(StateId x, bool on) {
  if (finalized_) throw DomainError("system is finalized");
  check_state(x);
  auto it = std::find(initial_.begin(), initial_.end(), x);
  if (on && it == initial_.end()) initial_.push_back(x);
  if (!on && it != initial_.end()) initial_.erase(it);
}

void FiniteSystem::set_margin(StateId x, InputId u, double m) {
  check_state(x);
  check_input(u);
  if (margins_.empty()) margins_.assign(size_t(nx_) * nu_, 0.0);
  margins_[row(x, u)] = m;
}

void FiniteSystem::finalize() {
  if (finalized_) return;
  for (StateId x = 0; x < nx_; ++x)
    if (outmap_[x] < 0) throw DomainError("output map not total at state " + std::to_string(x));
  if (initial_.empty()) throw DomainError("initial state set must be nonempty");
  std::sort(initial_.begin(), initial_.end());

  std::sort(build_buf_.begin(), build_buf_.end());
  build_buf_.erase(std::unique(build_buf_.begin(), build_buf_.end()), build_buf_.end());
  row_off_.assign(size_t(nx_) * nu_ + 1, 0);
  succ_.resize(build_buf_.size());
  for (auto& [r, xp] : build_buf_) row_off_[r + 1]++;
  for (size_t i = 1; i < row_off_.size(); ++i) row_off_[i] += row_off_[i - 1];
  for (size_t i = 0; i < build_buf_.size(); ++i) succ_[i] = build_buf_[i].second;
  build_buf_.clear();
  build_buf_.shrink_to_fit();

  out_off_.assign(ny_ + 1, 0);
  out_pre_.resize(nx_);
  for (StateId x = 0; x < nx_; ++x) out_off_[outmap_[x] + 1]++;
  for (int y = 0; y < ny_; ++y) out_off_[y + 1] += out_off_[y];
  std::vector<long> cur(out_off_.begin(), out_off_.end() - 1);
  for (StateId x = 0; x < nx_; ++x) out_pre_[cur[outmap_[x]]++] = x;
  finalized_ = true;
}

bool FiniteSystem::is_initial(StateId x) const {
  check_state(x);
  return std::binary_search(initial_.begin(), initial_.end(), x);
}

OutputId FiniteSystem::output(StateId x) const {
  check_state(x);
  return outmap_[x];
}

std::span<const StateId> FiniteSystem::output_preimage(OutputId y) const {
  check_output(y);
  return {out_pre_.data() + out_off_[y], size_t(out_off_[y + 1] - out_off_[y])};
}

std::span<const StateId> FiniteSystem::post(StateId x, InputId u) const {
  check_state(x);
  check_input(u);
  size_t r = row(x, u);
  return {succ_.data() + row_off_[r], size_t(row_off_[r + 1] - row_off_[r])};
}

bool FiniteSystem::has_transition(StateId x, InputId u, StateId xp) const {
  auto p = post(x, u);
  return std::binary_search(p.begin(), p.end(), xp);
}

double FiniteSystem::margin(StateId x, InputId u) const {
  if (margins_.empty()) return 0.0;
  return margins_[row(x, u)];
}

std::vector<InputId> FiniteSystem::admissible_inputs(StateId x) const {
  check_state(x);
  std::vector<InputId> res;
  for (InputId u = 0; u < nu_; ++u)
    if (!post(x, u).empty()) res.push_back(u);
  return res;
}

std::vector<InputId> FiniteSystem::output_admissible_inputs(OutputId y) const {
  auto pre = output_preimage(y);
  if (pre.empty()) throw DomainError("output " + std::to_string(y) + " has empty preimage");
  std::vector<InputId> res;
  for (InputId u = 0; u < nu_; ++u) {
    bool all = true;
    for (StateId x : pre)
      if (post(x, u).empty()) { all = false; break; }
    if (all) res.push_back(u);
  }
  return res;
}

std::vector<OutputId> FiniteSystem::output_post(OutputId y, InputId u) const {
  auto adm = output_admissible_inputs(y);
  if (!std::binary_search(adm.begin(), adm.end(), u))
    throw DomainError("input " + std::to_string(u) + " not output-admissible for output " +
                      std::to_string(y));
  std::set<OutputId> res;
  for (StateId x : output_preimage(y))
    for (StateId xp : post(x, u)) res.insert(outmap_[xp]);
  return {res.begin(), res.end()};
}

std::vector<StateId> FiniteSystem::alpha_beta_post(std::span<const StateId> start,
                                                   std::span<const InputId> alpha,
                                                   std::span<const OutputId> beta) const {
  if (beta.size() != alpha.size() + 1)
    throw DomainError("alpha_beta_post: need |beta| = |alpha| + 1");
  for (OutputId y : beta) check_output(y);
  std::vector<char> cur(nx_, 0);
  for (StateId x : start) {
    check_state(x);
    if (outmap_[x] == beta[0]) cur[x] = 1;
  }
  for (size_t i = 0; i < alpha.size(); ++i) {
    std::vector<char> nxt(nx_, 0);
    for (StateId x = 0; x < nx_; ++x) {
      if (!cur[x]) continue;
      for (StateId xp : post(x, alpha[i]))
        if (outmap_[xp] == beta[i + 1]) nxt[xp] = 1;
    }
    cur.swap(nxt);
  }
  std::vector<StateId> res;
  for (StateId x = 0; x < nx_; ++x)
    if (cur[x]) res.push_back(x);
  return res;
}

bool FiniteSystem::is_total() const {
  for (StateId x = 0; x < nx_; ++x)
    for (InputId u = 0; u < nu_; ++u)
      if (post(x, u).empty()) return false;
  return true;
}

bool FiniteSystem::is_deterministic() const {
  for (StateId x = 0; x < nx_; ++x)
    for (InputId u = 0; u < nu_; ++u)
      if (post(x, u).size() > 1) return false;
  return true;
}

std::span<const std::pair<StateId, InputId>> FiniteSystem::pre(StateId x) const {
  check_state(x);
  if (!pred_built_) {
    pred_off_.assign(nx_ + 1, 0);
    pred_.resize(succ_.size());
    for (StateId s = 0; s < nx_; ++s)
      for (InputId u = 0; u < nu_; ++u)
        for (StateId xp : post(s, u)) pred_off_[xp + 1]++;
    for (int i = 0; i < nx_; ++i) pred_off_[i + 1] += pred_off_[i];
    std::vector<long> cur(pred_off_.begin(), pred_off_.end() - 1);
    for (StateId s = 0; s < nx_; ++s)
      for (InputId u = 0; u < nu_; ++u)
        for (StateId xp : post(s, u)) pred_[cur[xp]++] = {s, u};
    pred_built_ = true;
  }
  return {pred_.data() + pred_off_[x], size_t(pred_off_[x + 1] - pred_off_[x])};
}

void FiniteSystem::write(std::ostream& os) const {
  os << "states " << nx_ << "\n";
  os << "inputs " << nu_ << "\n";
  os << "outputs " << ny_ << "\n";
  os << "initial";
  for (StateId x : initial_) os << ' ' << x;
  os << "\n";
  for (StateId x = 0; x < nx_; ++x) os << "outmap " << x << ' ' << outmap_[x] << "\n";
  for (StateId x = 0; x < nx_; ++x)
    for (InputId u = 0; u < nu_; ++u)
      for (StateId xp : post(x, u)) os << "t " << x << ' ' << u << ' ' << xp << "\n";
}

FiniteSystem FiniteSystem::read(std::istream& is) {
  std::string line, key;
  int nx = -1, nu = -1, ny = -1;
  FiniteSystem sys;
  bool made = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls >> key;
    auto fail = [&](const std::string& m) {
      throw ConfigError("model line " + std::to_string(lineno) + ": " + m);
    };
    if (key == "states") ls >> nx;
    else if (key == "inputs") ls >> nu;
    else if (key == "outputs") ls >> ny;
    else if (key == "initial") {
      if (nx <= 0 || nu <= 0 || ny <= 0) fail("header incomplete before initial");
      sys = FiniteSystem(nx, nu, ny);
      made = true;
      StateId x;
      while (ls >> x) sys.set_initial(x);
    } else if (key == "outmap") {
      if (!made) fail("outmap before initial");
      StateId x; OutputId y;
      if (!(ls >> x >> y)) fail("bad outmap");
      sys.set_output(x, y);
    } else if (key == "t") {
      if (!made) fail("transition before initial");
      StateId x, xp; InputId u;
      if (!(ls >> x >> u >> xp)) fail("bad transition");
      sys.add_transition(x, u, xp);
    } else fail("unknown key '" + key + "'");
  }
  if (!made) throw ConfigError("model file: missing header");
  sys.finalize();
  return sys;
}

std::optional<ComposabilityWitness> check_feedback_composable(
    const FiniteSystem& s1, const FiniteSystem& s2, const FeedbackEmbedding& emb) {
  if (int(emb.y1_to_u2.size()) != s1.num_outputs() ||
      int(emb.y2_to_u1.size()) != s2.num_outputs())
    throw ConfigError("feedback composition: alphabet embedding not declared for all outputs");
  for (StateId x1 = 0; x1 < s1.num_states(); ++x1)
    for (StateId x2 = 0; x2 < s2.num_states(); ++x2) {
      InputId u1 = emb.y2_to_u1[s2.output(x2)];
      InputId u2 = emb.y1_to_u2[s1.output(x1)];
      if (s1.post(x1, u1).empty() && !s2.post(x2, u2).empty())
        return ComposabilityWitness{x1, x2};
    }
  return std::nullopt;
}

namespace {

// Reachable product construction shared by both compositions.
template <class Trans, class Out>
ProductSystem product_reachable(const FiniteSystem& s1, const FiniteSystem& s2,
                                int num_inputs, int num_outputs, Trans&& step, Out&& out) {
  std::vector<std::pair<StateId, StateId>> pairs;
  std::vector<int> index(size_t(s1.num_states()) * s2.num_states(), -1);
  auto idx = [&](StateId a, StateId b) -> int& {
    return index[size_t(a) * s2.num_states() + b];
  };
  std::queue<std::pair<StateId, StateId>> bfs;
  for (StateId a : s1.initial_states())
    for (StateId b : s2.initial_states()) {
      idx(a, b) = int(pairs.size());
      pairs.emplace_back(a, b);
      bfs.emplace(a, b);
    }
  struct Edge { int src; InputId u; StateId a, b; };
  std::vector<Edge> edges;
  while (!bfs.empty()) {
    auto [a, b] = bfs.front();
    bfs.pop();
    int src = idx(a, b);
    step(a, b, [&](InputId u, StateId ap, StateId bp) {
      if (idx(ap, bp) < 0) {
        idx(ap, bp) = int(pairs.size());
        pairs.emplace_back(ap, bp);
        bfs.emplace(ap, bp);
      }
      edges.push_back({src, u, ap, bp});
    });
  }
  FiniteSystem sys(int(pairs.size()), num_inputs, num_outputs);
  for (size_t i = 0; i < pairs.size(); ++i) sys.set_output(StateId(i), out(pairs[i].first, pairs[i].second));
  for (StateId a : s1.initial_states())
    for (StateId b : s2.initial_states()) sys.set_initial(idx(a, b));
  for (const Edge& e : edges) sys.add_transition(e.src, e.u, idx(e.a, e.b));
  sys.finalize();
  return {std::move(sys), std::move(pairs)};
}

}  // namespace

ProductSystem feedback_compose(const FiniteSystem& s1, const FiniteSystem& s2,
                               const FeedbackEmbedding& emb) {
  if (auto w = check_feedback_composable(s1, s2, emb))
    throw DomainError("systems are not feedback-composable; blocking pair (" +
                      std::to_string(w->x1) + "," + std::to_string(w->x2) + ")");
  return product_reachable(
      s1, s2, 1, s1.num_outputs() * s2.num_outputs(),
      [&](StateId a, StateId b, auto&& emit) {
        InputId u1 = emb.y2_to_u1[s2.output(b)];
        InputId u2 = emb.y1_to_u2[s1.output(a)];
        for (StateId ap : s1.post(a, u1))
          for (StateId bp : s2.post(b, u2)) emit(0, ap, bp);
      },
      [&](StateId a, StateId b) { return s1.output(a) * s2.num_outputs() + s2.output(b); });
}

ProductSystem observation_compose(const FiniteSystem& s2, const FiniteSystem& s1) {
  if (s2.num_inputs() != s1.num_inputs() * s1.num_outputs())
    throw ConfigError("observation composition: S2 inputs must be (u1, y1) pairs");
  return product_reachable(
      s1, s2, s1.num_inputs(), s2.num_states(),
      [&](StateId a, StateId b, auto&& emit) {
        for (InputId u = 0; u < s1.num_inputs(); ++u) {
          InputId u2 = u * s1.num_outputs() + s1.output(a);
          for (StateId ap : s1.post(a, u))
            for (StateId bp : s2.post(b, u2)) emit(u, ap, bp);
        }
      },
      [&](StateId, StateId b) { return b; });
}

}  // namespace ofsc
