#include "ofsc/knowledge.hpp"

#include <deque>
#include <unordered_map>

namespace ofsc {

Bitset knowledge_update(const FiniteSystem& m, const Bitset& s, InputId u, OutputId y) {
  Bitset post(m.num_states());
  s.for_each([&](int x) {
    for (StateId xp : m.post(StateId(x), u)) post.set(xp);
  });
  Bitset mask(m.num_states());
  for (StateId x : m.output_preimage(y)) mask.set(x);
  post &= mask;
  return post;
}

KnowledgeGame build_knowledge_game(const FiniteSystem& model, const Bitset& s0, size_t cap) {
  if (s0.empty()) throw DomainError("build_knowledge_game: empty initial knowledge");
  const int nu = model.num_inputs();
  const int ny = model.num_outputs();

  std::unordered_map<Bitset, int, Bitset::Hash> index;
  std::vector<Bitset> states;
  std::deque<int> frontier;
  auto intern = [&](const Bitset& b) {
    auto it = index.find(b);
    if (it != index.end()) return it->second;
    int id = int(states.size());
    if (states.size() >= cap)
      throw ResourceError(
          "knowledge-state cap exceeded; coarsen the grids or raise game.cap");
    index.emplace(b, id);
    states.push_back(b);
    frontier.push_back(id);
    return id;
  };

  std::vector<Bitset> colmask(ny, Bitset(model.num_states()));
  for (OutputId y = 0; y < ny; ++y)
    for (StateId x : model.output_preimage(y)) colmask[y].set(x);

  // initial refinements of s0 by the first observation
  std::vector<int> seeds(ny, -1);
  for (OutputId y = 0; y < ny; ++y) {
    Bitset b = s0;
    b &= colmask[y];
    if (!b.empty()) seeds[y] = intern(b);
  }

  struct Edge { int src; InputId u; int dst; };
  std::vector<Edge> edges;
  while (!frontier.empty()) {
    int id = frontier.front();
    frontier.pop_front();
    Bitset cur = states[id];  // copy; `states` may grow
    for (InputId u = 0; u < nu; ++u) {
      Bitset post(model.num_states());
      cur.for_each([&](int x) {
        for (StateId xp : model.post(StateId(x), u)) post.set(xp);
      });
      if (post.empty()) continue;
      for (OutputId y = 0; y < ny; ++y) {
        Bitset nxt = post;
        nxt &= colmask[y];
        if (nxt.empty()) continue;
        edges.push_back({id, u, intern(nxt)});
      }
    }
  }

  KnowledgeGame g;
  g.knowledge = std::move(states);
  g.seed_of_output = std::move(seeds);
  FiniteSystem fs(int(g.knowledge.size()), nu, int(g.knowledge.size()));
  for (int i = 0; i < int(g.knowledge.size()); ++i) fs.set_output(i, i);
  for (int y = 0; y < ny; ++y)
    if (g.seed_of_output[y] >= 0) fs.set_initial(g.seed_of_output[y]);
  for (const Edge& e : edges) fs.add_transition(e.src, e.u, e.dst);
  fs.finalize();
  g.game = std::move(fs);
  return g;
}

std::vector<OutputId> lift_spec(const KnowledgeGame& g, const FiniteSystem& model,
                                const std::vector<OutputId>& outputs) {
  std::vector<char> inset(model.num_outputs(), 0);
  for (OutputId y : outputs) inset[y] = 1;
  std::vector<OutputId> lifted;
  for (int i = 0; i < int(g.knowledge.size()); ++i) {
    bool all = true;
    g.knowledge[i].for_each([&](int x) {
      if (!inset[model.output(StateId(x))]) all = false;
    });
    if (all) lifted.push_back(i);
  }
  return lifted;
}

GameController::GameController(const FiniteSystem& model, const KnowledgeGame& game,
                               Controller strategy)
    : model_(model), game_(game), strategy_(std::move(strategy)), knowledge_(model.num_states()) {
  for (int i = 0; i < int(game_.knowledge.size()); ++i) index_.emplace(game_.knowledge[i], i);
}

void GameController::reset() {
  started_ = false;
  last_input_ = -1;
  reseeds_ = 0;
}

InputId GameController::step(OutputId y) {
  Bitset seed(model_.num_states());
  for (StateId x : model_.output_preimage(y)) seed.set(x);
  if (!started_) {
    knowledge_ = seed;
    started_ = true;
  } else {
    knowledge_ = knowledge_update(model_, knowledge_, last_input_, y);
    if (knowledge_.empty()) {
      knowledge_ = seed;
      ++reseeds_;
    }
  }
  if (knowledge_.empty()) throw RefusalError("observation has no consistent model state");

  auto lookup = index_.find(knowledge_);
  if (lookup == index_.end()) throw RefusalError("knowledge left the constructed game");
  int id = lookup->second;
  InputId u = strategy_.decide(0, id);
  if (u < 0) throw RefusalError("knowledge state outside the strategy domain");
  last_input_ = u;
  return u;
}

}  // namespace ofsc
