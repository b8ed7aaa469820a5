#include "ofsc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ofsc/models.hpp"

namespace ofsc {

std::vector<std::vector<OutputId>> snap_targets(const CaseStudyConfig& cfg,
                                                const SymbolicModel& model) {
  std::vector<std::vector<OutputId>> out;
  for (auto [lo, hi] : cfg.target_intervals) {
    auto symbols = model.output_rel.snap_interval(lo, hi, cfg.snap);
    if (symbols.empty())
      throw ConfigError("target [" + std::to_string(lo) + "," + std::to_string(hi) +
                        "] does not align with any output symbol under the configured snap");
    out.push_back(std::move(symbols));
  }
  return out;
}

Spec make_spec(const CaseStudyConfig& cfg, const SymbolicModel& model) {
  Spec s;
  s.kind = cfg.spec_kind;
  s.targets = snap_targets(cfg, model);
  if (s.targets.empty()) throw ConfigError("spec.targets is required");
  s.hold = cfg.hold;
  s.from = cfg.window_from;
  s.to = cfg.window_to;
  return s;
}

namespace {

// Symbol target sets lifted to state ids of the (state-observed) model.
std::vector<std::vector<OutputId>> targets_as_states(const SymbolicModel& model,
                                                     const std::vector<std::vector<OutputId>>& t) {
  std::vector<std::vector<OutputId>> out;
  for (const auto& set : t) {
    std::vector<OutputId> states;
    for (OutputId y : set)
      for (StateId x : model.system.output_preimage(y)) states.push_back(x);
    std::sort(states.begin(), states.end());
    out.push_back(std::move(states));
  }
  return out;
}

Controller solve_on(const FiniteSystem& fs, Spec spec) {
  switch (spec.kind) {
    case Spec::Kind::Safe: return solve_safety(fs, spec.targets.at(0));
    case Spec::Kind::Reach: return solve_reach(fs, spec.targets.at(0));
    case Spec::Kind::SafeBounded:
    case Spec::Kind::ReachBounded: return solve_bounded(fs, spec);
    case Spec::Kind::RecurrenceHold:
      return solve_recurrence_hold(fs, spec.targets, spec.hold);
  }
  throw DomainError("unknown spec kind");
}

std::vector<InputId> inputs_by_magnitude(const SymbolicModel& model) {
  std::vector<InputId> order(model.inputs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = InputId(i);
  std::stable_sort(order.begin(), order.end(), [&](InputId a, InputId b) {
    double va = model.inputs[a].lpNorm<Eigen::Infinity>();
    double vb = model.inputs[b].lpNorm<Eigen::Infinity>();
    if (va != vb) return va < vb;
    return model.inputs[a][0] < model.inputs[b][0];
  });
  return order;
}

}  // namespace

SynthesisResult synthesize(const CaseStudyConfig& cfg, const SymbolicModel& model) {
  SynthesisResult res;
  res.spec = make_spec(cfg, model);

  switch (cfg.method) {
    case Method::direct: {
      Spec state_spec = res.spec;
      state_spec.targets = targets_as_states(model, res.spec.targets);
      Controller c = solve_on(model.system, state_spec);
      res.controller = rekey_by_output(c, model.system);
      res.controller.domain = c.domain;
      break;
    }
    case Method::observer:
    case Method::detector: {
      Spec state_spec = res.spec;
      state_spec.targets = targets_as_states(model, res.spec.targets);
      res.controller = solve_on(model.system, state_spec);
      break;
    }
    case Method::knowledge: {
      if (res.spec.kind != Spec::Kind::Safe && res.spec.kind != Spec::Kind::Reach)
        throw ConfigError("knowledge method supports safe and reach specifications");
      Bitset all(model.system.num_states());
      for (StateId x = 0; x < model.system.num_states(); ++x) all.set(x);
      KnowledgeGame game = build_knowledge_game(model.system, all, cfg.game_cap);
      auto lifted = lift_spec(game, model.system, res.spec.targets.at(0));
      if (lifted.empty())
        throw NoControllerError("knowledge game: lifted target is empty");
      Spec gspec;
      gspec.kind = res.spec.kind;
      gspec.targets = {lifted};
      res.controller = solve_on(game.game, gspec);
      res.game = std::move(game);
      break;
    }
  }
  return res;
}

namespace {

struct PlantStepper {
  ContinuousSystem sys;
  double tau;
  int substeps;
  Vec step(const Vec& x, const Vec& u) const {
    return integrate_rk4(sys.vector_field, x, u, tau, substeps);
  }
};

}  // namespace

std::vector<TraceRecord> simulate_closed_loop(const CaseStudyConfig& cfg,
                                              const SymbolicModel& model,
                                              const SynthesisResult& syn) {
  if (cfg.sim_x0.size() == 0) throw ConfigError("simulation.x0 is required");
  PlantStepper plant{make_continuous_system(cfg.model_id, cfg.model_params), cfg.tau,
                     cfg.substeps};
  const auto input_order = inputs_by_magnitude(model);
  std::vector<TraceRecord> trace;
  trace.reserve(cfg.sim_steps);

  // method-specific runtimes
  std::optional<DetectorRuntime> det;
  std::optional<CmController> cm;
  std::vector<InputId> prefix;
  std::optional<GameController> gamectl;
  std::optional<LinearPlant> lin;
  std::optional<ObserverSpec> obs;
  Vec xhat_prior;
  InputId blind_input = -1;
  int direct_memory = syn.controller.init_memory;
  int state_memory = syn.controller.init_memory;

  if (cfg.method == Method::detector) {
    det.emplace(model.system);
    cm.emplace(syn.controller);
    DetectorNfa nfa = build_detector_nfa(model.system);
    compute_limit_points(nfa);
    int tt = transient_period(nfa);
    auto word = search_prefix(model.system, tt, syn.controller.domain, PrefixMode::Safe,
                              input_order);
    if (!word)
      throw NoControllerError("no open-loop prefix keeps the transient period in the domain");
    prefix = *word;
  } else if (cfg.method == Method::knowledge) {
    gamectl.emplace(model.system, *syn.game, syn.controller);
  } else if (cfg.method == Method::observer) {
    ContinuousSystem sys = make_continuous_system(cfg.model_id, cfg.model_params);
    if (!sys.linear) throw ConfigError("observer method needs an LTI model");
    lin = make_linear_plant(sys.linear->first, sys.linear->second, cfg.output_coordinate, cfg.tau);
    std::vector<double> poles = cfg.observer_poles;
    if (poles.empty()) poles.assign(sys.state_dim, sys.state_dim <= 2 ? 0.0 : 0.1);
    obs = design_luenberger(*lin, poles, cfg.observer_epsilon);
    std::vector<InputId> candidates(model.inputs.size());
    for (size_t i = 0; i < candidates.size(); ++i) candidates[i] = InputId(i);
    auto plan = blind_period_plan(model, syn.controller.domain, candidates);
    if (!plan)
      throw NoControllerError("no blind-period input keeps any cell in the controller domain");
    blind_input = plan->u_p;
    xhat_prior = cfg.sim_xhat0.size() ? cfg.sim_xhat0 : Vec::Zero(sys.state_dim);
  }

  Vec x = cfg.sim_x0;
  InputId last_u = -1;
  for (int step = 0; step < cfg.sim_steps; ++step) {
    TraceRecord rec;
    rec.step = step;
    rec.time = step * cfg.tau;
    rec.x = x;
    rec.y = x[cfg.output_coordinate];
    auto yq = model.output_rel.z(rec.y);
    if (!yq) {
      rec.mode = "refusal";
      rec.u = Vec::Zero(model.inputs.at(0).size());
      trace.push_back(rec);
      break;
    }
    rec.yq = *yq;

    InputId u = -1;
    try {
      switch (cfg.method) {
        case Method::direct: {
          u = syn.controller.decide(direct_memory, rec.yq);
          if (u < 0) throw RefusalError("observation outside the controller domain");
          direct_memory = syn.controller.next_memory(direct_memory, rec.yq);
          rec.mode = "active";
          break;
        }
        case Method::knowledge: {
          u = gamectl->step(rec.yq);
          rec.mode = "active";
          rec.aux = gamectl->knowledge_size();
          break;
        }
        case Method::detector: {
          StateId est = det->step(step == 0 ? -1 : last_u, rec.yq);
          rec.aux = det->knowledge_size();
          if (est < 0) {
            if (size_t(step) < prefix.size()) {
              u = prefix[step];
              rec.mode = "prefix";
            } else {
              u = last_u >= 0 ? last_u : input_order.at(0);
              rec.mode = "kappa";
            }
          } else {
            u = cm->step(est);
            rec.mode = "active";
            if (u < 0) throw RefusalError("detected state outside the controller domain");
          }
          break;
        }
        case Method::observer: {
          Vec xhat = measurement_update(*obs, *lin, xhat_prior, rec.y);
          rec.aux = (xhat - x).lpNorm<Eigen::Infinity>();
          if (step == 0) {
            u = blind_input;
            rec.mode = "prefix";
          } else {
            auto cell = model.state_grid.quantize(xhat);
            if (!cell) throw RefusalError("state estimate left the abstraction domain");
            StateId est = model.cell_to_state(*cell);
            u = syn.controller.decide(state_memory, est);
            if (u < 0) throw RefusalError("estimated state outside the controller domain");
            state_memory = syn.controller.next_memory(state_memory, est);
            rec.mode = "active";
          }
          xhat_prior = lin->ad * xhat + lin->bd * model.inputs.at(u);
          break;
        }
      }
    } catch (const RefusalError&) {
      rec.mode = "refusal";
      rec.u = Vec::Zero(model.inputs.at(0).size());
      trace.push_back(rec);
      break;
    }

    rec.u = model.inputs.at(u);
    rec.uq = u;
    trace.push_back(rec);
    last_u = u;
    x = plant.step(x, model.inputs.at(u));
  }
  return trace;
}

MonitorVerdict monitor_spec(const std::vector<TraceRecord>& trace, const Spec& spec,
                            const CaseStudyConfig& cfg) {
  if (trace.empty()) throw DomainError("monitor_spec: empty trace");
  MonitorVerdict v;
  auto in_target = [&](const TraceRecord& r, size_t which) {
    if (cfg.monitor == MonitorLevel::concrete) {
      auto [lo, hi] = cfg.target_intervals.at(which);
      return r.y >= lo && r.y <= hi;
    }
    const auto& set = spec.targets.at(which);
    return std::binary_search(set.begin(), set.end(), r.yq);
  };

  switch (spec.kind) {
    case Spec::Kind::Safe:
      for (size_t i = 0; i < trace.size(); ++i)
        if (!in_target(trace[i], 0)) {
          v.first_violation = i;
          return v;
        }
      v.pass = true;
      return v;
    case Spec::Kind::Reach:
      for (size_t i = 0; i < trace.size(); ++i)
        if (in_target(trace[i], 0)) {
          v.pass = true;
          return v;
        }
      v.first_violation = trace.size();
      return v;
    case Spec::Kind::SafeBounded:
      for (size_t i = size_t(spec.from); i <= size_t(spec.to) && i < trace.size(); ++i)
        if (!in_target(trace[i], 0)) {
          v.first_violation = i;
          return v;
        }
      v.pass = true;
      return v;
    case Spec::Kind::ReachBounded:
      for (size_t i = size_t(spec.from); i <= size_t(spec.to) && i < trace.size(); ++i)
        if (in_target(trace[i], 0)) {
          v.pass = true;
          return v;
        }
      v.first_violation = trace.size();
      return v;
    case Spec::Kind::RecurrenceHold: {
      size_t expect = 0;
      int run = 0;
      int completed = 0;
      for (size_t i = 0; i < trace.size(); ++i) {
        if (in_target(trace[i], expect)) {
          if (++run >= spec.hold) {
            expect = (expect + 1) % spec.targets.size();
            run = 0;
            ++completed;
          }
        } else {
          run = 0;
        }
      }
      v.cycles = completed / int(spec.targets.size());
      v.pass = v.cycles >= cfg.min_cycles;
      if (!v.pass) v.first_violation = trace.size();
      return v;
    }
  }
  throw DomainError("monitor_spec: unknown kind");
}

void emit_csv(const std::vector<TraceRecord>& trace, std::ostream& os) {
  int n = trace.empty() ? 0 : int(trace[0].x.size());
  int m = trace.empty() ? 0 : int(trace[0].u.size());
  os << "step,time";
  for (int i = 0; i < std::max(n, 1); ++i) os << ",x" << i + 1;
  os << ",y,yq";
  for (int i = 0; i < std::max(m, 1); ++i) os << ",u" << (m > 1 ? std::to_string(i + 1) : "");
  os << ",mode,aux\n";
  os.precision(12);
  for (const auto& r : trace) {
    os << r.step << ',' << r.time;
    for (int i = 0; i < int(r.x.size()); ++i) os << ',' << r.x[i];
    os << ',' << r.y << ',' << r.yq;
    for (int i = 0; i < int(r.u.size()); ++i) os << ',' << r.u[i];
    os << ',' << r.mode << ',' << r.aux << "\n";
  }
}

std::vector<TraceRecord> read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("trace: empty file");
  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  int nx = 0, nu = 0;
  for (const auto& c : cols) {
    if (c.size() >= 2 && c[0] == 'x' && isdigit(c[1])) ++nx;
    if (c[0] == 'u' && (c.size() == 1 || isdigit(c[1]))) ++nu;
  }
  std::vector<TraceRecord> trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    auto next = [&]() {
      if (!std::getline(ls, tok, ',')) throw ConfigError("trace: short row");
      return tok;
    };
    TraceRecord r;
    r.step = std::stoi(next());
    r.time = std::stod(next());
    r.x.resize(nx);
    for (int i = 0; i < nx; ++i) r.x[i] = std::stod(next());
    r.y = std::stod(next());
    r.yq = std::stoi(next());
    r.u.resize(nu);
    for (int i = 0; i < nu; ++i) r.u[i] = std::stod(next());
    r.mode = next();
    r.aux = std::stod(next());
    trace.push_back(std::move(r));
  }
  return trace;
}

std::optional<size_t> trace_inclusion_breakpoint(const SymbolicModel& model,
                                                 const std::vector<TraceRecord>& trace) {
  if (trace.empty()) return std::nullopt;
  Bitset k(model.system.num_states());
  for (StateId x : model.system.output_preimage(trace[0].yq)) k.set(x);
  if (k.empty()) return 0;
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    if (trace[i].uq < 0) return std::nullopt;  // refusal tail
    k = knowledge_update(model.system, k, trace[i].uq, trace[i + 1].yq);
    if (k.empty()) return i + 1;
  }
  return std::nullopt;
}

}  // namespace ofsc
