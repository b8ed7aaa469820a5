// Command-line front end: abstract, synthesize, detect-check, simulate, check.
// Exit codes: 0 success, 2 no controller / not found, 3 validation error,
// 4 runtime refusal.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "ofsc/harness.hpp"

using namespace ofsc;

namespace {

SymbolicModel load_model_files(const std::string& path) {
  std::ifstream core(path), meta(path + ".meta");
  if (!core) throw ConfigError("cannot open model file " + path);
  if (!meta) throw ConfigError("cannot open model sidecar " + path + ".meta");
  return read_model(core, meta);
}

void save_model_files(const SymbolicModel& model, const std::string& path) {
  std::ofstream core(path), meta(path + ".meta");
  model.system.write(core);
  write_meta(model, meta);
  if (!core || !meta) throw std::runtime_error("failed writing " + path);
}

int cmd_abstract(const std::string& config_path, const std::string& out) {
  auto cfg = load_config(config_path);
  auto t0 = std::chrono::steady_clock::now();
  SymbolicModel model = build_from_config(cfg);
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_model_files(model, out);
  ModelStats st = model_stats(model);
  std::cout << "states " << st.states << "\ntransitions " << st.transitions << "\ninputs "
            << st.inputs << "\noutputs " << st.outputs << "\nbuild_seconds " << dt << "\n";
  return 0;
}

int cmd_synthesize(const std::string& model_path, const std::string& config_path,
                   const std::string& method, const std::string& out) {
  auto cfg = load_config(config_path);
  if (!method.empty()) {
    if (method == "direct") cfg.method = Method::direct;
    else if (method == "knowledge") cfg.method = Method::knowledge;
    else if (method == "observer") cfg.method = Method::observer;
    else if (method == "detector") cfg.method = Method::detector;
    else throw ConfigError("unknown method " + method);
  }
  SymbolicModel model = model_path.empty() ? build_from_config(cfg) : load_model_files(model_path);
  SynthesisResult syn = synthesize(cfg, model);
  {
    std::ofstream f(out);
    syn.controller.write(f);
  }
  if (syn.game) {
    std::ofstream g(out + ".game"), k(out + ".kmap");
    syn.game->game.write(g);
    for (size_t i = 0; i < syn.game->knowledge.size(); ++i) {
      k << "k " << i << ' ';
      char buf[17];
      const auto& words = syn.game->knowledge[i].words();
      for (size_t w = words.size(); w-- > 0;) {
        snprintf(buf, sizeof buf, "%016llx", (unsigned long long)words[w]);
        k << buf;
      }
      k << "\n";
    }
  }
  std::cout << "domain_size " << syn.controller.domain.size() << "\nmemory "
            << syn.controller.num_memory << "\n";
  return 0;
}

int cmd_detect_check(const std::string& model_path, const std::string& nfa_out) {
  SymbolicModel model = load_model_files(model_path);
  DetectorNfa nfa = build_detector_nfa(model.system);
  compute_limit_points(nfa);
  int tt = transient_period(nfa);
  auto res = is_detectable(nfa);
  std::cout << "nfa_states " << nfa.num_states() << "\nnfa_transitions " << nfa.edges.size()
            << "\ndetectable " << (res.detectable ? "true" : "false") << "\nTt " << tt << "\n";
  if (!res.detectable) {
    auto [a, b] = nfa.members[res.witness_state];
    std::cout << "witness {" << a << "," << b << "} lasso_length " << res.lasso.size() << "\n";
  }
  if (!nfa_out.empty()) {
    std::ofstream f(nfa_out);
    write_nfa(nfa, f);
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& controller_path,
                 const std::string& out) {
  auto cfg = load_config(config_path);
  SymbolicModel model = build_from_config(cfg);
  SynthesisResult syn;
  if (controller_path.empty()) {
    syn = synthesize(cfg, model);
  } else {
    std::ifstream f(controller_path);
    if (!f) throw ConfigError("cannot open controller " + controller_path);
    syn.controller = Controller::read(f);
    syn.spec = make_spec(cfg, model);
    if (cfg.method == Method::knowledge) {
      // the game is rebuilt deterministically from the model
      Bitset all(model.system.num_states());
      for (StateId x = 0; x < model.system.num_states(); ++x) all.set(x);
      syn.game = build_knowledge_game(model.system, all, cfg.game_cap);
    }
  }
  auto trace = simulate_closed_loop(cfg, model, syn);
  {
    std::ofstream f(out);
    emit_csv(trace, f);
  }
  bool refused = !trace.empty() && trace.back().mode == "refusal";
  auto verdict = monitor_spec(trace, syn.spec, cfg);
  std::cout << "steps " << trace.size() << "\nverdict " << (verdict.pass ? "pass" : "fail")
            << "\n";
  if (refused) return 4;
  return 0;
}

int cmd_check(const std::string& trace_path, const std::string& config_path) {
  auto cfg = load_config(config_path);
  SymbolicModel model = build_from_config(cfg);
  Spec spec = make_spec(cfg, model);
  std::ifstream f(trace_path);
  if (!f) throw ConfigError("cannot open trace " + trace_path);
  auto trace = read_csv(f);
  auto verdict = monitor_spec(trace, spec, cfg);
  std::cout << "verdict " << (verdict.pass ? "pass" : "fail") << "\nfirst_violation "
            << verdict.first_violation << "\ncycles " << verdict.cycles << "\n";
  return verdict.pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic controller synthesis for sampled output-based control systems"};
  app.require_subcommand(1);

  std::string config, model, out, method, trace, nfa_out, controller;

  auto* a = app.add_subcommand("abstract", "build a symbolic model from a config");
  a->add_option("--config", config)->required();
  a->add_option("--out", out)->required();

  auto* s = app.add_subcommand("synthesize", "synthesize a controller");
  s->add_option("--model", model);
  s->add_option("--config", config)->required();
  s->add_option("--method", method);
  s->add_option("--out", out)->required();

  auto* d = app.add_subcommand("detect-check", "detectability verdict and transient period");
  d->add_option("--model", model)->required();
  d->add_option("--export-nfa", nfa_out);

  auto* sim = app.add_subcommand("simulate", "closed-loop simulation");
  sim->add_option("--config", config)->required();
  sim->add_option("--controller", controller);
  sim->add_option("--out", out)->required();

  auto* c = app.add_subcommand("check", "monitor a trace against the configured spec");
  c->add_option("--trace", trace)->required();
  c->add_option("--config", config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (a->parsed()) return cmd_abstract(config, out);
    if (s->parsed()) return cmd_synthesize(model, config, method, out);
    if (d->parsed()) return cmd_detect_check(model, nfa_out);
    if (sim->parsed()) return cmd_simulate(config, controller, out);
    if (c->parsed()) return cmd_check(trace, config);
  } catch (const NoControllerError& e) {
    std::cerr << "no controller: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 3;
  } catch (const RefusalError& e) {
    std::cerr << "runtime refusal: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
