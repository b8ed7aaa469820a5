#include "ofsc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ofsc/models.hpp"

namespace ofsc {

namespace {

struct RawValue {
  std::string text;
  int line;
  bool used = false;
};

struct RawConfig {
  std::map<std::string, RawValue> kv;
  std::string name;

  const RawValue* find(const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  ConfigError err(const std::string& key, const std::string& msg) {
    auto it = kv.find(key);
    std::string at = it == kv.end() ? "" : " (line " + std::to_string(it->second.line) + ")";
    return ConfigError(name + ": " + key + at + ": " + msg);
  }
};

RawConfig read_raw(std::istream& is, const std::string& name) {
  RawConfig raw;
  raw.name = name;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ConfigError(name + " line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(name + " line " + std::to_string(lineno) + ": empty key");
    if (raw.kv.count(key))
      throw ConfigError(name + " line " + std::to_string(lineno) + ": duplicate key " + key);
    raw.kv[key] = {val, lineno, false};
  }
  return raw;
}

double parse_double(RawConfig& raw, const std::string& key, const std::string& text) {
  try {
    size_t pos;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("");
    if (!std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw raw.err(key, "expected a finite number, got '" + text + "'");
  }
}

std::vector<double> parse_array(RawConfig& raw, const std::string& key, const std::string& text) {
  if (text.empty() || text.front() != '[' || text.back() != ']')
    throw raw.err(key, "expected [a, b, ...]");
  std::string body = text.substr(1, text.size() - 2);
  for (char& c : body)
    if (c == ',') c = ' ';
  std::istringstream ls(body);
  std::vector<double> out;
  std::string tok;
  while (ls >> tok) out.push_back(parse_double(raw, key, tok));
  return out;
}

// [[a,b],[c,d],...]
std::vector<std::pair<double, double>> parse_intervals(RawConfig& raw, const std::string& key,
                                                       const std::string& text) {
  std::vector<std::pair<double, double>> out;
  size_t i = 0;
  auto skip = [&] { while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i; };
  if (text.empty() || text.front() != '[' || text.back() != ']')
    throw raw.err(key, "expected [[lo,hi],...]");
  i = 1;
  skip();
  while (i < text.size() && text[i] == '[') {
    size_t close = text.find(']', i);
    if (close == std::string::npos) throw raw.err(key, "unbalanced brackets");
    auto vals = parse_array(raw, key, text.substr(i, close - i + 1));
    if (vals.size() != 2) throw raw.err(key, "each interval needs [lo, hi]");
    out.push_back({vals[0], vals[1]});
    i = close + 1;
    skip();
  }
  if (i != text.size() - 1 && !(i == text.size() - 1)) throw raw.err(key, "trailing content");
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

}  // namespace

CaseStudyConfig parse_config(std::istream& is, const std::string& name) {
  RawConfig raw = read_raw(is, name);
  CaseStudyConfig cfg;

  auto need = [&](const std::string& key) -> const RawValue& {
    const RawValue* v = raw.find(key);
    if (!v) throw ConfigError(name + ": missing required key " + key);
    return *v;
  };
  auto opt_str = [&](const std::string& key, std::string def) {
    const RawValue* v = raw.find(key);
    return v ? v->text : def;
  };
  auto opt_num = [&](const std::string& key, double def) {
    const RawValue* v = raw.find(key);
    return v ? parse_double(raw, key, v->text) : def;
  };
  auto need_vec = [&](const std::string& key) { return to_vec(parse_array(raw, key, need(key).text)); };

  cfg.model_id = need("model.id").text;
  for (auto& [key, val] : raw.kv)
    if (key.rfind("param.", 0) == 0) {
      cfg.model_params[key.substr(6)] = parse_double(raw, key, val.text);
      val.used = true;
    }

  cfg.state_lb = need_vec("state.lb");
  cfg.state_ub = need_vec("state.ub");
  cfg.state_eta = need_vec("state.eta");
  std::string conv = opt_str("state.convention", "partition");
  if (conv == "partition") cfg.convention = GridConvention::partition;
  else if (conv == "centered") cfg.convention = GridConvention::centered;
  else throw raw.err("state.convention", "expected partition|centered");

  cfg.input_lb = need_vec("input.lb");
  cfg.input_ub = need_vec("input.ub");
  cfg.input_eta = need_vec("input.eta");
  cfg.tau = parse_double(raw, "time.tau", need("time.tau").text);

  std::string mode = opt_str("abstraction.mode", "growth");
  if (mode == "growth") cfg.mode = AbstractionMode::growth;
  else if (mode == "nominal") cfg.mode = AbstractionMode::nominal;
  else throw raw.err("abstraction.mode", "expected growth|nominal");
  cfg.epsilon = opt_num("abstraction.epsilon", 0.0);
  cfg.substeps = int(opt_num("abstraction.substeps", 5));

  cfg.output_coordinate = int(opt_num("output.coordinate", 0));
  if (cfg.output_coordinate < 0 || cfg.output_coordinate >= cfg.state_lb.size())
    throw raw.err("output.coordinate", "outside state dimensions");
  cfg.output_eta = parse_double(raw, "output.eta", need("output.eta").text);
  cfg.output_lb = opt_num("output.lb", cfg.state_lb[cfg.output_coordinate]);
  cfg.output_ub = opt_num("output.ub", cfg.state_ub[cfg.output_coordinate]);

  std::string kind = opt_str("spec.kind", "safe");
  if (kind == "safe") cfg.spec_kind = Spec::Kind::Safe;
  else if (kind == "reach") cfg.spec_kind = Spec::Kind::Reach;
  else if (kind == "safe_bounded") cfg.spec_kind = Spec::Kind::SafeBounded;
  else if (kind == "reach_bounded") cfg.spec_kind = Spec::Kind::ReachBounded;
  else if (kind == "recurrence_hold") cfg.spec_kind = Spec::Kind::RecurrenceHold;
  else throw raw.err("spec.kind", "unknown specification kind");
  if (const RawValue* v = raw.find("spec.targets"))
    cfg.target_intervals = parse_intervals(raw, "spec.targets", v->text);
  cfg.hold = int(opt_num("spec.hold", 1));
  if (const RawValue* v = raw.find("spec.horizon")) {
    auto w = parse_array(raw, "spec.horizon", v->text);
    if (w.size() != 2) throw raw.err("spec.horizon", "expected [a, b]");
    cfg.window_from = int(w[0]);
    cfg.window_to = int(w[1]);
  }
  std::string snap = opt_str("spec.snap", "inner");
  if (snap == "inner") cfg.snap = Snap::inner;
  else if (snap == "outer") cfg.snap = Snap::outer;
  else throw raw.err("spec.snap", "expected inner|outer");
  std::string mon = opt_str("spec.monitor", "symbol");
  if (mon == "symbol") cfg.monitor = MonitorLevel::symbol;
  else if (mon == "concrete") cfg.monitor = MonitorLevel::concrete;
  else throw raw.err("spec.monitor", "expected symbol|concrete");
  cfg.min_cycles = int(opt_num("spec.min_cycles", 3));

  std::string method = opt_str("method", "direct");
  if (method == "direct") cfg.method = Method::direct;
  else if (method == "knowledge") cfg.method = Method::knowledge;
  else if (method == "observer") cfg.method = Method::observer;
  else if (method == "detector") cfg.method = Method::detector;
  else throw raw.err("method", "expected direct|knowledge|observer|detector");

  if (const RawValue* v = raw.find("observer.poles")) {
    auto p = parse_array(raw, "observer.poles", v->text);
    cfg.observer_poles.assign(p.begin(), p.end());
  }
  cfg.observer_epsilon = opt_num("observer.epsilon", 0.0);
  cfg.game_cap = size_t(opt_num("game.cap", 2000000));

  if (const RawValue* v = raw.find("simulation.x0"))
    cfg.sim_x0 = to_vec(parse_array(raw, "simulation.x0", v->text));
  if (const RawValue* v = raw.find("simulation.xhat0"))
    cfg.sim_xhat0 = to_vec(parse_array(raw, "simulation.xhat0", v->text));
  cfg.sim_steps = int(opt_num("simulation.steps", 100));
  cfg.sim_seed = uint64_t(opt_num("simulation.seed", 1));

  for (const auto& [key, val] : raw.kv)
    if (!val.used)
      throw ConfigError(name + " line " + std::to_string(val.line) + ": unknown key " + key);

  if (cfg.state_lb.size() != cfg.state_ub.size() || cfg.state_lb.size() != cfg.state_eta.size())
    throw ConfigError(name + ": state box dimensions disagree");
  if (cfg.method == Method::observer && cfg.observer_epsilon <= 0)
    throw ConfigError(name + ": observer.epsilon must be positive for the observer method");
  return cfg;
}

CaseStudyConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  return parse_config(f, path);
}

GridQuantizer CaseStudyConfig::make_state_grid() const {
  return convention == GridConvention::partition
             ? GridQuantizer::partition(state_lb, state_ub, state_eta)
             : GridQuantizer::centered(state_lb, state_ub, state_eta);
}

std::vector<Vec> CaseStudyConfig::make_inputs() const {
  return input_lattice(input_lb, input_ub, input_eta);
}

OutputRelationSpec CaseStudyConfig::output_spec() const {
  return {output_coordinate, output_eta, output_lb, output_ub};
}

SymbolicModel build_from_config(const CaseStudyConfig& cfg) {
  ContinuousSystem sys = make_continuous_system(cfg.model_id, cfg.model_params);
  if (sys.state_dim != int(cfg.state_lb.size()))
    throw ConfigError("state box dimension does not match model " + cfg.model_id);
  if (sys.output_coordinate != cfg.output_coordinate)
    throw ConfigError("output.coordinate does not match the sensor of model " + cfg.model_id);
  return build_symbolic_model(sys, cfg.make_state_grid(), cfg.make_inputs(), cfg.output_spec(),
                              cfg.tau, cfg.epsilon, cfg.mode, cfg.substeps);
}

}  // namespace ofsc
