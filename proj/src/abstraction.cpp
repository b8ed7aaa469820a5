#include "ofsc/abstraction.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ofsc/linalg.hpp"

namespace ofsc {

Mat growth_exponential(const ContinuousSystem& sys, const GridQuantizer& grid, double tau) {
  Mat k = sys.jacobian_bound(grid.hull_lo(), grid.hull_hi());
  return expm(k * tau);
}

ReachBox reach_box(const ContinuousSystem& sys, const Vec& cell_lo, const Vec& cell_hi,
                   const Vec& u, double tau, int substeps, double epsilon,
                   AbstractionMode mode, const Mat& growth_exp) {
  Vec center = (cell_lo + cell_hi) / 2.0;
  Vec img = integrate_rk4(sys.vector_field, center, u, tau, substeps);
  Vec r0 = (cell_hi - cell_lo) / 2.0;
  Vec r;
  if (mode == AbstractionMode::growth) {
    r = growth_exp * (r0 + Vec::Constant(r0.size(), epsilon));
  } else {
    r = Vec::Zero(r0.size());
  }
  r = r.cwiseMax(epsilon);
  if (!r.allFinite()) throw NumericError("reach_box: non-finite radius");
  return {img - r, img + r};
}

SymbolicModel build_symbolic_model(const ContinuousSystem& sys, const GridQuantizer& state_grid,
                                   const std::vector<Vec>& inputs,
                                   const OutputRelationSpec& out_spec, double tau,
                                   double epsilon, AbstractionMode mode, int substeps) {
  if (!(tau > 0)) throw ConfigError("abstraction: tau must be positive");
  if (inputs.empty()) throw ConfigError("abstraction: empty input lattice");

  SymbolicModel m;
  m.state_grid = state_grid;
  m.inputs = inputs;
  m.output_rel = OutputRelation::build(state_grid, out_spec.coordinate, out_spec.eta,
                                       out_spec.lb, out_spec.ub);
  m.tau = tau;
  m.epsilon = epsilon;
  m.substeps = substeps;
  m.mode = mode;
  m.model_id = sys.id;
  m.model_params = sys.params;

  const long ncells = state_grid.num_cells();
  const int nin = int(inputs.size());
  const int dim = state_grid.dim();
  Mat gexp = growth_exponential(sys, state_grid, tau);
  Vec hull_lo = state_grid.hull_lo(), hull_hi = state_grid.hull_hi();
  const Vec& eta = state_grid.eta();

  FiniteSystem fs(int(ncells), nin, m.output_rel.num_symbols());
  for (long c = 0; c < ncells; ++c) {
    fs.set_output(StateId(c), m.output_rel.symbol_of_state_cell(state_grid, c));
    fs.set_initial(StateId(c));
  }

  std::vector<int> clo(dim), chi(dim), cc(dim);
  for (long c = 0; c < ncells; ++c) {
    auto [lo, hi] = state_grid.cell_box(c);
    for (int iu = 0; iu < nin; ++iu) {
      ReachBox box = reach_box(sys, lo, hi, inputs[iu], tau, substeps, epsilon, mode, gexp);
      bool inside = true;
      for (int d = 0; d < dim; ++d)
        if (box.lo[d] < hull_lo[d] - 1e-12 || box.hi[d] > hull_hi[d] + 1e-12) {
          inside = false;
          break;
        }
      if (!inside) continue;  // omit the input for this cell

      // cells intersecting the box, per dimension
      const auto& n = state_grid.cells_per_dim();
      const Vec& glb = state_grid.lower_bounds();
      for (int d = 0; d < dim; ++d) {
        if (state_grid.convention() == GridConvention::partition) {
          clo[d] = std::max(0, int(std::floor((box.lo[d] - glb[d]) / eta[d] - 1e-12)));
          chi[d] = std::min(n[d] - 1, int(std::floor((box.hi[d] - glb[d]) / eta[d] + 1e-12)));
        } else {
          clo[d] = std::max(0, int(std::ceil((box.lo[d] - glb[d]) / eta[d] - 0.5 - 1e-12)));
          chi[d] = std::min(n[d] - 1, int(std::floor((box.hi[d] - glb[d]) / eta[d] + 0.5 + 1e-12)));
        }
        if (clo[d] > chi[d]) { inside = false; break; }
      }
      if (!inside) continue;

      cc = clo;
      while (true) {
        fs.add_transition(StateId(c), InputId(iu), StateId(state_grid.index(cc)));
        int d = dim - 1;
        while (d >= 0) {
          if (++cc[d] <= chi[d]) break;
          cc[d] = clo[d];
          --d;
        }
        if (d < 0) break;
      }
      Vec img = (box.lo + box.hi) / 2.0;
      fs.set_margin(StateId(c), InputId(iu), state_grid.depth(img));
    }
  }
  fs.finalize();
  m.system = std::move(fs);
  return m;
}

ModelStats model_stats(const SymbolicModel& m) {
  ModelStats s;
  s.states = m.system.num_states();
  s.transitions = m.system.num_transitions();
  s.inputs = m.system.num_inputs();
  std::vector<char> used(m.output_rel.num_symbols(), 0);
  for (StateId x = 0; x < m.system.num_states(); ++x) used[m.system.output(x)] = 1;
  for (char u : used) s.outputs += u;
  return s;
}

namespace {

void write_vec(std::ostream& os, const char* key, const Vec& v) {
  os << key;
  os.precision(17);
  for (int i = 0; i < v.size(); ++i) os << ' ' << v[i];
  os << "\n";
}

Vec read_vec(std::istringstream& ls) {
  std::vector<double> v;
  double x;
  while (ls >> x) v.push_back(x);
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

}  // namespace

void write_meta(const SymbolicModel& m, std::ostream& os) {
  os.precision(17);
  os << "model " << m.model_id << "\n";
  for (const auto& [k, v] : m.model_params) os << "param " << k << ' ' << v << "\n";
  os << "convention "
     << (m.state_grid.convention() == GridConvention::partition ? "partition" : "centered")
     << "\n";
  write_vec(os, "state_lb", m.state_grid.lower_bounds());
  write_vec(os, "state_eta", m.state_grid.eta());
  os << "state_cells";
  for (int k : m.state_grid.cells_per_dim()) os << ' ' << k;
  os << "\n";
  for (const Vec& u : m.inputs) write_vec(os, "input", u);
  os << "tau " << m.tau << "\n";
  os << "epsilon " << m.epsilon << "\n";
  os << "substeps " << m.substeps << "\n";
  os << "mode " << (m.mode == AbstractionMode::growth ? "growth" : "nominal") << "\n";
  os << "output_coordinate " << m.output_rel.output_coordinate() << "\n";
  os << "output_eta " << m.output_rel.output_eta() << "\n";
  os << "output_lb " << m.output_rel.output_lb() << "\n";
  os << "output_ub " << m.output_rel.output_ub() << "\n";
  for (StateId x = 0; x < m.system.num_states(); ++x)
    for (InputId u = 0; u < m.system.num_inputs(); ++u)
      if (m.system.margin(x, u) != 0.0)
        os << "m " << x << ' ' << u << ' ' << m.system.margin(x, u) << "\n";
}

SymbolicModel read_model(std::istream& core, std::istream& meta) {
  SymbolicModel m;
  FiniteSystem fs = FiniteSystem::read(core);

  std::string line, key, convention = "partition", mode = "growth";
  Vec state_lb, state_eta;
  std::vector<int> state_cells;
  OutputRelationSpec ospec;
  std::vector<std::pair<std::pair<StateId, InputId>, double>> margins;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls >> key;
    if (key == "model") ls >> m.model_id;
    else if (key == "param") {
      std::string name; double v;
      ls >> name >> v;
      m.model_params[name] = v;
    } else if (key == "convention") ls >> convention;
    else if (key == "state_lb") state_lb = read_vec(ls);
    else if (key == "state_eta") state_eta = read_vec(ls);
    else if (key == "state_cells") {
      int k;
      while (ls >> k) state_cells.push_back(k);
    } else if (key == "input") m.inputs.push_back(read_vec(ls));
    else if (key == "tau") ls >> m.tau;
    else if (key == "epsilon") ls >> m.epsilon;
    else if (key == "substeps") ls >> m.substeps;
    else if (key == "mode") ls >> mode;
    else if (key == "output_coordinate") ls >> ospec.coordinate;
    else if (key == "output_eta") ls >> ospec.eta;
    else if (key == "output_lb") ls >> ospec.lb;
    else if (key == "output_ub") ls >> ospec.ub;
    else if (key == "m") {
      StateId x; InputId u; double v;
      ls >> x >> u >> v;
      margins.push_back({{x, u}, v});
    } else throw ConfigError("model meta: unknown key '" + key + "'");
  }
  if (state_lb.size() == 0 || state_eta.size() == 0 || state_cells.empty())
    throw ConfigError("model meta: missing grid");
  Vec ub(state_lb.size());
  for (int i = 0; i < state_lb.size(); ++i) {
    int n = state_cells[i];
    ub[i] = convention == "partition" ? state_lb[i] + n * state_eta[i]
                                      : state_lb[i] + (n - 1) * state_eta[i];
  }
  m.state_grid = convention == "partition" ? GridQuantizer::partition(state_lb, ub, state_eta)
                                           : GridQuantizer::centered(state_lb, ub, state_eta);
  m.mode = mode == "growth" ? AbstractionMode::growth : AbstractionMode::nominal;
  m.output_rel = OutputRelation::build(m.state_grid, ospec.coordinate, ospec.eta, ospec.lb,
                                       ospec.ub);
  for (auto& [xu, v] : margins) fs.set_margin(xu.first, xu.second, v);
  m.system = std::move(fs);
  return m;
}

}  // namespace ofsc
